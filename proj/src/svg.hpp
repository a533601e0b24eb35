#pragma once

// Minimal SVG emitter with fixed number formatting so outputs are
// byte-identical across runs.

#include <string>
#include <vector>

#include "heun/poly.hpp"

namespace heun {

class SvgCanvas {
 public:
  // world-coordinate bounding box, mapped into a width x width viewport
  SvgCanvas(double x0, double y0, double x1, double y1, int width = 640);

  void polyline(const std::vector<cplx>& pts, const std::string& stroke, double stroke_width,
                double opacity = 1.0);
  void circle(cplx center, double radius_px, const std::string& fill);
  void text(cplx pos, const std::string& s, int font_px = 12);

  std::string str() const;

 private:
  double map_x(double x) const;
  double map_y(double y) const;

  double x0_, y0_, x1_, y1_;
  int width_, height_;
  double scale_;
  std::string body_;
};

}  // namespace heun
