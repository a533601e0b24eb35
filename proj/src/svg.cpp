#include "svg.hpp"

#include <cstdio>

namespace heun {

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}
}  // namespace

SvgCanvas::SvgCanvas(double x0, double y0, double x1, double y1, int width)
    : x0_(x0), y0_(y0), x1_(x1), y1_(y1), width_(width) {
  const double margin = 0.05 * std::max(x1 - x0, y1 - y0);
  x0_ -= margin;
  y0_ -= margin;
  x1_ += margin;
  y1_ += margin;
  scale_ = width_ / (x1_ - x0_);
  height_ = static_cast<int>((y1_ - y0_) * scale_) + 1;
}

double SvgCanvas::map_x(double x) const { return (x - x0_) * scale_; }
double SvgCanvas::map_y(double y) const { return (y1_ - y) * scale_; }

void SvgCanvas::polyline(const std::vector<cplx>& pts, const std::string& stroke,
                         double stroke_width, double opacity) {
  if (pts.size() < 2) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_width) + "\" stroke-opacity=\"" + num(opacity) + "\" points=\"";
  for (const cplx& p : pts) body_ += num(map_x(p.real())) + "," + num(map_y(p.imag())) + " ";
  body_ += "\"/>\n";
}

void SvgCanvas::circle(cplx center, double radius_px, const std::string& fill) {
  body_ += "<circle cx=\"" + num(map_x(center.real())) + "\" cy=\"" + num(map_y(center.imag())) +
           "\" r=\"" + num(radius_px) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(cplx pos, const std::string& s, int font_px) {
  body_ += "<text x=\"" + num(map_x(pos.real())) + "\" y=\"" + num(map_y(pos.imag())) +
           "\" font-size=\"" + std::to_string(font_px) + "\" font-family=\"sans-serif\">" + s +
           "</text>\n";
}

std::string SvgCanvas::str() const {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
                    "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
                    "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

}  // namespace heun
