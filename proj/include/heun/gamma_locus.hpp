#pragma once

#include <functional>

#include "heun/abelian.hpp"

namespace heun {

// Polyline trace of the arc of { Im f_jk = 0 } starting at a_i.
struct LocusArc {
  int i = 0;                 // distinguished root index
  std::vector<cplx> points;  // starts at a_i
  double arc_tol = 0.0;
};

// The tripod locus: three arcs from the roots meeting at b0.  For collinear
// real-rooted triples the degenerate form is the segment between the extreme
// roots split at the middle one.
struct GammaQ {
  std::array<LocusArc, 3> arcs;
  cplx b0;
  bool degenerate = false;
};

// Stop predicate for the tracer: called with the previous and the current
// accepted vertex, returns true to stop after the current one.
using TraceStop = std::function<bool(cplx, cplx)>;

// Predictor-corrector trace of gamma_i from a_i.  Default stop: sign change
// of the companion condition (reaching b0).  step <= 0 picks diam/200.
LocusArc trace_gamma(const CubicRoots& roots, int i, double step = 0.0, double arc_tol = 1e-10,
                     const TraceStop& stop = {});

// Common point of the three curves, 2-D Newton from the centroid with a
// sign-pattern bisection fallback.
cplx find_b0(const CubicRoots& roots, double newton_tol = 1e-12);

// Newton-free recursive grid bisection on the sign pattern; the independent
// cross-check for find_b0.
cplx find_b0_bisection(const CubicRoots& roots, double tol = 1e-9);

GammaQ build_gamma_q(const CubicRoots& roots, double step = 0.0, double arc_tol = 1e-10);

double distance_to_locus(const GammaQ& gq, cplx z);

// The unique point on the line through b_ref parallel to side (a_j, a_k)
// where f_jk is real; found by monotone bisection inside the triangle.
cplx unique_b_on_line(const CubicRoots& roots, cplx b_ref, int j, int k);

// Indices (j, k), j < k, of the side opposite root i.
std::pair<int, int> opposite_side(int i);

}  // namespace heun
