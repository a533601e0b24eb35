#pragma once

#include <span>
#include <string>

#include "heun/abelian.hpp"
#include "heun/poly.hpp"

namespace heun {

// Finite point measure in the plane; weights are real and may be negative.
struct DiscreteMeasure {
  std::vector<cplx> points;
  std::vector<double> weights;
  std::string provenance;

  double total_mass() const;
  size_t size() const { return points.size(); }
};

// Root-counting measure of p: weight 1/deg at every root.
DiscreteMeasure root_counting_measure(const Polynomial& p, const std::string& provenance = "roots");

// C_mu(z) = sum w_k / (z - p_k).  Throws when z sits on a support point.
cplx cauchy(const DiscreteMeasure& m, cplx z);

// u_mu(z) = sum w_k log|z - p_k|.
double potential(const DiscreteMeasure& m, cplx z);

// |C(z)^2 - Vt(z)/Q(z)|.
double ct_square_residual(const DiscreteMeasure& m, const Polynomial& vt, const Polynomial& q, cplx z);

// Q C'' + Q' C' + Q''/8 C + Q'''/24 with the derivatives of the Cauchy
// transform taken analytically.
cplx ct_ode_residual(const DiscreteMeasure& m, const Polynomial& q, cplx z);

// Averaged arcsine measure attached to root a_i: slices tau in a midpoint
// rule, each slice an equal-weight Chebyshev-angle discretization of the
// arcsine law on the segment centered at xi_i(tau) of half-length
// 2 sqrt(psi_i(tau)).
DiscreteMeasure build_Mi(const CubicRoots& roots, int i, int tau_nodes, int slice_nodes);

// max over the ring of |C_a - C_b|.
double balayage_gap(const DiscreteMeasure& a, const DiscreteMeasure& b, std::span<const cplx> ring);

struct PotentialCheckReport {
  bool inequality_ok = false;   // u' <= u + 1e-9 on the whole grid
  bool far_equality_ok = false; // |u - u'| < 1e-6 far from the roots
  double max_violation = 0.0;   // max(u' - u) over the grid
  double max_far_gap = 0.0;     // max |u - u'| over far grid points
  int grid_points = 0;
  int far_points = 0;
};

// Compares the potentials of the root measures of p and p' over the grid.
PotentialCheckReport derivative_potential_check(const Polynomial& p, std::span<const cplx> grid);

}  // namespace heun
