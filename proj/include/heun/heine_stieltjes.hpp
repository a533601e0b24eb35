#pragma once

#include <Eigen/Dense>
#include <optional>

#include "heun/abelian.hpp"
#include "heun/measures.hpp"
#include "heun/poly.hpp"

namespace heun {

// Coefficient pair of Q S'' + P S' + V S = 0 with Q monic cubic and P at
// most quadratic.
struct HeunOperator {
  Polynomial Q;
  Polynomial P;

  HeunOperator(Polynomial q, Polynomial p);
  static HeunOperator lame(Polynomial q) {
    Polynomial half_dq = q.derivative() * cplx(0.5);
    return HeunOperator(std::move(q), std::move(half_dq));
  }

  CubicRoots cubic_roots(double tol = 1e-13) const;
};

// One accessory-parameter solution: V = v1 z + v0 with root t, and the monic
// Stieltjes polynomial S of exact degree n.
struct VanVleckPair {
  cplx v1;
  cplx v0;
  cplx t;
  Polynomial S;
  int multiplicity = 1;
  double residual = 0.0;  // sup-norm of QS''+PS'+VS over sup-norm of QS''
};

struct SpectrumResult {
  int n = 0;
  std::vector<VanVleckPair> pairs;  // multiplicities sum to n+1
  std::vector<cplx> t_roots;        // sorted lexicographically, expanded
  DiscreteMeasure measure;          // weight 1/(n+1) per root
};

// Leading coefficient of V forced by degree counting: the z^{n+1} output
// coefficient of Q S'' + P S' + v1 z S cancels.
cplx leading_v1(const HeunOperator& op, int n);

// Matrix of S -> Q S'' + P S' + v1 z S on the monomial basis {1, ..., z^n};
// banded with one subdiagonal and two superdiagonals.
Eigen::MatrixXcd build_pencil(const HeunOperator& op, int n);

// All Van Vleck / Stieltjes pairs of degree n via the dense eigenproblem.
// cluster_tol is relative to the spectral diameter and controls how nearby
// eigenvalues merge into one pair with multiplicity.
SpectrumResult solve(const HeunOperator& op, int n, double cluster_tol = 1e-7);

// The n+1 Van Vleck roots, sorted, multiplicity-expanded.
std::vector<cplx> spectral_roots(const SpectrumResult& res);

// Unit-mass root-counting measure of the Stieltjes polynomial.
DiscreteMeasure stieltjes_measure(const VanVleckPair& pair);

// If P/Q has positive residues at all roots of Q (within tol), reports
// whether every Van Vleck and Stieltjes root lies within tol of the hull;
// nullopt when the residue hypothesis does not apply.
std::optional<bool> polya_check(const HeunOperator& op, const SpectrumResult& res, double tol);

}  // namespace heun
