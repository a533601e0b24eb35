#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace heun {

using cplx = std::complex<double>;

// Lexicographic order by (real, imaginary); the single sorting convention
// every deterministic output of the library relies on.
inline bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}
void sort_lex(std::vector<cplx>& v);

// Dense polynomial with complex coefficients, coeffs()[k] multiplying z^k.
// The zero polynomial is the empty coefficient vector and reports degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs);
  Polynomial(std::initializer_list<cplx> coeffs);

  static Polynomial from_roots(std::span<const cplx> roots);  // monic
  static Polynomial monomial(int k, cplx c = 1.0);

  int degree() const { return static_cast<int>(coef_.size()) - 1; }
  bool is_zero() const { return coef_.empty(); }
  cplx coeff(int k) const;
  cplx leading() const;
  const std::vector<cplx>& coeffs() const { return coef_; }

  cplx eval(cplx z) const;  // Horner
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx c) const;

  bool operator==(const Polynomial& o) const { return coef_ == o.coef_; }

  // Largest coefficient magnitude (0 for the zero polynomial).
  double sup_norm() const;

 private:
  void trim();
  std::vector<cplx> coef_;
};

// All roots of p by the Aberth-Ehrlich simultaneous iteration.
//
// deterministic start: circle of Cauchy-bound radius, equally spaced angles
// with phase offset 0.4.  Iterates until the largest correction is below tol;
// near-multiple roots are returned as the clusters the iteration lands on.
// Output sorted lexicographically.  Throws ConvergenceError (carrying the
// residual of the best iterate) if the cap is hit.
std::vector<cplx> roots(const Polynomial& p, double tol = 1e-13);

// Distance from p to the segment [a, b].
double segment_distance(cplx p, cplx a, cplx b);

// Triangle spanned by three pairwise distinct points.  Collinearity is
// detected once, from the cross product of edge vectors, with a relative
// tolerance.
class Triangle {
 public:
  Triangle(cplx a1, cplx a2, cplx a3);

  cplx vertex(int i) const { return v_[static_cast<size_t>(i)]; }
  const std::array<cplx, 3>& vertices() const { return v_; }
  bool collinear() const { return collinear_; }
  cplx centroid() const { return (v_[0] + v_[1] + v_[2]) / 3.0; }
  double diameter() const;

  // Euclidean distance from z to the convex hull (0 inside; for collinear
  // vertices, distance to the covering segment).
  double hull_distance(cplx z) const;

 private:
  std::array<cplx, 3> v_;
  bool collinear_ = false;
};

}  // namespace heun
