#include "heun/poly.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "heun/errors.hpp"

namespace heun {

void sort_lex(std::vector<cplx>& v) { std::sort(v.begin(), v.end(), lex_less); }

Polynomial::Polynomial(std::vector<cplx> coeffs) : coef_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<cplx> coeffs) : coef_(coeffs) { trim(); }

void Polynomial::trim() {
  while (!coef_.empty() && coef_.back() == cplx(0.0, 0.0)) coef_.pop_back();
}

Polynomial Polynomial::from_roots(std::span<const cplx> roots) {
  std::vector<cplx> c{cplx(1.0, 0.0)};
  for (cplx r : roots) {
    c.push_back(0.0);
    for (size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::monomial(int k, cplx c) {
  std::vector<cplx> v(static_cast<size_t>(k) + 1, cplx(0.0, 0.0));
  v.back() = c;
  return Polynomial(std::move(v));
}

cplx Polynomial::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(coef_.size())) return 0.0;
  return coef_[static_cast<size_t>(k)];
}

cplx Polynomial::leading() const { return coef_.empty() ? cplx(0.0) : coef_.back(); }

cplx Polynomial::eval(cplx z) const {
  cplx acc(0.0, 0.0);
  for (size_t k = coef_.size(); k-- > 0;) acc = acc * z + coef_[k];
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coef_.size() <= 1) return Polynomial();
  std::vector<cplx> d(coef_.size() - 1);
  for (size_t k = 1; k < coef_.size(); ++k) d[k - 1] = static_cast<double>(k) * coef_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<cplx> c(std::max(coef_.size(), o.coef_.size()), cplx(0.0));
  for (size_t k = 0; k < c.size(); ++k) c[k] = coeff(static_cast<int>(k)) + o.coeff(static_cast<int>(k));
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  std::vector<cplx> c(std::max(coef_.size(), o.coef_.size()), cplx(0.0));
  for (size_t k = 0; k < c.size(); ++k) c[k] = coeff(static_cast<int>(k)) - o.coeff(static_cast<int>(k));
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return Polynomial();
  std::vector<cplx> c(coef_.size() + o.coef_.size() - 1, cplx(0.0));
  for (size_t i = 0; i < coef_.size(); ++i)
    for (size_t j = 0; j < o.coef_.size(); ++j) c[i + j] += coef_[i] * o.coef_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(cplx c) const {
  std::vector<cplx> v = coef_;
  for (auto& x : v) x *= c;
  return Polynomial(std::move(v));
}

double Polynomial::sup_norm() const {
  double m = 0.0;
  for (const auto& c : coef_) m = std::max(m, std::abs(c));
  return m;
}

std::vector<cplx> roots(const Polynomial& p, double tol) {
  const int n = p.degree();
  if (n < 1) throw InvalidArgumentError("roots: degree must be at least 1");
  if (n == 1) return {-p.coeff(0) / p.coeff(1)};

  const Polynomial dp = p.derivative();
  const cplx lead = p.leading();

  // Cauchy bound on root magnitudes.
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(p.coeff(k) / lead));
  radius = 1.0 + radius;

  std::vector<cplx> z(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double angle = 2.0 * M_PI * k / n + 0.4;
    z[static_cast<size_t>(k)] = radius * cplx(std::cos(angle), std::sin(angle));
  }

  const int max_iter = 1000;
  double best_corr = std::numeric_limits<double>::infinity();
  std::vector<cplx> best = z;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_corr = 0.0;
    std::vector<cplx> corrections(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      const cplx zk = z[static_cast<size_t>(k)];
      const cplx pv = p.eval(zk);
      if (pv == cplx(0.0)) {
        corrections[static_cast<size_t>(k)] = 0.0;
        continue;
      }
      cplx dv = dp.eval(zk);
      if (dv == cplx(0.0)) dv = cplx(1e-300, 0.0);
      const cplx w = pv / dv;
      cplx s(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (zk - z[static_cast<size_t>(j)]);
      const cplx d = w / (1.0 - w * s);
      corrections[static_cast<size_t>(k)] = d;
      max_corr = std::max(max_corr, std::abs(d));
    }
    for (int k = 0; k < n; ++k) z[static_cast<size_t>(k)] -= corrections[static_cast<size_t>(k)];
    if (max_corr < best_corr) {
      best_corr = max_corr;
      best = z;
    }
    if (max_corr < tol) {
      sort_lex(z);
      return z;
    }
  }
  throw ConvergenceError("roots: Aberth iteration did not converge", best_corr);
}

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

Triangle::Triangle(cplx a1, cplx a2, cplx a3) : v_{a1, a2, a3} {
  if (a1 == a2 || a2 == a3 || a1 == a3)
    throw InvalidArgumentError("Triangle: vertices must be pairwise distinct");
  const cplx u = a2 - a1, w = a3 - a1;
  const double cross = u.real() * w.imag() - u.imag() * w.real();
  collinear_ = std::abs(cross) <= 1e-12 * std::abs(u) * std::abs(w);
}

double Triangle::diameter() const {
  return std::max({std::abs(v_[0] - v_[1]), std::abs(v_[1] - v_[2]), std::abs(v_[0] - v_[2])});
}

double Triangle::hull_distance(cplx z) const {
  if (!collinear_) {
    // Inside test: consistent orientation of z against all three edges.
    bool all_left = true, all_right = true;
    for (int i = 0; i < 3; ++i) {
      const cplx a = v_[static_cast<size_t>(i)], b = v_[static_cast<size_t>((i + 1) % 3)];
      const cplx e = b - a, w = z - a;
      const double cross = e.real() * w.imag() - e.imag() * w.real();
      if (cross < 0) all_left = false;
      if (cross > 0) all_right = false;
    }
    if (all_left || all_right) return 0.0;
  }
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    d = std::min(d, segment_distance(z, v_[static_cast<size_t>(i)], v_[static_cast<size_t>((i + 1) % 3)]));
  return d;
}

}  // namespace heun
