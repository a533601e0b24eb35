#include "heun/heine_stieltjes.hpp"

#include <algorithm>
#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <functional>

#include "heun/errors.hpp"
#include "hessenberg_qr.hpp"

namespace heun {

namespace {

constexpr int kMaxDegree = 300;  // monomial-basis cap

using f128 = boost::multiprecision::float128;
using mp60 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<60>>;
using mp90 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<90>>;
using mp160 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<160>>;
using mp240 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<240>>;

// The pencil is strongly non-normal and its eigenvalue condition grows
// exponentially with the degree: in fixed precision the computed spectrum
// smears over a pseudospectral region instead of the true root arcs.  The
// working precision therefore scales with n.  Measured on the z(z-1)(z-1+I)
// operator: 50 digits scatter at n = 96 while 70 converge; 120 digits
// scatter at n = 200 while 160 converge (~0.77 digits per degree).  Tiers
// below keep a wide margin over that line.
enum class Tier { kDouble, kFloat128, kMp60, kMp90, kMp160, kMp240 };

Tier tier_for(int n) {
  if (n <= 16) return Tier::kDouble;
  if (n <= 40) return Tier::kFloat128;
  if (n <= 80) return Tier::kMp60;
  if (n <= 120) return Tier::kMp90;
  if (n <= 200) return Tier::kMp160;
  return Tier::kMp240;
}

template <class R>
std::vector<cplx> pencil_eigenvalues(const HeunOperator& op, int n, cplx v1) {
  using detail::Cx;
  const int dim = n + 1;
  std::vector<Cx<R>> h(static_cast<size_t>(dim) * dim, Cx<R>(R(0)));
  auto H = [&](int i, int j) -> Cx<R>& { return h[static_cast<size_t>(i) * dim + j]; };
  for (int m = 0; m <= n; ++m) {
    const double d2 = static_cast<double>(m) * (m - 1.0);
    if (d2 != 0.0)
      for (int dq = 0; dq <= 3; ++dq) {
        const int row = m - 2 + dq;
        if (row >= 0 && row <= n)
          H(row, m) += Cx<R>(R(d2)) * detail::from_std<R>(op.Q.coeff(dq));
      }
    if (m > 0)
      for (int dp = 0; dp <= 2; ++dp) {
        const int row = m - 1 + dp;
        if (row >= 0 && row <= n)
          H(row, m) += Cx<R>(R(m)) * detail::from_std<R>(op.P.coeff(dp));
      }
    if (m + 1 <= n) H(m + 1, m) += detail::from_std<R>(v1);
  }
  const R eps = std::numeric_limits<R>::epsilon();
  std::vector<Cx<R>> ev = detail::hessenberg_eigenvalues<R>(std::move(h), dim, eps);
  std::vector<cplx> out(ev.size());
  for (size_t i = 0; i < ev.size(); ++i) out[i] = detail::to_std(ev[i]);
  return out;
}

// Inverse iteration on the banded pencil (kl = 1, ku = 2); the eigenvector is
// the Stieltjes coefficient vector.  Runs in the same precision tier as the
// eigenvalues so the widely spread coefficients keep relative accuracy.
template <class R>
std::vector<cplx> pencil_eigenvector(const HeunOperator& op, int n, cplx v1, cplx lambda) {
  using detail::Cx;
  const int dim = n + 1;
  detail::BandedLU<R> lu(dim, 1, 2);
  auto add = [&](int i, int j, Cx<R> v) { lu.at(i, j) += v; };
  for (int m = 0; m <= n; ++m) {
    const double d2 = static_cast<double>(m) * (m - 1.0);
    if (d2 != 0.0)
      for (int dq = 0; dq <= 3; ++dq) {
        const int row = m - 2 + dq;
        if (row >= 0 && row <= n && m - row <= 2 && row - m <= 1)
          add(row, m, Cx<R>(R(d2)) * detail::from_std<R>(op.Q.coeff(dq)));
      }
    if (m > 0)
      for (int dp = 0; dp <= 2; ++dp) {
        const int row = m - 1 + dp;
        if (row >= 0 && row <= n && m - row <= 2 && row - m <= 1)
          add(row, m, Cx<R>(R(m)) * detail::from_std<R>(op.P.coeff(dp)));
      }
    if (m + 1 <= n) add(m + 1, m, detail::from_std<R>(v1));
  }
  // Keep the unshifted band for residual checks.
  detail::BandedLU<R> m_band = lu;

  // shifted by lambda + tiny perturbation to keep the factorization regular
  double scale = 0.0;
  for (int dq = 0; dq <= 3; ++dq) scale = std::max(scale, std::abs(op.Q.coeff(dq)));
  scale = std::max(scale, std::abs(v1)) * n * n;
  const cplx shift = lambda + cplx(1e-12 * scale, 0.0);
  for (int i = 0; i < dim; ++i) lu.at(i, i) -= detail::from_std<R>(shift);
  lu.factor();

  const Cx<R> lam = detail::from_std<R>(lambda);
  auto residual = [&](const std::vector<Cx<R>>& x) {
    R worst(0);
    for (int i = 0; i < dim; ++i) {
      Cx<R> acc = -lam * x[static_cast<size_t>(i)];
      for (int j = std::max(0, i - 1); j <= std::min(dim - 1, i + 2); ++j)
        acc += m_band.at(i, j) * x[static_cast<size_t>(j)];
      worst = std::max(worst, detail::abs(acc));
    }
    return worst;
  };
  auto normalize = [&](std::vector<Cx<R>>& x) {
    R xmax(0);
    for (const auto& c : x) xmax = std::max(xmax, detail::abs(c));
    if (xmax == R(0)) throw ConvergenceError("solve: inverse iteration returned zero", 0.0);
    for (auto& c : x) c = c / Cx<R>(xmax);
  };

  // One pass from a generic start; a second only when the residual says so
  // (extra passes drift off the eigendirection for non-normal matrices).
  std::vector<Cx<R>> x(static_cast<size_t>(dim), Cx<R>(R(1)));
  lu.solve_in_place(x);
  normalize(x);
  const R tol = R(1e-8) * R(scale);
  if (residual(x) > tol) {
    lu.solve_in_place(x);
    normalize(x);
  }
  std::vector<cplx> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = detail::to_std(x[i]);
  return out;
}

std::vector<cplx> eigenvalues_for(const HeunOperator& op, int n, cplx v1) {
  switch (tier_for(n)) {
    case Tier::kDouble: return pencil_eigenvalues<double>(op, n, v1);
    case Tier::kFloat128: return pencil_eigenvalues<f128>(op, n, v1);
    case Tier::kMp60: return pencil_eigenvalues<mp60>(op, n, v1);
    case Tier::kMp90: return pencil_eigenvalues<mp90>(op, n, v1);
    case Tier::kMp160: return pencil_eigenvalues<mp160>(op, n, v1);
    case Tier::kMp240: return pencil_eigenvalues<mp240>(op, n, v1);
  }
  throw std::logic_error("unreachable");
}

std::vector<cplx> eigenvector_for(const HeunOperator& op, int n, cplx v1, cplx lambda) {
  switch (tier_for(n)) {
    case Tier::kDouble: return pencil_eigenvector<double>(op, n, v1, lambda);
    case Tier::kFloat128: return pencil_eigenvector<f128>(op, n, v1, lambda);
    case Tier::kMp60: return pencil_eigenvector<mp60>(op, n, v1, lambda);
    case Tier::kMp90: return pencil_eigenvector<mp90>(op, n, v1, lambda);
    case Tier::kMp160: return pencil_eigenvector<mp160>(op, n, v1, lambda);
    case Tier::kMp240: return pencil_eigenvector<mp240>(op, n, v1, lambda);
  }
  throw std::logic_error("unreachable");
}

struct Cluster {
  cplx lambda;
  int size;
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& ev, double cluster_tol) {
  const int m = static_cast<int>(ev.size());
  double diam = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) diam = std::max(diam, std::abs(ev[static_cast<size_t>(i)] - ev[static_cast<size_t>(j)]));
  const double tol = cluster_tol * diam;

  std::vector<int> parent(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) parent[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x)
      x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(ev[static_cast<size_t>(i)] - ev[static_cast<size_t>(j)]) <= tol)
        parent[static_cast<size_t>(find(i))] = find(j);

  std::vector<Cluster> clusters;
  std::vector<int> slot(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const int r = find(i);
    if (slot[static_cast<size_t>(r)] < 0) {
      slot[static_cast<size_t>(r)] = static_cast<int>(clusters.size());
      clusters.push_back({cplx(0.0), 0});
    }
    Cluster& c = clusters[static_cast<size_t>(slot[static_cast<size_t>(r)])];
    c.lambda += ev[static_cast<size_t>(i)];
    c.size += 1;
  }
  for (auto& c : clusters) c.lambda /= static_cast<double>(c.size);
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return lex_less(a.lambda, b.lambda); });
  return clusters;
}

}  // namespace

HeunOperator::HeunOperator(Polynomial q, Polynomial p) : Q(std::move(q)), P(std::move(p)) {
  if (Q.degree() != 3) throw InvalidArgumentError("HeunOperator: Q must have degree 3");
  if (std::abs(Q.leading() - cplx(1.0)) > 1e-12)
    throw InvalidArgumentError("HeunOperator: Q must be monic");
  if (P.degree() > 2) throw InvalidArgumentError("HeunOperator: P must have degree at most 2");
}

CubicRoots HeunOperator::cubic_roots(double tol) const {
  std::vector<cplx> r = roots(Q, tol);
  return CubicRoots(r[0], r[1], r[2]);
}

cplx leading_v1(const HeunOperator& op, int n) {
  if (n < 0) throw InvalidArgumentError("leading_v1: n must be nonnegative");
  const cplx p2 = op.P.coeff(2);
  return -(static_cast<double>(n) * (n - 1.0) + p2 * static_cast<double>(n));
}

Eigen::MatrixXcd build_pencil(const HeunOperator& op, int n) {
  if (n < 1) throw InvalidArgumentError("build_pencil: n must be at least 1");
  if (n > kMaxDegree)
    throw InvalidArgumentError("build_pencil: n exceeds the monomial-basis cap of 300");
  const cplx v1 = leading_v1(op, n);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int m = 0; m <= n; ++m) {
    const double d2 = static_cast<double>(m) * (m - 1.0);
    if (d2 != 0.0)
      for (int dq = 0; dq <= 3; ++dq) {
        const int row = m - 2 + dq;
        if (row >= 0 && row <= n) M(row, m) += d2 * op.Q.coeff(dq);
      }
    if (m > 0)
      for (int dp = 0; dp <= 2; ++dp) {
        const int row = m - 1 + dp;
        if (row >= 0 && row <= n) M(row, m) += static_cast<double>(m) * op.P.coeff(dp);
      }
    if (m + 1 <= n) M(m + 1, m) += v1;
  }
  return M;
}

SpectrumResult solve(const HeunOperator& op, int n, double cluster_tol) {
  if (n < 1) throw InvalidArgumentError("solve: n must be at least 1");
  if (n > kMaxDegree) throw InvalidArgumentError("solve: n exceeds the cap of 300");
  const cplx v1 = leading_v1(op, n);
  if (std::abs(v1) == 0.0)
    throw DegenerateOperatorError("solve: degenerate leading coefficient (v1 = 0)");

  const std::vector<cplx> ev = eigenvalues_for(op, n, v1);
  const std::vector<Cluster> clusters = cluster_eigenvalues(ev, cluster_tol);

  SpectrumResult result;
  result.n = n;
  for (const Cluster& c : clusters) {
    VanVleckPair pair;
    pair.v1 = v1;
    pair.v0 = -c.lambda;
    pair.t = c.lambda / v1;
    pair.multiplicity = c.size;

    std::vector<cplx> x = eigenvector_for(op, n, v1, c.lambda);
    // Monic normalization is a pure rescale; an exactly vanishing leading
    // component signals a genuine degree drop, and a defective vector shows
    // up in the equation residual below.
    if (x.back() == cplx(0.0))
      throw DegenerateOperatorError(
          "solve: degree drop (Stieltjes eigenvector has vanishing leading coefficient)");
    const cplx lead = x.back();
    for (auto& c2 : x) c2 /= lead;
    pair.S = Polynomial(std::move(x));
    if (pair.S.degree() != n)
      throw DegenerateOperatorError("solve: degree drop (deg S < n)");

    const Polynomial v_poly{pair.v0, pair.v1};
    const Polynomial qs2 = op.Q * pair.S.derivative().derivative();
    const Polynomial resid = qs2 + op.P * pair.S.derivative() + v_poly * pair.S;
    double denom = qs2.sup_norm();
    if (denom == 0.0)
      denom = std::max((op.P * pair.S.derivative()).sup_norm(), (v_poly * pair.S).sup_norm());
    pair.residual = denom > 0.0 ? resid.sup_norm() / denom : resid.sup_norm();
    if (!(pair.residual < 1e-6))
      throw DegenerateOperatorError("solve: degree drop or defective eigenvector (residual " +
                                    std::to_string(pair.residual) + ")");
    result.pairs.push_back(std::move(pair));
  }

  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const VanVleckPair& a, const VanVleckPair& b) { return lex_less(a.t, b.t); });
  for (const auto& p : result.pairs)
    for (int q = 0; q < p.multiplicity; ++q) result.t_roots.push_back(p.t);
  sort_lex(result.t_roots);

  result.measure.points = result.t_roots;
  result.measure.weights.assign(result.t_roots.size(), 1.0 / (n + 1.0));
  result.measure.provenance = "mu_" + std::to_string(n);
  return result;
}

std::vector<cplx> spectral_roots(const SpectrumResult& res) { return res.t_roots; }

DiscreteMeasure stieltjes_measure(const VanVleckPair& pair) {
  return root_counting_measure(pair.S, "nu");
}

std::optional<bool> polya_check(const HeunOperator& op, const SpectrumResult& res, double tol) {
  const CubicRoots cr = op.cubic_roots();
  const Polynomial dq = op.Q.derivative();
  double min_sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      min_sep = std::min(min_sep, std::abs(cr.a[static_cast<size_t>(i)] - cr.a[static_cast<size_t>(j)]));
  if (min_sep < 1e-10 * cr.diameter())
    throw DegenerateOperatorError("polya_check: Q has a repeated root");

  for (const cplx& a : cr.a) {
    const cplx residue = op.P.eval(a) / dq.eval(a);
    if (!(residue.real() > 0.0) || std::abs(residue.imag()) > tol) return std::nullopt;
  }

  const Triangle tri = cr.triangle();
  for (const auto& pair : res.pairs) {
    if (tri.hull_distance(pair.t) > tol) return false;
    for (const cplx& r : roots(pair.S))
      if (tri.hull_distance(r) > tol) return false;
  }
  return true;
}

}  // namespace heun
