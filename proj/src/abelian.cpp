#include "heun/abelian.hpp"

#include <cmath>
#include <functional>

#include "heun/errors.hpp"

namespace heun {

CubicRoots::CubicRoots(cplx a1, cplx a2, cplx a3) : a{a1, a2, a3} {
  Triangle tri(a1, a2, a3);  // validates distinctness
  collinear = tri.collinear();
}

int CubicRoots::other_index(int j, int k) {
  if (j == k || j < 0 || j > 2 || k < 0 || k > 2)
    throw InvalidArgumentError("other_index: need distinct indices in {0,1,2}");
  return 3 - j - k;
}

namespace detail {

SideIntegrator::SideIntegrator(const CubicRoots& roots, int j, int k, int m) : j_(j), k_(k) {
  if (m < 8) throw InvalidArgumentError("ChebRule: m must be at least 8");
  const int i = CubicRoots::other_index(j, k);
  aj_ = roots.a[static_cast<size_t>(j)];
  ak_ = roots.a[static_cast<size_t>(k)];
  ai_ = roots.a[static_cast<size_t>(i)];
  guard_ = 1e-9 * std::abs(ak_ - aj_);

  const cplx c = 0.5 * (aj_ + ak_);
  half_ = 0.5 * (ak_ - aj_);
  nodes_.resize(static_cast<size_t>(m));
  thetas_.resize(static_cast<size_t>(m));
  for (int q = 0; q < m; ++q) {
    const double theta = (2.0 * q + 1.0) * M_PI / (2.0 * m);
    thetas_[static_cast<size_t>(q)] = theta;
    nodes_[static_cast<size_t>(q)] = c + half_ * std::cos(theta);
  }
}

// Transformed integrand: with t = c + h cos(theta) the side integral becomes
// i * int_0^pi sqrt(G) dtheta, G(t) = (b-t)/(t-a_i), up to a global sign.
// The midpoint rule in theta is the Chebyshev-Gauss rule on the segment.
SideIntegrator::Value SideIntegrator::raw(cplx b) const {
  const bool cancels = std::abs(b - ai_) <= guard_;
  if (!cancels) {
    if (segment_distance(b, aj_, ak_) < guard_ &&
        std::min(std::abs(b - aj_), std::abs(b - ak_)) > guard_)
      throw BranchAmbiguityError("f_jk: b within guard distance of the open segment");
    if (segment_distance(ai_, aj_, ak_) < guard_)
      throw BranchAmbiguityError("f_jk: collinear roots");
  }

  cplx sum_f(0.0), sum_fp(0.0);
  double phase = 0.0;
  cplx g_prev;
  cplx v_mid(0.0);
  const size_t q_mid = nodes_.size() / 2;
  for (size_t q = 0; q < nodes_.size(); ++q) {
    const cplx t = nodes_[q];
    const cplx g = cancels ? cplx(-1.0, 0.0) : (b - t) / (t - ai_);
    if (q == 0) {
      phase = std::arg(g);
    } else {
      const double jump = std::arg(g / g_prev);
      if (std::abs(jump) > M_PI / 2.0)
        throw RefineRuleError("f_jk: argument jump above pi/2 between nodes");
      phase += jump;
    }
    g_prev = g;
    const cplx v = std::sqrt(std::abs(g)) * std::polar(1.0, phase / 2.0);
    if (q == q_mid) v_mid = v;
    sum_f += v;
    sum_fp += v / (b - t);
  }
  const double w = M_PI / static_cast<double>(nodes_.size());
  // W(t_q) * h * sin(theta_q) = i * v_q relates the node values back to the
  // untransformed integrand.
  const cplx w_mid = cplx(0.0, 1.0) * v_mid / (half_ * std::sin(thetas_[q_mid]));
  return {cplx(0.0, 1.0) * w * sum_f, cplx(0.0, 0.5) * w * sum_fp, w_mid, nodes_[q_mid]};
}

SideIntegrator::Value SideIntegrator::eval_near(cplx b, const Value& ref) const {
  const Value r = raw(b);
  const double dplus = std::abs(r.f - ref.f), dminus = std::abs(-r.f - ref.f);
  if (std::min(dplus, dminus) > 0.6 * std::max(1.0, std::abs(ref.f)))
    return eval_anchored(b);  // reference too far away to disambiguate
  const double sign = dplus <= dminus ? 1.0 : -1.0;
  return {sign * r.f, sign * r.fprime, sign * r.w_mid, r.t_mid};
}

SideIntegrator::Value SideIntegrator::eval_anchored(cplx b) const {
  // Walk b from a_i (value +pi) to its target, keeping the value continuous.
  // Checkpoints are bisected when a step moves the value too much.
  Value prev = raw(ai_);
  if (std::abs(prev.f - cplx(M_PI, 0.0)) > std::abs(prev.f + cplx(M_PI, 0.0))) {
    prev.f = -prev.f;
    prev.fprime = -prev.fprime;
    prev.w_mid = -prev.w_mid;
  }
  cplx from = ai_;
  const int steps = 32;
  for (int s = 1; s <= steps; ++s) {
    const cplx target = ai_ + (static_cast<double>(s) / steps) * (b - ai_);
    int depth = 0;
    std::vector<cplx> stack{target};
    while (!stack.empty()) {
      const cplx cur = stack.back();
      const Value r = raw(cur);
      const double dplus = std::abs(r.f - prev.f), dminus = std::abs(-r.f - prev.f);
      if (std::min(dplus, dminus) > 0.3 * std::max(1.0, std::abs(prev.f)) && depth < 24) {
        stack.push_back(0.5 * (from + cur));
        ++depth;
        continue;
      }
      if (std::min(dplus, dminus) > 0.6 * std::max(1.0, std::abs(prev.f)))
        throw RefineRuleError("f_jk: homotopy step too large to track the sign");
      const double sign = dplus <= dminus ? 1.0 : -1.0;
      prev = {sign * r.f, sign * r.fprime, sign * r.w_mid, r.t_mid};
      from = cur;
      stack.pop_back();
    }
  }
  return prev;
}

}  // namespace detail

cplx f_jk(const CubicRoots& roots, cplx b, int j, int k, ChebRule rule) {
  detail::SideIntegrator side(roots, j, k, rule.m);
  return side.eval_anchored(b).f;
}

cplx f_jk_prime(const CubicRoots& roots, cplx b, int j, int k, ChebRule rule) {
  const double guard = 1e-9 * roots.diameter();
  for (const cplx& a : roots.a)
    if (std::abs(b - a) < guard)
      throw BranchAmbiguityError("f_jk_prime: b within guard distance of a root");
  detail::SideIntegrator side(roots, j, k, rule.m);
  return side.eval_anchored(b).fprime;
}

// Analytic continuation of sqrt(F) along the straight path z0 -> z1 starting
// from the value w0 of one of the two branches at z0.  Sign choices follow
// value continuity; steps are bisected where the branch turns quickly.
static cplx continue_sqrt(const std::function<cplx(cplx)>& F, cplx z0, cplx w0, cplx z1) {
  cplx w = w0, from = z0;
  const int steps = 96;
  for (int s = 1; s <= steps; ++s) {
    const cplx target = z0 + (static_cast<double>(s) / steps) * (z1 - z0);
    int depth = 0;
    std::vector<cplx> stack{target};
    while (!stack.empty()) {
      const cplx cur = stack.back();
      cplx r = std::sqrt(F(cur));
      if (std::abs(r - w) > std::abs(-r - w)) r = -r;
      if (std::abs(r - w) > 0.5 * (std::abs(r) + std::abs(w)) && depth < 24) {
        stack.push_back(0.5 * (from + cur));
        ++depth;
        continue;
      }
      if (std::abs(r - w) > 0.9 * (std::abs(r) + std::abs(w)))
        throw BranchAmbiguityError("continue_sqrt: branch moved too fast to track");
      w = r;
      from = cur;
      stack.pop_back();
    }
  }
  return w;
}

// int_b^{a_i} sqrt((b-t)/Q(t)) dt with the integrand branch continued from the
// side branch used by f_jk.  After t = c + h cos(theta) the transformed
// integrand is +-2h cos^2(theta/2) sqrt(1/((t-a_j)(t-a_k))); the global sign
// comes from continuing sqrt((b-t)/Q(t)) along a straight bridge between the
// two segment midpoints.
static cplx complement_integral(const CubicRoots& roots, cplx b, int j, int k, int m,
                                const detail::SideIntegrator::Value& side_val) {
  const int i = CubicRoots::other_index(j, k);
  const cplx aj = roots.a[static_cast<size_t>(j)];
  const cplx ak = roots.a[static_cast<size_t>(k)];
  const cplx ai = roots.a[static_cast<size_t>(i)];

  const cplx c = 0.5 * (b + ai), h = 0.5 * (ai - b);
  if (std::abs(h) < 1e-13 * roots.diameter()) return cplx(0.0);

  cplx sum(0.0);
  double phase = 0.0;
  cplx g_prev;
  cplx t_mid(0.0), v_mid(0.0);
  double theta_mid = 0.0;
  const int q_mid = m / 2;
  for (int q = 0; q < m; ++q) {
    const double theta = (2.0 * q + 1.0) * M_PI / (2.0 * m);
    const cplx t = c + h * std::cos(theta);
    const cplx g = 1.0 / ((t - aj) * (t - ak));
    if (q == 0) {
      phase = std::arg(g);
    } else {
      const double jump = std::arg(g / g_prev);
      if (std::abs(jump) > M_PI / 2.0)
        throw RefineRuleError("complement integral: argument jump above pi/2");
      phase += jump;
    }
    g_prev = g;
    const cplx sq = std::sqrt(std::abs(g)) * std::polar(1.0, phase / 2.0);
    const double cc = std::cos(theta / 2.0);
    const cplx val = 2.0 * h * cc * cc * sq;  // = W(t) * h * sin(theta), sign pending
    if (q == q_mid) {
      t_mid = t;
      v_mid = val;
      theta_mid = theta;
    }
    sum += val;
  }

  auto w_full = [&](cplx t) { return (b - t) / ((t - aj) * (t - ak) * (t - ai)); };
  const cplx w_cont = continue_sqrt(w_full, side_val.t_mid, side_val.w_mid, t_mid);
  const cplx w_here = v_mid / (h * std::sin(theta_mid));
  const double sign = std::abs(w_here - w_cont) <= std::abs(-w_here - w_cont) ? 1.0 : -1.0;
  return sign * (M_PI / m) * sum;
}

LoopResiduals loop_identities(const CubicRoots& roots, cplx b, ChebRule rule) {
  const Triangle tri = roots.triangle();
  const double guard = 1e-9 * roots.diameter();
  if (tri.hull_distance(b) > 0.0)
    throw InvalidArgumentError("loop_identities: b must lie inside the triangle");
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k)
      if (segment_distance(b, roots.a[static_cast<size_t>(j)], roots.a[static_cast<size_t>(k)]) < guard &&
          std::abs(b - roots.a[static_cast<size_t>(CubicRoots::other_index(j, k))]) > guard)
        throw BranchAmbiguityError("loop_identities: b within guard distance of a side");

  // pi identity on the side (a_1, a_2) paired with its complement to a_3.
  detail::SideIntegrator side01(roots, 0, 1, rule.m);
  const auto v01 = side01.eval_anchored(b);
  const cplx comp = complement_integral(roots, b, 0, 1, rule.m, v01);
  const double r_pi = std::abs(v01.f + comp - cplx(M_PI, 0.0));

  // 2 pi identity, sides taken cyclically with their own anchored branches.
  const cplx s12 = f_jk(roots, b, 1, 2, rule);
  const cplx s20 = f_jk(roots, b, 2, 0, rule);
  const double r_2pi = std::abs(v01.f + s12 + s20 - cplx(2.0 * M_PI, 0.0));
  return {r_pi, r_2pi};
}

}  // namespace heun
