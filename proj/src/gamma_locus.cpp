#include "heun/gamma_locus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heun/errors.hpp"

namespace heun {

using detail::SideIntegrator;

std::pair<int, int> opposite_side(int i) {
  switch (i) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    case 2: return {0, 1};
    default: throw InvalidArgumentError("opposite_side: index must be in {0,1,2}");
  }
}

namespace {

constexpr int kTraceRule = 200;

struct SideChain {
  // Anchored evaluation chain: one homotopy anchor, then value continuity.
  explicit SideChain(const CubicRoots& roots, int j, int k, int m = kTraceRule)
      : side(roots, j, k, m) {}

  SideIntegrator::Value at(cplx b) {
    if (!seeded) {
      last = side.eval_anchored(b);
      seeded = true;
    } else {
      last = side.eval_near(b, last);
    }
    return last;
  }

  SideIntegrator side;
  SideIntegrator::Value last{};
  bool seeded = false;
};

}  // namespace

LocusArc trace_gamma(const CubicRoots& roots, int i, double step, double arc_tol,
                     const TraceStop& stop) {
  if (roots.collinear)
    throw BranchAmbiguityError("trace_gamma: collinear roots have no transversal locus");
  const auto [j, k] = opposite_side(i);
  const double diam = roots.diameter();
  if (step <= 0.0) step = diam / 200.0;
  const cplx ai = roots.a[static_cast<size_t>(i)];

  SideChain chain(roots, j, k);
  // Companion condition: the arc of gamma_m through b0 for the next index.
  const int m_idx = (i + 1) % 3;
  const auto [jc, kc] = opposite_side(m_idx);
  SideChain companion(roots, jc, kc);

  LocusArc arc;
  arc.i = i;
  arc.arc_tol = arc_tol;
  arc.points.push_back(ai);

  // Launch tangent at a_i, oriented into the triangle.
  auto v0 = chain.at(ai);
  cplx tangent = std::conj(v0.fprime);
  if (std::abs(tangent) < 1e-12) throw ConvergenceError("trace_gamma: stalled at launch", 0.0);
  tangent /= std::abs(tangent);
  const cplx inward = roots.centroid() - ai;
  if (tangent.real() * inward.real() + tangent.imag() * inward.imag() < 0.0) tangent = -tangent;

  cplx p = ai;
  double comp_prev = std::imag(companion.at(ai).f);
  const int max_vertices = static_cast<int>(60.0 * diam / step) + 16;

  auto correct = [&](cplx q) {
    // 1-D Newton along the curve normal.
    for (int it = 0; it < 16; ++it) {
      const auto v = chain.at(q);
      if (std::abs(v.f.imag()) < arc_tol) return q;
      const double fp = std::abs(v.fprime);
      if (fp < 1e-12) throw ConvergenceError("trace_gamma: stalled trace (f' ~ 0)", fp);
      const cplx normal = cplx(0.0, 1.0) * std::conj(v.fprime) / fp;
      q += (-v.f.imag() / fp) * normal;
    }
    const auto v = chain.at(q);
    if (std::abs(v.f.imag()) < 10.0 * arc_tol) return q;
    throw ConvergenceError("trace_gamma: corrector did not converge", std::abs(v.f.imag()));
  };

  for (int n = 0; n < max_vertices; ++n) {
    cplx q = correct(p + step * tangent);
    // Large normal corrections mean the curve bends faster than the step.
    for (int retry = 0; retry < 3 && std::abs(q - p) > 2.0 * step; ++retry)
      q = correct(p + (step / (2 << retry)) * tangent);
    arc.points.push_back(q);

    const double comp_cur = std::imag(companion.at(q).f);
    const bool default_stop = comp_prev != 0.0 && comp_cur != 0.0 &&
                              std::signbit(comp_prev) != std::signbit(comp_cur) && n > 0;
    if (stop ? stop(p, q) : default_stop) return arc;
    comp_prev = comp_cur;

    const auto v = chain.at(q);
    cplx t_new = std::conj(v.fprime);
    const double fp = std::abs(t_new);
    if (fp < 1e-12) throw ConvergenceError("trace_gamma: stalled trace (f' ~ 0)", fp);
    t_new /= fp;
    if (t_new.real() * tangent.real() + t_new.imag() * tangent.imag() < 0.0) t_new = -t_new;
    tangent = t_new;
    p = q;
  }
  throw ConvergenceError("trace_gamma: vertex cap reached before the stop condition",
                         static_cast<double>(max_vertices));
}

namespace {

// Sign-pattern bisection on (Im f_23, Im f_13) over boxes shrinking around
// the candidate cell.
cplx bisection_core(const CubicRoots& roots, double tol, int max_levels) {
  SideChain c1(roots, 1, 2);
  SideChain c2(roots, 0, 2);
  const Triangle tri = roots.triangle();
  const double diam = tri.diameter();

  double x0 = std::min({roots.a[0].real(), roots.a[1].real(), roots.a[2].real()});
  double x1 = std::max({roots.a[0].real(), roots.a[1].real(), roots.a[2].real()});
  double y0 = std::min({roots.a[0].imag(), roots.a[1].imag(), roots.a[2].imag()});
  double y1 = std::max({roots.a[0].imag(), roots.a[1].imag(), roots.a[2].imag()});

  const int G = 12;
  for (int level = 0; level < max_levels; ++level) {
    std::vector<double> s1(static_cast<size_t>((G + 1) * (G + 1)));
    std::vector<double> s2(static_cast<size_t>((G + 1) * (G + 1)));
    std::vector<bool> valid(static_cast<size_t>((G + 1) * (G + 1)), false);
    for (int iy = 0; iy <= G; ++iy)
      for (int ix = 0; ix <= G; ++ix) {
        const cplx z(x0 + (x1 - x0) * ix / G, y0 + (y1 - y0) * iy / G);
        if (tri.hull_distance(z) > 0.05 * diam) continue;
        try {
          s1[static_cast<size_t>(iy * (G + 1) + ix)] = std::imag(c1.at(z).f);
          s2[static_cast<size_t>(iy * (G + 1) + ix)] = std::imag(c2.at(z).f);
          valid[static_cast<size_t>(iy * (G + 1) + ix)] = true;
        } catch (const NumericalError&) {
        }
      }

    int best_ix = -1, best_iy = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < G; ++iy)
      for (int ix = 0; ix < G; ++ix) {
        const size_t c00 = static_cast<size_t>(iy * (G + 1) + ix);
        const size_t c10 = c00 + 1;
        const size_t c01 = c00 + static_cast<size_t>(G + 1);
        const size_t c11 = c01 + 1;
        if (!(valid[c00] && valid[c10] && valid[c01] && valid[c11])) continue;
        auto changes = [&](const std::vector<double>& s) {
          const double mn = std::min({s[c00], s[c10], s[c01], s[c11]});
          const double mx = std::max({s[c00], s[c10], s[c01], s[c11]});
          return mn <= 0.0 && mx >= 0.0;
        };
        if (!changes(s1) || !changes(s2)) continue;
        const double score = std::abs(s1[c00]) + std::abs(s2[c00]);
        if (score < best_score) {
          best_score = score;
          best_ix = ix;
          best_iy = iy;
        }
      }
    if (best_ix < 0)
      throw ConvergenceError("find_b0: no sign-consistent cell (quadrature failure?)", 0.0);

    const double dx = (x1 - x0) / G, dy = (y1 - y0) / G;
    const double nx0 = x0 + dx * (best_ix - 1), nx1 = x0 + dx * (best_ix + 2);
    const double ny0 = y0 + dy * (best_iy - 1), ny1 = y0 + dy * (best_iy + 2);
    x0 = nx0;
    x1 = nx1;
    y0 = ny0;
    y1 = ny1;
    if (std::hypot(x1 - x0, y1 - y0) < tol) break;
  }
  return cplx(0.5 * (x0 + x1), 0.5 * (y0 + y1));
}

}  // namespace

cplx find_b0_bisection(const CubicRoots& roots, double tol) {
  if (roots.collinear)
    throw BranchAmbiguityError("find_b0: collinear roots");
  return bisection_core(roots, tol, 40);
}

cplx find_b0(const CubicRoots& roots, double newton_tol) {
  if (roots.collinear)
    throw BranchAmbiguityError("find_b0: collinear roots");
  const Triangle tri = roots.triangle();
  const double diam = tri.diameter();

  SideChain c1(roots, 1, 2);
  SideChain c2(roots, 0, 2);

  auto newton = [&](cplx start, int iters) -> cplx {
    cplx p = start;
    for (int it = 0; it < iters; ++it) {
      const auto v1 = c1.at(p);
      const auto v2 = c2.at(p);
      const double F1 = v1.f.imag(), F2 = v2.f.imag();
      if (std::max(std::abs(F1), std::abs(F2)) < newton_tol) return p;
      // d Im f = Im(f') dx + Re(f') dy
      const double a11 = v1.fprime.imag(), a12 = v1.fprime.real();
      const double a21 = v2.fprime.imag(), a22 = v2.fprime.real();
      const double det = a11 * a22 - a12 * a21;
      if (std::abs(det) < 1e-300) break;
      const double dx = (-F1 * a22 + F2 * a12) / det;
      const double dy = (-F2 * a11 + F1 * a21) / det;
      p += cplx(dx, dy);
      if (tri.hull_distance(p) > 0.2 * diam) break;  // left the triangle
    }
    return cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  };

  cplx p = newton(roots.centroid(), 60);
  if (!std::isnan(p.real())) return p;

  // Fallback: coarse bisection, then polish.
  const cplx seed = bisection_core(roots, 1e-4 * diam, 12);
  p = newton(seed, 60);
  if (!std::isnan(p.real())) return p;
  throw ConvergenceError("find_b0: Newton failed from centroid and bisection seed", 0.0);
}

GammaQ build_gamma_q(const CubicRoots& roots, double step, double arc_tol) {
  GammaQ gq;
  if (roots.collinear) {
    // Degenerate real-line locus: segment between the extreme roots, split at
    // the middle root, which also stands in for b0.
    std::array<int, 3> order{0, 1, 2};
    const cplx dir = roots.a[1] - roots.a[0];
    auto along = [&](int idx) {
      const cplx d = roots.a[static_cast<size_t>(idx)] - roots.a[0];
      return d.real() * dir.real() + d.imag() * dir.imag();
    };
    std::sort(order.begin(), order.end(), [&](int u, int v) { return along(u) < along(v); });
    const int mid = order[1];
    gq.degenerate = true;
    gq.b0 = roots.a[static_cast<size_t>(mid)];
    const int samples = 200;
    for (int i = 0; i < 3; ++i) {
      LocusArc arc;
      arc.i = i;
      arc.arc_tol = arc_tol;
      if (i == mid) {
        arc.points = {gq.b0, gq.b0};
      } else {
        const cplx from = roots.a[static_cast<size_t>(i)];
        for (int s = 0; s <= samples; ++s)
          arc.points.push_back(from + (static_cast<double>(s) / samples) * (gq.b0 - from));
      }
      gq.arcs[static_cast<size_t>(i)] = std::move(arc);
    }
    return gq;
  }

  gq.b0 = find_b0(roots);
  for (int i = 0; i < 3; ++i) {
    LocusArc arc = trace_gamma(roots, i, step, arc_tol);
    // Land the final vertex exactly on the common point.
    arc.points.back() = gq.b0;
    gq.arcs[static_cast<size_t>(i)] = std::move(arc);
  }
  return gq;
}

double distance_to_locus(const GammaQ& gq, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& arc : gq.arcs)
    for (size_t s = 0; s + 1 < arc.points.size(); ++s)
      d = std::min(d, segment_distance(z, arc.points[s], arc.points[s + 1]));
  return d;
}

cplx unique_b_on_line(const CubicRoots& roots, cplx b_ref, int j, int k) {
  if (roots.collinear) throw BranchAmbiguityError("unique_b_on_line: collinear roots");
  const Triangle tri = roots.triangle();
  if (tri.hull_distance(b_ref) > 0.0)
    throw InvalidArgumentError("unique_b_on_line: b_ref must lie inside the triangle");

  const cplx aj = roots.a[static_cast<size_t>(j)];
  const cplx ak = roots.a[static_cast<size_t>(k)];
  const cplx u = (ak - aj) / std::abs(ak - aj);

  // Clip { b_ref + s u } to the triangle by sampling, then refine the ends.
  const double diam = tri.diameter();
  double s_lo = 0.0, s_hi = 0.0;
  {
    const double span = 2.0 * diam;
    auto inside = [&](double s) { return tri.hull_distance(b_ref + s * u) <= 0.0; };
    double lo = 0.0;
    double step = span / 400.0;
    while (inside(lo - step) && lo > -span) lo -= step;
    double hi = 0.0;
    while (inside(hi + step) && hi < span) hi += step;
    s_lo = lo;
    s_hi = hi;
  }
  const double shrink = 1e-7 * diam;
  s_lo += shrink;
  s_hi -= shrink;

  SideChain chain(roots, std::min(j, k), std::max(j, k));
  auto h = [&](double s) { return std::imag(chain.at(b_ref + s * u).f); };
  double h_lo = h(s_lo), h_hi = h(s_hi);
  if (h_lo == 0.0) return b_ref + s_lo * u;
  if (h_hi == 0.0) return b_ref + s_hi * u;
  if (std::signbit(h_lo) == std::signbit(h_hi))
    throw ConvergenceError("unique_b_on_line: no sign change inside the triangle", 0.0);
  for (int it = 0; it < 200; ++it) {
    const double s_mid = 0.5 * (s_lo + s_hi);
    const double h_mid = h(s_mid);
    if (h_mid == 0.0 || (s_hi - s_lo) < 1e-14 * std::max(1.0, diam)) return b_ref + s_mid * u;
    if (std::signbit(h_mid) == std::signbit(h_lo)) {
      s_lo = s_mid;
      h_lo = h_mid;
    } else {
      s_hi = s_mid;
    }
  }
  return b_ref + 0.5 * (s_lo + s_hi) * u;
}

}  // namespace heun
