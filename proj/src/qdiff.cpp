#include "heun/qdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "heun/errors.hpp"

namespace heun {

namespace {

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Arclength parameterization of a polyline.
struct ArcParam {
  explicit ArcParam(const std::vector<cplx>& pts) : p(pts) {
    cum.resize(p.size(), 0.0);
    for (size_t i = 1; i < p.size(); ++i) cum[i] = cum[i - 1] + std::abs(p[i] - p[i - 1]);
  }
  double total() const { return cum.empty() ? 0.0 : cum.back(); }
  cplx at(double s) const {
    if (p.size() == 1) return p[0];
    s = std::clamp(s, 0.0, total());
    const size_t k = segment_of(s);
    const double ds = cum[k + 1] - cum[k];
    const double f = ds > 0 ? (s - cum[k]) / ds : 0.0;
    return p[k] + f * (p[k + 1] - p[k]);
  }
  cplx tangent(double s) const {
    if (p.size() == 1) return cplx(1.0);
    const size_t k = segment_of(std::clamp(s, 0.0, total()));
    const cplx d = p[k + 1] - p[k];
    const double a = std::abs(d);
    return a > 0 ? d / a : cplx(1.0);
  }
  size_t segment_of(double s) const {
    size_t lo = 0, hi = p.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (cum[mid] <= s) lo = mid; else hi = mid;
    }
    return lo;
  }
  const std::vector<cplx>& p;
  std::vector<double> cum;
};

bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool segment_hits_polyline(cplx a, cplx b, const std::vector<cplx>& poly) {
  for (size_t i = 0; i + 1 < poly.size(); ++i)
    if (segments_intersect(a, b, poly[i], poly[i + 1])) return true;
  return false;
}

}  // namespace

cplx QuadDiff::ratio(cplx z) const {
  cplx num(1.0), den(1.0);
  for (const cplx& r : zeros) num *= (z - r);
  for (const cplx& p : poles) den *= (z - p);
  return num / den;
}

cplx QuadDiff::center() const {
  cplx c(0.0);
  int n = 0;
  for (const cplx& z : zeros) { c += z; ++n; }
  for (const cplx& p : poles) { c += p; ++n; }
  return n > 0 ? c / static_cast<double>(n) : cplx(0.0);
}

double QuadDiff::diameter() const {
  std::vector<cplx> all = zeros;
  all.insert(all.end(), poles.begin(), poles.end());
  double d = 0.0;
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) d = std::max(d, std::abs(all[i] - all[j]));
  return d > 0.0 ? d : 1.0;
}

QuadDiff make_quad_diff(Polynomial u1, Polynomial u2) {
  if (u1.is_zero() || u2.is_zero())
    throw InvalidArgumentError("make_quad_diff: polynomials must be nonzero");
  if (std::abs(u1.leading() - cplx(1.0)) > 1e-12 || std::abs(u2.leading() - cplx(1.0)) > 1e-12)
    throw InvalidArgumentError("make_quad_diff: U1 and U2 must be monic");
  if (u2.degree() - u1.degree() != 2)
    throw InvalidArgumentError("make_quad_diff: need deg U2 - deg U1 = 2");
  QuadDiff qd;
  qd.zeros = u1.degree() >= 1 ? roots(u1) : std::vector<cplx>{};
  qd.poles = roots(u2);
  qd.u1 = std::move(u1);
  qd.u2 = std::move(u2);
  return qd;
}

QuadDiff heun_qdiff(const CubicRoots& r, cplx b) {
  const double tol = 1e-12 * r.diameter();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(b - r.a[static_cast<size_t>(i)]) <= tol) {
      // (b - z)/Q cancels to -1/((z - a_j)(z - a_k))
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      QuadDiff qd;
      qd.u1 = Polynomial{cplx(1.0)};
      qd.poles = {r.a[static_cast<size_t>(j)], r.a[static_cast<size_t>(k)]};
      sort_lex(qd.poles);
      qd.u2 = Polynomial::from_roots(qd.poles);
      return qd;
    }
  }
  QuadDiff qd;
  qd.zeros = {b};
  qd.poles = {r.a[0], r.a[1], r.a[2]};
  sort_lex(qd.poles);
  qd.u1 = Polynomial::from_roots(qd.zeros);
  qd.u2 = Polynomial::from_roots(qd.poles);
  return qd;
}

std::vector<cplx> launch_directions(const QuadDiff& qd, cplx p, TrajectoryKind kind) {
  const double tol = 1e-9 * qd.diameter();
  int zero_mult = 0, pole_mult = 0;
  for (const cplx& z : qd.zeros)
    if (std::abs(z - p) <= tol) ++zero_mult;
  for (const cplx& q : qd.poles)
    if (std::abs(q - p) <= tol) ++pole_mult;
  if (zero_mult + pole_mult == 0)
    throw InvalidArgumentError("launch_directions: p is not a singular point");
  if (zero_mult + pole_mult > 1)
    throw UnsupportedConfigError("launch_directions: only simple zeros and poles are supported");

  // local coefficient c of R ~ c (z - p)^{order}
  cplx c(-1.0, 0.0);  // R = -U1/U2
  for (const cplx& z : qd.zeros)
    if (std::abs(z - p) > tol) c *= (p - z);
  for (const cplx& q : qd.poles)
    if (std::abs(q - p) > tol) c /= (p - q);

  // horizontal rays solve arg(c) + (order + 2) alpha = 0 mod 2pi,
  // vertical ones the same with pi on the right-hand side
  const double offset = kind == TrajectoryKind::kHorizontal ? 0.0 : M_PI;
  std::vector<cplx> dirs;
  if (zero_mult == 1) {
    for (int m = 0; m < 3; ++m)
      dirs.push_back(std::polar(1.0, (offset - std::arg(c) + 2.0 * M_PI * m) / 3.0));
  } else {
    dirs.push_back(std::polar(1.0, offset - std::arg(c)));
  }
  std::sort(dirs.begin(), dirs.end(), [](cplx a, cplx b) {
    auto key = [](cplx d) {
      double t = std::arg(d);
      return t < 0 ? t + 2.0 * M_PI : t;
    };
    return key(a) < key(b);
  });
  return dirs;
}

namespace {

struct TraceState {
  cplx z;
  cplx heading;   // unit
  cplx sqrt_r;    // branch consistent with the heading
  double level;   // running Im (horizontal) or Re (vertical) of int sqrt(R) dz
  double arclen;
};

struct Tracer {
  const QuadDiff& qd;
  TrajectoryKind kind;
  double diam, r_cap, r_esc, max_len, max_step, snap;
  cplx center;
  std::vector<cplx> sing;

  Tracer(const QuadDiff& q, TrajectoryKind k, const TraceControls& c) : qd(q), kind(k) {
    diam = qd.diameter();
    r_cap = c.capture_radius > 0 ? c.capture_radius : 1e-3 * diam;
    r_esc = c.escape_radius > 0 ? c.escape_radius : 50.0 * diam;
    max_len = c.max_arclength > 0 ? c.max_arclength : 200.0 * diam;
    max_step = c.max_step > 0 ? c.max_step : diam / 100.0;
    snap = 2e-7 * diam;
    center = qd.center();
    sing = qd.zeros;
    sing.insert(sing.end(), qd.poles.begin(), qd.poles.end());
  }

  double level_part(cplx w) const {
    return kind == TrajectoryKind::kHorizontal ? w.imag() : w.real();
  }

  // field direction at z, branch resolved against the previous heading
  cplx direction(cplx z, cplx prev_heading, cplx* sqrt_out = nullptr) const {
    cplx s = std::sqrt(qd.R(z));
    cplx d = kind == TrajectoryKind::kHorizontal ? std::conj(s) : cplx(0.0, 1.0) * std::conj(s);
    const double a = std::abs(d);
    if (a == 0.0) {
      if (sqrt_out) *sqrt_out = s;
      return prev_heading;
    }
    d /= a;
    if (dot(d, prev_heading) < 0.0) {
      d = -d;
      s = -s;
    }
    if (sqrt_out) *sqrt_out = s;
    return d;
  }

  double nearest_sing(cplx z, int* idx = nullptr) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < sing.size(); ++i) {
      const double d = std::abs(z - sing[i]);
      if (d < best) {
        best = d;
        if (idx) *idx = static_cast<int>(i);
      }
    }
    return best;
  }

  // int sqrt(R) dz over the straight chord a -> b (the antiderivative is
  // path independent), branch continued from the value sa at a.  Adaptive
  // Simpson keeps the increment error tiny even right next to a pole, which
  // is what ties the traced curve to the true separatrix level.
  cplx chord_integral(cplx a, cplx sa, cplx b, cplx* sb_out, double tol, int depth) const {
    const cplx m = 0.5 * (a + b);
    cplx sm = std::sqrt(qd.R(m));
    if (std::abs(sm - sa) > std::abs(sm + sa)) sm = -sm;
    cplx sb = std::sqrt(qd.R(b));
    if (std::abs(sb - sm) > std::abs(sb + sm)) sb = -sb;
    const cplx whole = (sa + 4.0 * sm + sb) / 6.0 * (b - a);
    if (depth <= 0) {
      *sb_out = sb;
      return whole;
    }
    cplx sm_l, sb_r;
    const cplx left = chord_simpson(a, sa, m, &sm_l);
    const cplx right = chord_simpson(m, sm_l, b, &sb_r);
    if (std::abs(left + right - whole) < tol) {
      *sb_out = sb_r;
      return left + right + (left + right - whole) / 15.0;
    }
    const cplx l2 = chord_integral(a, sa, m, &sm_l, 0.5 * tol, depth - 1);
    const cplx r2 = chord_integral(m, sm_l, b, &sb_r, 0.5 * tol, depth - 1);
    *sb_out = sb_r;
    return l2 + r2;
  }
  cplx chord_simpson(cplx a, cplx sa, cplx b, cplx* sb_out) const {
    const cplx m = 0.5 * (a + b);
    cplx sm = std::sqrt(qd.R(m));
    if (std::abs(sm - sa) > std::abs(sm + sa)) sm = -sm;
    cplx sb = std::sqrt(qd.R(b));
    if (std::abs(sb - sm) > std::abs(sb + sm)) sb = -sb;
    *sb_out = sb;
    return (sa + 4.0 * sm + sb) / 6.0 * (b - a);
  }

  // One RK2 step of length ds with a level-set correction afterwards.  The
  // corrector is skipped while landing on a singular point, where the weak
  // field would turn the normal correction into noise.  Returns false when
  // the branch bookkeeping says the step was too long.
  bool step(TraceState& st, double ds, double target_level, double* drift, bool correct) const {
    const cplx d1 = direction(st.z, st.heading);
    const cplx zm = st.z + 0.5 * ds * d1;
    const cplx d2 = direction(zm, d1);
    cplx z_new = st.z + ds * d2;

    cplx s_new;
    const double tol = 1e-13 * (1.0 + std::abs(st.sqrt_r)) * std::abs(z_new - st.z) + 1e-18;
    const cplx inc = chord_integral(st.z, st.sqrt_r, z_new, &s_new, tol, 24);

    cplx h_new = kind == TrajectoryKind::kHorizontal ? std::conj(s_new)
                                                     : cplx(0.0, 1.0) * std::conj(s_new);
    const double hn = std::abs(h_new);
    if (hn == 0.0) return false;
    h_new /= hn;
    if (dot(h_new, d2) < 0.0) return false;  // branch and heading disagree

    st.level += level_part(inc);
    st.arclen += std::abs(z_new - st.z);

    if (correct) {
      const double e = level_part(s_new * (cplx(0.0, 1.0) * h_new));
      const double err = st.level - target_level;
      if (drift) *drift = std::max(*drift, std::abs(err));
      if (std::abs(e) > 1e-14) {
        double tau = -err / e;
        const double cap = 0.5 * ds;
        tau = std::clamp(tau, -cap, cap);
        const cplx dz = tau * (cplx(0.0, 1.0) * h_new);
        st.level += level_part(s_new * dz);
        z_new += dz;
      }
    }
    st.heading = h_new;
    st.sqrt_r = s_new;
    st.z = z_new;
    return true;
  }

  // Remaining canonical integral int_z^v sqrt(R) dz along the radial path,
  // branch continued from the carried value; z(u) = v + u^2 (z - v) absorbs
  // the endpoint singularity at the vertex.
  cplx remaining_w(cplx z, cplx s_at_z, cplx v) const {
    static const double gx[4] = {0.069431844202973712, 0.33000947820757187,
                                 0.66999052179242813, 0.93056815579702623};
    static const double gw[4] = {0.17392742256872693, 0.32607257743127307,
                                 0.32607257743127307, 0.17392742256872693};
    const cplx delta = z - v;
    cplx integral(0.0);
    cplx s_prev = s_at_z;
    const int panels = 16;
    for (int pnl = panels - 1; pnl >= 0; --pnl)
      for (int k = 3; k >= 0; --k) {
        const double u = (pnl + gx[k]) / panels;
        cplx s = std::sqrt(qd.R(v + (u * u) * delta));
        if (std::abs(s - s_prev) > std::abs(s + s_prev)) s = -s;
        integral += s * (gw[k] / panels) * 2.0 * u * delta;
        s_prev = s;
      }
    return -integral;  // oriented z -> v
  }

  // Landing step: field following plus a correction that zeroes the
  // transversal part of the remaining canonical integral, which pins the
  // point to the separatrix without touching the frozen level bookkeeping.
  void step_landing(TraceState& st, double ds, cplx vertex) const {
    const cplx w_rem = remaining_w(st.z, st.sqrt_r, vertex);
    const double err = level_part(w_rem);
    const double smag = std::abs(st.sqrt_r);
    if (smag > 1e-14) {
      const double sgn = kind == TrajectoryKind::kHorizontal ? 1.0 : -1.0;
      double tau = sgn * err / smag;
      const double cap = 0.5 * std::abs(st.z - vertex);
      tau = std::clamp(tau, -cap, cap);
      st.z += tau * (cplx(0.0, 1.0) * st.heading);
      st.heading = direction(st.z, st.heading, &st.sqrt_r);
    }
    const cplx d1 = direction(st.z, st.heading);
    const cplx zm = st.z + 0.5 * ds * d1;
    const cplx d2 = direction(zm, d1);
    const cplx z_new = st.z + ds * d2;
    st.arclen += std::abs(z_new - st.z);
    st.heading = direction(z_new, d2, &st.sqrt_r);
    st.z = z_new;
  }
};

TrajectorySegment run_trace(const Tracer& tr, TraceState st, double target_level, int origin_vertex,
                            int origin_dir, const cplx start_ref, const cplx start_heading) {
  TrajectorySegment seg;
  seg.kind = tr.kind;
  seg.origin_vertex = origin_vertex;
  seg.origin_dir = origin_dir;
  seg.points.push_back(st.z);

  double drift = 0.0;
  const double burn_in = std::max(4.0 * tr.r_cap, 8.0 * std::abs(st.z - start_ref));
  int landing_vertex = -1;
  int suppressed_vertex = -1;  // vertex of an aborted landing, until we leave it
  double landing_best = std::numeric_limits<double>::infinity();
  int landing_steps = 0;
  int stalls = 0;

  const int hard_cap = 2000000;
  for (int it = 0; it < hard_cap; ++it) {
    if (std::abs(st.z - tr.center) > tr.r_esc) {
      seg.terminal = {TerminalKind::kEscaped, -1};
      break;
    }
    if (st.arclen > tr.max_len) {
      seg.terminal = {TerminalKind::kExhausted, -1};
      break;
    }

    int ns = -1;
    const double dist = tr.nearest_sing(st.z, &ns);

    if (suppressed_vertex >= 0 &&
        (ns != suppressed_vertex || dist > 1.5 * tr.r_cap))
      suppressed_vertex = -1;

    if (landing_vertex >= 0 && ns == landing_vertex) {
      if (dist <= tr.snap) {
        seg.terminal = {TerminalKind::kHit, landing_vertex};
        seg.capture_gap = dist;
        break;
      }
      landing_best = std::min(landing_best, dist);
      if (dist > 2.0 * std::max(landing_best, 0.25 * tr.r_cap) || ++landing_steps > 800) {
        suppressed_vertex = landing_vertex;  // false capture, resume
        landing_vertex = -1;
      }
    } else if (landing_vertex >= 0) {
      suppressed_vertex = landing_vertex;
      landing_vertex = -1;
    }

    if (landing_vertex < 0 && dist < tr.r_cap && ns != suppressed_vertex) {
      const bool is_origin = origin_vertex >= 0 && ns == origin_vertex && st.arclen < burn_in;
      if (!is_origin) {
        landing_vertex = ns;
        landing_best = dist;
        landing_steps = 0;
      }
    }

    // closed-orbit detection for free starts
    if (origin_vertex < 0 && st.arclen > std::max(4.0 * tr.r_cap, 8.0 * tr.snap) &&
        std::abs(st.z - start_ref) < tr.r_cap && dot(st.heading, start_heading) > 0.0) {
      seg.terminal = {TerminalKind::kClosed, -1};
      break;
    }

    double ds;
    if (landing_vertex >= 0) {
      ds = std::max(0.2 * dist, 0.5 * tr.snap);
    } else {
      ds = std::clamp(0.2 * dist, 1e-7 * tr.diam, tr.max_step);
    }
    const cplx before = st.z;
    if (landing_vertex >= 0) {
      tr.step_landing(st, ds, tr.sing[static_cast<size_t>(landing_vertex)]);
    } else {
      bool ok = false;
      for (int halve = 0; halve < 8 && !ok; ++halve) {
        ok = tr.step(st, ds, target_level, &drift, /*correct=*/true);
        if (!ok) ds *= 0.5;
      }
      if (!ok) throw ConvergenceError("trace: heading and branch kept disagreeing", ds);
    }
    if (std::abs(st.z - before) < 1e-16 * tr.diam && ++stalls > 50)
      throw ConvergenceError("trace: step collapsed near an unresolved singularity",
                             std::abs(st.z - before));

    // keep the polyline at a bounded density
    if (std::abs(st.z - seg.points.back()) > 0.25 * tr.max_step || landing_vertex >= 0)
      seg.points.push_back(st.z);
  }
  if (seg.points.back() != st.z) seg.points.push_back(st.z);
  seg.level_drift = drift;
  return seg;
}

}  // namespace

TrajectorySegment trace(const QuadDiff& qd, cplx start, cplx dir, TrajectoryKind kind,
                        const TraceControls& controls) {
  Tracer tr(qd, kind, controls);
  const double a = std::abs(dir);
  if (a == 0.0) throw InvalidArgumentError("trace: direction must be nonzero");
  TraceState st;
  st.z = start;
  st.heading = dir / a;
  st.heading = tr.direction(start, st.heading, &st.sqrt_r);
  st.level = 0.0;
  st.arclen = 0.0;
  return run_trace(tr, st, 0.0, -1, -1, start, st.heading);
}

TrajectorySegment trace_from_singular(const QuadDiff& qd, int vertex, int dir_index,
                                      TrajectoryKind kind, const TraceControls& controls) {
  Tracer tr(qd, kind, controls);
  std::vector<cplx> all = qd.zeros;
  all.insert(all.end(), qd.poles.begin(), qd.poles.end());
  if (vertex < 0 || vertex >= static_cast<int>(all.size()))
    throw InvalidArgumentError("trace_from_singular: bad vertex index");
  const cplx v = all[static_cast<size_t>(vertex)];
  const std::vector<cplx> dirs = launch_directions(qd, v, kind);
  if (dir_index < 0 || dir_index >= static_cast<int>(dirs.size()))
    throw InvalidArgumentError("trace_from_singular: bad direction index");
  const cplx dir = dirs[static_cast<size_t>(dir_index)];

  const double off = controls.launch_offset > 0 ? controls.launch_offset : 10.0 * tr.r_cap;
  const cplx z0 = v + off * dir;

  // level of the separatrix is the value at the vertex itself: integrate
  // int_v^{z0} sqrt(R) dz with the branch matching the outgoing heading;
  // the square-root substitution absorbs a possible 1/sqrt at the pole
  cplx s_anchor;
  cplx heading0 = tr.direction(z0, dir, &s_anchor);
  cplx integral(0.0);
  // composite Gauss-Legendre in u (z = v + u^2 off dir), walking u downward
  // so the branch chains away from the anchored value at z0
  static const double gx[4] = {0.069431844202973712, 0.33000947820757187,
                               0.66999052179242813, 0.93056815579702623};
  static const double gw[4] = {0.17392742256872693, 0.32607257743127307,
                               0.32607257743127307, 0.17392742256872693};
  const int panels = 24;
  cplx s_prev = s_anchor;
  for (int pnl = panels - 1; pnl >= 0; --pnl)
    for (int k = 3; k >= 0; --k) {
      const double u = (pnl + gx[k]) / panels;
      const cplx zq = v + (u * u) * off * dir;
      cplx s = std::sqrt(qd.R(zq));
      if (std::abs(s - s_prev) > std::abs(s + s_prev)) s = -s;
      integral += s * (gw[k] / panels) * 2.0 * u * off * dir;
      s_prev = s;
    }

  TraceState st;
  st.z = z0;
  st.heading = heading0;
  st.sqrt_r = s_anchor;
  st.level = tr.level_part(integral);
  st.arclen = 0.0;
  TrajectorySegment seg = run_trace(tr, st, 0.0, vertex, dir_index, v, heading0);
  seg.points.insert(seg.points.begin(), v);
  return seg;
}

namespace {

// Pairs opposite traces of the same singular trajectory into one edge.
bool same_curve(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  ArcParam pa(a);
  double worst = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const cplx p = pa.at(pa.total() * k / 16.0);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < b.size(); ++i) best = std::min(best, segment_distance(p, b[i], b[i + 1]));
    worst = std::max(worst, best);
    if (worst > tol) return false;
  }
  return true;
}

}  // namespace

SingularGraph singular_graph(const QuadDiff& qd, const TraceControls& controls) {
  SingularGraph g;
  g.qd = qd;
  for (const cplx& z : qd.zeros)
    g.vertices.push_back({static_cast<int>(g.vertices.size()), z, GraphVertex::Kind::kZero});
  for (const cplx& p : qd.poles)
    g.vertices.push_back({static_cast<int>(g.vertices.size()), p, GraphVertex::Kind::kPole});

  bool any_escaped = false, any_exhausted = false;
  for (const auto& v : g.vertices) {
    const std::vector<cplx> dirs = launch_directions(qd, v.pos, TrajectoryKind::kHorizontal);
    for (int d = 0; d < static_cast<int>(dirs.size()); ++d) {
      TrajectorySegment seg =
          trace_from_singular(qd, v.id, d, TrajectoryKind::kHorizontal, controls);
      if (seg.terminal.kind == TerminalKind::kEscaped) any_escaped = true;
      if (seg.terminal.kind == TerminalKind::kExhausted) any_exhausted = true;
      g.raw.push_back(std::move(seg));
    }
  }
  g.status = any_escaped   ? StrebelStatus::kNotStrebel
             : any_exhausted ? StrebelStatus::kInconclusive
                             : StrebelStatus::kStrebel;

  // merge opposite traces into edges
  const double diam = qd.diameter();
  const double pair_tol = std::max(2e-3 * diam, 40.0 * (controls.capture_radius > 0 ? controls.capture_radius : 1e-3 * diam));
  std::vector<bool> used(g.raw.size(), false);
  for (size_t i = 0; i < g.raw.size(); ++i) {
    if (used[i] || g.raw[i].terminal.kind != TerminalKind::kHit) continue;
    used[i] = true;
    const int a0 = g.raw[i].origin_vertex, a1 = g.raw[i].terminal.vertex;
    double gap = g.raw[i].capture_gap;
    for (size_t j = i + 1; j < g.raw.size(); ++j) {
      if (used[j] || g.raw[j].terminal.kind != TerminalKind::kHit) continue;
      const int b0 = g.raw[j].origin_vertex, b1 = g.raw[j].terminal.vertex;
      if (!((a0 == b0 && a1 == b1) || (a0 == b1 && a1 == b0))) continue;
      if (!same_curve(g.raw[i].points, g.raw[j].points, pair_tol)) continue;
      used[j] = true;
      gap = std::max(gap, g.raw[j].capture_gap);
      break;
    }
    GraphEdge e;
    e.id = static_cast<int>(g.edges.size());
    e.v0 = a0;
    e.v1 = a1;
    e.polyline = g.raw[i].points;
    e.polyline.push_back(g.vertices[static_cast<size_t>(a1)].pos);  // snap terminal
    e.capture_gap = gap;
    g.edges.push_back(std::move(e));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Planar embedding: faces by rotation-system walks plus containment for the
// walks that bound a face from inside (floating components, dangles).

namespace {

struct HalfEdge {
  int edge;
  bool fwd;
};

struct Embedding {
  std::vector<std::vector<cplx>> hpoly;    // polyline per half-edge id
  std::vector<int> hvert_from, hvert_to;   // vertex ids
  std::vector<double> hangle;              // departure angle
  std::vector<int> next;                   // face-walk successor
  std::vector<int> walk_of;                // walk id per half-edge
  std::vector<std::vector<int>> walks;     // half-edge ids per walk
  std::vector<double> walk_area;           // signed area
  std::vector<int> face_of_walk;
  int n_faces = 0;
  int unbounded_face = 0;
  std::vector<int> defining_walk;          // per face, -1 for unbounded
};

int hid(int edge, bool fwd) { return 2 * edge + (fwd ? 0 : 1); }
int opposite(int h) { return h ^ 1; }

Embedding build_embedding(const SingularGraph& g) {
  Embedding em;
  const int nh = 2 * static_cast<int>(g.edges.size());
  const double diam = g.qd.diameter();
  em.hpoly.resize(static_cast<size_t>(nh));
  em.hvert_from.resize(static_cast<size_t>(nh));
  em.hvert_to.resize(static_cast<size_t>(nh));
  em.hangle.resize(static_cast<size_t>(nh));
  for (const auto& e : g.edges) {
    em.hpoly[static_cast<size_t>(hid(e.id, true))] = e.polyline;
    std::vector<cplx> rev(e.polyline.rbegin(), e.polyline.rend());
    em.hpoly[static_cast<size_t>(hid(e.id, false))] = std::move(rev);
    em.hvert_from[static_cast<size_t>(hid(e.id, true))] = e.v0;
    em.hvert_to[static_cast<size_t>(hid(e.id, true))] = e.v1;
    em.hvert_from[static_cast<size_t>(hid(e.id, false))] = e.v1;
    em.hvert_to[static_cast<size_t>(hid(e.id, false))] = e.v0;
  }
  for (int h = 0; h < nh; ++h) {
    const auto& poly = em.hpoly[static_cast<size_t>(h)];
    const cplx v = poly.front();
    cplx dir(1.0, 0.0);
    for (const cplx& p : poly)
      if (std::abs(p - v) > 1e-9 * diam) {
        dir = p - v;
        break;
      }
    em.hangle[static_cast<size_t>(h)] = std::arg(dir);
  }

  // rotation system: half-edges leaving each vertex in ccw order
  std::vector<std::vector<int>> at_vertex(g.vertices.size());
  for (int h = 0; h < nh; ++h) at_vertex[static_cast<size_t>(em.hvert_from[static_cast<size_t>(h)])].push_back(h);
  for (auto& list : at_vertex)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      if (em.hangle[static_cast<size_t>(a)] != em.hangle[static_cast<size_t>(b)])
        return em.hangle[static_cast<size_t>(a)] < em.hangle[static_cast<size_t>(b)];
      return a < b;
    });

  // face-on-the-left traversal: continue with the clockwise neighbor of the
  // reversed half-edge in the rotation at the target vertex
  em.next.assign(static_cast<size_t>(nh), -1);
  for (int h = 0; h < nh; ++h) {
    const int rev = opposite(h);
    const auto& list = at_vertex[static_cast<size_t>(em.hvert_to[static_cast<size_t>(h)])];
    const auto it = std::find(list.begin(), list.end(), rev);
    const size_t idx = static_cast<size_t>(it - list.begin());
    em.next[static_cast<size_t>(h)] = list[(idx + list.size() - 1) % list.size()];
  }

  // face walks
  em.walk_of.assign(static_cast<size_t>(nh), -1);
  for (int h = 0; h < nh; ++h) {
    if (em.walk_of[static_cast<size_t>(h)] >= 0) continue;
    const int w = static_cast<int>(em.walks.size());
    em.walks.emplace_back();
    int cur = h;
    do {
      em.walk_of[static_cast<size_t>(cur)] = w;
      em.walks.back().push_back(cur);
      cur = em.next[static_cast<size_t>(cur)];
    } while (cur != h);
  }
  em.walk_area.resize(em.walks.size(), 0.0);
  for (size_t w = 0; w < em.walks.size(); ++w) {
    double area = 0.0;
    for (int h : em.walks[w]) {
      const auto& poly = em.hpoly[static_cast<size_t>(h)];
      for (size_t i = 0; i + 1 < poly.size(); ++i)
        area += poly[i].real() * poly[i + 1].imag() - poly[i + 1].real() * poly[i].imag();
    }
    em.walk_area[w] = 0.5 * area;
  }

  // positive walks define bounded faces; the rest are assigned by containment
  const double area_tol = 1e-10 * diam * diam;
  std::vector<int> positive;
  for (size_t w = 0; w < em.walks.size(); ++w)
    if (em.walk_area[w] > area_tol) positive.push_back(static_cast<int>(w));

  em.face_of_walk.assign(em.walks.size(), -1);
  em.n_faces = 1 + static_cast<int>(positive.size());
  em.unbounded_face = 0;
  em.defining_walk.assign(static_cast<size_t>(em.n_faces), -1);
  std::map<int, int> face_of_positive;
  for (size_t k = 0; k < positive.size(); ++k) {
    face_of_positive[positive[k]] = static_cast<int>(k) + 1;
    em.face_of_walk[static_cast<size_t>(positive[k])] = static_cast<int>(k) + 1;
    em.defining_walk[static_cast<size_t>(k) + 1] = positive[k];
  }

  // polygon containment query against a positive walk
  auto contains = [&](int w, cplx p) {
    int crossings = 0;
    for (int h : em.walks[static_cast<size_t>(w)]) {
      const auto& poly = em.hpoly[static_cast<size_t>(h)];
      for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const cplx a = poly[i], b = poly[i + 1];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
          const double x = a.real() + (p.imag() - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real());
          if (x > p.real()) ++crossings;
        }
      }
    }
    return (crossings % 2) == 1;
  };

  for (size_t w = 0; w < em.walks.size(); ++w) {
    if (em.face_of_walk[w] >= 0) continue;
    // probe point on the face side (left of the first half-edge)
    const int h = em.walks[w].front();
    ArcParam ap(em.hpoly[static_cast<size_t>(h)]);
    const double s = 0.5 * ap.total();
    const cplx tau = ap.tangent(s);
    const cplx probe = ap.at(s) + (1e-5 * diam) * (cplx(0.0, 1.0) * tau);
    int best_face = 0;
    double best_area = std::numeric_limits<double>::infinity();
    for (int pw : positive) {
      if (static_cast<size_t>(pw) == w) continue;
      if (contains(pw, probe) && em.walk_area[static_cast<size_t>(pw)] < best_area) {
        best_area = em.walk_area[static_cast<size_t>(pw)];
        best_face = face_of_positive[pw];
      }
    }
    em.face_of_walk[w] = best_face;
  }
  return em;
}

}  // namespace

void classify(SingularGraph& g) {
  if (!g.is_strebel())
    throw NumericalError("classify: singular graph is not Strebel (or inconclusive)");
  if (g.edges.empty()) throw NumericalError("classify: empty singular graph");

  const Embedding em = build_embedding(g);

  g.faces.clear();
  for (int f = 0; f < em.n_faces; ++f) {
    GraphFace face;
    face.id = f;
    face.unbounded = (f == em.unbounded_face);
    g.faces.push_back(face);
  }

  for (auto& e : g.edges) {
    const int wf = em.walk_of[static_cast<size_t>(hid(e.id, true))];
    const int wb = em.walk_of[static_cast<size_t>(hid(e.id, false))];
    e.face_left = em.face_of_walk[static_cast<size_t>(wf)];
    e.face_right = em.face_of_walk[static_cast<size_t>(wb)];
    e.dividing = e.face_left != e.face_right;
  }

  // depths: breadth-first from the unbounded face
  std::vector<std::vector<int>> adj(g.faces.size());
  for (const auto& e : g.edges)
    if (e.dividing) {
      adj[static_cast<size_t>(e.face_left)].push_back(e.face_right);
      adj[static_cast<size_t>(e.face_right)].push_back(e.face_left);
    }
  // faces can also touch only through a containment nesting (no shared edge);
  // nesting neighbors come from the walk assignment
  for (size_t w = 0; w < em.walks.size(); ++w) {
    const int f = em.face_of_walk[w];
    for (int h : em.walks[w]) {
      const int f2 = em.face_of_walk[static_cast<size_t>(em.walk_of[static_cast<size_t>(opposite(h))])];
      if (f2 != f) {
        adj[static_cast<size_t>(f)].push_back(f2);
        adj[static_cast<size_t>(f2)].push_back(f);
      }
    }
  }
  std::vector<int> depth(g.faces.size(), -1);
  std::vector<int> queue{em.unbounded_face};
  depth[static_cast<size_t>(em.unbounded_face)] = 0;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    const int f = queue[qi];
    for (int f2 : adj[static_cast<size_t>(f)])
      if (depth[static_cast<size_t>(f2)] < 0) {
        depth[static_cast<size_t>(f2)] = depth[static_cast<size_t>(f)] + 1;
        queue.push_back(f2);
      }
  }
  for (auto& f : g.faces) f.depth = depth[static_cast<size_t>(f.id)];

  // preventing: non-dividing edge sitting on the defining (outer) walk of a
  // bounded face
  for (auto& e : g.edges) {
    e.preventing = false;
    if (e.dividing) continue;
    const int f = e.face_left;
    if (g.faces[static_cast<size_t>(f)].unbounded) continue;
    const int wf = em.walk_of[static_cast<size_t>(hid(e.id, true))];
    if (wf == em.defining_walk[static_cast<size_t>(f)]) e.preventing = true;
  }
  g.classified = true;
}

bool admits_positive(const SingularGraph& g) {
  if (!g.classified) throw InvalidArgumentError("admits_positive: classify the graph first");
  for (const auto& e : g.edges) {
    if (e.dividing &&
        g.faces[static_cast<size_t>(e.face_left)].depth == g.faces[static_cast<size_t>(e.face_right)].depth)
      return false;
    if (!e.dividing && e.preventing) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Signed measures: one sqrt branch per face, supports and signs from the
// one-sided boundary values.

namespace {

struct WalkSamples {
  // tracked boundary values of sqrt(U1/U2) along the walk, one entry per
  // half-edge at its mid-arclength sample
  std::vector<cplx> mid_value;  // per half-edge id (global), valid if in walk
  std::vector<cplx> mid_point;
  std::vector<cplx> mid_normal;  // unit normal into the face
};

// sqrt(U1/U2) via the factored product
cplx sqrt_ratio_raw(const QuadDiff& qd, cplx z) { return std::sqrt(qd.ratio(z)); }

cplx continue_branch(const QuadDiff& qd, cplx z_from, cplx val_from, cplx z_to, int steps) {
  cplx w = val_from, from = z_from;
  for (int s = 1; s <= steps; ++s) {
    const cplx target = z_from + (static_cast<double>(s) / steps) * (z_to - z_from);
    int depth = 0;
    std::vector<cplx> stack{target};
    while (!stack.empty()) {
      const cplx cur = stack.back();
      cplx r = sqrt_ratio_raw(qd, cur);
      if (std::abs(r - w) > std::abs(r + w)) r = -r;
      if (std::abs(r - w) > 0.5 * (std::abs(r) + std::abs(w)) && depth < 28) {
        stack.push_back(0.5 * (from + cur));
        ++depth;
        continue;
      }
      w = r;
      from = cur;
      stack.pop_back();
    }
  }
  return w;
}

}  // namespace

bool SignedMeasureSpec::all_positive() const {
  for (const auto& s : support)
    if (s.sign < 0) return false;
  return true;
}

std::vector<SignedMeasureSpec> enumerate_measures(const QuadDiff& qd, SingularGraph& g,
                                                  int points_per_edge) {
  if (!g.classified) classify(g);
  const Embedding em = build_embedding(g);
  const double diam = qd.diameter();
  const double eps_in = 1e-5 * diam;
  const int nh = 2 * static_cast<int>(g.edges.size());

  // --- branch tracking along every walk -----------------------------------
  std::vector<cplx> mid_value(static_cast<size_t>(nh));
  std::vector<cplx> mid_point(static_cast<size_t>(nh));
  std::vector<cplx> mid_normal(static_cast<size_t>(nh));
  std::vector<int> walk_sign_fixed(em.walks.size(), 0);  // 0 unanchored, else +-1

  const int K = 32;
  std::vector<std::vector<cplx>> walk_sample_pts(em.walks.size());
  std::vector<std::vector<cplx>> walk_sample_vals(em.walks.size());

  for (size_t w = 0; w < em.walks.size(); ++w) {
    std::vector<cplx> pts;
    std::vector<int> mid_index_of(em.walks[w].size(), -1);
    for (size_t hi = 0; hi < em.walks[w].size(); ++hi) {
      const int h = em.walks[w][hi];
      ArcParam ap(em.hpoly[static_cast<size_t>(h)]);
      const double L = ap.total();
      for (int k = 0; k < K; ++k) {
        const double s = L * (k + 0.5) / K;
        const cplx tau = ap.tangent(s);
        const cplx p = ap.at(s) + eps_in * (cplx(0.0, 1.0) * tau);
        if (k == K / 2) {
          mid_index_of[hi] = static_cast<int>(pts.size());
          mid_point[static_cast<size_t>(h)] = p;
          mid_normal[static_cast<size_t>(h)] = cplx(0.0, 1.0) * tau;
        }
        pts.push_back(p);
      }
      // arc hop around the target vertex into the next half-edge, sweeping
      // clockwise through the face sector
      const int h2 = em.next[static_cast<size_t>(h)];
      const cplx v = g.vertices[static_cast<size_t>(em.hvert_to[static_cast<size_t>(h)])].pos;
      ArcParam ap2(em.hpoly[static_cast<size_t>(h2)]);
      const cplx tau2 = ap2.tangent(ap2.total() * 0.5 / K);
      const cplx pa = pts.back();
      const cplx pb = ap2.at(ap2.total() * 0.5 / K) + eps_in * (cplx(0.0, 1.0) * tau2);
      const double ra = std::abs(pa - v), rb = std::abs(pb - v);
      double ta = std::arg(pa - v), tb = std::arg(pb - v);
      double dt = tb - ta;
      while (dt > 0) dt -= 2.0 * M_PI;
      while (dt <= -2.0 * M_PI) dt += 2.0 * M_PI;
      const int steps = std::max(8, static_cast<int>(std::ceil(std::abs(dt) / 0.08)));
      for (int q = 1; q < steps; ++q) {
        const double f = static_cast<double>(q) / steps;
        pts.push_back(v + (ra + f * (rb - ra)) * std::polar(1.0, ta + f * dt));
      }
    }
    // continuity chain around the loop
    std::vector<cplx> vals(pts.size());
    cplx prev = sqrt_ratio_raw(qd, pts[0]);
    vals[0] = prev;
    for (size_t i = 1; i < pts.size(); ++i) {
      cplx r = sqrt_ratio_raw(qd, pts[i]);
      if (std::abs(r - prev) > std::abs(r + prev)) r = -r;
      vals[i] = r;
      prev = r;
    }
    // closure check: continuing from the last sample back to the first must
    // reproduce the starting branch
    {
      cplx r = vals[0];
      if (std::abs(r - prev) > std::abs(r + prev))
        throw BranchAmbiguityError("enumerate_measures: branch not single-valued along a face walk");
    }
    for (size_t hi = 0; hi < em.walks[w].size(); ++hi)
      mid_value[static_cast<size_t>(em.walks[w][hi])] = vals[static_cast<size_t>(mid_index_of[hi])];
    walk_sample_pts[w] = std::move(pts);
    walk_sample_vals[w] = std::move(vals);
  }

  // --- anchor the unbounded face to the 1/z branch -------------------------
  auto crosses_any_edge = [&](cplx a, cplx b) {
    for (const auto& e : g.edges)
      if (segment_hits_polyline(a, b, e.polyline)) return true;
    return false;
  };

  {
    // walks of the unbounded face, primary first
    std::vector<int> uw;
    for (size_t w = 0; w < em.walks.size(); ++w)
      if (em.face_of_walk[w] == em.unbounded_face) uw.push_back(static_cast<int>(w));
    if (uw.empty()) throw NumericalError("enumerate_measures: no unbounded walk");

    const int w0 = uw.front();
    const cplx z_s = walk_sample_pts[static_cast<size_t>(w0)].front();
    const cplx c = qd.center();
    bool anchored = false;
    for (int attempt = 0; attempt < 16 && !anchored; ++attempt) {
      const cplx dir = std::polar(1.0, std::arg(z_s - c) + attempt * (M_PI / 8.0));
      const cplx z_far = z_s + (25.0 * diam) * dir;
      if (crosses_any_edge(z_s + 1e-7 * diam * dir, z_far)) continue;
      cplx far_val = sqrt_ratio_raw(qd, z_far);
      if (std::abs(far_val * (z_far - c) - cplx(1.0)) > std::abs(-far_val * (z_far - c) - cplx(1.0)))
        far_val = -far_val;
      const cplx cont = continue_branch(qd, z_far, far_val, z_s, 400);
      const cplx have = walk_sample_vals[static_cast<size_t>(w0)].front();
      walk_sign_fixed[static_cast<size_t>(w0)] = std::abs(cont - have) <= std::abs(cont + have) ? 1 : -1;
      anchored = true;
    }
    if (!anchored)
      throw NumericalError("enumerate_measures: could not reach the unbounded face from infinity");
  }

  // --- anchor remaining walks face by face via non-crossing bridges --------
  for (size_t w = 0; w < em.walks.size(); ++w) {
    const int f = em.face_of_walk[w];
    if (walk_sign_fixed[w] != 0) continue;
    if (f != em.unbounded_face && em.defining_walk[static_cast<size_t>(f)] == static_cast<int>(w)) {
      walk_sign_fixed[w] = 1;  // free branch choice, bit = 0 keeps it
    }
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t w = 0; w < em.walks.size(); ++w) {
      if (walk_sign_fixed[w] != 0) continue;
      const int f = em.face_of_walk[w];
      // bridge from an anchored walk of the same face
      for (size_t w2 = 0; w2 < em.walks.size() && walk_sign_fixed[w] == 0; ++w2) {
        if (w2 == w || em.face_of_walk[w2] != f || walk_sign_fixed[w2] == 0) continue;
        const auto& A = walk_sample_pts[w2];
        const auto& B = walk_sample_pts[w];
        for (size_t ia = 0; ia < A.size() && walk_sign_fixed[w] == 0; ia += 3)
          for (size_t ib = 0; ib < B.size(); ib += 3) {
            if (crosses_any_edge(A[ia], B[ib])) continue;
            const cplx from_val =
                static_cast<double>(walk_sign_fixed[w2]) * walk_sample_vals[w2][ia];
            const cplx cont = continue_branch(qd, A[ia], from_val, B[ib], 160);
            const cplx have = walk_sample_vals[w][ib];
            walk_sign_fixed[w] = std::abs(cont - have) <= std::abs(cont + have) ? 1 : -1;
            progress = true;
            break;
          }
      }
    }
    bool all_fixed = true;
    for (size_t w = 0; w < em.walks.size(); ++w)
      if (walk_sign_fixed[w] == 0) all_fixed = false;
    if (all_fixed) break;
    if (!progress) throw NumericalError("enumerate_measures: could not bridge all face walks");
  }
  for (int h = 0; h < nh; ++h)
    mid_value[static_cast<size_t>(h)] *=
        static_cast<double>(walk_sign_fixed[static_cast<size_t>(em.walk_of[static_cast<size_t>(h)])]);

  // --- assemble the 2^(d-1) branch assignments -----------------------------
  std::vector<int> bounded_faces;
  for (const auto& f : g.faces)
    if (!f.unbounded) bounded_faces.push_back(f.id);
  const int nb = static_cast<int>(bounded_faces.size());
  if (nb > 20) throw UnsupportedConfigError("enumerate_measures: too many bounded faces");

  // per-piece weights: integral of |sqrt(U1/U2)|/pi over each resampled
  // piece; pieces next to a pole get a graded subdivision for the 1/sqrt
  // spike
  auto discretize_edge = [&](const GraphEdge& e, int sign, DiscreteMeasure& m) {
    ArcParam ap(e.polyline);
    const double L = ap.total();
    if (L <= 0.0) return;
    auto dens = [&](double s) { return std::abs(sqrt_ratio_raw(qd, ap.at(s))) / M_PI; };
    // 4-point Gauss-Legendre on [0,1]
    static const double gx[4] = {0.069431844202973712, 0.33000947820757187,
                                 0.66999052179242813, 0.93056815579702623};
    static const double gw[4] = {0.17392742256872693, 0.32607257743127307,
                                 0.32607257743127307, 0.17392742256872693};
    auto integrate = [&](double s0, double s1) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += gw[k] * dens(s0 + gx[k] * (s1 - s0));
      return acc * (s1 - s0);
    };
    // r = u^2 substitution flattens the 1/sqrt(r) spike at a pole endpoint;
    // composite GL in u then resolves the remaining smooth factor
    auto integrate_graded = [&](double s0, double s1, bool pole_at_s0) {
      const double len = s1 - s0;
      double acc = 0.0;
      const int panels = 6;
      for (int pnl = 0; pnl < panels; ++pnl) {
        const double u0 = static_cast<double>(pnl) / panels;
        const double u1 = static_cast<double>(pnl + 1) / panels;
        for (int k = 0; k < 4; ++k) {
          const double u = u0 + gx[k] * (u1 - u0);
          const double r = u * u;  // distance fraction from the pole end
          const double s = pole_at_s0 ? s0 + r * len : s1 - r * len;
          acc += gw[k] * (u1 - u0) * dens(s) * 2.0 * u * len;
        }
      }
      return acc;
    };

    // endpoint pieces get the graded rule: 1/sqrt spikes at poles, sqrt
    // cusps at zeros
    for (int k = 0; k < points_per_edge; ++k) {
      const double s0 = L * k / points_per_edge;
      const double s1 = L * (k + 1) / points_per_edge;
      double wgt;
      if (k == 0)
        wgt = integrate_graded(s0, s1, true);
      else if (k + 1 == points_per_edge)
        wgt = integrate_graded(s0, s1, false);
      else
        wgt = integrate(s0, s1);
      m.points.push_back(ap.at(0.5 * (s0 + s1)));
      m.weights.push_back(sign * wgt);
    }
  };

  std::vector<SignedMeasureSpec> specs;
  const int combos = 1 << nb;
  for (int bits = 0; bits < combos; ++bits) {
    SignedMeasureSpec spec;
    spec.branch_bits.resize(static_cast<size_t>(nb));
    std::vector<double> sigma(g.faces.size(), 1.0);
    for (int i = 0; i < nb; ++i) {
      const int bit = (bits >> i) & 1;
      spec.branch_bits[static_cast<size_t>(i)] = bit;
      if (bit) sigma[static_cast<size_t>(bounded_faces[static_cast<size_t>(i)])] = -1.0;
    }
    spec.measure.provenance = "kpsi_measure_bits_" + std::to_string(bits);
    for (const auto& e : g.edges) {
      const int hf = hid(e.id, true), hb = hid(e.id, false);
      const cplx v1 = sigma[static_cast<size_t>(e.face_left)] * mid_value[static_cast<size_t>(hf)];
      const cplx v2 = sigma[static_cast<size_t>(e.face_right)] * mid_value[static_cast<size_t>(hb)];
      if (std::abs(v1 - v2) <= std::abs(v1 + v2)) continue;  // same branch: no mass
      const double away = dot(std::conj(v1), mid_normal[static_cast<size_t>(hf)]);
      const int sign = away > 0 ? +1 : -1;
      spec.support.push_back({e.id, sign});
      discretize_edge(e, sign, spec.measure);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace heun
