#include "heun/measures.hpp"

#include <cmath>

#include "heun/errors.hpp"

namespace heun {

double DiscreteMeasure::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

DiscreteMeasure root_counting_measure(const Polynomial& p, const std::string& provenance) {
  const int n = p.degree();
  if (n < 1) throw InvalidArgumentError("root_counting_measure: degree must be at least 1");
  DiscreteMeasure m;
  m.points = roots(p);
  m.weights.assign(m.points.size(), 1.0 / n);
  m.provenance = provenance;
  return m;
}

static void check_proximity(const DiscreteMeasure& m, cplx z) {
  for (const cplx& p : m.points)
    if (std::abs(z - p) < 1e-12)
      throw InvalidArgumentError("evaluation point within 1e-12 of a support point");
}

cplx cauchy(const DiscreteMeasure& m, cplx z) {
  check_proximity(m, z);
  cplx s(0.0);
  for (size_t k = 0; k < m.points.size(); ++k) s += m.weights[k] / (z - m.points[k]);
  return s;
}

double potential(const DiscreteMeasure& m, cplx z) {
  check_proximity(m, z);
  double s = 0.0;
  for (size_t k = 0; k < m.points.size(); ++k) s += m.weights[k] * std::log(std::abs(z - m.points[k]));
  return s;
}

double ct_square_residual(const DiscreteMeasure& m, const Polynomial& vt, const Polynomial& q, cplx z) {
  const cplx qz = q.eval(z);
  if (std::abs(qz) < 1e-12) throw InvalidArgumentError("ct_square_residual: z too close to a root of Q");
  const cplx c = cauchy(m, z);
  return std::abs(c * c - vt.eval(z) / qz);
}

cplx ct_ode_residual(const DiscreteMeasure& m, const Polynomial& q, cplx z) {
  const cplx qz = q.eval(z);
  if (std::abs(qz) < 1e-12) throw InvalidArgumentError("ct_ode_residual: z too close to a root of Q");
  check_proximity(m, z);
  cplx c(0.0), c1(0.0), c2(0.0);
  for (size_t k = 0; k < m.points.size(); ++k) {
    const cplx d = z - m.points[k];
    const double w = m.weights[k];
    c += w / d;
    c1 -= w / (d * d);
    c2 += 2.0 * w / (d * d * d);
  }
  const Polynomial q1 = q.derivative();
  const Polynomial q2 = q1.derivative();
  const Polynomial q3 = q2.derivative();
  return qz * c2 + q1.eval(z) * c1 + q2.eval(z) / 8.0 * c + q3.eval(z) / 24.0;
}

DiscreteMeasure build_Mi(const CubicRoots& roots, int i, int tau_nodes, int slice_nodes) {
  if (i < 0 || i > 2) throw InvalidArgumentError("build_Mi: index must be in {0,1,2}");
  if (tau_nodes < 1 || slice_nodes < 1)
    throw InvalidArgumentError("build_Mi: node counts must be positive");
  const cplx ai = roots.a[static_cast<size_t>(i)];
  // Coefficients of the shifted cubic Q(z + a_i) = z^3 + v z^2 + w z; the
  // constant term vanishes because a_i is a root, so w is read from the
  // linear coefficient.
  cplx v(0.0), w(0.0);
  for (int q = 0; q < 3; ++q) {
    if (q == i) continue;
    v += ai - roots.a[static_cast<size_t>(q)];
  }
  {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    w = (ai - roots.a[static_cast<size_t>(j)]) * (ai - roots.a[static_cast<size_t>(k)]);
  }

  DiscreteMeasure m;
  m.provenance = "M_" + std::to_string(i + 1);
  m.points.reserve(static_cast<size_t>(tau_nodes) * static_cast<size_t>(slice_nodes));
  const double slice_weight = 1.0 / (static_cast<double>(tau_nodes) * slice_nodes);
  for (int l = 0; l < tau_nodes; ++l) {
    const double tau = (l + 0.5) / tau_nodes;
    const double r = 1.0 - tau;
    const cplx xi = -v * (r * r);
    const cplx psi = -w * (1.0 - r * r) * (r * r);
    const cplx half = 2.0 * std::sqrt(psi);
    for (int s = 0; s < slice_nodes; ++s) {
      const double angle = (2.0 * s + 1.0) * M_PI / (2.0 * slice_nodes);
      m.points.push_back(ai + xi + half * std::cos(angle));
      m.weights.push_back(slice_weight);
    }
  }
  return m;
}

double balayage_gap(const DiscreteMeasure& a, const DiscreteMeasure& b, std::span<const cplx> ring) {
  double gap = 0.0;
  for (cplx z : ring) gap = std::max(gap, std::abs(cauchy(a, z) - cauchy(b, z)));
  return gap;
}

PotentialCheckReport derivative_potential_check(const Polynomial& p, std::span<const cplx> grid) {
  if (p.degree() < 2) throw InvalidArgumentError("derivative_potential_check: need degree >= 2");
  const DiscreteMeasure mu = root_counting_measure(p, "p");
  const DiscreteMeasure mu1 = root_counting_measure(p.derivative(), "p'");

  cplx center(0.0);
  for (cplx r : mu.points) center += r;
  center /= static_cast<double>(mu.points.size());
  double radius = 0.0;
  for (cplx r : mu.points) radius = std::max(radius, std::abs(r - center));

  PotentialCheckReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (cplx z : grid) {
    const double u = potential(mu, z);
    const double u1 = potential(mu1, z);
    rep.max_violation = std::max(rep.max_violation, u1 - u);
    ++rep.grid_points;
    if (std::abs(z - center) > 2.0 * radius) {
      rep.max_far_gap = std::max(rep.max_far_gap, std::abs(u1 - u));
      ++rep.far_points;
    }
  }
  rep.inequality_ok = rep.max_violation <= 1e-9;
  rep.far_equality_ok = rep.far_points == 0 || rep.max_far_gap < 1e-6;
  return rep;
}

}  // namespace heun
