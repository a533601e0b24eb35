#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heun/gamma_locus.hpp"
#include "heun/heine_stieltjes.hpp"
#include "heun/measures.hpp"
#include "heun/qdiff.hpp"
#include "heun/verify.hpp"

namespace py = pybind11;
using namespace heun;

namespace {

HeunOperator make_operator(const std::vector<cplx>& roots, const py::object& p) {
  if (roots.size() != 3) throw InvalidArgumentError("roots: need exactly three");
  Polynomial q = Polynomial::from_roots(roots);
  if (py::isinstance<py::str>(p)) {
    const std::string kind = p.cast<std::string>();
    if (kind == "lame") return HeunOperator::lame(std::move(q));
    if (kind == "zero") return HeunOperator(std::move(q), Polynomial{});
    throw InvalidArgumentError("p: expected 'zero', 'lame', or coefficients");
  }
  return HeunOperator(std::move(q), Polynomial(p.cast<std::vector<cplx>>()));
}

CubicRoots make_roots(const std::vector<cplx>& roots) {
  if (roots.size() != 3) throw InvalidArgumentError("roots: need exactly three");
  return CubicRoots(roots[0], roots[1], roots[2]);
}

DiscreteMeasure make_measure(const std::vector<cplx>& pts, const std::vector<double>& w) {
  if (pts.size() != w.size()) throw InvalidArgumentError("points and weights differ in length");
  DiscreteMeasure m;
  m.points = pts;
  m.weights = w;
  m.provenance = "python";
  return m;
}

py::dict graph_to_dict(const SingularGraph& g) {
  py::dict d;
  d["is_strebel"] = g.is_strebel();
  d["status"] = g.status == StrebelStatus::kStrebel      ? "strebel"
                : g.status == StrebelStatus::kNotStrebel ? "not_strebel"
                                                         : "inconclusive";
  py::list vs;
  for (const auto& v : g.vertices) {
    py::dict vd;
    vd["id"] = v.id;
    vd["pos"] = v.pos;
    vd["kind"] = v.kind == GraphVertex::Kind::kZero ? "zero" : "pole";
    vs.append(vd);
  }
  d["vertices"] = vs;
  py::list es;
  for (const auto& e : g.edges) {
    py::dict ed;
    ed["id"] = e.id;
    ed["endpoints"] = py::make_tuple(e.v0, e.v1);
    ed["polyline"] = e.polyline;
    ed["capture_gap"] = e.capture_gap;
    if (g.classified) {
      ed["dividing"] = e.dividing;
      ed["preventing"] = e.preventing;
      ed["faces"] = py::make_tuple(e.face_left, e.face_right);
    }
    es.append(ed);
  }
  d["edges"] = es;
  if (g.classified) {
    py::list fs;
    for (const auto& f : g.faces) {
      py::dict fd;
      fd["id"] = f.id;
      fd["depth"] = f.depth;
      fd["unbounded"] = f.unbounded;
      fs.append(fd);
    }
    d["faces"] = fs;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Heun spectral polynomials, root loci, and Strebel trajectory structures";

  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<VanVleckPair>(m, "VanVleckPair")
      .def_readonly("t", &VanVleckPair::t)
      .def_readonly("v0", &VanVleckPair::v0)
      .def_readonly("v1", &VanVleckPair::v1)
      .def_readonly("multiplicity", &VanVleckPair::multiplicity)
      .def_readonly("residual", &VanVleckPair::residual)
      .def_property_readonly("stieltjes_coefficients",
                             [](const VanVleckPair& p) { return p.S.coeffs(); })
      .def("stieltjes_roots", [](const VanVleckPair& p) { return roots(p.S); })
      .def("__repr__", [](const VanVleckPair& p) {
        return "<VanVleckPair t=(" + std::to_string(p.t.real()) + "," +
               std::to_string(p.t.imag()) + ") mult=" + std::to_string(p.multiplicity) + ">";
      });

  py::class_<SpectrumResult>(m, "SpectrumResult")
      .def_readonly("n", &SpectrumResult::n)
      .def_readonly("pairs", &SpectrumResult::pairs)
      .def_readonly("t_roots", &SpectrumResult::t_roots)
      .def_property_readonly("measure", [](const SpectrumResult& r) {
        return py::make_tuple(r.measure.points, r.measure.weights);
      });

  m.def(
      "solve_spectrum",
      [](const std::vector<cplx>& roots, const py::object& p, int n, double cluster_tol) {
        return solve(make_operator(roots, p), n, cluster_tol);
      },
      py::arg("roots"), py::arg("p"), py::arg("n"), py::arg("cluster_tol") = 1e-7,
      "All Van Vleck / Stieltjes pairs of degree n for Q with the given roots");

  m.def(
      "polynomial_roots",
      [](const std::vector<cplx>& coeffs, double tol) { return roots(Polynomial(coeffs), tol); },
      py::arg("coefficients"), py::arg("tol") = 1e-13,
      "Roots of a dense polynomial, coefficients[k] multiplying z^k");

  m.def(
      "f_side",
      [](const std::vector<cplx>& roots, cplx b, int j, int k, int m2) {
        return f_jk(make_roots(roots), b, j, k, ChebRule{m2});
      },
      py::arg("roots"), py::arg("b"), py::arg("j"), py::arg("k"), py::arg("nodes") = 200,
      "Side integral f_jk(b) with the anchored branch");

  m.def(
      "f_side_prime",
      [](const std::vector<cplx>& roots, cplx b, int j, int k, int m2) {
        return f_jk_prime(make_roots(roots), b, j, k, ChebRule{m2});
      },
      py::arg("roots"), py::arg("b"), py::arg("j"), py::arg("k"), py::arg("nodes") = 200);

  m.def(
      "loop_identities",
      [](const std::vector<cplx>& roots, cplx b, int m2) {
        const LoopResiduals lr = loop_identities(make_roots(roots), b, ChebRule{m2});
        return py::make_tuple(lr.r_pi, lr.r_2pi);
      },
      py::arg("roots"), py::arg("b"), py::arg("nodes") = 400,
      "Residuals (r_pi, r_2pi) of the two exact integral identities");

  m.def(
      "find_b0", [](const std::vector<cplx>& roots) { return find_b0(make_roots(roots)); },
      py::arg("roots"), "Common interior point of the three real-integral curves");

  m.def(
      "gamma_locus",
      [](const std::vector<cplx>& roots, double step, double arc_tol) {
        const GammaQ gq = build_gamma_q(make_roots(roots), step, arc_tol);
        py::dict d;
        d["b0"] = gq.b0;
        d["degenerate"] = gq.degenerate;
        py::list arcs;
        for (const auto& a : gq.arcs) arcs.append(a.points);
        d["arcs"] = arcs;
        return d;
      },
      py::arg("roots"), py::arg("step") = 0.0, py::arg("arc_tol") = 1e-10,
      "The three locus arcs and their common endpoint");

  m.def(
      "singular_graph",
      [](const std::vector<cplx>& roots, cplx b, int points_per_edge) {
        const CubicRoots cr = make_roots(roots);
        const QuadDiff qd = heun_qdiff(cr, b);
        SingularGraph g = singular_graph(qd);
        py::dict d;
        if (g.is_strebel()) {
          classify(g);
          const auto specs = enumerate_measures(qd, g, points_per_edge);
          d = graph_to_dict(g);
          d["admits_positive"] = admits_positive(g);
          py::list ms;
          for (const auto& sp : specs) {
            py::dict md;
            md["branch_bits"] = sp.branch_bits;
            py::list sup;
            for (const auto& s : sp.support) sup.append(py::make_tuple(s.edge, s.sign));
            md["support"] = sup;
            md["mass"] = sp.measure.total_mass();
            md["all_positive"] = sp.all_positive();
            md["points"] = sp.measure.points;
            md["weights"] = sp.measure.weights;
            ms.append(md);
          }
          d["measures"] = ms;
        } else {
          d = graph_to_dict(g);
        }
        return d;
      },
      py::arg("roots"), py::arg("b"), py::arg("points_per_edge") = 500,
      "Singular trajectory graph of (b - z)/Q(z) dz^2 with classification and measures");

  m.def(
      "build_Mi",
      [](const std::vector<cplx>& roots, int i, int tau_nodes, int slice_nodes) {
        const DiscreteMeasure mm = build_Mi(make_roots(roots), i, tau_nodes, slice_nodes);
        return py::make_tuple(mm.points, mm.weights);
      },
      py::arg("roots"), py::arg("i"), py::arg("tau_nodes") = 400, py::arg("slice_nodes") = 200,
      "Averaged arcsine measure attached to root i");

  m.def(
      "cauchy_transform",
      [](const std::vector<cplx>& pts, const std::vector<double>& w, cplx z) {
        return cauchy(make_measure(pts, w), z);
      },
      py::arg("points"), py::arg("weights"), py::arg("z"));

  m.def(
      "log_potential",
      [](const std::vector<cplx>& pts, const std::vector<double>& w, cplx z) {
        return potential(make_measure(pts, w), z);
      },
      py::arg("points"), py::arg("weights"), py::arg("z"));

  m.def(
      "ct_ode_residual",
      [](const std::vector<cplx>& pts, const std::vector<double>& w,
         const std::vector<cplx>& q_roots, cplx z) {
        return ct_ode_residual(make_measure(pts, w), Polynomial::from_roots(q_roots), z);
      },
      py::arg("points"), py::arg("weights"), py::arg("q_roots"), py::arg("z"),
      "Q C'' + Q' C' + Q''/8 C + Q'''/24 for the discrete measure");

  m.def("run_verification", []() {
    py::list out;
    for (const auto& r : verify::run_all()) {
      py::dict d;
      d["id"] = r.id;
      d["name"] = r.name;
      d["passed"] = r.passed;
      d["detail"] = r.detail;
      d["seconds"] = r.seconds;
      out.append(d);
    }
    return out;
  });

#ifdef HEUN_VERSION
  m.attr("__version__") = HEUN_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
