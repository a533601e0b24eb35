// heun-spectra: spectra of the Heun equation, the limiting root locus, the
// singular trajectory structure of the associated quadratic differentials,
// and the verification suite.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <json.hpp>

#include "heun/errors.hpp"
#include "heun/gamma_locus.hpp"
#include "heun/heine_stieltjes.hpp"
#include "heun/measures.hpp"
#include "heun/qdiff.hpp"
#include "heun/verify.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace heun;

namespace {

struct JobConfig {
  std::array<cplx, 3> roots{cplx(0.0), cplx(1.0), cplx(1.0, -1.0)};
  std::string p_kind = "zero";  // zero | lame | coeffs
  std::vector<cplx> p_coeffs;
  std::vector<int> degrees;
  double cluster_tol = 1e-7;
  double arc_tol = 1e-10;
  double newton_tol = 1e-12;
  double locus_step_divisor = 200.0;
  int points_per_edge = 2000;
  int tau_nodes = 400;
  int slice_nodes = 200;
  double ring_radius_factor = 10.0;
  bool has_b = false;
  cplx b;

  HeunOperator make_operator() const {
    Polynomial q = Polynomial::from_roots(std::vector<cplx>(roots.begin(), roots.end()));
    if (p_kind == "lame") return HeunOperator::lame(std::move(q));
    if (p_kind == "zero") return HeunOperator(std::move(q), Polynomial{});
    return HeunOperator(std::move(q), Polynomial(p_coeffs));
  }
  CubicRoots cubic() const { return CubicRoots(roots[0], roots[1], roots[2]); }
};

cplx parse_complex(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw InvalidArgumentError("config: complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

json dump_complex(cplx z) { return json::array({z.real(), z.imag()}); }

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("config: cannot open " + path);
  json j;
  in >> j;

  JobConfig cfg;
  if (!j.contains("roots") || !j["roots"].is_array() || j["roots"].size() != 3)
    throw InvalidArgumentError("config: 'roots' must list the three roots of Q");
  for (int i = 0; i < 3; ++i) cfg.roots[static_cast<size_t>(i)] = parse_complex(j["roots"][static_cast<size_t>(i)]);

  if (j.contains("P")) {
    if (j["P"].is_string()) {
      cfg.p_kind = j["P"].get<std::string>();
      if (cfg.p_kind != "zero" && cfg.p_kind != "lame")
        throw InvalidArgumentError("config: P must be \"zero\", \"lame\", or coefficient pairs");
    } else if (j["P"].is_array()) {
      cfg.p_kind = "coeffs";
      for (const auto& c : j["P"]) cfg.p_coeffs.push_back(parse_complex(c));
    } else {
      throw InvalidArgumentError("config: unrecognized P");
    }
  }
  if (j.contains("degrees"))
    for (const auto& d : j["degrees"]) cfg.degrees.push_back(d.get<int>());
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("cluster")) cfg.cluster_tol = t["cluster"].get<double>();
    if (t.contains("arc")) cfg.arc_tol = t["arc"].get<double>();
    if (t.contains("newton")) cfg.newton_tol = t["newton"].get<double>();
  }
  if (j.contains("locus_step_divisor")) cfg.locus_step_divisor = j["locus_step_divisor"].get<double>();
  if (j.contains("points_per_edge")) cfg.points_per_edge = j["points_per_edge"].get<int>();
  if (j.contains("tau_nodes")) cfg.tau_nodes = j["tau_nodes"].get<int>();
  if (j.contains("slice_nodes")) cfg.slice_nodes = j["slice_nodes"].get<int>();
  if (j.contains("ring_radius_factor")) cfg.ring_radius_factor = j["ring_radius_factor"].get<double>();
  if (j.contains("b")) {
    cfg.b = parse_complex(j["b"]);
    cfg.has_b = true;
  }
  return cfg;
}

json effective_config(const JobConfig& cfg) {
  json j;
  j["roots"] = json::array();
  for (const cplx& r : cfg.roots) j["roots"].push_back(dump_complex(r));
  if (cfg.p_kind == "coeffs") {
    json pc = json::array();
    for (const cplx& c : cfg.p_coeffs) pc.push_back(dump_complex(c));
    j["P"] = pc;
  } else {
    j["P"] = cfg.p_kind;
  }
  j["degrees"] = cfg.degrees;
  j["tolerances"] = {{"cluster", cfg.cluster_tol}, {"arc", cfg.arc_tol}, {"newton", cfg.newton_tol}};
  j["locus_step_divisor"] = cfg.locus_step_divisor;
  j["points_per_edge"] = cfg.points_per_edge;
  j["tau_nodes"] = cfg.tau_nodes;
  j["slice_nodes"] = cfg.slice_nodes;
  j["ring_radius_factor"] = cfg.ring_radius_factor;
  if (cfg.has_b) j["b"] = dump_complex(cfg.b);
  return j;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
  }
  fs::rename(tmp, path);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

int cmd_spectrum(const JobConfig& cfg, const fs::path& out, int threads) {
  if (cfg.degrees.empty()) {
    std::fprintf(stderr, "spectrum: config lists no degrees\n");
    return 2;
  }
  const HeunOperator op = cfg.make_operator();

  auto solve_one = [&](int n) { return solve(op, n, cfg.cluster_tol); };
  std::vector<SpectrumResult> results(cfg.degrees.size());
  if (threads > 1) {
    std::vector<std::future<SpectrumResult>> futs;
    for (int n : cfg.degrees)
      futs.push_back(std::async(std::launch::async, solve_one, n));
    for (size_t k = 0; k < futs.size(); ++k) results[k] = futs[k].get();
  } else {
    for (size_t k = 0; k < cfg.degrees.size(); ++k) results[k] = solve_one(cfg.degrees[k]);
  }

  for (size_t k = 0; k < cfg.degrees.size(); ++k) {
    const int n = cfg.degrees[k];
    const SpectrumResult& res = results[k];

    std::string roots_csv = "re,im\n";
    for (const cplx& t : res.t_roots)
      roots_csv += num(t.real()) + "," + num(t.imag()) + "\n";
    atomic_write(out / ("roots-n" + std::to_string(n) + ".csv"), roots_csv);

    std::string s_csv = "pair,re,im\n";
    json sidecar;
    sidecar["n"] = n;
    sidecar["t"] = json::array();
    sidecar["stieltjes_roots"] = json::array();
    for (const cplx& t : res.t_roots) sidecar["t"].push_back(dump_complex(t));
    std::vector<std::vector<cplx>> all_s;
    for (size_t p = 0; p < res.pairs.size(); ++p) {
      std::vector<cplx> sr = roots(res.pairs[p].S);
      json row = json::array();
      for (const cplx& r : sr) {
        s_csv += std::to_string(p) + "," + num(r.real()) + "," + num(r.imag()) + "\n";
        row.push_back(dump_complex(r));
      }
      sidecar["stieltjes_roots"].push_back(row);
      all_s.push_back(std::move(sr));
    }
    atomic_write(out / ("stieltjes-n" + std::to_string(n) + ".csv"), s_csv);

    // Fig.1/Fig.3-style dot plot
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](cplx z) {
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    };
    for (const cplx& r : cfg.roots) grow(r);
    for (const cplx& t : res.t_roots) grow(t);
    SvgCanvas svg(x0, y0, x1, y1);
    for (const auto& sr : all_s)
      for (const cplx& r : sr) svg.circle(r, 1.5, "#888888");
    for (const cplx& r : cfg.roots) svg.circle(r, 5.0, "#1f77b4");
    for (const cplx& t : res.t_roots) svg.circle(t, 3.0, "#d62728");
    atomic_write(out / ("spectrum-n" + std::to_string(n) + ".svg"), svg.str());
    write_json(out / ("spectrum-n" + std::to_string(n) + ".svg.json"), sidecar);
  }
  return 0;
}

int cmd_locus(const JobConfig& cfg, const fs::path& out, int threads) {
  const CubicRoots cr = cfg.cubic();
  const double step = cr.diameter() / cfg.locus_step_divisor;
  const GammaQ gq = build_gamma_q(cr, step, cfg.arc_tol);

  json locus_json;
  locus_json["b0"] = dump_complex(gq.b0);
  locus_json["arcs"] = json::array();
  for (const auto& arc : gq.arcs) {
    json pts = json::array();
    for (const cplx& p : arc.points) pts.push_back(dump_complex(p));
    locus_json["arcs"].push_back(pts);
  }
  write_json(out / "gamma-q.json", locus_json);

  json sidecar = locus_json;
  sidecar["spectra"] = json::object();
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& arc : gq.arcs)
    for (const cplx& p : arc.points) {
      x0 = std::min(x0, p.real());
      x1 = std::max(x1, p.real());
      y0 = std::min(y0, p.imag());
      y1 = std::max(y1, p.imag());
    }
  SvgCanvas svg(x0, y0, x1, y1);
  for (const auto& arc : gq.arcs) svg.polyline(arc.points, "#000000", 2.0);
  for (const cplx& r : cfg.roots) svg.circle(r, 5.0, "#1f77b4");
  svg.circle(gq.b0, 4.0, "#2ca02c");

  if (!cfg.degrees.empty() && !cr.collinear) {
    const HeunOperator op = cfg.make_operator();
    (void)threads;
    for (int n : cfg.degrees) {
      const SpectrumResult res = solve(op, n, cfg.cluster_tol);
      json troots = json::array();
      for (const cplx& t : res.t_roots) {
        troots.push_back(dump_complex(t));
        svg.circle(t, 2.5, "#d62728");
      }
      sidecar["spectra"][std::to_string(n)] = troots;
    }
  }
  atomic_write(out / "locus.svg", svg.str());
  write_json(out / "locus.svg.json", sidecar);
  return 0;
}

const char* status_name(StrebelStatus s) {
  switch (s) {
    case StrebelStatus::kStrebel: return "strebel";
    case StrebelStatus::kNotStrebel: return "not_strebel";
    default: return "inconclusive";
  }
}

int cmd_trajectories(const JobConfig& cfg, const fs::path& out, int) {
  if (!cfg.has_b) {
    std::fprintf(stderr, "trajectories: config must provide \"b\"\n");
    return 2;
  }
  const CubicRoots cr = cfg.cubic();
  const QuadDiff qd = heun_qdiff(cr, cfg.b);
  SingularGraph g = singular_graph(qd);

  json report;
  report["status"] = status_name(g.status);
  report["is_strebel"] = g.is_strebel();

  std::vector<SignedMeasureSpec> specs;
  if (g.is_strebel()) {
    classify(g);
    specs = enumerate_measures(qd, g, cfg.points_per_edge);
    report["admits_positive"] = admits_positive(g);
    report["faces"] = json::array();
    for (const auto& f : g.faces)
      report["faces"].push_back({{"id", f.id}, {"depth", f.depth}, {"unbounded", f.unbounded}});
    report["measures"] = json::array();
    for (const auto& sp : specs) {
      json m;
      m["branch_bits"] = sp.branch_bits;
      m["support"] = json::array();
      for (const auto& s : sp.support) m["support"].push_back({{"edge", s.edge}, {"sign", s.sign}});
      m["mass"] = sp.measure.total_mass();
      m["all_positive"] = sp.all_positive();
      report["measures"].push_back(m);
    }
  } else {
    std::fprintf(stderr, "warning: differential is %s; no classification emitted\n",
                 status_name(g.status));
  }

  json kpsi;
  kpsi["is_strebel"] = g.is_strebel();
  kpsi["vertices"] = json::array();
  for (const auto& v : g.vertices)
    kpsi["vertices"].push_back({{"id", v.id},
                                {"pos", dump_complex(v.pos)},
                                {"kind", v.kind == GraphVertex::Kind::kZero ? "zero" : "pole"}});
  kpsi["edges"] = json::array();
  for (const auto& e : g.edges) {
    json pts = json::array();
    for (const cplx& p : e.polyline) pts.push_back(dump_complex(p));
    kpsi["edges"].push_back({{"id", e.id},
                             {"endpoints", json::array({e.v0, e.v1})},
                             {"polyline", pts},
                             {"dividing", e.dividing},
                             {"preventing", e.preventing}});
  }
  kpsi["faces"] = json::array();
  for (const auto& f : g.faces) kpsi["faces"].push_back({{"id", f.id}, {"depth", f.depth}});
  write_json(out / "kpsi.json", kpsi);
  write_json(out / "classification-report.json", report);

  // drawing: singular edges bold, a few closed trajectories light
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto grow = [&](cplx z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  };
  for (const auto& v : g.vertices) grow(v.pos);
  std::vector<std::vector<cplx>> closed;
  const cplx c = qd.center();
  double rhull = 0.0;
  for (const auto& v : g.vertices) rhull = std::max(rhull, std::abs(v.pos - c));
  for (double f : {1.6, 2.2, 3.0}) {
    TrajectorySegment seg = trace(qd, c + cplx(f * rhull, 0.0), cplx(0.0, 1.0),
                                  TrajectoryKind::kHorizontal);
    if (seg.terminal.kind == TerminalKind::kClosed) {
      for (const cplx& p : seg.points) grow(p);
      closed.push_back(seg.points);
    }
  }
  SvgCanvas svg(x0, y0, x1, y1);
  for (const auto& pts : closed) svg.polyline(pts, "#aaaaaa", 0.8, 0.8);
  for (const auto& e : g.edges) svg.polyline(e.polyline, "#000000", 2.0);
  for (const auto& v : g.vertices)
    svg.circle(v.pos, v.kind == GraphVertex::Kind::kZero ? 4.0 : 5.0,
               v.kind == GraphVertex::Kind::kZero ? "#2ca02c" : "#1f77b4");
  atomic_write(out / "kpsi.svg", svg.str());
  return 0;
}

int cmd_measures(const JobConfig& cfg, const fs::path& out, int) {
  const CubicRoots cr = cfg.cubic();
  const double diam = cr.diameter();
  json report;
  std::array<DiscreteMeasure, 3> mi;
  for (int i = 0; i < 3; ++i) {
    mi[static_cast<size_t>(i)] = build_Mi(cr, i, cfg.tau_nodes, cfg.slice_nodes);
    std::string csv = "re,im,weight\n";
    for (size_t k = 0; k < mi[static_cast<size_t>(i)].size(); ++k)
      csv += num(mi[static_cast<size_t>(i)].points[k].real()) + "," +
             num(mi[static_cast<size_t>(i)].points[k].imag()) + "," +
             num(mi[static_cast<size_t>(i)].weights[k]) + "\n";
    atomic_write(out / ("m" + std::to_string(i + 1) + ".csv"), csv);
    report["masses"].push_back(mi[static_cast<size_t>(i)].total_mass());
  }
  std::vector<cplx> ring;
  for (int k = 0; k < 64; ++k)
    ring.push_back(cr.centroid() + std::polar(cfg.ring_radius_factor * diam, 2.0 * M_PI * k / 64.0));
  report["ring_radius"] = cfg.ring_radius_factor * diam;
  report["pairwise_gaps"] = json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      report["pairwise_gaps"].push_back(
          {{"i", i + 1},
           {"j", j + 1},
           {"gap", balayage_gap(mi[static_cast<size_t>(i)], mi[static_cast<size_t>(j)], ring)}});
  write_json(out / "measures-report.json", report);
  return 0;
}

int cmd_verify(const fs::path& out) {
  const auto results = verify::run_all();
  json report = json::array();
  bool all_ok = true;
  for (const auto& r : results) {
    std::printf("[%s] C%02d %s: %s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    report.push_back({{"id", r.id},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    all_ok = all_ok && r.passed;
  }
  write_json(out / "verify-report.json", report);
  std::printf("%s\n", all_ok ? "all criteria passed" : "some criteria FAILED");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heun spectral polynomials, root loci, and Strebel structures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  app.add_option("--config", config_path, "JSON job configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for independent sub-jobs");

  auto* sc_spectrum = app.add_subcommand("spectrum", "Van Vleck / Stieltjes spectra");
  auto* sc_locus = app.add_subcommand("locus", "the limit locus of spectral roots");
  auto* sc_traj = app.add_subcommand("trajectories", "singular trajectory graph at a given b");
  auto* sc_meas = app.add_subcommand("measures", "averaged arcsine measures and transform gaps");
  auto* sc_verify = app.add_subcommand("verify", "run the verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    if (sc_verify->parsed()) return cmd_verify(out);

    if (config_path.empty()) {
      std::fprintf(stderr, "a --config file is required for this subcommand\n");
      return 2;
    }
    const JobConfig cfg = load_config(config_path);
    write_json(out / "effective-config.json", effective_config(cfg));

    if (sc_spectrum->parsed()) return cmd_spectrum(cfg, out, threads);
    if (sc_locus->parsed()) return cmd_locus(cfg, out, threads);
    if (sc_traj->parsed()) return cmd_trajectories(cfg, out, threads);
    if (sc_meas->parsed()) return cmd_measures(cfg, out, threads);
    return 2;
  } catch (const InvalidArgumentError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    json err = {{"error", "numerical"}, {"what", e.what()}};
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    try {
      write_json(fs::path(out_dir) / "error-report.json", err);
    } catch (...) {
    }
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
