// corrnet command-line front end: generate, pipeline, plot, verify.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "corrnet/generate.hpp"
#include "corrnet/io.hpp"
#include "corrnet/plot.hpp"
#include "corrnet/poly_lift.hpp"
#include "corrnet/spectral.hpp"

using namespace corrnet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

json error_json(const Failure& f) { return {{"error", {{"code", f.code}, {"kind", f.kind}, {"message", f.message}}}}; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

template <typename F>
void write_stream(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  body(out);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
}

// ---- generate ----

struct GenerateArgs {
  Index n = 29, edges = 16, q = 3, clique_size = 9;
  std::string kind = "affine";
  int m = 2, p = 3;
  double sigma = 1.0;
  std::vector<Index> active = {1, 6, 8};
  bool assumption5 = false;
  std::uint64_t seed = 7;
  std::vector<std::string> validate = {"3/8"};
  bool no_validate = false;
  double validate_eps = 0.02;
  int max_attempts = 64;
  std::string out = "model.json";
};

int cmd_generate(const GenerateArgs& a) {
  GeneratorConfig cfg;
  cfg.n = a.n;
  cfg.edges = a.edges;
  cfg.q = a.q;
  cfg.clique_size = a.clique_size;
  if (a.kind == "affine") cfg.kind = CorrelationKind::Affine;
  else if (a.kind == "polynomial") cfg.kind = CorrelationKind::Polynomial;
  else throw ValidationError("--kind must be affine or polynomial");
  if (cfg.kind == CorrelationKind::Affine && a.q == 0) cfg.clique_size = 0;
  cfg.poly_m = a.m;
  cfg.poly_p = a.p;
  cfg.poly_sigma = a.sigma;
  cfg.poly_active = a.active;
  cfg.assumption5 = a.assumption5;
  cfg.seed = a.seed;
  cfg.validate_omegas.clear();
  json omegas = json::array();
  if (!a.no_validate)
    for (const auto& w : a.validate) {
      RationalPi r = parse_rational_pi(w);
      cfg.validate_omegas.push_back(r.value());
      omegas.push_back(r.str());
    }
  cfg.validate_eps = a.validate_eps;
  cfg.max_attempts = a.max_attempts;

  json config = {{"command", "generate"}, {"n", a.n},          {"edges", a.edges},
                 {"q", a.q},              {"clique_size", cfg.clique_size},
                 {"kind", a.kind},        {"m", a.m},          {"p", a.p},
                 {"sigma", a.sigma},      {"active", a.active}, {"assumption5", a.assumption5},
                 {"validate_omegas_pi", omegas}, {"validate_eps", a.validate_eps},
                 {"max_attempts", a.max_attempts}};
  GeneratedModel gm = generate_benchmark(cfg);
  json doc = benchmark_to_json(gm, artifact_meta(a.seed, config));
  fs::path out(a.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  save_json(out.string(), doc);
  std::cout << json{{"model", out.string()}, {"attempts", gm.attempts}, {"attempt_seed", gm.attempt_seed},
                    {"edges", gm.topology.edge_count()}, {"correlation_edges", gm.correlation.edge_count()}}
                   .dump()
            << "\n";
  return 0;
}

// ---- pipeline ----

struct PipelineArgs {
  std::string model;
  std::string omega = "3/8";
  double eps = 0.01;
  bool analytic = false, data = false;
  Index samples = 1000000;
  std::uint64_t seed = 1;
  Index segment = 64;
  std::string out_dir = "out";
  int threads = 1;
  double tau_rank = 1e-6, tau_supp = 1e-6;
  double tau_zero = -1, tau_edge = -1;  // resolved by path
  int max_iters = 20000;
  bool save_series = false;
};

int cmd_pipeline(const PipelineArgs& a) {
  if (a.analytic && a.data) throw ValidationError("choose one of --analytic and --data");
  const bool data = a.data;
  if (!(a.eps > 0 && a.eps <= 0.5)) throw ValidationError("--eps must lie in (0, 0.5]");
  if (a.threads < 1) throw ValidationError("--threads must be positive");
  LoadedModel lm = load_model(a.model);
  RationalPi w = parse_rational_pi(a.omega);
  const double omega = w.value();

  PipelineConfig pc;
  pc.eps = a.eps;
  pc.tau_zero = a.tau_zero >= 0 ? a.tau_zero : (data ? 0.03 : 1e-3);
  pc.tau_rank = a.tau_rank;
  pc.tau_supp = a.tau_supp;
  pc.tau_edge = a.tau_edge >= 0 ? a.tau_edge : (data ? 0.05 : 1e-6);
  pc.sweep.threads = a.threads;
  pc.sweep.tau_supp = a.tau_supp;
  pc.sweep.solver.max_iters = a.max_iters;

  json config = {{"command", "pipeline"},       {"model", a.model},
                 {"model_meta", lm.meta},       {"omega_pi", w.str()},
                 {"eps", a.eps},                {"path", data ? "data" : "analytic"},
                 {"tau_zero", pc.tau_zero},     {"tau_edge", pc.tau_edge},
                 {"tau_rank", pc.tau_rank},     {"tau_supp", pc.tau_supp},
                 {"max_iters", a.max_iters}};
  if (data) config.update({{"samples", a.samples}, {"segment", a.segment}, {"overlap", 0.5}, {"window", "hann"}});
  // the worker count is left out of the hash: results do not depend on it
  json meta = artifact_meta(a.seed, config);
  ensure_dir(a.out_dir);
  const fs::path dir(a.out_dir);

  LatentExpansion exp = expansion_of(lm.model);
  std::optional<GroundTruth> truth;
  if (lm.topology) truth = GroundTruth{*lm.topology, lm.correlation, std::nullopt};

  CMatrix phi_inv;
  if (data) {
    if (a.samples < 2 * a.segment) throw ValidationError("--samples must cover at least two segments");
    TimeSeries x = simulate_model(lm.model, a.samples, a.seed);
    if (a.save_series) write_stream(dir / "series.bin", [&](std::ostream& os) { write_series_binary(os, x); });
    WelchConfig wc;
    wc.segment_length = a.segment;
    SpectralEstimate est = welch_at(x, {omega}, wc);
    phi_inv = estimate_ipsdm(est, omega);
  } else {
    AnalyticInput in = analytic_input(exp, omega);
    phi_inv = in.phi_inv;
    if (truth) truth->split = std::make_pair(in.s, in.l);
  }
  write_stream(dir / "C.csv", [&](std::ostream& os) {
    Matrix c = phi_inv.imag();
    write_matrix_csv(os, (c - c.transpose()) / 2.0, meta);
  });

  ReconstructionReport rep = end_to_end(phi_inv, omega, pc, truth);
  write_stream(dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, rep.sweep, meta); });
  write_text(dir / "sweep.svg", sweep_svg(sweep_table(rep.sweep), rep.regions,
                                          rep.selection ? std::optional<double>(rep.selection->t0) : std::nullopt));
  json report = report_to_json(rep);
  report["omega_pi"] = w.str();
  report["meta"] = meta;
  if (rep.ok()) {
    const SweepRecord& rec = rep.sweep.records.at(rep.selection->t0_index);
    write_stream(dir / "S.csv", [&](std::ostream& os) { write_matrix_csv(os, rec.s, meta); });
    write_stream(dir / "L.csv", [&](std::ostream& os) { write_matrix_csv(os, rec.l, meta); });
    write_stream(dir / "topology.csv", [&](std::ostream& os) { write_edges_csv(os, rep.topology, meta); });
    if (rep.correlation)
      write_stream(dir / "correlation.csv", [&](std::ostream& os) { write_edges_csv(os, rep.correlation->graph, meta); });
  }
  save_json((dir / "report.json").string(), report);
  json summary = {{"report", (dir / "report.json").string()}, {"completed", rep.ok()}};
  if (rep.metrics) summary["topology_error_fraction"] = rep.metrics->total_error_fraction;
  if (rep.direct) summary["direct_error_fraction"] = rep.direct->metrics.total_error_fraction;
  if (rep.selection) summary["t0"] = rep.selection->t0;
  if (!rep.ok()) {
    Failure f{kExitNumerical, "numerical", rep.error};
    save_json((dir / "error.json").string(), error_json(f));
    std::cout << error_json(f).dump() << "\n";
    return kExitNumerical;
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

// ---- plot ----

int cmd_plot(const std::string& sweep_path, const std::string& out, double tau_zero) {
  std::ifstream in(sweep_path);
  if (!in) throw ValidationError("cannot open sweep CSV '" + sweep_path + "'");
  SweepTable tab = read_sweep_csv(in);
  SweepResult sr;
  sr.c_norm = tab.c_norm;
  for (size_t k = 0; k < tab.t.size(); ++k) {
    SweepRecord r;
    r.t = tab.t[k];
    r.diff = tab.diff[k];
    r.tol = tab.tol[k];
    sr.records.push_back(std::move(r));
  }
  write_text(out, sweep_svg(tab, zero_regions(sr, tau_zero)));
  std::cout << json{{"svg", out}}.dump() << "\n";
  return 0;
}

// ---- verify ----

struct SuiteLine {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<SuiteLine> suite_equivalence(int seeds) {
  std::vector<SuiteLine> out;
  const std::vector<double> grid = frequency_grid(16);
  for (int s = 0; s < seeds; ++s) {
    GeneratorConfig cfg;
    cfg.validate_omegas.clear();
    cfg.q = s % 4;
    cfg.clique_size = cfg.q == 0 ? 0 : 3 + s % 5;
    GeneratedModel gm = draw_model(cfg, static_cast<std::uint64_t>(s));
    EquivalenceResult eq = check_equivalence(gm.model, gm.expansion, grid, 1e-10);
    std::ostringstream d;
    d << "q=" << cfg.q << " max_dev=" << eq.max_deviation;
    out.push_back({"seed " + std::to_string(s), eq.equivalent, d.str()});
  }
  return out;
}

std::vector<SuiteLine> suite_blockdiag() {
  std::vector<SuiteLine> out;
  for (auto [m, p] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {3, 2}}) {
    MonomialBasis basis = enumerate_monomials(m, p);
    ParityClustering pc = parity_permutation(basis);
    Matrix mm = lifted_moment_matrix(m, p, 1.0);
    Index off = 0;
    for (Index i = 0; i < mm.rows(); ++i)
      for (Index j = 0; j < mm.cols(); ++j)
        if (pc.labels[i] != pc.labels[j] && mm(i, j) != 0.0) ++off;
    Matrix pm = permute_symmetric(mm, pc.permutation);
    // each cluster occupies one contiguous run of the permuted order
    bool contiguous = true;
    std::vector<bool> closed(pc.clusters.size(), false);
    for (size_t k = 0; k < pc.permutation.size(); ++k) {
      int lab = pc.labels[pc.permutation[k]];
      if (closed[lab]) contiguous = false;
      if (k + 1 < pc.permutation.size() && pc.labels[pc.permutation[k + 1]] != lab) closed[lab] = true;
    }
    const bool pass = off == 0 && contiguous && pc.clusters.size() <= (std::size_t{1} << m) && pm.rows() == mm.rows();
    std::ostringstream d;
    d << "blocks=" << pc.clusters.size() << " off_block_nonzeros=" << off;
    out.push_back({"(m,p)=(" + std::to_string(m) + "," + std::to_string(p) + ")", pass, d.str()});
  }
  return out;
}

std::vector<SuiteLine> suite_recovery(int seeds) {
  std::vector<SuiteLine> out;
  for (int s = 0; s < seeds; ++s) {
    PlantedSplit ps = planted_split(120, static_cast<std::uint64_t>(s), 10.0);
    SkewMatrix<double> c(ps.s + ps.l);
    std::optional<SplitResult<double>> prev;
    double best = std::numeric_limits<double>::infinity(), at = 0;
    for (int k = 1; k < 100 && best >= 1e-4; ++k) {
      const double t = 0.01 * k;
      SplitResult<double> r = solve_split(c, t, {}, prev ? &*prev : nullptr);
      double e = recovery_error(r.s, r.l, ps.s, ps.l);
      if (e < best) best = e, at = t;
      prev = std::move(r);
    }
    std::ostringstream d;
    d << "n=120 best_tol=" << best << " at t=" << at;
    out.push_back({"planted " + std::to_string(s), best < 1e-4, d.str()});
  }
  return out;
}

std::vector<SuiteLine> suite_counting(int seeds) {
  std::vector<SuiteLine> out;
  for (int s = 0; s < seeds; ++s) {
    GeneratorConfig cfg;
    cfg.validate_omegas.clear();
    cfg.q = 1 + s % 3;
    cfg.clique_size = 3 + s % 4;
    GeneratedModel gm = draw_model(cfg, static_cast<std::uint64_t>(100 + s));
    Index q = maximal_cliques(gm.correlation).q();
    bool pass = gm.expansion.latent_count() == q;
    // dropping any latent node loses part of the correlation graph
    for (Index l = 0; l < gm.expansion.latent_count(); ++l)
      pass = pass && !(correlation_graph_of(remove_latent(gm.expansion, l)) == gm.correlation);
    std::ostringstream d;
    d << "latents=" << gm.expansion.latent_count() << " maximal_cliques=" << q;
    out.push_back({"seed " + std::to_string(100 + s), pass, d.str()});
  }
  return out;
}

std::vector<SuiteLine> suite_structure(int seeds) {
  std::vector<SuiteLine> out;
  for (int s = 0; s < seeds; ++s) {
    GeneratorConfig cfg;
    cfg.validate_omegas.clear();
    cfg.q = 1 + s % 3;
    cfg.clique_size = 3 + s % 5;
    GeneratedModel gm = draw_model(cfg, static_cast<std::uint64_t>(200 + s));
    StructureReport sr = verify_structure(gm.expansion, gm.correlation);
    std::string detail;
    for (const auto& v : sr.violations) detail += (detail.empty() ? "" : "; ") + v;
    out.push_back({"seed " + std::to_string(200 + s), sr.ok(), detail.empty() ? "ok" : detail});
  }
  return out;
}

int cmd_verify(const std::string& suite, int seeds) {
  std::vector<SuiteLine> lines;
  if (suite == "equivalence") lines = suite_equivalence(seeds > 0 ? seeds : 20);
  else if (suite == "blockdiag") lines = suite_blockdiag();
  else if (suite == "recovery") lines = suite_recovery(seeds > 0 ? seeds : 5);
  else if (suite == "counting") lines = suite_counting(seeds > 0 ? seeds : 20);
  else if (suite == "structure") lines = suite_structure(seeds > 0 ? seeds : 50);
  else throw ValidationError("unknown suite '" + suite + "' (equivalence, blockdiag, recovery, counting, structure)");
  int failed = 0;
  for (const auto& l : lines) {
    std::cout << (l.pass ? "PASS " : "FAIL ") << suite << " " << l.name << "  " << l.detail << "\n";
    failed += !l.pass;
  }
  std::cout << suite << ": " << lines.size() - failed << "/" << lines.size() << " passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrnet: topology reconstruction of linear dynamic networks with correlated noise"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "draw a seeded benchmark model and write it as JSON");
  gen->add_option("--n", ga.n, "number of observed nodes")->capture_default_str();
  gen->add_option("--edges", ga.edges, "number of undirected topology edges")->capture_default_str();
  gen->add_option("--q", ga.q, "number of disjoint correlation cliques (affine)")->capture_default_str();
  gen->add_option("--clique-size", ga.clique_size, "members per clique")->capture_default_str();
  gen->add_option("--kind", ga.kind, "affine or polynomial")->capture_default_str();
  gen->add_option("--m", ga.m, "polynomial noise dimension")->capture_default_str();
  gen->add_option("--p", ga.p, "polynomial lift degree")->capture_default_str();
  gen->add_option("--sigma", ga.sigma, "polynomial noise scale")->capture_default_str();
  gen->add_option("--active", ga.active, "active monomial indices (0-based)");
  gen->add_flag("--assumption5", ga.assumption5, "latent nodes at least four hops apart");
  gen->add_option("--seed", ga.seed, "generator seed")->capture_default_str();
  gen->add_option("--validate-omega", ga.validate, "frequencies (multiples of pi) for the recoverability gate");
  gen->add_flag("--no-validate", ga.no_validate, "skip the recoverability gate");
  gen->add_option("--validate-eps", ga.validate_eps, "sweep spacing used by the gate")->capture_default_str();
  gen->add_option("--max-attempts", ga.max_attempts, "redraws before giving up")->capture_default_str();
  gen->add_option("--out", ga.out, "output model JSON")->capture_default_str();

  PipelineArgs pa;
  auto* pipe = app.add_subcommand("pipeline", "reconstruct topology and correlation graph from a model");
  pipe->add_option("--model", pa.model, "model JSON")->required();
  pipe->add_option("--omega", pa.omega, "frequency as a rational multiple of pi, e.g. 3/8")->capture_default_str();
  pipe->add_option("--eps", pa.eps, "spacing of the t grid")->capture_default_str();
  pipe->add_flag("--analytic", pa.analytic, "use the exact inverse PSD (default)");
  pipe->add_flag("--data", pa.data, "simulate samples and estimate the PSD");
  pipe->add_option("--samples", pa.samples, "number of simulated samples")->capture_default_str();
  pipe->add_option("--seed", pa.seed, "simulation seed")->capture_default_str();
  pipe->add_option("--segment", pa.segment, "Welch segment length")->capture_default_str();
  pipe->add_option("--out-dir", pa.out_dir, "artifact directory")->capture_default_str();
  pipe->add_option("--threads", pa.threads, "sweep workers")->capture_default_str();
  pipe->add_option("--tau-zero", pa.tau_zero, "zero-region threshold relative to ||C||_F (default 1e-3 analytic, 0.03 data)");
  pipe->add_option("--tau-edge", pa.tau_edge, "edge threshold relative to max|S| (default 1e-6 analytic, 0.05 data)");
  pipe->add_option("--tau-rank", pa.tau_rank, "rank cutoff for L")->capture_default_str();
  pipe->add_option("--tau-supp", pa.tau_supp, "support cutoff")->capture_default_str();
  pipe->add_option("--max-iters", pa.max_iters, "solver iteration cap per t")->capture_default_str();
  pipe->add_flag("--save-series", pa.save_series, "write the simulated series (binary)");

  std::string sweep_csv, svg_out = "sweep.svg";
  double plot_tau_zero = 1e-3;
  auto* plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
  plot->add_option("--sweep", sweep_csv, "sweep CSV")->required();
  plot->add_option("--out", svg_out, "output SVG")->capture_default_str();
  plot->add_option("--tau-zero", plot_tau_zero, "zero-region threshold")->capture_default_str();

  std::string suite;
  int suite_seeds = 0;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite, "equivalence | blockdiag | recovery | counting | structure")->required();
  verify->add_option("--seeds", suite_seeds, "instances (suite default when 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) return cmd_generate(ga);
    if (*pipe) return cmd_pipeline(pa);
    if (*plot) return cmd_plot(sweep_csv, svg_out, plot_tau_zero);
    if (*verify) return cmd_verify(suite, suite_seeds);
  } catch (const ValidationError& e) {
    std::cout << error_json({kExitValidation, "validation", e.what()}).dump() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cout << error_json({kExitNumerical, "numerical", e.what()}).dump() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cout << error_json({kExitNumerical, "numerical", e.what()}).dump() << "\n";
    return kExitNumerical;
  }
  return 0;
}
