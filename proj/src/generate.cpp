#include "corrnet/generate.hpp"
#include "corrnet/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace corrnet {

AnalyticInput analytic_input(const LatentExpansion& exp, double omega) {
  SlSplit sp = analytic_sl_split(exp, omega);
  AnalyticInput in;
  in.phi_inv = sp.s + sp.l;
  in.s = sp.s.imag();
  in.l = sp.l.imag();
  // exact skew parts
  in.s = (in.s - in.s.transpose()) / 2.0;
  in.l = (in.l - in.l.transpose()) / 2.0;
  return in;
}

PlantedSplit planted_split(Index n, std::uint64_t seed, double sigma) {
  if (n < 2 || n % 2 != 0) throw ValidationError("planted split needs an even n >= 2");
  std::mt19937_64 rng(seed);
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::bernoulli_distribution flip(0.5);
  PlantedSplit out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (Index k = 0; k + 1 < n; k += 2) {
    double v = flip(rng) ? -mag(rng) : mag(rng);
    out.s(perm[k], perm[k + 1]) = v;
    out.s(perm[k + 1], perm[k]) = -v;
  }
  Vector u(n);
  for (Index i = 0; i < n; ++i) u[i] = flip(rng) ? -1.0 : 1.0;
  // v flips the sign of exactly half of u, which makes it orthogonal to u
  std::shuffle(perm.begin(), perm.end(), rng);
  Vector v = u;
  for (Index k = 0; k < n / 2; ++k) v[perm[k]] = -v[perm[k]];
  const double scale = sigma / static_cast<double>(n);
  out.l = scale * (u * v.transpose() - v * u.transpose());
  return out;
}

GeneratedModel draw_model(const GeneratorConfig& cfg, std::uint64_t draw_seed) {
  const Index n = cfg.n;
  if (n < 2) throw ValidationError("generator needs n >= 2");
  const bool poly = cfg.kind == CorrelationKind::Polynomial;
  const Index groups = poly ? (cfg.clique_size >= 2 ? 1 : 0) : cfg.q;
  if (groups > 0 && cfg.clique_size < 2) throw ValidationError("clique size must be at least 2");
  if (groups * cfg.clique_size > n) throw ValidationError("cliques do not fit in n nodes");
  std::mt19937_64 rng(draw_seed);

  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Index>> cliques(groups);
  std::vector<int> member(n, -1);
  for (Index g = 0; g < groups; ++g) {
    cliques[g].assign(perm.begin() + g * cfg.clique_size, perm.begin() + (g + 1) * cfg.clique_size);
    std::sort(cliques[g].begin(), cliques[g].end());
    for (Index i : cliques[g]) member[i] = static_cast<int>(g);
  }

  // candidate directed edges j -> i
  std::vector<Edge> cand;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      // clique members stay parentless, so every latent row of L is supported on its own clique
      if (cfg.assumption5 && member[i] >= 0) continue;
      cand.push_back({j, i});
    }
  std::shuffle(cand.begin(), cand.end(), rng);
  DirectedGraph g(n);
  Topology topo(n);
  for (const auto& [from, to] : cand) {
    if (topo.edge_count() >= cfg.edges) break;
    if (topo.has_edge(from, to)) continue;
    g.add_edge(from, to);
    topo.add_edge(from, to);
  }
  if (topo.edge_count() < cfg.edges) throw ValidationError("not enough admissible edges for the requested count");

  std::uniform_real_distribution<double> gain(cfg.gain_lo, cfg.gain_hi);
  Matrix gm = Matrix::Zero(n, n);
  for (const auto& [from, to] : g.edges()) gm(to, from) = gain(rng);
  for (Index i = 0; i < n; ++i) {
    double rs = gm.row(i).sum();
    if (rs > cfg.row_sum) gm.row(i) *= cfg.row_sum / rs;
  }
  TransferMatrix h(n, n);
  for (const auto& [from, to] : g.edges()) h.set(to, from, TransferFunction::delay(gm(to, from), 1));

  Vector base(n);
  std::uniform_real_distribution<double> var(cfg.var_lo, cfg.var_hi);
  for (Index i = 0; i < n; ++i) base[i] = cfg.var_lo == cfg.var_hi ? cfg.var_lo : var(rng);

  CorrelationGraph gc = union_of_cliques(n, cliques);
  NoiseSpec noise;
  noise.base_variances = base;
  if (poly) {
    PolyCorrelationSpec ps;
    ps.m = cfg.poly_m;
    ps.p = cfg.poly_p;
    ps.sigma = cfg.poly_sigma;
    const Index mcount = static_cast<Index>(monomial_count(ps.m, ps.p));
    ps.gains = TransferMatrix(n, mcount);
    std::uniform_real_distribution<double> mag(cfg.latent.min_magnitude, cfg.latent.max_magnitude);
    std::uniform_int_distribution<int> delay(1, cfg.latent.max_delay);
    std::bernoulli_distribution flip(0.5);
    for (Index k : cfg.poly_active) {
      if (k <= 0 || k >= mcount) throw ValidationError("active monomial index out of range");
      for (Index i : cliques.empty() ? std::vector<Index>{} : cliques[0]) {
        double v = mag(rng);
        if (flip(rng)) v = -v;
        ps.gains.set(i, k, TransferFunction::delay(v, delay(rng)));
      }
    }
    noise.correlation = ps;
  } else if (groups > 0) {
    LatentExpansion e = build_lq_expansion(h, base, gc, derive_seed(draw_seed, 7), cfg.latent);
    noise.correlation = AffineCorrelationSpec{e.f, e.latent_covariance.diagonal()};
  }

  GeneratedModel out{Ldim(h, noise), {}, g, topo, gc, cfg.seed, draw_seed, 0, 0.0, {}};
  out.expansion = expansion_of(out.model);
  return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Im H and Im F must not vanish at omega (sin(d omega) != 0 for every used delay).
bool phases_nonzero(const LatentExpansion& e, double omega) {
  for (const TransferMatrix* m : {&e.h, &e.f})
    for (int tau = 1; tau < m->lags(); ++tau)
      if (!m->tap(tau).isZero(0.0) && std::abs(std::sin(tau * omega)) < 1e-3) return false;
  return true;
}

}  // namespace

GeneratedModel generate_benchmark(const GeneratorConfig& cfg) {
  if (cfg.max_attempts < 1) throw ValidationError("max_attempts must be positive");
  PipelineConfig pc;
  pc.eps = cfg.validate_eps;
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    std::uint64_t s = attempt == 0 ? cfg.seed : splitmix(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(attempt));
    GeneratedModel gm = draw_model(cfg, s);
    gm.attempts = attempt + 1;
    bool ok = true;
    for (size_t k = 0; k < cfg.validate_omegas.size() && ok; ++k) {
      const double w = cfg.validate_omegas[k];
      if (!phases_nonzero(gm.expansion, w)) {
        ok = false;
        break;
      }
      AnalyticInput in = analytic_input(gm.expansion, w);
      if (k == 0) gm.sufficient_product = check_sufficient_condition(in.s, in.l).product;
      // Without latent nodes the sweep has no mixture region; phases are all that can be checked.
      if (gm.expansion.latent_count() == 0) continue;
      ReconstructionReport rep = end_to_end(in.phi_inv, w, pc);
      ok = rep.ok() && rep.topology == gm.topology;
      if (ok) gm.t0.push_back(rep.selection->t0);
    }
    if (ok) return gm;
  }
  throw ValidationError("no admissible model after " + std::to_string(cfg.max_attempts) + " attempts");
}

}  // namespace corrnet
