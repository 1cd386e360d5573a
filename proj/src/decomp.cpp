#include "corrnet/decomp.hpp"

#include <atomic>
#include <thread>

namespace corrnet {

double recovery_error(const Matrix& s, const Matrix& l, const Matrix& s_true, const Matrix& l_true) {
  auto rel = [](const Matrix& a, const Matrix& b) {
    double nb = b.norm();
    return nb > 0 ? (a - b).norm() / nb : a.norm();
  };
  return rel(s, s_true) + rel(l, l_true);
}

SweepResult sweep(const SkewSymmetricMatrix& c, double eps, const SweepOptions& opts,
                  const std::optional<std::pair<Matrix, Matrix>>& truth) {
  if (!(eps > 0 && eps <= 0.5)) throw ValidationError("sweep step must lie in (0, 0.5]");
  const long k = std::lround(1.0 / eps);
  if (std::abs(k * eps - 1.0) > 1e-9) throw ValidationError("1/eps must be an integer");
  if (opts.block < 1) throw ValidationError("sweep block size must be positive");

  SweepResult sr;
  sr.eps = eps;
  sr.c_norm = c.matrix().norm();
  sr.records.resize(k);
  std::vector<SplitResult<double>> solved(k);

  const long blocks = (k + opts.block - 1) / opts.block;
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (long b = next++; b < blocks; b = next++) {
      const SplitResult<double>* warm = nullptr;
      for (long i = b * opts.block; i < std::min(k, (b + 1) * opts.block); ++i) {
        SweepRecord& rec = sr.records[i];
        rec.t = static_cast<double>(i + 1) / static_cast<double>(k);
        try {
          solved[i] = solve_split(c, rec.t, opts.solver, warm);
          warm = &solved[i];
        } catch (const std::exception& e) {
          rec.error = e.what();
          warm = nullptr;
        }
      }
    }
  };
  int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(blocks)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Sequential pass: diffs against the previous grid point, (C, 0) before the first.
  Matrix prev_s = c.matrix();
  Matrix prev_l = Matrix::Zero(c.n(), c.n());
  for (long i = 0; i < k; ++i) {
    SweepRecord& rec = sr.records[i];
    if (!rec.error.empty()) {
      rec.diff = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    SplitResult<double>& r = solved[i];
    rec.s = std::move(r.s);
    rec.l = std::move(r.l);
    rec.converged = r.converged;
    rec.iterations = r.iterations;
    rec.primal_residual = r.primal_residual;
    rec.rank_l = r.rank_l;
    if (!r.converged) rec.error = "not converged after " + std::to_string(r.iterations) + " iterations";
    rec.diff = (rec.s - prev_s).norm() + (rec.l - prev_l).norm();
    if (truth) rec.tol = recovery_error(rec.s, rec.l, truth->first, truth->second);
    rec.degmax_s = deg_max(rec.s, opts.tau_supp);
    rec.inc_l = rec.rank_l > 0 ? incoherence(rec.l, opts.solver.rank_tol) : 0.0;
    prev_s = rec.s;
    prev_l = rec.l;
  }
  return sr;
}

std::vector<TInterval> zero_regions(const SweepResult& sr, double tau_zero) {
  std::vector<TInterval> out;
  const double bar = tau_zero * sr.c_norm;
  const Index k = static_cast<Index>(sr.records.size());
  for (Index i = 0; i < k;) {
    if (!(sr.records[i].diff < bar)) {
      ++i;
      continue;
    }
    Index j = i;
    while (j + 1 < k && sr.records[j + 1].diff < bar) ++j;
    // solutions coincide from the grid point before the run through its end
    out.push_back({i == 0 ? 0.0 : sr.records[i - 1].t, sr.records[j].t, i, j});
    i = j + 1;
  }
  return out;
}

RegionSelection select_middle_region(const SweepResult& sr, double tau_zero, double tau_supp) {
  std::vector<TInterval> regions = zero_regions(sr, tau_zero);
  if (regions.size() < 3)
    throw RegionError("fewer than three zero regions (" + std::to_string(regions.size()) + ")", regions);
  RegionSelection sel;
  sel.regions = regions;

  auto midpoint_index = [&](const TInterval& r) {
    const double mid = (r.lo + r.hi) / 2;
    Index best = r.last;
    for (Index i = std::max<Index>(r.first - 1, 0); i <= r.last; ++i)
      if (std::abs(sr.records[i].t - mid) < std::abs(sr.records[best].t - mid) - 1e-12) best = i;
    return best;
  };

  std::vector<Index> interior;
  for (size_t i = 1; i + 1 < regions.size(); ++i) interior.push_back(static_cast<Index>(i));
  Index pick = interior.front();
  if (interior.size() > 1) {
    sel.ambiguous = true;
    bool found = false;
    for (Index i : interior) {
      const SweepRecord& rec = sr.records[midpoint_index(regions[i])];
      if (check_sufficient_condition(rec.s, rec.l, tau_supp).holds) {
        pick = i;
        found = true;
        break;
      }
    }
    if (!found) {
      // longest interior run, ties toward the grid center
      auto len = [&](Index i) { return regions[i].hi - regions[i].lo; };
      auto off = [&](Index i) { return std::abs((regions[i].lo + regions[i].hi) / 2 - 0.5); };
      for (Index i : interior)
        if (len(i) > len(pick) + 1e-12 || (std::abs(len(i) - len(pick)) <= 1e-12 && off(i) < off(pick))) pick = i;
      sel.note = "more than three zero regions; picked the longest interior region";
    } else {
      sel.note = "more than three zero regions; picked the first interior region passing the 1/12 check";
    }
  }
  sel.middle = regions[pick];
  sel.t0_index = midpoint_index(sel.middle);
  sel.t0 = sr.records[sel.t0_index].t;
  const SweepRecord& rec = sr.records[sel.t0_index];
  sel.condition = check_sufficient_condition(rec.s, rec.l, tau_supp);
  return sel;
}

}  // namespace corrnet
