#include "mirs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <thread>

#include "mirs/errors.hpp"
#include "mirs/estimate.hpp"
#include "mirs/resample.hpp"

namespace mirs {

void StudyConfig::validate() const {
  dgp.validate();
  if (J < 1) throw ConfigError("J must be >= 1");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
  if (G_or_B < 2) throw ConfigError("replicate count must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha not in (0, 1)");
}

int default_worker_count() {
  if (const char* env = std::getenv("MIRS_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

namespace {

constexpr int kMaxRegenerations = 3;

struct RepData {
  DataMatrix data;
  double true_mu{0.0};
  int regenerations{0};
};

// Generate -> sample -> mask with stage-local retries on degenerate draws.
RepData generate_repetition_data(const DgpConfig& dgp, std::uint64_t seed,
                                 int j) {
  namespace sp = stream_purpose;
  const StreamKey root{seed, {static_cast<std::uint64_t>(j)}};
  RepData rep;

  RandomStream pop_stream =
      derive_stream(root.child(sp::kPopulation).child(0));
  const Population pop = generate_population(dgp, pop_stream);
  rep.true_mu = pop.true_mu;

  std::uint64_t sample_attempt = 0;
  std::optional<DataMatrix> sample;
  for (;;) {
    RandomStream s =
        derive_stream(root.child(sp::kSampleAssignment).child(sample_attempt));
    sample = draw_samples(pop, dgp, s);
    if (sample) break;
    ++rep.regenerations;
    ++sample_attempt;
    if (rep.regenerations > kMaxRegenerations)
      throw StudyError("repetition " + std::to_string(j) +
                       ": sample draw kept degenerating");
  }

  std::uint64_t miss_attempt = 0;
  for (;;) {
    RandomStream s =
        derive_stream(root.child(sp::kMissingness).child(miss_attempt));
    auto masked = apply_missingness(*sample, dgp, s);
    if (masked) {
      rep.data = std::move(*masked);
      return rep;
    }
    ++rep.regenerations;
    ++miss_attempt;
    if (rep.regenerations > kMaxRegenerations)
      throw StudyError("repetition " + std::to_string(j) +
                       ": missingness kept masking everything");
  }
}

struct CellOutcome {
  double point{0.0};
  double variance{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
};

struct RepOutcome {
  double true_mu{0.0};
  int regenerations{0};
  double max_weight_ratio{0.0};
  std::vector<CellOutcome> cells;
};

CombinedEstimate combine_for(Method method, std::span<const double> thetas,
                             double alpha) {
  return method == Method::Jackknife ? jackknife_combine(thetas, alpha)
                                     : bootstrap_combine(thetas, alpha);
}

// Evaluates every requested (mode, m) cell of repetition j on shared data.
RepOutcome run_repetition(const StudyConfig& base,
                          const std::vector<GridCell>& cells, int j) {
  namespace sp = stream_purpose;
  base.validate();
  RepOutcome out;
  RepData rep = generate_repetition_data(base.dgp, base.master_seed, j);
  out.true_mu = rep.true_mu;
  out.regenerations = rep.regenerations;
  out.cells.resize(cells.size());

  const StreamKey root{base.master_seed, {static_cast<std::uint64_t>(j)}};
  const bool jackknife = base.method == Method::Jackknife;

  RandomStream plan_stream = derive_stream(
      root.child(jackknife ? sp::kJackknifePartition : sp::kBootstrapDraws));
  const ReplicatePlan plan =
      jackknife
          ? make_jackknife_plan(rep.data.n(), base.G_or_B, plan_stream)
          : make_bootstrap_plan(rep.data.n(), base.G_or_B, plan_stream);
  const int R = plan.count();

  int m_max_reimpute = 0, m_max_reuse = 0;
  for (const GridCell& c : cells) {
    int& mm = c.mode == Mode::ReImpute ? m_max_reimpute : m_max_reuse;
    mm = std::max(mm, c.m);
  }

  // thetas[r][k]: per-replicate, per-imputation estimates.
  std::vector<std::vector<double>> reimpute_thetas;
  std::vector<std::vector<double>> reuse_thetas;

  if (m_max_reimpute > 0) {
    ImputationSpec spec;
    spec.sweeps = base.sweeps;
    spec.m = m_max_reimpute;
    const StreamKey impute_root =
        root.child(jackknife ? sp::kJackknifeImpute : sp::kBootstrapImpute);
    reimpute_thetas.resize(R);
    for (int r = 0; r < R; ++r) {
      const DataMatrix rep_data = materialize_replicate(rep.data, plan, r);
      reimpute_thetas[r] = replicate_estimates_per_imputation(
          rep_data, spec, impute_root.child(static_cast<std::uint64_t>(r)));
    }
  }
  if (m_max_reuse > 0) {
    ImputationSpec spec;
    spec.sweeps = base.sweeps;
    spec.m = m_max_reuse;
    const WeightVector wv = compute_blend_weights(rep.data);
    const ReuseImputations imps = make_reuse_imputations(
        rep.data, wv.w, spec, root.child(sp::kFullSampleImpute));
    reuse_thetas.resize(R);
    for (int r = 0; r < R; ++r)
      reuse_thetas[r] = reuse_replicate_estimates_per_imputation(
          rep.data, wv.w, imps, plan, r);
  }

  std::vector<double> thetas(R);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& source =
        cells[c].mode == Mode::ReImpute ? reimpute_thetas : reuse_thetas;
    const int m = cells[c].m;
    for (int r = 0; r < R; ++r) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += source[r][k];
      thetas[r] = s / static_cast<double>(m);
    }
    const CombinedEstimate est = combine_for(base.method, thetas, base.alpha);
    out.cells[c] = {est.point, est.variance, est.ci_low, est.ci_high};
  }
  return out;
}

}  // namespace

SimRecord run_single_simulation(const StudyConfig& cfg, int j) {
  const std::vector<GridCell> cells{{cfg.mode, cfg.m}};
  const RepOutcome rep = run_repetition(cfg, cells, j);
  SimRecord rec;
  rec.j = j;
  rec.point = rep.cells[0].point;
  rec.variance = rep.cells[0].variance;
  rec.ci_low = rep.cells[0].ci_low;
  rec.ci_high = rep.cells[0].ci_high;
  rec.true_mu = rep.true_mu;
  rec.covered = rec.ci_low <= rep.true_mu && rep.true_mu <= rec.ci_high;
  rec.covered_vs_half = rec.ci_low <= 0.5 && 0.5 <= rec.ci_high;
  rec.regeneration_count = rep.regenerations;
  return rec;
}

GridResult run_study_grid(const StudyConfig& base,
                          const std::vector<GridCell>& cells,
                          const RunOptions& opts) {
  base.validate();
  if (cells.empty()) throw ConfigError("study grid needs at least one cell");
  for (const GridCell& c : cells)
    if (c.m < 1) throw ConfigError("m must be >= 1");

  const int J = base.J;
  const int workers =
      std::max(1, opts.workers > 0 ? opts.workers : default_worker_count());

  std::vector<std::optional<RepOutcome>> outcomes(J);
  std::vector<std::string> failures(J);
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    for (;;) {
      const int j = next.fetch_add(1);
      if (j >= J) return;
      try {
        outcomes[j] = run_repetition(base, cells, j);
      } catch (const std::exception& e) {
        failures[j] = e.what();
      }
      const int d = done.fetch_add(1) + 1;
      if (opts.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        opts.progress(d, J);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  GridResult result;
  result.cells.resize(cells.size());
  long regens = 0;
  int ok = 0;
  for (int j = 0; j < J; ++j) {
    if (outcomes[j]) {
      ++ok;
      regens += outcomes[j]->regenerations;
    } else {
      ++result.failed_repetitions;
      result.failures.push_back("repetition " + std::to_string(j) + ": " +
                                failures[j]);
    }
  }
  result.regenerations = regens;
  if (result.failed_repetitions > 0 &&
      static_cast<double>(result.failed_repetitions) > 0.01 * J)
    throw StudyError("study aborted: " +
                     std::to_string(result.failed_repetitions) + " of " +
                     std::to_string(J) + " repetitions failed (" +
                     (result.failures.empty() ? std::string("?")
                                              : result.failures.front()) +
                     ")");

  // Fixed-order reduction over j keeps metrics identical across worker
  // counts.
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double sum_err = 0.0, sum_sq = 0.0, sum_var = 0.0;
    long covered = 0, covered_half = 0;
    for (int j = 0; j < J; ++j) {
      if (!outcomes[j]) continue;
      const RepOutcome& rep = *outcomes[j];
      const CellOutcome& cell = rep.cells[c];
      const double err = cell.point - rep.true_mu;
      sum_err += err;
      sum_sq += err * err;
      sum_var += cell.variance;
      covered += cell.ci_low <= rep.true_mu && rep.true_mu <= cell.ci_high;
      covered_half += cell.ci_low <= 0.5 && 0.5 <= cell.ci_high;
    }
    StudyMetrics& metrics = result.cells[c];
    metrics.J = ok;
    metrics.bias = sum_err / ok;
    metrics.rmse = std::sqrt(sum_sq / ok);
    metrics.coverage = static_cast<double>(covered) / ok;
    metrics.coverage_vs_half = static_cast<double>(covered_half) / ok;
    metrics.mean_variance = sum_var / ok;
    metrics.config = base;
    metrics.config.mode = cells[c].mode;
    metrics.config.m = cells[c].m;
  }
  return result;
}

StudyMetrics run_study(const StudyConfig& cfg, const RunOptions& opts) {
  const GridResult result =
      run_study_grid(cfg, {{cfg.mode, cfg.m}}, opts);
  return result.cells[0];
}

double estimate_imputation_variance(const DataMatrix& data, int K,
                                    const StreamKey& key) {
  if (K < 20) throw ConfigError("imputation variance needs K >= 20");
  if (data.all_observed()) return 0.0;

  const WeightVector wv = compute_blend_weights(data);
  ImputationSpec spec;
  spec.m = K;
  const auto estimates = replicate_estimates_per_imputation(data, spec, key);

  double mean = 0.0;
  for (double v : estimates) mean += v;
  mean /= K;
  double ss = 0.0;
  for (double v : estimates) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(K - 1);
}

}  // namespace mirs
