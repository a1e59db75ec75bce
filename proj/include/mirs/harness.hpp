#ifndef MIRS_HARNESS_HPP
#define MIRS_HARNESS_HPP

#include <functional>
#include <string>
#include <vector>

#include "mirs/combine.hpp"
#include "mirs/data.hpp"
#include "mirs/rng.hpp"
#include "mirs/simgen.hpp"

namespace mirs {

// Stream-purpose tags: the second path component of every key drawn inside
// a study, so no two pipeline stages ever share a stream.
namespace stream_purpose {
inline constexpr std::uint64_t kPopulation = 1;
inline constexpr std::uint64_t kSampleAssignment = 2;
inline constexpr std::uint64_t kMissingness = 3;
inline constexpr std::uint64_t kJackknifePartition = 4;
inline constexpr std::uint64_t kBootstrapDraws = 5;
inline constexpr std::uint64_t kJackknifeImpute = 6;
inline constexpr std::uint64_t kBootstrapImpute = 7;
inline constexpr std::uint64_t kFullSampleImpute = 8;
inline constexpr std::uint64_t kDiagnostic = 9;
}  // namespace stream_purpose

struct StudyConfig {
  DgpConfig dgp{};
  Method method{Method::Jackknife};
  int G_or_B{25};
  int m{1};
  Mode mode{Mode::ReImpute};
  int J{500};
  double alpha{0.05};
  std::uint64_t master_seed{20240101};
  int sweeps{1};

  void validate() const;
};

struct SimRecord {
  int j{0};
  double point{0.0};
  double variance{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  double true_mu{0.0};
  bool covered{false};          // vs the repetition's finite-population mean
  bool covered_vs_half{false};  // vs the superpopulation value 0.5
  int regeneration_count{0};
};

struct StudyMetrics {
  double bias{0.0};
  double rmse{0.0};
  double coverage{0.0};
  double coverage_vs_half{0.0};
  double mean_variance{0.0};
  int J{0};  // repetitions aggregated
  StudyConfig config{};
};

// One grid cell: a (mode, m) pair evaluated on the shared per-repetition
// data, plan and nested imputation streams.
struct GridCell {
  Mode mode{Mode::ReImpute};
  int m{1};
};

struct GridResult {
  std::vector<StudyMetrics> cells;  // aligned with the requested cell list
  int failed_repetitions{0};
  long regenerations{0};
  double max_weight_ratio{0.0};  // largest per-replicate max/min weight
  std::vector<std::string> failures;  // one message per failed repetition
};

struct RunOptions {
  int workers{0};  // 0: use default_worker_count()
  std::function<void(int done, int total)> progress{};
};

// MIRS_WORKERS environment override, else hardware concurrency.
int default_worker_count();

// Executes the full pipeline for repetition j with streams rooted at
// (master_seed, j): generate, sample, mask (with bounded regeneration),
// resample, impute, combine.
SimRecord run_single_simulation(const StudyConfig& cfg, int j);

// J repetitions of run_single_simulation aggregated into bias, rMSE and
// coverage.  Results are independent of worker count; more than 1% failed
// repetitions raises StudyError.
StudyMetrics run_study(const StudyConfig& cfg, const RunOptions& opts = {});

// Shared-data grid: every (mode, m) cell of one method is evaluated on the
// same population, sample and plan per repetition, and cell m reads
// imputations k = 1..m from the same keyed streams, so each cell is
// bit-identical to a standalone run_study with that (mode, m).
GridResult run_study_grid(const StudyConfig& base,
                          const std::vector<GridCell>& cells,
                          const RunOptions& opts = {});

// Sample variance across K single-imputation full-sample estimates: the
// noise a single imputed version adds to the full-sample estimate (c^2).
double estimate_imputation_variance(const DataMatrix& data, int K,
                                    const StreamKey& key);

}  // namespace mirs

#endif  // MIRS_HARNESS_HPP
