#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "manifold_interp/baselines.hpp"
#include "manifold_interp/trajgen.hpp"

namespace minterp {

// Declarative description of a corpus run. Loaded from JSON; every field has
// a default so configs stay small.
struct ExperimentSpec {
  std::vector<int> curve_lengths{1000, 2000, 5000};
  int curves_per_length = 10;
  std::vector<double> loss_ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<MethodId> methods{kAllMethods, kAllMethods + 7};
  int k = 5;
  double sigma = 1e-3;
  double noise_sigma = 2.0;         // cm
  int runs = 1;                     // independent noise/mask draws per curve
  std::uint64_t master_seed = 20240817ull;
  int repetitions = 5;              // timing repetitions (plus one warm-up)
  MaskPolicy mask_policy = MaskPolicy::Scattered;
  std::int64_t protect_prefix = -1; // -1 resolves to k+1
  int bezier_order_min = 5;
  int bezier_order_max = 14;
  double box_width = 800.0;         // cm
  double box_height = 1800.0;       // cm
  bool global_baselines = false;    // RBF/kriging dense all-knot solves
  std::vector<int> timing_k_values;         // empty resolves to {k}
  std::vector<int> ablation_k_values{2, 3, 4, 5, 7, 9, 12, 15};

  void validate() const;
  std::int64_t resolved_protect() const {
    return protect_prefix >= 0 ? protect_prefix : k + 1;
  }
};

ExperimentSpec load_experiment_spec(const std::filesystem::path& json_path);

// Measured outputs of one (method, curve, loss-ratio) cell, aggregated over
// the experiment's runs.
struct BenchRecord {
  MethodId method = MethodId::Lli;
  std::uint64_t curve_seed = 0;
  int n_points = 0;        // trajectory length (timing: interpolated count)
  double loss_ratio = 0.0;
  int k = 0;
  double wall_time_ms = 0.0;
  bool ok = true;
  std::string error;
  double mean_err = 0.0;    // cm, pooled over runs
  double mse = 0.0;         // cm^2
  double mean_x_err = 0.0;  // cm
  double std_across = 0.0;  // cm, across runs (0 when runs < 2)
  std::size_t scored_points = 0;
  std::size_t skipped_points = 0;  // queries no mode could serve
  bool mask_fallback = false;      // scattered mask infeasible, ran unrestricted
  std::vector<double> pooled_errors;
};

// Seed-splitting rule (see rng.hpp): fixed stream tags chained with the
// structural indices, so no two cells share a generator stream.
std::uint64_t curve_seed_for(std::uint64_t master_seed, std::size_t length_idx,
                             std::size_t curve_idx);
std::uint64_t noise_seed_for(std::uint64_t curve_seed, int run);
std::uint64_t mask_seed_for(std::uint64_t curve_seed, int run,
                            std::size_t ratio_idx);

// generate -> noise -> mask -> interpolate interior gaps -> score, for every
// (length, curve, ratio, method) cell. Cells run in parallel (capped by
// MANIFOLD_INTERP_THREADS) but the records come back in deterministic cell
// order and carry no timing.
std::vector<BenchRecord> run_accuracy_sweep(const ExperimentSpec& spec);

// Serial per-method wall time of the interpolation calls alone, median of
// `repetitions` after one discarded warm-up, on the run-0 corpus at the first
// loss ratio. One record per (k, method); n_points is the interpolated count.
std::vector<BenchRecord> run_timing(const ExperimentSpec& spec);

// Accuracy sweep per k on bitwise-identical corpora (protect prefix resolved
// once from the base spec).
std::vector<std::pair<int, std::vector<BenchRecord>>> run_k_ablation(
    const ExperimentSpec& spec, const std::vector<int>& k_values);

void write_metrics_csv(const std::vector<BenchRecord>& records,
                       const std::filesystem::path& path);
void write_cdf_csv(const std::vector<BenchRecord>& records,
                   const std::vector<MethodId>& method_order,
                   const std::filesystem::path& path);
void write_timing_csv(const std::vector<BenchRecord>& records,
                      const std::filesystem::path& path);

unsigned harness_thread_cap();

}  // namespace minterp
