// Command-line driver: corpus generation, single-file interpolation, and the
// benchmark/ablation/CDF experiments. All randomness flows from config seeds,
// so every invocation is reproducible from the config file and flags alone.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manifold_interp/bench.hpp"
#include "manifold_interp/errors.hpp"
#include "manifold_interp/metrics.hpp"

namespace fs = std::filesystem;
using namespace minterp;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string method;
  int k = -1;
  double sigma = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string policy;
  bool timing_serial = true;
};

void add_override_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--method", flags.method,
                  "restrict to one method (lli, linear, spline, makima, "
                  "pchip, rbf, kriging)");
  cmd->add_option("--k", flags.k, "window size override (2..32)");
  cmd->add_option("--sigma", flags.sigma, "LLI regularization override");
  cmd->add_option("--seed", flags.seed, "master seed override")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--policy", flags.policy,
                  "mask policy override: scattered|unrestricted");
}

ExperimentSpec load_spec_with_overrides(const CommonFlags& flags) {
  if (flags.config_path.empty()) {
    throw ConfigError("--config is required");
  }
  if (!fs::exists(flags.config_path)) {
    throw ConfigError("config file not found: " + flags.config_path);
  }
  ExperimentSpec spec = load_experiment_spec(flags.config_path);
  if (flags.k > 0) spec.k = flags.k;
  if (flags.sigma >= 0.0) spec.sigma = flags.sigma;
  if (flags.seed_set) spec.master_seed = flags.seed;
  if (!flags.policy.empty()) {
    if (flags.policy == "scattered") spec.mask_policy = MaskPolicy::Scattered;
    else if (flags.policy == "unrestricted") spec.mask_policy = MaskPolicy::Unrestricted;
    else throw ConfigError("--policy must be scattered or unrestricted");
  }
  if (!flags.method.empty()) {
    const auto id = parse_method(flags.method);
    if (!id) throw ConfigError("unknown method '" + flags.method + "'");
    spec.methods = {*id};
  }
  spec.validate();
  if (spec.k > 10) {
    std::cerr << "warning: k=" << spec.k
              << " exceeds 10; the per-point solve cost grows cubically in k\n";
  }
  return spec;
}

fs::path ensure_out_dir(const std::string& out) {
  if (out.empty()) throw ConfigError("--out is required");
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const CommonFlags& flags) {
  const ExperimentSpec spec = load_spec_with_overrides(flags);
  const fs::path dir = ensure_out_dir(flags.out);

  std::printf("# corpus manifest: master_seed=%llu\n",
              static_cast<unsigned long long>(spec.master_seed));
  for (std::size_t li = 0; li < spec.curve_lengths.size(); ++li) {
    const int length = spec.curve_lengths[li];
    for (int ci = 0; ci < spec.curves_per_length; ++ci) {
      const auto cseed =
          curve_seed_for(spec.master_seed, li, static_cast<std::size_t>(ci));
      const BezierSpec bspec =
          random_bezier_spec(spec.bezier_order_min, spec.bezier_order_max,
                             spec.box_width, spec.box_height, length, cseed);
      const Trajectory clean = sample_bezier(bspec);
      std::printf("curve length=%d index=%d order=%d seed=%llu\n", length, ci,
                  bspec.order, static_cast<unsigned long long>(cseed));
      for (int run = 0; run < spec.runs; ++run) {
        const auto nseed = noise_seed_for(cseed, run);
        const Trajectory noisy = add_noise(clean, {spec.noise_sigma, nseed});
        char name[128];
        std::snprintf(name, sizeof(name), "traj_L%d_c%02d_r%d.csv", length, ci,
                      run);
        write_trajectory_csv(noisy, dir / name);
        for (std::size_t ri = 0; ri < spec.loss_ratios.size(); ++ri) {
          MaskSpec mspec;
          mspec.ratio = spec.loss_ratios[ri];
          mspec.seed = mask_seed_for(cseed, run, ri);
          mspec.protect_prefix = spec.resolved_protect();
          mspec.policy = spec.mask_policy;
          bool fell_back = false;
          const MissingMask mask = make_mask(noisy, mspec, &fell_back);
          if (fell_back) {
            std::fprintf(stderr,
                         "warning: scattered mask infeasible at ratio %g for "
                         "length %d; fell back to unrestricted\n",
                         mspec.ratio, length);
          }
          std::snprintf(name, sizeof(name), "mask_L%d_c%02d_r%d_p%02d.csv",
                        length, ci, run,
                        static_cast<int>(std::lround(mspec.ratio * 100)));
          write_mask_csv(mask, dir / name);
        }
      }
    }
  }
  return 0;
}

// ------------------------------------------------------------- interpolate

int cmd_interpolate(const std::string& traj_path, const std::string& mask_path,
                    const CommonFlags& flags) {
  if (flags.method.empty()) throw ConfigError("--method is required");
  const auto method = parse_method(flags.method);
  if (!method) throw ConfigError("unknown method '" + flags.method + "'");
  if (flags.out.empty()) throw ConfigError("--out is required");

  const Trajectory traj = load_trajectory_csv(traj_path);
  const MissingMask mask = load_mask_csv(mask_path);
  for (const auto t : mask.indices()) {
    if (t < traj.points.front().t || t > traj.points.back().t) {
      throw ValidationError("mask index " + std::to_string(t) +
                            " outside trajectory range");
    }
  }

  DispatchConfig cfg;
  if (flags.k > 0) cfg.k = flags.k;
  if (flags.sigma >= 0.0) cfg.sigma = flags.sigma;
  if (cfg.k > 10) {
    std::cerr << "warning: k=" << cfg.k
              << " exceeds 10; the per-point solve cost grows cubically in k\n";
  }

  KnotSeries kx, ky;
  std::vector<std::int64_t> query_ts;
  const auto n = traj.size();
  const auto n_obs = n - mask.size();
  kx.times.resize(static_cast<Eigen::Index>(n_obs));
  kx.values.resize(static_cast<Eigen::Index>(n_obs));
  ky.times.resize(static_cast<Eigen::Index>(n_obs));
  ky.values.resize(static_cast<Eigen::Index>(n_obs));
  Eigen::Index w = 0;
  for (const auto& p : traj.points) {
    if (mask.contains(p.t)) {
      query_ts.push_back(p.t);
      continue;
    }
    kx.times(w) = static_cast<double>(p.t);
    kx.values(w) = p.x;
    ky.times(w) = static_cast<double>(p.t);
    ky.values(w) = p.y;
    ++w;
  }
  Eigen::VectorXd queries(static_cast<Eigen::Index>(query_ts.size()));
  for (std::size_t i = 0; i < query_ts.size(); ++i) {
    queries(static_cast<Eigen::Index>(i)) = static_cast<double>(query_ts[i]);
  }

  const Eigen::VectorXd est_x = interpolate_with(*method, kx, queries, cfg);
  const Eigen::VectorXd est_y = interpolate_with(*method, ky, queries, cfg);
  for (Eigen::Index i = 0; i < queries.size(); ++i) {
    if (!std::isfinite(est_x(i)) || !std::isfinite(est_y(i))) {
      std::cerr << "error: " << method_name(*method)
                << " cannot serve the lost point at t="
                << query_ts[static_cast<std::size_t>(i)]
                << (*method == MethodId::Lli
                        ? " (not enough known neighbors)"
                        : " (baselines cannot extrapolate beyond the last "
                          "knot)")
                << '\n';
      return 1;
    }
  }

  std::ofstream out(flags.out, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + flags.out);
  out << "t,x,y,source\n";
  std::size_t qi = 0;
  for (const auto& p : traj.points) {
    if (mask.contains(p.t)) {
      out << p.t << ',' << format_double(est_x(static_cast<Eigen::Index>(qi)))
          << ',' << format_double(est_y(static_cast<Eigen::Index>(qi)))
          << ",interpolated\n";
      ++qi;
    } else {
      out << p.t << ',' << format_double(p.x) << ',' << format_double(p.y)
          << ",observed\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------ bench

struct MethodRatioAgg {
  double err_sum = 0.0;
  std::size_t points = 0;
  int cells = 0;
  int failed = 0;
};

void print_summary(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string, double>, MethodRatioAgg> agg;
  for (const auto& r : records) {
    auto& a = agg[{method_name(r.method), r.loss_ratio}];
    ++a.cells;
    if (!r.ok) {
      ++a.failed;
      continue;
    }
    a.err_sum += r.mean_err * static_cast<double>(r.scored_points);
    a.points += r.scored_points;
  }
  std::printf("%-9s %-6s %-12s %-7s %-6s\n", "method", "ratio", "mean_err_cm",
              "cells", "failed");
  for (const auto& [key, a] : agg) {
    const double mean =
        a.points > 0 ? a.err_sum / static_cast<double>(a.points) : NAN;
    std::printf("%-9s %-6g %-12.4f %-7d %-6d\n", key.first.c_str(), key.second,
                mean, a.cells, a.failed);
  }
}

int cmd_bench(const CommonFlags& flags) {
  const ExperimentSpec spec = load_spec_with_overrides(flags);
  const fs::path dir = ensure_out_dir(flags.out);
  if (!flags.timing_serial) {
    std::cerr << "note: timing always runs serially; --timing-serial=false "
                 "has no effect\n";
  }

  const auto records = run_accuracy_sweep(spec);
  write_metrics_csv(records, dir / "metrics.csv");
  write_cdf_csv(records, spec.methods, dir / "cdf.csv");
  const auto fallbacks =
      std::count_if(records.begin(), records.end(),
                    [](const BenchRecord& r) { return r.mask_fallback; });
  if (fallbacks > 0) {
    std::cerr << "warning: scattered mask infeasible in "
              << fallbacks << " cell(s); those ran with unrestricted masks\n";
  }
  const auto timing = run_timing(spec);
  write_timing_csv(timing, dir / "timing.csv");

  print_summary(records);
  std::printf("\n%-9s %-4s %-10s %-12s\n", "method", "k", "n_interp",
              "median_ms");
  for (const auto& t : timing) {
    std::printf("%-9s %-4d %-10d %-12.3f\n", method_name(t.method).c_str(),
                t.k, t.n_points, t.wall_time_ms);
  }

  const bool all_failed =
      std::all_of(records.begin(), records.end(),
                  [](const BenchRecord& r) { return !r.ok; });
  return all_failed ? 1 : 0;
}

// ----------------------------------------------------------------- ablate

int cmd_ablate(const CommonFlags& flags) {
  const ExperimentSpec spec = load_spec_with_overrides(flags);
  const fs::path dir = ensure_out_dir(flags.out);

  const auto groups = run_k_ablation(spec, spec.ablation_k_values);
  std::printf("%-4s %-9s %-12s %-7s\n", "k", "method", "mean_err_cm", "failed");
  bool any_ok = false;
  for (const auto& [kk, records] : groups) {
    write_metrics_csv(records, dir / ("metrics_k" + std::to_string(kk) + ".csv"));
    for (const MethodId m : spec.methods) {
      double err_sum = 0.0;
      std::size_t points = 0;
      int failed = 0;
      for (const auto& r : records) {
        if (r.method != m) continue;
        if (!r.ok) {
          ++failed;
          continue;
        }
        any_ok = true;
        err_sum += r.mean_err * static_cast<double>(r.scored_points);
        points += r.scored_points;
      }
      std::printf("%-4d %-9s %-12.4f %-7d\n", kk, method_name(m).c_str(),
                  points > 0 ? err_sum / static_cast<double>(points) : NAN,
                  failed);
    }
  }
  return any_ok ? 0 : 1;
}

// -------------------------------------------------------------------- cdf

int cmd_cdf(const CommonFlags& flags) {
  const ExperimentSpec spec = load_spec_with_overrides(flags);
  const fs::path dir = ensure_out_dir(flags.out);

  const auto records = run_accuracy_sweep(spec);
  write_cdf_csv(records, spec.methods, dir / "cdf.csv");

  const double levels[] = {0.5, 0.6, 0.7, 0.8, 0.9};
  std::printf("%-9s", "method");
  for (const double q : levels) {
    std::printf(" %6.0f%%", q * 100.0);
  }
  std::printf("\n");
  for (const MethodId m : spec.methods) {
    std::vector<double> pooled;
    for (const auto& r : records) {
      if (r.method != m || !r.ok) continue;
      pooled.insert(pooled.end(), r.pooled_errors.begin(),
                    r.pooled_errors.end());
    }
    if (pooled.empty()) continue;
    const CdfCurve curve = empirical_cdf(Eigen::Map<const Eigen::VectorXd>(
        pooled.data(), static_cast<Eigen::Index>(pooled.size())));
    std::printf("%-9s", method_name(m).c_str());
    for (const double q : levels) {
      std::printf(" %7.2f", cdf_quantile(curve, q));
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory interpolation toolkit: local-linear manifold "
               "interpolation, classical baselines, and a benchmark harness"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string traj_path, mask_path;

  auto* gen = app.add_subcommand("generate",
                                 "write corpus trajectory and mask CSVs");
  gen->add_option("--config", flags.config_path, "experiment JSON")->required();
  gen->add_option("--out", flags.out, "output directory")->required();
  add_override_flags(gen, flags);

  auto* interp = app.add_subcommand(
      "interpolate", "fill the masked points of one trajectory CSV");
  interp->add_option("traj", traj_path, "trajectory CSV")->required();
  interp->add_option("mask", mask_path, "mask CSV")->required();
  interp->add_option("--out", flags.out, "output CSV path")->required();
  add_override_flags(interp, flags);

  auto* bench = app.add_subcommand("bench",
                                   "accuracy sweep + timing on a corpus");
  bench->add_option("--config", flags.config_path, "experiment JSON")->required();
  bench->add_option("--out", flags.out, "output directory")->required();
  bench->add_flag("--timing-serial,!--no-timing-serial", flags.timing_serial,
                  "pin timing to serial execution (default: on)");
  add_override_flags(bench, flags);

  auto* ablate = app.add_subcommand("ablate", "accuracy sweep across k values");
  ablate->add_option("--config", flags.config_path, "experiment JSON")->required();
  ablate->add_option("--out", flags.out, "output directory")->required();
  add_override_flags(ablate, flags);

  auto* cdf = app.add_subcommand("cdf", "error CDF curves and quantile table");
  cdf->add_option("--config", flags.config_path, "experiment JSON")->required();
  cdf->add_option("--out", flags.out, "output directory")->required();
  add_override_flags(cdf, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(flags);
    if (interp->parsed()) return cmd_interpolate(traj_path, mask_path, flags);
    if (bench->parsed()) return cmd_bench(flags);
    if (ablate->parsed()) return cmd_ablate(flags);
    if (cdf->parsed()) return cmd_cdf(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
