#include "manifold_interp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "manifold_interp/errors.hpp"
#include "manifold_interp/metrics.hpp"
#include "manifold_interp/rng.hpp"

namespace minterp {

namespace {

constexpr std::uint64_t kTagCurve = 1;
constexpr std::uint64_t kTagNoise = 2;
constexpr std::uint64_t kTagMask = 3;

}  // namespace

std::uint64_t curve_seed_for(std::uint64_t master_seed, std::size_t length_idx,
                             std::size_t curve_idx) {
  return derive_seed(derive_seed(derive_seed(master_seed, kTagCurve),
                                 length_idx),
                     curve_idx);
}

std::uint64_t noise_seed_for(std::uint64_t curve_seed, int run) {
  return derive_seed(derive_seed(curve_seed, kTagNoise),
                     static_cast<std::uint64_t>(run));
}

std::uint64_t mask_seed_for(std::uint64_t curve_seed, int run,
                            std::size_t ratio_idx) {
  return derive_seed(
      derive_seed(derive_seed(curve_seed, kTagMask),
                  static_cast<std::uint64_t>(run)),
      ratio_idx);
}

void ExperimentSpec::validate() const {
  if (curve_lengths.empty() || loss_ratios.empty() || methods.empty()) {
    throw ConfigError("curve_lengths, loss_ratios and methods must be non-empty");
  }
  for (const int n : curve_lengths) {
    if (n < 100) throw ConfigError("curve lengths must be >= 100");
  }
  for (const double r : loss_ratios) {
    if (!(r > 0.0) || !(r < 1.0)) {
      throw ConfigError("loss ratios must lie in (0, 1)");
    }
  }
  if (curves_per_length < 1) throw ConfigError("curves_per_length must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (k < 2 || k > 32) throw ConfigError("k must be in [2, 32]");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (bezier_order_min < 1 || bezier_order_max < bezier_order_min) {
    throw ConfigError("invalid bezier order range");
  }
  for (const int kk : ablation_k_values) {
    if (kk < 2 || kk > 32) throw ConfigError("ablation k values must be in [2, 32]");
  }
}

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) {
    throw ConfigError("cannot open config file " + json_path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + json_path.string() + " is not valid JSON: " +
                      e.what());
  }
  ExperimentSpec spec;
  read_field(j, "curve_lengths", spec.curve_lengths);
  read_field(j, "curves_per_length", spec.curves_per_length);
  read_field(j, "loss_ratios", spec.loss_ratios);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read_field(j, "methods", names);
    spec.methods.clear();
    for (const auto& name : names) {
      const auto id = parse_method(name);
      if (!id) {
        throw ConfigError("unknown method '" + name +
                          "' (expected one of lli, linear, spline, makima, "
                          "pchip, rbf, kriging)");
      }
      spec.methods.push_back(*id);
    }
  }
  read_field(j, "k", spec.k);
  read_field(j, "sigma", spec.sigma);
  read_field(j, "noise_sigma", spec.noise_sigma);
  read_field(j, "runs", spec.runs);
  read_field(j, "master_seed", spec.master_seed);
  read_field(j, "repetitions", spec.repetitions);
  if (j.contains("mask_policy")) {
    std::string policy;
    read_field(j, "mask_policy", policy);
    if (policy == "scattered") spec.mask_policy = MaskPolicy::Scattered;
    else if (policy == "unrestricted") spec.mask_policy = MaskPolicy::Unrestricted;
    else throw ConfigError("mask_policy must be 'scattered' or 'unrestricted'");
  }
  read_field(j, "protect_prefix", spec.protect_prefix);
  read_field(j, "bezier_order_min", spec.bezier_order_min);
  read_field(j, "bezier_order_max", spec.bezier_order_max);
  read_field(j, "box_width", spec.box_width);
  read_field(j, "box_height", spec.box_height);
  read_field(j, "global_baselines", spec.global_baselines);
  read_field(j, "timing_k_values", spec.timing_k_values);
  read_field(j, "ablation_k_values", spec.ablation_k_values);
  spec.validate();
  return spec;
}

unsigned harness_thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MANIFOLD_INTERP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<unsigned>(v);
  }
  return cap;
}

namespace {

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned tid = 0; tid < threads; ++tid) {
    pool.emplace_back([&, tid] {
      for (std::size_t i = tid; i < count; i += threads) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct Cell {
  std::size_t length_idx;
  std::size_t curve_idx;
  std::size_t ratio_idx;
  MethodId method;
};

struct CaseData {
  Trajectory noisy;
  MissingMask mask;
  KnotSeries knots_x;
  KnotSeries knots_y;
  Eigen::VectorXd queries;            // interior masked indices, ascending
  std::vector<std::int64_t> query_ts;
  bool mask_fallback = false;
};

// One run's interpolation task for a curve: observed knots per axis plus the
// interior masked indices (leading gaps cannot occur thanks to the protected
// prefix; trailing gaps are excluded from scoring for every method).
CaseData build_case(const ExperimentSpec& spec, const Trajectory& clean,
                    std::uint64_t curve_seed, int run, std::size_t ratio_idx) {
  CaseData data;
  data.noisy = add_noise(clean, {spec.noise_sigma, noise_seed_for(curve_seed, run)});
  MaskSpec mspec;
  mspec.ratio = spec.loss_ratios[ratio_idx];
  mspec.seed = mask_seed_for(curve_seed, run, ratio_idx);
  mspec.protect_prefix = spec.resolved_protect();
  mspec.policy = spec.mask_policy;
  bool fell_back = false;
  data.mask = make_mask(data.noisy, mspec, &fell_back);
  data.mask_fallback = fell_back;

  const auto n = data.noisy.size();
  const auto n_obs = n - data.mask.size();
  data.knots_x.times.resize(static_cast<Eigen::Index>(n_obs));
  data.knots_x.values.resize(static_cast<Eigen::Index>(n_obs));
  data.knots_y.times.resize(static_cast<Eigen::Index>(n_obs));
  data.knots_y.values.resize(static_cast<Eigen::Index>(n_obs));
  Eigen::Index w = 0;
  std::int64_t last_observed = 0;
  for (const auto& p : data.noisy.points) {
    if (data.mask.contains(p.t)) continue;
    data.knots_x.times(w) = static_cast<double>(p.t);
    data.knots_x.values(w) = p.x;
    data.knots_y.times(w) = static_cast<double>(p.t);
    data.knots_y.values(w) = p.y;
    last_observed = p.t;
    ++w;
  }

  for (const auto t : data.mask.indices()) {
    if (t < last_observed) data.query_ts.push_back(t);
  }
  data.queries.resize(static_cast<Eigen::Index>(data.query_ts.size()));
  for (std::size_t i = 0; i < data.query_ts.size(); ++i) {
    data.queries(static_cast<Eigen::Index>(i)) =
        static_cast<double>(data.query_ts[i]);
  }
  return data;
}

struct ScoredRun {
  double run_mean = 0.0;
  std::vector<double> errors;      // euclidean, scored points only
  std::vector<double> x_errors;
  std::size_t skipped = 0;
};

ScoredRun score_case(const CaseData& data, const Eigen::VectorXd& est_x,
                     const Eigen::VectorXd& est_y) {
  ScoredRun scored;
  std::vector<TrajectoryPoint> truth, estimate;
  for (std::size_t i = 0; i < data.query_ts.size(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    if (!std::isfinite(est_x(ei)) || !std::isfinite(est_y(ei))) {
      ++scored.skipped;
      continue;
    }
    const auto t = data.query_ts[i];
    const auto& p =
        data.noisy.points[static_cast<std::size_t>(t - data.noisy.points.front().t)];
    truth.push_back(p);
    estimate.push_back({t, est_x(ei), est_y(ei)});
  }
  const ErrorReport report = compute_errors(truth, estimate);
  scored.run_mean = report.mean_euclidean;
  scored.errors.reserve(report.per_point.size());
  for (const auto& e : report.per_point) {
    scored.errors.push_back(e.euclidean);
    scored.x_errors.push_back(e.x_error);
  }
  return scored;
}

BenchRecord evaluate_cell(const ExperimentSpec& spec, const Cell& cell) {
  BenchRecord rec;
  rec.method = cell.method;
  rec.loss_ratio = spec.loss_ratios[cell.ratio_idx];
  rec.k = spec.k;
  rec.n_points = spec.curve_lengths[cell.length_idx];
  rec.curve_seed =
      curve_seed_for(spec.master_seed, cell.length_idx, cell.curve_idx);
  try {
    const BezierSpec bspec = random_bezier_spec(
        spec.bezier_order_min, spec.bezier_order_max, spec.box_width,
        spec.box_height, rec.n_points, rec.curve_seed);
    const Trajectory clean = sample_bezier(bspec);

    DispatchConfig cfg;
    cfg.k = spec.k;
    cfg.sigma = spec.sigma;
    cfg.global_baselines = spec.global_baselines;

    Eigen::VectorXd run_means(spec.runs);
    for (int run = 0; run < spec.runs; ++run) {
      const CaseData data =
          build_case(spec, clean, rec.curve_seed, run, cell.ratio_idx);
      const Eigen::VectorXd est_x =
          interpolate_with(cell.method, data.knots_x, data.queries, cfg);
      const Eigen::VectorXd est_y =
          interpolate_with(cell.method, data.knots_y, data.queries, cfg);
      const ScoredRun scored = score_case(data, est_x, est_y);
      run_means(run) = scored.run_mean;
      rec.mask_fallback = rec.mask_fallback || data.mask_fallback;
      rec.skipped_points += scored.skipped;
      rec.pooled_errors.insert(rec.pooled_errors.end(), scored.errors.begin(),
                               scored.errors.end());
      for (const double xe : scored.x_errors) rec.mean_x_err += xe;
    }

    rec.scored_points = rec.pooled_errors.size();
    if (rec.scored_points > 0) {
      const auto n = static_cast<double>(rec.scored_points);
      double sum = 0.0, sum_sq = 0.0;
      for (const double e : rec.pooled_errors) {
        sum += e;
        sum_sq += e * e;
      }
      rec.mean_err = sum / n;
      rec.mse = sum_sq / n;
      rec.mean_x_err /= n;
    }
    rec.std_across =
        spec.runs >= 2 ? std_across_runs(run_means) : 0.0;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.mean_err = rec.mse = rec.mean_x_err = rec.std_across =
        std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_accuracy_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<Cell> cells;
  for (std::size_t li = 0; li < spec.curve_lengths.size(); ++li) {
    for (int ci = 0; ci < spec.curves_per_length; ++ci) {
      for (std::size_t ri = 0; ri < spec.loss_ratios.size(); ++ri) {
        for (const MethodId m : spec.methods) {
          cells.push_back({li, static_cast<std::size_t>(ci), ri, m});
        }
      }
    }
  }
  std::vector<BenchRecord> records(cells.size());
  parallel_for(cells.size(), harness_thread_cap(), [&](std::size_t i) {
    records[i] = evaluate_cell(spec, cells[i]);
  });
  return records;
}

std::vector<BenchRecord> run_timing(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.repetitions < 3) {
    throw ConfigError("timing needs at least 3 repetitions");
  }
  std::vector<int> k_values = spec.timing_k_values;
  if (k_values.empty()) k_values.push_back(spec.k);
  const std::size_t ratio_idx = 0;

  std::vector<BenchRecord> records;
  for (const int kk : k_values) {
    ExperimentSpec kspec = spec;
    kspec.k = kk;
    kspec.protect_prefix = std::max<std::int64_t>(spec.resolved_protect(),
                                                  kk + 1);
    for (const MethodId method : kspec.methods) {
      BenchRecord rec;
      rec.method = method;
      rec.k = kk;
      rec.loss_ratio = kspec.loss_ratios[ratio_idx];

      // curve data is prepared up front; only interpolate_with is timed
      std::vector<CaseData> cases;
      for (std::size_t li = 0; li < kspec.curve_lengths.size(); ++li) {
        for (int ci = 0; ci < kspec.curves_per_length; ++ci) {
          const auto cseed = curve_seed_for(kspec.master_seed, li,
                                            static_cast<std::size_t>(ci));
          const BezierSpec bspec = random_bezier_spec(
              kspec.bezier_order_min, kspec.bezier_order_max, kspec.box_width,
              kspec.box_height, kspec.curve_lengths[li], cseed);
          cases.push_back(
              build_case(kspec, sample_bezier(bspec), cseed, 0, ratio_idx));
          if (rec.curve_seed == 0) rec.curve_seed = cseed;
        }
      }
      std::size_t total_queries = 0;
      for (const auto& c : cases) total_queries += c.query_ts.size();
      rec.n_points = static_cast<int>(total_queries);

      DispatchConfig cfg;
      cfg.k = kk;
      cfg.sigma = kspec.sigma;
      cfg.global_baselines = kspec.global_baselines;

      try {
        std::vector<double> rep_ms;
        std::vector<Eigen::VectorXd> last_x(cases.size()), last_y(cases.size());
        for (int rep = -1; rep < kspec.repetitions; ++rep) {  // rep -1: warm-up
          const auto start = std::chrono::steady_clock::now();
          for (std::size_t i = 0; i < cases.size(); ++i) {
            last_x[i] = interpolate_with(method, cases[i].knots_x,
                                         cases[i].queries, cfg);
            last_y[i] = interpolate_with(method, cases[i].knots_y,
                                         cases[i].queries, cfg);
          }
          const auto stop = std::chrono::steady_clock::now();
          if (rep >= 0) {
            rep_ms.push_back(
                std::chrono::duration<double, std::milli>(stop - start)
                    .count());
          }
        }
        std::sort(rep_ms.begin(), rep_ms.end());
        rec.wall_time_ms = rep_ms[rep_ms.size() / 2];

        for (std::size_t i = 0; i < cases.size(); ++i) {
          const ScoredRun scored = score_case(cases[i], last_x[i], last_y[i]);
          rec.skipped_points += scored.skipped;
          rec.pooled_errors.insert(rec.pooled_errors.end(),
                                   scored.errors.begin(), scored.errors.end());
        }
        rec.scored_points = rec.pooled_errors.size();
        if (rec.scored_points > 0) {
          double sum = 0.0, sum_sq = 0.0;
          for (const double e : rec.pooled_errors) {
            sum += e;
            sum_sq += e * e;
          }
          rec.mean_err = sum / static_cast<double>(rec.scored_points);
          rec.mse = sum_sq / static_cast<double>(rec.scored_points);
        }
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<std::pair<int, std::vector<BenchRecord>>> run_k_ablation(
    const ExperimentSpec& spec, const std::vector<int>& k_values) {
  spec.validate();
  std::vector<std::pair<int, std::vector<BenchRecord>>> groups;
  // protect prefix is pinned from the base spec so every k group sees the
  // exact same corpora and masks
  const auto protect = spec.resolved_protect();
  for (const int kk : k_values) {
    ExperimentSpec kspec = spec;
    kspec.k = kk;
    kspec.protect_prefix = protect;
    groups.emplace_back(kk, run_accuracy_sweep(kspec));
  }
  return groups;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write " + path.string());
  }
  return out;
}

}  // namespace

void write_metrics_csv(const std::vector<BenchRecord>& records,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "method,curve_seed,n_points,loss_ratio,mean_err,mse,mean_x_err,std\n";
  for (const auto& r : records) {
    out << method_name(r.method) << ',' << r.curve_seed << ',' << r.n_points
        << ',' << format_double(r.loss_ratio) << ',' << format_double(r.mean_err)
        << ',' << format_double(r.mse) << ',' << format_double(r.mean_x_err)
        << ',' << format_double(r.std_across) << '\n';
  }
}

void write_cdf_csv(const std::vector<BenchRecord>& records,
                   const std::vector<MethodId>& method_order,
                   const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "method,error,probability\n";
  for (const MethodId m : method_order) {
    std::vector<double> pooled;
    for (const auto& r : records) {
      if (r.method != m || !r.ok) continue;
      pooled.insert(pooled.end(), r.pooled_errors.begin(),
                    r.pooled_errors.end());
    }
    if (pooled.empty()) continue;
    const CdfCurve curve = empirical_cdf(
        Eigen::Map<const Eigen::VectorXd>(pooled.data(),
                                          static_cast<Eigen::Index>(pooled.size())));
    for (Eigen::Index i = 0; i < curve.sorted_errors.size(); ++i) {
      out << method_name(m) << ',' << format_double(curve.sorted_errors(i))
          << ',' << format_double(curve.probabilities(i)) << '\n';
    }
  }
}

void write_timing_csv(const std::vector<BenchRecord>& records,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "method,k,n_points,wall_time_ms\n";
  for (const auto& r : records) {
    out << method_name(r.method) << ',' << r.k << ',' << r.n_points << ','
        << format_double(r.wall_time_ms) << '\n';
  }
}

}  // namespace minterp
