#include "manifold_interp/trajgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manifold_interp/errors.hpp"
#include "manifold_interp/rng.hpp"

namespace minterp {

void BezierSpec::validate() const {
  if (order < 1) {
    throw ValidationError("bezier order must be >= 1");
  }
  if (control_points.size() != static_cast<std::size_t>(order) + 1) {
    throw ValidationError("bezier of order " + std::to_string(order) +
                          " needs " + std::to_string(order + 1) +
                          " control points, got " +
                          std::to_string(control_points.size()));
  }
  if (n_samples < 2) {
    throw ValidationError("n_samples must be >= 2");
  }
  for (const auto& p : control_points) {
    if (!p.allFinite()) throw ValidationError("non-finite control point");
  }
}

Eigen::Vector2d bezier_point(const std::vector<Eigen::Vector2d>& control,
                             double u) {
  std::vector<Eigen::Vector2d> work(control);
  for (std::size_t level = work.size() - 1; level > 0; --level) {
    for (std::size_t i = 0; i < level; ++i) {
      work[i] = (1.0 - u) * work[i] + u * work[i + 1];
    }
  }
  return work[0];
}

Trajectory sample_bezier(const BezierSpec& spec) {
  spec.validate();
  Trajectory traj;
  traj.provenance = Provenance::Generated;
  traj.points.reserve(static_cast<std::size_t>(spec.n_samples));
  for (int i = 0; i < spec.n_samples; ++i) {
    const double u =
        static_cast<double>(i) / static_cast<double>(spec.n_samples - 1);
    const Eigen::Vector2d p = bezier_point(spec.control_points, u);
    traj.points.push_back({i, p.x(), p.y()});
  }
  return traj;
}

BezierSpec random_bezier_spec(int order_min, int order_max, double box_width,
                              double box_height, int n_samples,
                              std::uint64_t seed) {
  if (order_min < 1 || order_max < order_min) {
    throw ValidationError("invalid bezier order range");
  }
  if (!(box_width > 0.0) || !(box_height > 0.0)) {
    throw ValidationError("control-point box must have positive extent");
  }
  Rng rng(seed);
  BezierSpec spec;
  spec.seed = seed;
  spec.n_samples = n_samples;
  spec.order = static_cast<int>(rng.uniform_int(order_min, order_max));
  spec.control_points.reserve(static_cast<std::size_t>(spec.order) + 1);
  for (int i = 0; i <= spec.order; ++i) {
    const double x = rng.uniform(0.0, box_width);
    const double y = rng.uniform(0.0, box_height);
    spec.control_points.emplace_back(x, y);
  }
  return spec;
}

Trajectory add_noise(const Trajectory& traj, const NoiseSpec& spec) {
  if (!(spec.sigma_noise >= 0.0)) {
    throw ValidationError("sigma_noise must be >= 0");
  }
  Trajectory noisy = traj;
  if (spec.sigma_noise == 0.0) return noisy;
  Rng rng(spec.seed);
  for (auto& p : noisy.points) {
    p.x += spec.sigma_noise * rng.gaussian();
    p.y += spec.sigma_noise * rng.gaussian();
  }
  return noisy;
}

namespace {

// Uniform m-subset of {0..count-1} via partial Fisher-Yates.
std::vector<std::int64_t> sample_without_replacement(std::int64_t count,
                                                     std::int64_t m, Rng& rng) {
  std::vector<std::int64_t> pool(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = 0; i < m; ++i) {
    const auto j = rng.uniform_int(i, count - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

}  // namespace

MissingMask make_mask(const Trajectory& traj, const MaskSpec& spec,
                      bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  if (!(spec.ratio > 0.0) || !(spec.ratio < 1.0)) {
    throw ValidationError("mask ratio must be in (0, 1)");
  }
  if (spec.protect_prefix < 0) {
    throw ValidationError("protect_prefix must be >= 0");
  }
  const auto n = static_cast<std::int64_t>(traj.size());
  const auto m = static_cast<std::int64_t>(
      std::floor(spec.ratio * static_cast<double>(n)));
  if (m < 1) {
    throw ValidationError("ratio*N < 1: nothing to mask");
  }
  const std::int64_t t0 = traj.points.front().t;
  const std::int64_t first_candidate = spec.protect_prefix;
  const std::int64_t available = n - first_candidate;
  if (available < m) {
    throw ValidationError("protect_prefix leaves too few maskable samples");
  }

  Rng rng(spec.seed);
  std::vector<std::int64_t> picked;

  bool scattered = spec.policy == MaskPolicy::Scattered;
  // m non-adjacent picks out of `available` slots exist iff m <= (available+1)/2
  if (scattered && m > (available + 1) / 2) {
    scattered = false;
    if (used_fallback) *used_fallback = true;
  }

  if (scattered) {
    // stars-and-bars bijection: an m-subset of available-m+1 slots maps to a
    // non-adjacent m-subset by adding its rank to each sorted element; the
    // image is uniform over all adjacency-free masks
    picked = sample_without_replacement(available - m + 1, m, rng);
    std::sort(picked.begin(), picked.end());
    for (std::int64_t i = 0; i < m; ++i) {
      picked[static_cast<std::size_t>(i)] += i;
    }
  } else {
    picked = sample_without_replacement(available, m, rng);
  }

  for (auto& idx : picked) idx += t0 + first_candidate;
  return MissingMask(std::move(picked));
}

}  // namespace minterp
