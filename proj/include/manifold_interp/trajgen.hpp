#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "manifold_interp/trajectory.hpp"

namespace minterp {

struct BezierSpec {
  int order = 5;  // degree; order+1 control points
  std::vector<Eigen::Vector2d> control_points;
  int n_samples = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoiseSpec {
  double sigma_noise = 2.0;  // cm
  std::uint64_t seed = 0;
};

enum class MaskPolicy { Scattered, Unrestricted };

struct MaskSpec {
  double ratio = 0.1;                // fraction of samples hidden
  std::uint64_t seed = 0;
  std::int64_t protect_prefix = 6;   // first samples never masked
  MaskPolicy policy = MaskPolicy::Scattered;
};

// de Casteljau evaluation at parameter u in [0, 1]
Eigen::Vector2d bezier_point(const std::vector<Eigen::Vector2d>& control,
                             double u);

// n_samples points at uniform parameters over [0, 1], t = 0..n-1
Trajectory sample_bezier(const BezierSpec& spec);

BezierSpec random_bezier_spec(int order_min, int order_max, double box_width,
                              double box_height, int n_samples,
                              std::uint64_t seed);

// i.i.d. N(0, sigma^2) added to x and y independently (x drawn first)
Trajectory add_noise(const Trajectory& traj, const NoiseSpec& spec);

// floor(ratio*N) indices uniform without replacement from [protect_prefix, N).
// Scattered policy samples uniformly over the adjacency-free subsets; when
// the count exceeds what non-adjacency admits it falls back to unrestricted
// and reports it through used_fallback.
MissingMask make_mask(const Trajectory& traj, const MaskSpec& spec,
                      bool* used_fallback = nullptr);

}  // namespace minterp
