#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>

namespace minterp::lli {

// Adaptive reconstruction coefficients for one axis; always sums to one.
using WeightVector = Eigen::VectorXd;

struct LliConfig {
  int k = 5;            // reference points per fit, 2..32 (above 10 the
                        // per-point solve cost climbs steeply)
  double sigma = 1e-3;  // trace-regularization strength, >= 0

  void validate() const;
};

// One scalar axis fit: reconstruct `target` as an affine combination of
// `values` (the k reference coordinates).
struct Window {
  Eigen::VectorXd values;
  double target = 0.0;
};

// Known samples around a single lost point on one axis. `before` ends at
// p_{t-1}, `after` starts at p_{t+1}; both ordered by time.
struct Neighborhood {
  Eigen::VectorXd before;
  Eigen::VectorXd after;
  std::int64_t gap_index = 0;
};

// Solves  min_W ||target - values . W||^2  s.t.  sum(W) = 1,  with the Gram
// matrix C = X X^T (X_j = target - values_j) regularized to
// C + sigma*trace(C)*I before the SPD solve C u = 1, W = u / sum(u).
// An all-zero difference vector (constant window hitting its own level)
// has no preferred direction; the uniform vector 1/k is returned.
WeightVector solve_weights(const Window& window, const LliConfig& config);

// sum_j weights_j * refs_j
double reconstruct(const Eigen::Ref<const Eigen::VectorXd>& refs,
                   const WeightVector& weights);

// One-step-ahead estimate from the last k+1 known samples of an axis:
// fits W on (tail[0..k-1] -> tail[k]) and slides the window forward one
// sample, evaluating on tail[1..k].
double extrapolate_next(const Eigen::Ref<const Eigen::VectorXd>& tail,
                        const LliConfig& config);

// Axes are treated independently; this is just the per-axis call twice.
std::pair<double, double> interpolate_point_2d(
    const Eigen::Ref<const Eigen::VectorXd>& history_x,
    const Eigen::Ref<const Eigen::VectorXd>& history_y,
    const LliConfig& config);

// Gap filling with known samples on both sides. Fit stage reconstructs
// p_{t-1} from the floor(k/2)+1 samples preceding it plus the first
// k-1-floor(k/2) samples after the gap; the apply stage advances every
// reference by one known sample, so the weight/offset pairing is preserved
// and affine trajectories are reproduced exactly. Requires
// len(before) >= floor(k/2)+2 and len(after) >= k-floor(k/2).
double interpolate_in_range(const Neighborhood& nbhd, const LliConfig& config);

}  // namespace minterp::lli
