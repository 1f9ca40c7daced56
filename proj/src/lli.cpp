#include "manifold_interp/lli.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "manifold_interp/errors.hpp"

namespace minterp::lli {

namespace {

bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.allFinite();
}

// C = X X^T + sigma*tr*I is rank one plus a ridge, so C^{-1} 1 has the exact
// Sherman-Morrison form; after normalization the ridge scale cancels:
//   W = normalize(1 - X (X.1) / ((1 + sigma) X.X)).
// This is the same solution the factorization produces, computed without the
// 1/sigma blow-up, and it remains correct down to sigma = 0 (the plain LLE
// limit). Used when sigma is too small for the factored solve to carry any
// information past roundoff.
Eigen::VectorXd rank_one_weights(const Eigen::VectorXd& x, double sigma) {
  const auto k = x.size();
  const double xtx = x.squaredNorm();
  Eigen::VectorXd u =
      Eigen::VectorXd::Ones(k) - x * (x.sum() / ((1.0 + sigma) * xtx));
  const double s = u.sum();
  // s vanishes only for X parallel to 1 at sigma = 0, where every feasible W
  // scores the same objective; fall back to uniform.
  if (!(std::abs(s) > 1e-12 * std::sqrt(static_cast<double>(k)) * u.norm()) ||
      !u.allFinite()) {
    return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  }
  return u / s;
}

// Below this the ridge sits under the roundoff floor of the Gram entries and
// Cholesky cannot resolve it.
constexpr double kFactoredSigmaFloor = 1e-8;

}  // namespace

void LliConfig::validate() const {
  if (k < 2 || k > 32) {
    throw ValidationError("window size k must be in [2, 32], got " +
                          std::to_string(k));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("regularization sigma must be finite and >= 0");
  }
}

WeightVector solve_weights(const Window& window, const LliConfig& config) {
  config.validate();
  const auto k = window.values.size();
  if (k != config.k) {
    throw LengthMismatch("window holds " + std::to_string(k) +
                         " values, config expects k = " +
                         std::to_string(config.k));
  }
  if (!all_finite(window.values) || !std::isfinite(window.target)) {
    throw NonFiniteInput("solve_weights: non-finite window entry");
  }

  const Eigen::VectorXd x =
      Eigen::VectorXd::Constant(k, window.target) - window.values;
  const double trace = x.squaredNorm();  // trace(X X^T) = X.X
  if (trace == 0.0) {
    return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  }
  if (config.sigma < kFactoredSigmaFloor) {
    return rank_one_weights(x, config.sigma);
  }

  Eigen::MatrixXd gram = x * x.transpose();
  gram.diagonal().array() += config.sigma * trace;
  // SPD by construction (eigenvalues sigma*tr and sigma*tr + X.X); one
  // refinement step tightens the solve for small sigma.
  const auto llt = gram.llt();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd u = llt.solve(ones);
  u += llt.solve(ones - gram * u);
  return u / u.sum();
}

double reconstruct(const Eigen::Ref<const Eigen::VectorXd>& refs,
                   const WeightVector& weights) {
  if (refs.size() != weights.size()) {
    throw LengthMismatch("reconstruct: " + std::to_string(refs.size()) +
                         " refs vs " + std::to_string(weights.size()) +
                         " weights");
  }
  if (!all_finite(refs)) {
    throw NonFiniteInput("reconstruct: non-finite reference");
  }
  return refs.dot(weights);
}

double extrapolate_next(const Eigen::Ref<const Eigen::VectorXd>& tail,
                        const LliConfig& config) {
  config.validate();
  if (tail.size() < config.k + 1) {
    throw InsufficientHistory("extrapolate_next needs k+1 = " +
                              std::to_string(config.k + 1) +
                              " trailing samples, got " +
                              std::to_string(tail.size()));
  }
  const auto k = config.k;
  const auto n = tail.size();
  Window window{tail.segment(n - k - 1, k), tail(n - 1)};
  const WeightVector w = solve_weights(window, config);
  return reconstruct(tail.tail(k), w);
}

std::pair<double, double> interpolate_point_2d(
    const Eigen::Ref<const Eigen::VectorXd>& history_x,
    const Eigen::Ref<const Eigen::VectorXd>& history_y,
    const LliConfig& config) {
  return {extrapolate_next(history_x, config),
          extrapolate_next(history_y, config)};
}

double interpolate_in_range(const Neighborhood& nbhd, const LliConfig& config) {
  config.validate();
  const int k = config.k;
  const int h = k / 2;
  const int n_after = k - 1 - h;  // fit references past the gap
  const auto m = nbhd.before.size();
  if (m < h + 2 || nbhd.after.size() < n_after + 1) {
    throw InsufficientHistory(
        "interpolate_in_range at t=" + std::to_string(nbhd.gap_index) +
        ": need " + std::to_string(h + 2) + " samples before and " +
        std::to_string(n_after + 1) + " after, got " + std::to_string(m) +
        "/" + std::to_string(nbhd.after.size()));
  }

  Eigen::VectorXd fit_refs(k);
  fit_refs.head(h + 1) = nbhd.before.segment(m - h - 2, h + 1);
  fit_refs.tail(n_after) = nbhd.after.head(n_after);
  const Window window{fit_refs, nbhd.before(m - 1)};
  const WeightVector w = solve_weights(window, config);

  Eigen::VectorXd apply_refs(k);
  apply_refs.head(h + 1) = nbhd.before.tail(h + 1);
  apply_refs.tail(n_after) = nbhd.after.segment(1, n_after);
  return reconstruct(apply_refs, w);
}

}  // namespace minterp::lli
