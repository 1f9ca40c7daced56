#include "manifold_interp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manifold_interp/errors.hpp"

namespace minterp {

ErrorReport compute_errors(const std::vector<TrajectoryPoint>& truth,
                           const std::vector<TrajectoryPoint>& estimates) {
  if (truth.size() != estimates.size()) {
    throw LengthMismatch("compute_errors: " + std::to_string(truth.size()) +
                         " truth vs " + std::to_string(estimates.size()) +
                         " estimates");
  }
  ErrorReport report;
  report.per_point.reserve(truth.size());
  double sum = 0.0, sum_sq = 0.0, sum_x = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].t != estimates[i].t) {
      throw LengthMismatch("compute_errors: misaligned index at position " +
                           std::to_string(i));
    }
    const double dx = truth[i].x - estimates[i].x;
    const double dy = truth[i].y - estimates[i].y;
    if (!std::isfinite(dx) || !std::isfinite(dy)) {
      throw NonFiniteInput("compute_errors: non-finite coordinate at t=" +
                           std::to_string(truth[i].t));
    }
    PointError e;
    e.index = truth[i].t;
    e.euclidean = std::sqrt(dx * dx + dy * dy);
    e.x_error = std::abs(dx);
    e.y_error = std::abs(dy);
    report.per_point.push_back(e);
    sum += e.euclidean;
    sum_sq += e.euclidean * e.euclidean;
    sum_x += e.x_error;
  }
  report.count = report.per_point.size();
  if (report.count > 0) {
    const auto n = static_cast<double>(report.count);
    report.mean_euclidean = sum / n;
    report.mse = sum_sq / n;
    report.mean_x_error = sum_x / n;
  }
  return report;
}

double CdfCurve::at(double x) const {
  const double* begin = sorted_errors.data();
  const double* end = begin + sorted_errors.size();
  const auto idx = std::upper_bound(begin, end, x) - begin;
  if (idx == 0) return 0.0;
  return probabilities(idx - 1);
}

CdfCurve empirical_cdf(const Eigen::Ref<const Eigen::VectorXd>& errors) {
  if (errors.size() == 0) {
    throw ValidationError("empirical_cdf: empty error list");
  }
  if (!errors.allFinite()) {
    throw NonFiniteInput("empirical_cdf: non-finite error");
  }
  CdfCurve curve;
  curve.sorted_errors = errors;
  std::sort(curve.sorted_errors.data(),
            curve.sorted_errors.data() + curve.sorted_errors.size());
  const auto n = curve.sorted_errors.size();
  curve.probabilities.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    curve.probabilities(i) =
        static_cast<double>(i + 1) / static_cast<double>(n);
  }
  // ties share the cumulative count of their last occurrence
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    if (curve.sorted_errors(i) == curve.sorted_errors(i + 1)) {
      curve.probabilities(i) = curve.probabilities(i + 1);
    }
  }
  return curve;
}

double cdf_quantile(const CdfCurve& curve, double q) {
  if (!(q > 0.0) || q > 1.0) {
    throw ValidationError("cdf_quantile: q must be in (0, 1]");
  }
  const auto n = curve.probabilities.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (curve.probabilities(i) >= q - 1e-15) return curve.sorted_errors(i);
  }
  return curve.sorted_errors(n - 1);
}

double std_across_runs(const Eigen::Ref<const Eigen::VectorXd>& per_run_means) {
  const auto n = per_run_means.size();
  if (n < 2) {
    throw ValidationError("std_across_runs needs at least 2 runs");
  }
  const double mean = per_run_means.mean();
  const double ss = (per_run_means.array() - mean).square().sum();
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace minterp
