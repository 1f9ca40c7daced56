#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "manifold_interp/trajectory.hpp"

namespace minterp {

struct PointError {
  std::int64_t index = 0;
  double euclidean = 0.0;  // cm
  double x_error = 0.0;    // cm, absolute
  double y_error = 0.0;    // cm, absolute
};

struct ErrorReport {
  std::vector<PointError> per_point;
  double mean_euclidean = 0.0;  // cm
  double mse = 0.0;             // cm^2, mean squared euclidean
  double mean_x_error = 0.0;    // cm
  std::size_t count = 0;
};

ErrorReport compute_errors(const std::vector<TrajectoryPoint>& truth,
                           const std::vector<TrajectoryPoint>& estimates);

// Empirical distribution of errors, <= semantics: CDF(x) = #{e_i <= x} / N.
struct CdfCurve {
  Eigen::VectorXd sorted_errors;   // ascending
  Eigen::VectorXd probabilities;   // non-decreasing, ends at 1

  double at(double x) const;  // step-function evaluation
};

CdfCurve empirical_cdf(const Eigen::Ref<const Eigen::VectorXd>& errors);

// smallest x among the observed errors with CDF(x) >= q, q in (0, 1]
double cdf_quantile(const CdfCurve& curve, double q);

// sample standard deviation (n-1 denominator) of per-run mean errors
double std_across_runs(const Eigen::Ref<const Eigen::VectorXd>& per_run_means);

}  // namespace minterp
