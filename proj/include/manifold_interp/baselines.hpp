#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>

#include "manifold_interp/lli.hpp"

namespace minterp {

enum class MethodId { Lli, Linear, Spline, Makima, Pchip, Rbf, Kriging };

inline constexpr MethodId kAllMethods[] = {
    MethodId::Lli,   MethodId::Linear, MethodId::Spline, MethodId::Makima,
    MethodId::Pchip, MethodId::Rbf,    MethodId::Kriging};

std::string method_name(MethodId id);
std::optional<MethodId> parse_method(std::string_view name);

// Strictly increasing times with matching values, >= 2 knots.
struct KnotSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd values;

  void validate(Eigen::Index min_knots = 2) const;
  Eigen::Index size() const { return times.size(); }
};

// multiquadric shape parameter; <= 0 selects mean knot spacing
struct RbfParams {
  double shape = 0.0;
};

// exponential variogram; <= 0 selects range = span/4, sill = value variance
struct KrigingParams {
  double range = 0.0;
  double sill = 0.0;
};

Eigen::VectorXd linear_interp(const KnotSeries& knots,
                              const Eigen::Ref<const Eigen::VectorXd>& queries);

// natural boundary (zero second derivative at both ends), C2 inside
Eigen::VectorXd spline_interp(const KnotSeries& knots,
                              const Eigen::Ref<const Eigen::VectorXd>& queries);

// shape-preserving Hermite, Fritsch-Carlson derivative limiting
Eigen::VectorXd pchip_interp(const KnotSeries& knots,
                             const Eigen::Ref<const Eigen::VectorXd>& queries);

// modified-Akima slope weighting; virtual end slopes by Akima extension
Eigen::VectorXd makima_interp(const KnotSeries& knots,
                              const Eigen::Ref<const Eigen::VectorXd>& queries);

Eigen::VectorXd rbf_interp(const KnotSeries& knots,
                           const Eigen::Ref<const Eigen::VectorXd>& queries,
                           const RbfParams& params = {});

// ordinary kriging over the time axis; weights sum to one
Eigen::VectorXd kriging_interp(const KnotSeries& knots,
                               const Eigen::Ref<const Eigen::VectorXd>& queries,
                               const KrigingParams& params = {});

struct DispatchConfig {
  int k = 5;                      // local window size / LLI references
  double sigma = 1e-3;            // LLI regularization
  bool global_baselines = false;  // RBF/kriging: one dense solve on all knots
  RbfParams rbf;
  KrigingParams kriging;
};

// Uniform entry point for the harness. Baselines run on the nearest-k knot
// window around each query (bracketing knots always included); RBF and
// kriging switch to a single all-knot solve in global mode. LLI rebuilds the
// gap neighborhood from the knots: within-range mode when both sides have
// enough samples, one-step extrapolation otherwise; runs of consecutive
// missing indices are filled from both ends inward with the run's own
// estimates as interim history. Queries that no mode can serve come back
// NaN.
Eigen::VectorXd interpolate_with(MethodId method, const KnotSeries& knots,
                                 const Eigen::Ref<const Eigen::VectorXd>& queries,
                                 const DispatchConfig& config);

}  // namespace minterp
