#include <doctest.h>

#include <cmath>

#include "manifold_interp/errors.hpp"
#include "manifold_interp/metrics.hpp"
#include "manifold_interp/rng.hpp"

using namespace minterp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const double x : vals) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("compute_errors basics") {
  const std::vector<TrajectoryPoint> truth = {{0, 0, 0}, {1, 1, 1}};
  CHECK(compute_errors(truth, truth).mse == 0.0);
  CHECK(compute_errors(truth, truth).mean_euclidean == 0.0);

  const std::vector<TrajectoryPoint> t1 = {{0, 0, 0}};
  const std::vector<TrajectoryPoint> e1 = {{0, 3, 4}};
  const ErrorReport r = compute_errors(t1, e1);
  CHECK(r.per_point[0].euclidean == doctest::Approx(5.0));
  CHECK(r.per_point[0].x_error == doctest::Approx(3.0));
  CHECK(r.per_point[0].y_error == doctest::Approx(4.0));

  const std::vector<TrajectoryPoint> t2 = {{0, 0, 0}, {1, 0, 0}};
  const std::vector<TrajectoryPoint> e2 = {{0, 0, 0}, {1, 0, 2}};
  const ErrorReport r2 = compute_errors(t2, e2);
  CHECK(r2.mean_euclidean == doctest::Approx(1.0));
  CHECK(r2.mse == doctest::Approx(2.0));
  CHECK(r2.count == 2);

  CHECK_THROWS_AS(compute_errors(t1, e2), LengthMismatch);
}

TEST_CASE("compute_errors is symmetric in truth and estimate") {
  Rng rng(77);
  std::vector<TrajectoryPoint> a, b;
  for (int i = 0; i < 25; ++i) {
    a.push_back({i, rng.uniform(-10, 10), rng.uniform(-10, 10)});
    b.push_back({i, rng.uniform(-10, 10), rng.uniform(-10, 10)});
  }
  const ErrorReport r1 = compute_errors(a, b);
  const ErrorReport r2 = compute_errors(b, a);
  CHECK(r1.mean_euclidean == r2.mean_euclidean);
  CHECK(r1.mse == r2.mse);
  CHECK(r1.mean_x_error == r2.mean_x_error);
}

TEST_CASE("empirical_cdf evaluation and bounds") {
  const CdfCurve c = empirical_cdf(vec({1, 2, 3, 4}));
  CHECK(c.at(2.5) == doctest::Approx(0.5));
  CHECK(c.at(4.0) == doctest::Approx(1.0));
  CHECK(c.at(100.0) == doctest::Approx(1.0));
  CHECK(c.at(0.5) == 0.0);
  CHECK(c.probabilities(c.probabilities.size() - 1) == 1.0);
  CHECK_THROWS_AS(empirical_cdf(Eigen::VectorXd()), ValidationError);
}

TEST_CASE("cdf_quantile: basics and max behavior") {
  const CdfCurve c = empirical_cdf(vec({1, 2, 3, 4}));
  CHECK(cdf_quantile(c, 0.5) == doctest::Approx(2.0));
  CHECK(cdf_quantile(c, 1.0) == doctest::Approx(4.0));
  CHECK(cdf_quantile(c, 0.51) == doctest::Approx(3.0));
  CHECK_THROWS_AS(cdf_quantile(c, 0.0), ValidationError);
}

TEST_CASE("quantile/CDF consistency on random data") {
  Rng rng(4242);
  Eigen::VectorXd errors(101);
  for (Eigen::Index i = 0; i < errors.size(); ++i) {
    errors(i) = rng.uniform(0.0, 30.0);
  }
  const CdfCurve c = empirical_cdf(errors);
  for (Eigen::Index i = 0; i < errors.size(); ++i) {
    const double x = errors(i);
    CHECK(cdf_quantile(c, c.at(x)) <= x + 1e-12);
  }
  // monotone non-decreasing
  for (Eigen::Index i = 1; i < c.probabilities.size(); ++i) {
    CHECK(c.sorted_errors(i) >= c.sorted_errors(i - 1));
    CHECK(c.probabilities(i) >= c.probabilities(i - 1));
  }
}

TEST_CASE("Jensen: mse >= squared mean on the same sample") {
  Rng rng(90210);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TrajectoryPoint> truth, est;
    for (int i = 0; i < 50; ++i) {
      truth.push_back({i, rng.uniform(-5, 5), rng.uniform(-5, 5)});
      est.push_back({i, rng.uniform(-5, 5), rng.uniform(-5, 5)});
    }
    const ErrorReport r = compute_errors(truth, est);
    CHECK(r.mse >= r.mean_euclidean * r.mean_euclidean - 1e-12);
  }
}

TEST_CASE("std_across_runs") {
  CHECK(std_across_runs(vec({5, 5, 5})) == doctest::Approx(0.0));
  CHECK(std_across_runs(vec({0, 2})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std_across_runs(vec({1, 2, 3, 4})) ==
        doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK_THROWS_AS(std_across_runs(vec({1.0})), ValidationError);
}
