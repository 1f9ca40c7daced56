#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "manifold_interp/errors.hpp"
#include "manifold_interp/lli.hpp"
#include "manifold_interp/rng.hpp"
#include "oracles.hpp"

using namespace minterp;
using lli::LliConfig;
using lli::Neighborhood;
using lli::Window;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const double x : vals) v(i++) = x;
  return v;
}

oracle::Vector to_std(const Eigen::VectorXd& v) {
  return oracle::Vector(v.data(), v.data() + v.size());
}

}  // namespace

TEST_CASE("solve_weights: constant window falls back to uniform") {
  const Window w{vec({5.0, 5.0, 5.0}), 5.0};
  const auto weights = lli::solve_weights(w, {3, 1e-8});
  for (int i = 0; i < 3; ++i) CHECK(weights(i) == doctest::Approx(1.0 / 3.0));
  CHECK(weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve_weights: sigma->0 closed form on [0,1,2] -> 3") {
  const Window w{vec({0.0, 1.0, 2.0}), 3.0};
  const auto weights = lli::solve_weights(w, {3, 1e-12});
  CHECK(weights(0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-8));
  CHECK(weights(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(weights(2) == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
  // zero residual: the weighted window hits the target
  CHECK(lli::reconstruct(w.values, weights) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("solve_weights: sigma->0 closed form on [0,1,4] -> 9") {
  const Window w{vec({0.0, 1.0, 4.0}), 9.0};
  const auto weights = lli::solve_weights(w, {3, 1e-12});
  CHECK(weights(0) == doctest::Approx(-14.0 / 13.0).epsilon(1e-8));
  CHECK(weights(1) == doctest::Approx(-3.0 / 13.0).epsilon(1e-8));
  CHECK(weights(2) == doctest::Approx(30.0 / 13.0).epsilon(1e-8));
  CHECK(lli::reconstruct(w.values, weights) ==
        doctest::Approx(117.0 / 13.0).epsilon(1e-9));
}

TEST_CASE("solve_weights: matches the KKT oracle at moderate sigma") {
  const Window w{vec({0.0, 1.0, 4.0}), 9.0};
  for (const double sigma : {1e-3, 1e-2, 1e-1}) {
    const auto weights = lli::solve_weights(w, {3, sigma});
    const auto expected = oracle::kkt_weights(to_std(w.values), w.target, sigma);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(weights(i) - expected[static_cast<std::size_t>(i)]) <=
            1e-9);
    }
  }
}

TEST_CASE("solve_weights: rejects non-finite input and bad shapes") {
  CHECK_THROWS_AS(lli::solve_weights({vec({1.0, NAN}), 0.0}, {2, 1e-3}),
                  NonFiniteInput);
  CHECK_THROWS_AS(
      lli::solve_weights({vec({1.0, 2.0}), INFINITY}, {2, 1e-3}),
      NonFiniteInput);
  CHECK_THROWS_AS(lli::solve_weights({vec({1.0, 2.0, 3.0}), 0.0}, {2, 1e-3}),
                  LengthMismatch);
  CHECK_THROWS_AS(lli::solve_weights({vec({1.0}), 0.0}, {1, 1e-3}),
                  ValidationError);
  CHECK_THROWS_AS(lli::solve_weights({vec({1.0, 2.0}), 0.0}, {2, -1.0}),
                  ValidationError);
}

TEST_CASE("solve_weights invariants over random windows") {
  Rng rng(0xA11CE);
  oracle::Vector values;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = static_cast<int>(rng.uniform_int(2, 10));
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = rng.uniform(-100.0, 100.0);
    const double target = rng.uniform(-100.0, 100.0);
    const double sigma = std::pow(10.0, rng.uniform(-3.0, -1.0));

    const auto weights = lli::solve_weights({v, target}, {k, sigma});
    CHECK(std::abs(weights.sum() - 1.0) <= 1e-12);

    const auto expected = oracle::kkt_weights(to_std(v), target, sigma);
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(weights(i) - expected[static_cast<std::size_t>(i)]) <=
            1e-9);
    }
  }
}

TEST_CASE("solve_weights: affine invariance of the weight vector") {
  Rng rng(0xBEE5);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = static_cast<int>(rng.uniform_int(2, 10));
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = rng.uniform(-100.0, 100.0);
    const double target = rng.uniform(-100.0, 100.0);
    double a = rng.uniform(-10.0, 10.0);
    if (std::abs(a) < 0.1) a = a < 0 ? -0.1 : 0.1;
    const double b = rng.uniform(-100.0, 100.0);

    const LliConfig cfg{k, 1e-3};
    const auto w0 = lli::solve_weights({v, target}, cfg);
    const auto w1 =
        lli::solve_weights({(a * v.array() + b).matrix(), a * target + b}, cfg);
    for (int i = 0; i < k; ++i) CHECK(std::abs(w0(i) - w1(i)) <= 1e-9);
  }
}

TEST_CASE("solve_weights: sigma->0 residual vanishes, limit form reached") {
  Rng rng(0xF00D);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = static_cast<int>(rng.uniform_int(2, 10));
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = rng.uniform(-100.0, 100.0);
    const double target = rng.uniform(-100.0, 100.0);

    const auto weights = lli::solve_weights({v, target}, {k, 1e-12});
    const double residual = std::abs(target - lli::reconstruct(v, weights));
    CHECK(residual <= 1e-6 * std::abs(target) + 1e-9);

    // limiting weights: normalize(1 - X (X.1)/(X.X))
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(k, target) - v;
    Eigen::VectorXd u =
        Eigen::VectorXd::Ones(k) - x * (x.sum() / x.squaredNorm());
    u /= u.sum();
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(weights(i) - u(i)) <= 1e-6 * (1.0 + std::abs(u(i))));
    }
  }
}

TEST_CASE("solve_weights: sigma = 0 equals the analytic limit") {
  const Window w{vec({2.0, -3.0, 7.0, 1.0}), 4.5};
  const auto w0 = lli::solve_weights(w, {4, 0.0});
  const auto w1 = lli::solve_weights(w, {4, 1e-14});
  for (int i = 0; i < 4; ++i) CHECK(w0(i) == doctest::Approx(w1(i)).epsilon(1e-6));
  CHECK(std::abs(w0.sum() - 1.0) <= 1e-12);
}

TEST_CASE("reconstruct examples") {
  CHECK(lli::reconstruct(vec({1, 2, 3}), vec({1.0 / 3, 1.0 / 3, 1.0 / 3})) ==
        doctest::Approx(2.0));
  CHECK(lli::reconstruct(vec({1, 2, 3}), vec({-2.0 / 3, 1.0 / 3, 4.0 / 3})) ==
        doctest::Approx(4.0));
  // affine combination of a constant is the constant
  CHECK(lli::reconstruct(vec({7, 7, 7}), vec({0.9, -0.4, 0.5})) ==
        doctest::Approx(7.0));
  CHECK_THROWS_AS(lli::reconstruct(vec({1, 2}), vec({1.0})), LengthMismatch);
}

TEST_CASE("extrapolate_next on lines, constants, and a parabola") {
  const LliConfig cfg{3, 1e-12};
  CHECK(lli::extrapolate_next(vec({0, 1, 2, 3}), cfg) ==
        doctest::Approx(4.0).epsilon(1e-6));
  CHECK(lli::extrapolate_next(vec({5.5, 5.5, 5.5, 5.5}), cfg) ==
        doctest::Approx(5.5));

  // golden value: in the sigma->0 limit the fit [0,1,4] -> 9 gives
  // W = [-14/13, -3/13, 30/13], so the prediction on [1,4,9] is
  // (-14 - 12 + 270)/13 = 244/13. The KKT oracle confirms the route at a
  // well-conditioned sigma.
  const double got = lli::extrapolate_next(vec({0, 1, 4, 9}), cfg);
  CHECK(got == doctest::Approx(244.0 / 13.0).epsilon(1e-6));
  const auto fit = oracle::kkt_weights({0.0, 1.0, 4.0}, 9.0, 1e-2);
  const double expected = oracle::dot(fit, {1.0, 4.0, 9.0});
  CHECK(lli::extrapolate_next(vec({0, 1, 4, 9}), {3, 1e-2}) ==
        doctest::Approx(expected).epsilon(1e-9));

  CHECK_THROWS_AS(lli::extrapolate_next(vec({1, 2, 3}), cfg),
                  InsufficientHistory);
}

TEST_CASE("interpolate_point_2d treats axes independently") {
  const LliConfig cfg{3, 1e-12};
  const auto [x1, y1] =
      lli::interpolate_point_2d(vec({0, 1, 2, 3}), vec({0, 2, 4, 6}), cfg);
  CHECK(x1 == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(y1 == doctest::Approx(8.0).epsilon(1e-6));

  const auto [x2, y2] =
      lli::interpolate_point_2d(vec({5, 5, 5, 5}), vec({0, 1, 2, 3}), cfg);
  CHECK(x2 == doctest::Approx(5.0));
  CHECK(y2 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("interpolate_point_2d on a circle matches the per-axis oracle") {
  const int k = 5;
  const LliConfig cfg{k, 1e-3};
  const double radius = 100.0;
  const double step = 2.0 * 3.14159265358979323846 / 100.0;
  Eigen::VectorXd tx(k + 1), ty(k + 1);
  for (int i = 0; i <= k; ++i) {
    tx(i) = radius * std::cos(step * static_cast<double>(i));
    ty(i) = radius * std::sin(step * static_cast<double>(i));
  }
  const auto [gx, gy] = lli::interpolate_point_2d(tx, ty, cfg);

  auto axis_oracle = [&](const Eigen::VectorXd& tail) {
    oracle::Vector fit_values(tail.data(), tail.data() + k);
    const auto w = oracle::kkt_weights(fit_values, tail(k), cfg.sigma);
    oracle::Vector apply(tail.data() + 1, tail.data() + k + 1);
    return oracle::dot(w, apply);
  };
  CHECK(gx == doctest::Approx(axis_oracle(tx)).epsilon(1e-9));
  CHECK(gy == doctest::Approx(axis_oracle(ty)).epsilon(1e-9));

  // a sinusoid is not an exact affine recurrence with sum-one weights, but
  // the continuation lands close to the true circle point at this sampling
  // (measured miss 0.48 cm against an arc step of ~6.28 cm)
  const double true_x = radius * std::cos(step * (k + 1));
  const double true_y = radius * std::sin(step * (k + 1));
  const double miss = std::hypot(gx - true_x, gy - true_y);
  CHECK(miss <= 0.6);
}

TEST_CASE("interpolate_in_range: affine data is reproduced exactly") {
  const LliConfig cfg{5, 1e-12};
  // line p_j = j around a gap at t: before = p_{t-4..t-1}, after = p_{t+1..t+3}
  const double t = 40.0;
  Neighborhood nbhd;
  nbhd.gap_index = static_cast<std::int64_t>(t);
  nbhd.before = vec({t - 4, t - 3, t - 2, t - 1});
  nbhd.after = vec({t + 1, t + 2, t + 3});
  CHECK(lli::interpolate_in_range(nbhd, cfg) ==
        doctest::Approx(t).epsilon(1e-9));

  Neighborhood flat;
  flat.before = vec({3.25, 3.25, 3.25, 3.25});
  flat.after = vec({3.25, 3.25, 3.25});
  CHECK(lli::interpolate_in_range(flat, cfg) == doctest::Approx(3.25));
}

TEST_CASE("interpolate_in_range: quadratic golden value from the KKT oracle") {
  // p_j = j^2, gap at t = 10, k = 5: fit reconstructs p_9 = 81 from
  // [36, 49, 64, 121, 144]; apply slides one sample to [49, 64, 81, 144, 169].
  const LliConfig cfg{5, 1e-12};
  Neighborhood nbhd;
  nbhd.gap_index = 10;
  nbhd.before = vec({36, 49, 64, 81});
  nbhd.after = vec({121, 144, 169});

  const double got = lli::interpolate_in_range(nbhd, cfg);
  // frozen closed form of the sigma->0 limit: 736476/7409
  CHECK(got == doctest::Approx(736476.0 / 7409.0).epsilon(1e-8));
  // KKT oracle confirms the same fit/apply windows at well-conditioned sigma
  const auto w = oracle::kkt_weights({36, 49, 64, 121, 144}, 81.0, 1e-2);
  const double expected = oracle::dot(w, {49, 64, 81, 144, 169});
  CHECK(lli::interpolate_in_range(nbhd, {5, 1e-2}) ==
        doctest::Approx(expected).epsilon(1e-9));

  Neighborhood thin;
  thin.before = vec({1, 2});
  thin.after = vec({4, 5, 6});
  CHECK_THROWS_AS(lli::interpolate_in_range(thin, cfg), InsufficientHistory);
}

TEST_CASE("collinear exactness at every gap position, k=5") {
  const LliConfig cfg{5, 1e-12};
  const int n = 100;
  const double p0 = -12.5, slope = 1.7;
  Eigen::VectorXd line(n);
  for (int j = 0; j < n; ++j) line(j) = p0 + slope * j;

  const int h = cfg.k / 2;
  for (int t = h + 2; t + (cfg.k - h) < n; ++t) {
    Neighborhood nbhd;
    nbhd.gap_index = t;
    nbhd.before = line.segment(t - (h + 2), h + 2);
    nbhd.after = line.segment(t + 1, cfg.k - h);
    CHECK(std::abs(lli::interpolate_in_range(nbhd, cfg) - line(t)) <= 1e-6);
  }
  for (int t = cfg.k + 1; t < n; ++t) {
    const double got = lli::extrapolate_next(line.head(t), cfg);
    CHECK(std::abs(got - line(t)) <= 1e-6);
  }
}

TEST_CASE("solve_weights is deterministic") {
  const Window w{vec({3.7, -1.2, 0.05, 44.0, 9.9}), 17.3};
  const LliConfig cfg{5, 1e-3};
  const auto w1 = lli::solve_weights(w, cfg);
  const auto w2 = lli::solve_weights(w, cfg);
  for (int i = 0; i < 5; ++i) {
    CHECK(w1(i) == w2(i));  // bit-identical
  }
}
