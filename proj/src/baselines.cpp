#include "manifold_interp/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "manifold_interp/errors.hpp"

namespace minterp {

std::string method_name(MethodId id) {
  switch (id) {
    case MethodId::Lli: return "LLI";
    case MethodId::Linear: return "Linear";
    case MethodId::Spline: return "Spline";
    case MethodId::Makima: return "Makima";
    case MethodId::Pchip: return "PCHIP";
    case MethodId::Rbf: return "RBF";
    case MethodId::Kriging: return "Kriging";
  }
  return "?";
}

std::optional<MethodId> parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "lli") return MethodId::Lli;
  if (lower == "linear") return MethodId::Linear;
  if (lower == "spline") return MethodId::Spline;
  if (lower == "makima") return MethodId::Makima;
  if (lower == "pchip") return MethodId::Pchip;
  if (lower == "rbf") return MethodId::Rbf;
  if (lower == "kriging") return MethodId::Kriging;
  return std::nullopt;
}

void KnotSeries::validate(Eigen::Index min_knots) const {
  if (times.size() != values.size()) {
    throw LengthMismatch("knot times/values size mismatch");
  }
  if (times.size() < min_knots) {
    throw ValidationError("need at least " + std::to_string(min_knots) +
                          " knots, got " + std::to_string(times.size()));
  }
  if (!times.allFinite() || !values.allFinite()) {
    throw NonFiniteInput("non-finite knot");
  }
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    if (!(times(i) > times(i - 1))) {
      throw ValidationError("knot times must be strictly increasing");
    }
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// index i such that times[i] <= q <= times[i+1]
Eigen::Index segment_index(const Eigen::VectorXd& times, double q) {
  const auto n = times.size();
  if (q < times(0) || q > times(n - 1)) {
    throw ExtrapolationUnsupported("query " + std::to_string(q) +
                                   " outside knot range [" +
                                   std::to_string(times(0)) + ", " +
                                   std::to_string(times(n - 1)) + "]");
  }
  const double* begin = times.data();
  const double* end = begin + n;
  auto it = std::upper_bound(begin, end, q);
  Eigen::Index i = static_cast<Eigen::Index>(it - begin) - 1;
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  return i;
}

double hermite_eval(double t0, double t1, double y0, double y1, double d0,
                    double d1, double q) {
  const double h = t1 - t0;
  const double s = (q - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

Eigen::VectorXd hermite_all(const KnotSeries& knots,
                            const Eigen::VectorXd& derivs,
                            const Eigen::Ref<const Eigen::VectorXd>& queries) {
  Eigen::VectorXd out(queries.size());
  for (Eigen::Index j = 0; j < queries.size(); ++j) {
    const auto i = segment_index(knots.times, queries(j));
    out(j) = hermite_eval(knots.times(i), knots.times(i + 1), knots.values(i),
                          knots.values(i + 1), derivs(i), derivs(i + 1),
                          queries(j));
  }
  return out;
}

Eigen::VectorXd segment_slopes(const KnotSeries& knots) {
  const auto n = knots.size();
  Eigen::VectorXd m(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i) = (knots.values(i + 1) - knots.values(i)) /
           (knots.times(i + 1) - knots.times(i));
  }
  return m;
}

Eigen::VectorXd pchip_derivatives(const KnotSeries& knots) {
  const auto n = knots.size();
  const Eigen::VectorXd m = segment_slopes(knots);
  Eigen::VectorXd d(n);
  if (n == 2) {
    d.setConstant(m(0));
    return d;
  }
  auto h = [&](Eigen::Index i) { return knots.times(i + 1) - knots.times(i); };

  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (m(i - 1) * m(i) <= 0.0) {
      d(i) = 0.0;  // local extremum or flat: clamp
    } else {
      const double w1 = 2.0 * h(i) + h(i - 1);
      const double w2 = h(i) + 2.0 * h(i - 1);
      d(i) = (w1 + w2) / (w1 / m(i - 1) + w2 / m(i));
    }
  }

  // one-sided three-point end derivatives with the usual shape clamps
  auto end_derivative = [](double h0, double h1, double m0, double m1) {
    double dd = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (dd * m0 <= 0.0) {
      dd = 0.0;
    } else if (m0 * m1 < 0.0 && std::abs(dd) > 3.0 * std::abs(m0)) {
      dd = 3.0 * m0;
    }
    return dd;
  };
  d(0) = end_derivative(h(0), h(1), m(0), m(1));
  d(n - 1) = end_derivative(h(n - 2), h(n - 3), m(n - 2), m(n - 3));
  return d;
}

Eigen::VectorXd makima_derivatives(const KnotSeries& knots) {
  const auto n = knots.size();
  const Eigen::VectorXd m = segment_slopes(knots);
  const auto nseg = m.size();

  // E(i+2) = m_i with two virtual slopes appended at each end
  Eigen::VectorXd e(nseg + 4);
  e.segment(2, nseg) = m;
  if (nseg == 1) {
    e.setConstant(m(0));
  } else {
    e(1) = 2.0 * e(2) - e(3);
    e(0) = 2.0 * e(1) - e(2);
    e(nseg + 2) = 2.0 * e(nseg + 1) - e(nseg);
    e(nseg + 3) = 2.0 * e(nseg + 2) - e(nseg + 1);
  }

  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mm2 = e(i);      // m_{i-2}
    const double mm1 = e(i + 1);  // m_{i-1}
    const double m0 = e(i + 2);   // m_i
    const double mp1 = e(i + 3);  // m_{i+1}
    const double w1 = std::abs(mp1 - m0) + std::abs(mp1 + m0) / 2.0;
    const double w2 = std::abs(mm1 - mm2) + std::abs(mm1 + mm2) / 2.0;
    if (w1 + w2 == 0.0) {
      d(i) = (mm1 + m0) / 2.0;  // indeterminate weighting: continuous limit
    } else {
      d(i) = (w1 * mm1 + w2 * m0) / (w1 + w2);
    }
  }
  return d;
}

double multiquadric(double r, double c) { return std::sqrt(r * r + c * c); }

double variogram_exp(double h, double sill, double range) {
  return sill * (1.0 - std::exp(-h / range));
}

struct KrigingModel {
  double sill;
  double range;
};

KrigingModel resolve_kriging(const KnotSeries& knots,
                             const KrigingParams& params) {
  KrigingModel model{};
  const auto n = knots.size();
  const double span = knots.times(n - 1) - knots.times(0);
  model.range = params.range > 0.0 ? params.range : span / 4.0;
  if (params.sill > 0.0) {
    model.sill = params.sill;
  } else {
    const double mean = knots.values.mean();
    const double ss = (knots.values.array() - mean).square().sum();
    model.sill = ss / static_cast<double>(n - 1);
    // weights are invariant to the sill scale, so a flat window just needs
    // any positive value to keep the system nonsingular
    if (!(model.sill > 0.0)) model.sill = 1.0;
  }
  return model;
}

}  // namespace

Eigen::VectorXd linear_interp(const KnotSeries& knots,
                              const Eigen::Ref<const Eigen::VectorXd>& queries) {
  knots.validate(2);
  Eigen::VectorXd out(queries.size());
  for (Eigen::Index j = 0; j < queries.size(); ++j) {
    const auto i = segment_index(knots.times, queries(j));
    const double s =
        (queries(j) - knots.times(i)) / (knots.times(i + 1) - knots.times(i));
    out(j) = (1.0 - s) * knots.values(i) + s * knots.values(i + 1);
  }
  return out;
}

Eigen::VectorXd spline_interp(const KnotSeries& knots,
                              const Eigen::Ref<const Eigen::VectorXd>& queries) {
  knots.validate(3);
  const auto n = knots.size();

  // second derivatives M from the natural-spline tridiagonal system,
  // solved by the Thomas recurrence
  Eigen::VectorXd h(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i) = knots.times(i + 1) - knots.times(i);
  }
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  if (n > 2) {
    const auto interior = n - 2;
    Eigen::VectorXd diag(interior), rhs(interior);
    for (Eigen::Index i = 0; i < interior; ++i) {
      diag(i) = 2.0 * (h(i) + h(i + 1));
      rhs(i) = 6.0 * ((knots.values(i + 2) - knots.values(i + 1)) / h(i + 1) -
                      (knots.values(i + 1) - knots.values(i)) / h(i));
    }
    Eigen::VectorXd c_prime(interior), d_prime(interior);
    c_prime(0) = h(1) / diag(0);
    d_prime(0) = rhs(0) / diag(0);
    for (Eigen::Index i = 1; i < interior; ++i) {
      const double denom = diag(i) - h(i) * c_prime(i - 1);
      c_prime(i) = h(i + 1) / denom;
      d_prime(i) = (rhs(i) - h(i) * d_prime(i - 1)) / denom;
    }
    m(interior) = d_prime(interior - 1);
    for (Eigen::Index i = interior - 1; i >= 1; --i) {
      m(i) = d_prime(i - 1) - c_prime(i - 1) * m(i + 1);
    }
  }

  Eigen::VectorXd out(queries.size());
  for (Eigen::Index j = 0; j < queries.size(); ++j) {
    const auto i = segment_index(knots.times, queries(j));
    const double a = knots.times(i + 1) - queries(j);
    const double b = queries(j) - knots.times(i);
    out(j) = m(i) * a * a * a / (6.0 * h(i)) +
             m(i + 1) * b * b * b / (6.0 * h(i)) +
             (knots.values(i) / h(i) - m(i) * h(i) / 6.0) * a +
             (knots.values(i + 1) / h(i) - m(i + 1) * h(i) / 6.0) * b;
  }
  return out;
}

Eigen::VectorXd pchip_interp(const KnotSeries& knots,
                             const Eigen::Ref<const Eigen::VectorXd>& queries) {
  knots.validate(2);
  return hermite_all(knots, pchip_derivatives(knots), queries);
}

Eigen::VectorXd makima_interp(const KnotSeries& knots,
                              const Eigen::Ref<const Eigen::VectorXd>& queries) {
  knots.validate(2);
  return hermite_all(knots, makima_derivatives(knots), queries);
}

// Small systems get full pivoting and an exact singularity verdict; the
// global dense solves switch to partial pivoting with a finite-result check.
class DenseSolver {
 public:
  explicit DenseSolver(Eigen::MatrixXd a) {
    if (a.rows() <= 64) {
      full_.emplace(std::move(a));
      if (!full_->isInvertible()) {
        throw SingularSystem("dense system is singular");
      }
    } else {
      partial_.emplace(std::move(a));
    }
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd sol;
    if (full_) sol = full_->solve(rhs);
    else sol = partial_->solve(rhs);
    if (!sol.allFinite()) {
      throw SingularSystem("dense system is singular");
    }
    return sol;
  }

 private:
  std::optional<Eigen::FullPivLU<Eigen::MatrixXd>> full_;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> partial_;
};

Eigen::VectorXd rbf_interp(const KnotSeries& knots,
                           const Eigen::Ref<const Eigen::VectorXd>& queries,
                           const RbfParams& params) {
  knots.validate(2);
  const auto n = knots.size();
  const double c =
      params.shape > 0.0
          ? params.shape
          : (knots.times(n - 1) - knots.times(0)) / static_cast<double>(n - 1);

  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = multiquadric(std::abs(knots.times(i) - knots.times(j)), c);
    }
  }
  const DenseSolver solver(std::move(a));
  const Eigen::VectorXd lambda = solver.solve(knots.values);

  Eigen::VectorXd out(queries.size());
  for (Eigen::Index j = 0; j < queries.size(); ++j) {
    segment_index(knots.times, queries(j));  // range check only
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      s += lambda(i) * multiquadric(std::abs(queries(j) - knots.times(i)), c);
    }
    out(j) = s;
  }
  return out;
}

Eigen::VectorXd kriging_interp(const KnotSeries& knots,
                               const Eigen::Ref<const Eigen::VectorXd>& queries,
                               const KrigingParams& params) {
  knots.validate(3);
  const auto n = knots.size();
  const auto nq = queries.size();
  const KrigingModel model = resolve_kriging(knots, params);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = variogram_exp(std::abs(knots.times(i) - knots.times(j)),
                              model.sill, model.range);
    }
    a(i, n) = 1.0;
    a(n, i) = 1.0;
  }
  const DenseSolver solver(std::move(a));

  // per-query weight systems share the factorization; batched right-hand
  // sides keep the global mode at substitution cost
  Eigen::MatrixXd rhs(n + 1, nq);
  for (Eigen::Index j = 0; j < nq; ++j) {
    segment_index(knots.times, queries(j));  // range check only
    for (Eigen::Index i = 0; i < n; ++i) {
      rhs(i, j) = variogram_exp(std::abs(queries(j) - knots.times(i)),
                                model.sill, model.range);
    }
    rhs(n, j) = 1.0;
  }
  const Eigen::MatrixXd weights = solver.solve(rhs);
  Eigen::VectorXd out(nq);
  for (Eigen::Index j = 0; j < nq; ++j) {
    out(j) = weights.col(j).head(n).dot(knots.values);
  }
  return out;
}

namespace {

// Contiguous knot window of (up to) k knots around q, always containing the
// bracketing pair; grows toward whichever side has the nearer next knot.
KnotSeries select_window(const KnotSeries& knots, double q, int k) {
  const auto n = knots.size();
  const auto want = std::min<Eigen::Index>(k, n);
  const double* begin = knots.times.data();
  auto it = std::upper_bound(begin, begin + n, q);
  Eigen::Index hi = static_cast<Eigen::Index>(it - begin);
  Eigen::Index lo = hi - 1;
  if (lo < 0) { lo = 0; hi = 1; }
  if (hi > n - 1) { hi = n - 1; lo = n - 2; }

  while (hi - lo + 1 < want) {
    const bool can_left = lo > 0;
    const bool can_right = hi < n - 1;
    if (can_left && can_right) {
      if (q - knots.times(lo - 1) <= knots.times(hi + 1) - q) --lo;
      else ++hi;
    } else if (can_left) {
      --lo;
    } else {
      ++hi;
    }
  }
  KnotSeries w;
  w.times = knots.times.segment(lo, hi - lo + 1);
  w.values = knots.values.segment(lo, hi - lo + 1);
  return w;
}

Eigen::VectorXd dispatch_baseline(MethodId method, const KnotSeries& knots,
                                  const Eigen::Ref<const Eigen::VectorXd>& q,
                                  const DispatchConfig& config) {
  switch (method) {
    case MethodId::Linear: return linear_interp(knots, q);
    case MethodId::Spline: return spline_interp(knots, q);
    case MethodId::Makima: return makima_interp(knots, q);
    case MethodId::Pchip: return pchip_interp(knots, q);
    case MethodId::Rbf: return rbf_interp(knots, q, config.rbf);
    case MethodId::Kriging: return kriging_interp(knots, q, config.kriging);
    default: throw ValidationError("not a baseline method");
  }
}

Eigen::Index min_knots_for(MethodId method) {
  return (method == MethodId::Spline || method == MethodId::Kriging) ? 3 : 2;
}

Eigen::VectorXd interpolate_lli(const KnotSeries& knots,
                                const Eigen::Ref<const Eigen::VectorXd>& queries,
                                const DispatchConfig& config) {
  const lli::LliConfig lc{config.k, config.sigma};
  lc.validate();
  const int k = config.k;
  const int h = k / 2;
  const int need_after = k - h;
  const double* tbegin = knots.times.data();
  const double* tend = tbegin + knots.size();

  // Isolated gaps are served from observed samples alone. A contiguous run
  // of missing indices is filled from both ends inward: the fit slides in
  // from whichever side is nearer, with that side's earlier estimates
  // standing in as history so the window stays one sample behind the lost
  // point (the op is symmetric under time reversal). Estimates never leak
  // beyond their run, so their noise cannot compound across the trajectory.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(queries.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return queries(a) < queries(b);
  });

  Eigen::VectorXd out = Eigen::VectorXd::Constant(queries.size(), kNaN);
  std::size_t oi = 0;
  while (oi < order.size()) {
    std::size_t oj = oi;
    while (oj + 1 < order.size() &&
           queries(order[oj + 1]) == queries(order[oj]) + 1.0) {
      ++oj;
    }
    const std::size_t len = oj - oi + 1;
    const std::size_t left_n = (len + 1) / 2;
    const auto pos = static_cast<Eigen::Index>(
        std::lower_bound(tbegin, tend, queries(order[oi])) - tbegin);
    const Eigen::Index n_obs = knots.size();

    std::vector<double> left_est, right_est;
    // value `back` samples behind the gap on each side: the side's own
    // estimates first, observed samples beyond them
    auto left_hist = [&](Eigen::Index back) {
      const auto ne = static_cast<Eigen::Index>(left_est.size());
      return back <= ne ? left_est[static_cast<std::size_t>(ne - back)]
                        : knots.values(pos - (back - ne));
    };
    auto right_hist = [&](Eigen::Index back) {
      const auto ne = static_cast<Eigen::Index>(right_est.size());
      return back <= ne ? right_est[static_cast<std::size_t>(ne - back)]
                        : knots.values(pos + (back - ne) - 1);
    };

    auto fill_one = [&](Eigen::Index qi, bool from_left) {
      const auto own_est =
          static_cast<Eigen::Index>(from_left ? left_est.size()
                                              : right_est.size());
      const auto far_est =
          static_cast<Eigen::Index>(from_left ? 0 : left_est.size());
      const auto n_before = (from_left ? pos : n_obs - pos) + own_est;
      const auto n_far = (from_left ? n_obs - pos : pos) + far_est;

      double estimate = kNaN;
      try {
        if (n_before >= h + 2 && n_far >= need_after) {
          lli::Neighborhood nbhd;
          nbhd.gap_index = static_cast<std::int64_t>(queries(qi));
          nbhd.before.resize(h + 2);
          nbhd.after.resize(need_after);
          for (Eigen::Index b = 0; b < h + 2; ++b) {
            nbhd.before(h + 1 - b) =
                from_left ? left_hist(b + 1) : right_hist(b + 1);
          }
          for (Eigen::Index a = 0; a < need_after; ++a) {
            // far side of the gap, nearest first; for a left fill these are
            // the observed samples just past the run
            nbhd.after(a) =
                from_left ? knots.values(pos + a) : left_hist(a + 1);
          }
          estimate = lli::interpolate_in_range(nbhd, lc);
        } else if (n_before >= k + 1) {
          Eigen::VectorXd tail(k + 1);
          for (Eigen::Index b = 0; b < k + 1; ++b) {
            tail(k - b) = from_left ? left_hist(b + 1) : right_hist(b + 1);
          }
          estimate = lli::extrapolate_next(tail, lc);
        }
      } catch (const InsufficientHistory&) {
        estimate = kNaN;
      }
      out(qi) = estimate;
      return estimate;
    };

    for (std::size_t jj = 0; jj < left_n; ++jj) {
      const double est = fill_one(order[oi + jj], true);
      if (!std::isfinite(est)) break;
      left_est.push_back(est);
    }
    for (std::size_t jj = 0; jj < len - left_n; ++jj) {
      const double est = fill_one(order[oj - jj], false);
      if (!std::isfinite(est)) break;
      right_est.push_back(est);
    }
    oi = oj + 1;
  }
  return out;
}

}  // namespace

Eigen::VectorXd interpolate_with(MethodId method, const KnotSeries& knots,
                                 const Eigen::Ref<const Eigen::VectorXd>& queries,
                                 const DispatchConfig& config) {
  if (method == MethodId::Lli) {
    knots.validate(2);
    return interpolate_lli(knots, queries, config);
  }

  knots.validate(min_knots_for(method));
  const auto n = knots.size();
  const double t_first = knots.times(0);
  const double t_last = knots.times(n - 1);

  Eigen::VectorXd out(queries.size());
  if (config.global_baselines &&
      (method == MethodId::Rbf || method == MethodId::Kriging)) {
    std::vector<Eigen::Index> in_range;
    for (Eigen::Index j = 0; j < queries.size(); ++j) {
      if (queries(j) >= t_first && queries(j) <= t_last) in_range.push_back(j);
      else out(j) = kNaN;
    }
    Eigen::VectorXd qs(static_cast<Eigen::Index>(in_range.size()));
    for (std::size_t i = 0; i < in_range.size(); ++i) qs(i) = queries(in_range[i]);
    const Eigen::VectorXd vals = dispatch_baseline(method, knots, qs, config);
    for (std::size_t i = 0; i < in_range.size(); ++i) out(in_range[i]) = vals(i);
    return out;
  }

  Eigen::VectorXd single(1);
  for (Eigen::Index j = 0; j < queries.size(); ++j) {
    const double q = queries(j);
    if (q < t_first || q > t_last) {
      out(j) = kNaN;  // baselines do not extrapolate
      continue;
    }
    const KnotSeries window =
        select_window(knots, q, std::max<int>(config.k,
                                              static_cast<int>(min_knots_for(method))));
    single(0) = q;
    out(j) = dispatch_baseline(method, window, single, config)(0);
  }
  return out;
}

}  // namespace minterp
