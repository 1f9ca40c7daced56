#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace minterp {

struct TrajectoryPoint {
  std::int64_t t = 0;  // sample index; the interpolation abscissa
  double x = 0.0;      // cm
  double y = 0.0;      // cm
};

enum class Provenance { Generated, Loaded };

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Provenance provenance = Provenance::Generated;

  std::size_t size() const { return points.size(); }
  Eigen::VectorXd xs() const;
  Eigen::VectorXd ys() const;

  // strictly increasing consecutive t starting anywhere
  void validate() const;
};

// Sorted set of time indices hidden from the interpolators.
class MissingMask {
 public:
  MissingMask() = default;
  explicit MissingMask(std::vector<std::int64_t> indices);

  bool contains(std::int64_t t) const;
  std::size_t size() const { return indices_.size(); }
  const std::vector<std::int64_t>& indices() const { return indices_; }

 private:
  std::vector<std::int64_t> indices_;
};

// CSV with header "t,x,y"; t integer, x/y shortest-round-trip decimals.
Trajectory load_trajectory_csv(const std::filesystem::path& path);
void write_trajectory_csv(const Trajectory& traj,
                          const std::filesystem::path& path);

// CSV with header "t", one masked index per row.
MissingMask load_mask_csv(const std::filesystem::path& path);
void write_mask_csv(const MissingMask& mask, const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace minterp
