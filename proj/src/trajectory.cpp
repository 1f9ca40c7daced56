#include "manifold_interp/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "manifold_interp/errors.hpp"

namespace minterp {

Eigen::VectorXd Trajectory::xs() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v(i) = points[i].x;
  return v;
}

Eigen::VectorXd Trajectory::ys() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v(i) = points[i].y;
  return v;
}

void Trajectory::validate() const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].t != points[i - 1].t + 1) {
      throw ValidationError("trajectory indices must be consecutive; t jumps "
                            "from " + std::to_string(points[i - 1].t) +
                            " to " + std::to_string(points[i].t));
    }
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("non-finite coordinate at t=" +
                            std::to_string(p.t));
    }
  }
}

MissingMask::MissingMask(std::vector<std::int64_t> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()),
                 indices_.end());
}

bool MissingMask::contains(std::int64_t t) const {
  return std::binary_search(indices_.begin(), indices_.end(), t);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

double parse_double_field(const std::string& field, const char* what,
                          long line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(std::string("expected numeric ") + what + ", got '" +
                     field + "'", line);
  }
  return value;
}

std::int64_t parse_int_field(const std::string& field, const char* what,
                             long line) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(std::string("expected integer ") + what + ", got '" +
                     field + "'", line);
  }
  return value;
}

std::vector<std::string> split_row(const std::string& row) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(row);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!row.empty() && row.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open trajectory file " + path.string(), 0);
  }
  std::string row;
  long line = 0;
  if (!std::getline(in, row)) {
    throw ParseError("empty trajectory file " + path.string(), 0);
  }
  ++line;
  if (strip_cr(row) != "t,x,y") {
    throw ParseError("expected header 't,x,y', got '" + row + "'", line);
  }

  Trajectory traj;
  traj.provenance = Provenance::Loaded;
  while (std::getline(in, row)) {
    ++line;
    row = strip_cr(row);
    if (row.empty()) continue;
    const auto fields = split_row(row);
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, got " +
                       std::to_string(fields.size()), line);
    }
    TrajectoryPoint p;
    p.t = parse_int_field(fields[0], "t", line);
    p.x = parse_double_field(fields[1], "x", line);
    p.y = parse_double_field(fields[2], "y", line);
    traj.points.push_back(p);
  }
  traj.validate();
  return traj;
}

void write_trajectory_csv(const Trajectory& traj,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write trajectory file " + path.string());
  }
  out << "t,x,y\n";
  for (const auto& p : traj.points) {
    out << p.t << ',' << format_double(p.x) << ',' << format_double(p.y)
        << '\n';
  }
}

MissingMask load_mask_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open mask file " + path.string(), 0);
  }
  std::string row;
  long line = 0;
  if (!std::getline(in, row)) {
    throw ParseError("empty mask file " + path.string(), 0);
  }
  ++line;
  if (strip_cr(row) != "t") {
    throw ParseError("expected header 't', got '" + row + "'", line);
  }
  std::vector<std::int64_t> indices;
  while (std::getline(in, row)) {
    ++line;
    row = strip_cr(row);
    if (row.empty()) continue;
    indices.push_back(parse_int_field(row, "t", line));
  }
  return MissingMask(std::move(indices));
}

void write_mask_csv(const MissingMask& mask,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write mask file " + path.string());
  }
  out << "t\n";
  for (const auto t : mask.indices()) out << t << '\n';
}

}  // namespace minterp
