#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace quantclt {

// Discretization of the time interval [0, T]. Strictly increasing,
// first point >= 0, at least two points.
struct TimeGrid {
  std::vector<double> points;

  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> pts) : points(std::move(pts)) { validate(); }

  // m equally spaced points covering [0, T], endpoints included.
  static TimeGrid regular(double T, std::size_t m) {
    if (m < 2) throw std::invalid_argument("TimeGrid::regular: need at least 2 points");
    std::vector<double> pts(m);
    for (std::size_t j = 0; j < m; ++j) pts[j] = T * static_cast<double>(j) / static_cast<double>(m - 1);
    return TimeGrid(std::move(pts));
  }

  std::size_t size() const { return points.size(); }
  double operator[](std::size_t j) const { return points[j]; }
  double horizon() const { return points.back(); }

  // Index of an exact grid time; throws if t is not a grid point.
  std::size_t index_of(double t) const;

  void validate() const {
    if (points.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (points.front() < 0.0) throw std::invalid_argument("TimeGrid: first point must be >= 0");
    for (std::size_t j = 1; j < points.size(); ++j)
      if (!(points[j] > points[j - 1]))
        throw std::invalid_argument("TimeGrid: points must be strictly increasing");
  }
};

inline std::size_t TimeGrid::index_of(double t) const {
  for (std::size_t j = 0; j < points.size(); ++j)
    if (points[j] == t) return j;
  throw std::invalid_argument("TimeGrid: time " + std::to_string(t) + " is not a grid point");
}

// Axis-aligned grid on [0,T]^2 for the two-parameter sheet. Each axis
// starts at 0 so the zero boundary of the sheet is represented.
struct TimeGrid2D {
  std::vector<double> points_x;
  std::vector<double> points_y;

  TimeGrid2D() = default;
  TimeGrid2D(std::vector<double> xs, std::vector<double> ys)
      : points_x(std::move(xs)), points_y(std::move(ys)) {
    validate();
  }

  std::size_t size_x() const { return points_x.size(); }
  std::size_t size_y() const { return points_y.size(); }
  std::size_t size() const { return points_x.size() * points_y.size(); }

  // Column-major flattening: (ix, iy) -> ix * size_y + iy.
  std::size_t flat_index(std::size_t ix, std::size_t iy) const { return ix * points_y.size() + iy; }

  void validate() const {
    auto check_axis = [](const std::vector<double>& axis, const char* name) {
      if (axis.size() < 2) throw std::invalid_argument(std::string("TimeGrid2D: axis ") + name + " needs >= 2 points");
      if (axis.front() != 0.0) throw std::invalid_argument(std::string("TimeGrid2D: axis ") + name + " must contain 0");
      for (std::size_t j = 1; j < axis.size(); ++j)
        if (!(axis[j] > axis[j - 1]))
          throw std::invalid_argument(std::string("TimeGrid2D: axis ") + name + " must be strictly increasing");
    };
    check_axis(points_x, "x");
    check_axis(points_y, "y");
  }
};

// Quantile levels inside a closed interval [a, b] of (0,1).
struct LevelGrid {
  std::vector<double> levels;
  double a = 0.0;
  double b = 0.0;

  LevelGrid() = default;

  explicit LevelGrid(std::vector<double> lv) : levels(std::move(lv)) {
    if (levels.empty()) throw std::invalid_argument("LevelGrid: empty");
    a = levels.front();
    b = levels.back();
    validate();
  }

  LevelGrid(std::vector<double> lv, double lo, double hi)
      : levels(std::move(lv)), a(lo), b(hi) {
    validate();
  }

  std::size_t size() const { return levels.size(); }
  double operator[](std::size_t k) const { return levels[k]; }

  std::size_t index_of(double alpha) const {
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (levels[k] == alpha) return k;
    throw std::invalid_argument("LevelGrid: level " + std::to_string(alpha) + " is not on the grid");
  }

  void validate() const {
    if (levels.empty()) throw std::invalid_argument("LevelGrid: empty");
    if (!(a > 0.0 && b < 1.0 && a <= b))
      throw std::invalid_argument("LevelGrid: interval must satisfy 0 < a <= b < 1");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (!(levels[k] >= a && levels[k] <= b))
        throw std::invalid_argument("LevelGrid: level outside [a,b]");
      if (k > 0 && !(levels[k] > levels[k - 1]))
        throw std::invalid_argument("LevelGrid: levels must be strictly increasing");
    }
  }
};

}  // namespace quantclt
