#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tdroute/plf/atf.hpp"

namespace tdroute::plf {

struct Point {
  double x;
  double y;
  friend bool operator==(const Point&, const Point&) = default;
};

// General piecewise-linear function on the compact domain [x_min, x_max].
class PiecewiseLinear {
 public:
  explicit PiecewiseLinear(std::vector<Point> pts);

  double x_min() const { return pts_.front().x; }
  double x_max() const { return pts_.back().x; }
  std::span<const Point> points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  double operator()(double x) const;

 private:
  std::vector<Point> pts_;
};

// y = slope * x + intercept. The label is carried through envelopes.
struct Line {
  double slope;
  double intercept;
  int label = -1;

  double operator()(double x) const { return slope * x + intercept; }
};

// Lower envelope of lines; lines[i] is minimal on (breaks[i-1], breaks[i]).
struct ConcaveEnvelope {
  std::vector<Line> lines;
  std::vector<double> breaks;

  double operator()(double x) const;
  std::size_t piece_at(double x) const;
  PiecewiseLinear on(double x0, double x1) const;
};

// Lines must be sorted by non-decreasing slope. Output slopes strictly
// decrease; for equal slopes only the smallest intercept survives.
ConcaveEnvelope envelope_affine(std::span<const Line> lines);

// Sorts values[set] for every index set using one global sort.
std::vector<std::vector<std::size_t>> multi_sort(std::span<const double> values,
                                                 std::span<const std::vector<std::size_t>> sets);

struct LabeledMinimum {
  PiecewiseLinear f;
  std::vector<int> owner;  // input index minimal on each segment of f
};

// Exact pointwise minimum of functions sharing one domain.
PiecewiseLinear min_n(std::span<const PiecewiseLinear> fs);
LabeledMinimum min_n_labeled(std::span<const PiecewiseLinear> fs);

// Pointwise minimum of ATFs on their common domain, costs from the minimal input.
Atf min_n(std::span<const Atf> fs);

}  // namespace tdroute::plf
