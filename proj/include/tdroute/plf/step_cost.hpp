#pragma once

#include <span>
#include <vector>

#include "tdroute/common.hpp"

namespace tdroute::plf {

struct CostPiece {
  double t;  // start of the piece; the first piece always starts at -inf
  double c;
};

// Piecewise-constant cost. At a jump the value is the smaller of the two
// one-sided limits, which keeps the function lower semi-continuous.
class StepCost {
 public:
  StepCost() : pieces_{{-kInf, 0.0}} {}

  static StepCost constant(double c);
  // Pieces must have strictly increasing starts; the first start is
  // replaced by -inf. Equal neighbours are merged.
  static StepCost from_pieces(std::vector<CostPiece> pieces);

  double operator()(double t) const;
  // Value on [t, t + small).
  double right_value(double t) const;
  double left_limit(double t) const;
  // Smallest value on [t - tol, t + tol]. Re-timed plans land a few ulps off
  // the jump the optimiser chose, so pointwise checks use this.
  double min_near(double t, double tol) const;

  std::span<const CostPiece> pieces() const { return pieces_; }
  std::size_t discontinuities() const { return pieces_.size() - 1; }
  bool is_constant() const { return pieces_.size() == 1; }
  bool is_zero() const { return is_constant() && pieces_[0].c == 0.0; }

  // Drops pieces that start after t_max; they cannot be observed.
  StepCost truncated(double t_max) const;

  StepCost operator+(const StepCost& o) const;
  StepCost scaled(double k) const;

  friend bool operator==(const StepCost& a, const StepCost& b);

 private:
  explicit StepCost(std::vector<CostPiece> p) : pieces_(std::move(p)) {}
  std::size_t piece_at(double t) const;
  void normalize();

  std::vector<CostPiece> pieces_;
};

}  // namespace tdroute::plf
