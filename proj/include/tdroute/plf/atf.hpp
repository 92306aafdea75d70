#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdroute/plf/step_cost.hpp"

namespace tdroute::plf {

struct Breakpoint {
  double t;
  double v;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

struct TravelBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Piecewise-linear, non-decreasing arrival time function on (-inf, t_max].
// Constant a(t_min) to the left of the first breakpoint.
class Atf {
 public:
  // Validates the FIFO and non-negative travel invariants, then removes
  // redundant breakpoints. Throws InvalidArgument on bad input.
  explicit Atf(std::vector<Breakpoint> bps, StepCost cost = {});

  // a(t) = value for t <= t_max.
  static Atf constant(double value, double t_max, StepCost cost = {});
  // a(t) = t on (-inf, t_max] (numerically: starts at -kTimeBound).
  static Atf identity(double t_max = kTimeBound, StepCost cost = {});
  // a(t) = max(open, t) + duration on (-inf, close].
  static Atf window(double open, double close, double duration, StepCost cost = {});
  // a(t) = t + duration for departures in [from, t_max]; constant before.
  static Atf travel(double from, double t_max, double duration, StepCost cost = {});

  double t_min() const { return bps_.front().t; }
  double t_max() const { return bps_.back().t; }
  std::size_t size() const { return bps_.size(); }
  std::span<const Breakpoint> breakpoints() const { return bps_; }
  const StepCost& cost() const { return cost_; }

  // Throws OutOfDomain for t > t_max.
  double operator()(double t) const;
  // Same, but extends linearly with slope 1 past t_max (used for relaxed
  // re-simulation of plans that run late).
  double eval_relaxed(double t) const;

  bool is_identity() const;
  bool is_constant() const { return bps_.size() == 1; }
  TravelBounds travel_bounds() const;

  Atf with_cost(StepCost c) const;
  // Restricts the domain to (-inf, t] for t in [t_min, t_max].
  Atf restricted(double t) const;

  // Invariant violations, empty when valid. Used by loaders and tests.
  static std::vector<std::string> check(std::span<const Breakpoint> bps);

  friend bool operator==(const Atf& a, const Atf& b) {
    return a.bps_ == b.bps_ && a.cost_ == b.cost_;
  }

  struct Unchecked {};
  Atf(Unchecked, std::vector<Breakpoint> bps, StepCost cost);

 private:
  double interpolate(std::size_t seg, double t) const;
  void normalize();

  std::vector<Breakpoint> bps_;
  StepCost cost_;
};

// Removes collinear inner points and a leading flat segment in place.
void normalize_breakpoints(std::vector<Breakpoint>& bps);

}  // namespace tdroute::plf
