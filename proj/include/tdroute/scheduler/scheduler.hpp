#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tdroute/plf/atf.hpp"
#include "tdroute/plf/envelope.hpp"
#include "tdroute/plf/step_cost.hpp"

namespace tdroute::scheduler {

// c_ot: continuous non-decreasing cost of the tour duration, given by knots
// (duration, dollars); the last segment is extended to the right. No knots
// means zero. c_wt: dollars per hour by time of day.
struct CostModel {
  std::vector<plf::Point> overtime;
  plf::StepCost work_rate;
  double units_per_hour = 3600.0;

  double overtime_cost(double duration) const;
  // integral of work_rate over [t0, t1], in dollars
  double work_cost(double t0, double t1) const;
  void validate() const;

  static CostModel linear_duration(double dollars_per_hour, double units_per_hour = 3600.0);
};

struct ScheduleResult {
  double t0 = 0;
  double total_cost = 0;
  double arrival_cost = 0;
  double overtime_cost = 0;
  double work_cost = 0;
  std::uint64_t events = 0;  // points inspected by the scan
};

// c_a(t0) + c_ot(a(t0) - t0) + work integral over [t0, a(t0)].
double total_cost(const plf::Atf& a, const CostModel& m, double t0);
ScheduleResult cost_breakdown(const plf::Atf& a, const CostModel& m, double t0);

// Least t0 in [t_min, t_max] minimising total_cost.
ScheduleResult optimal_start(const plf::Atf& a, const CostModel& m);

// Brackets are (minutes before the deadline, dollars) with offsets strictly
// decreasing and penalties non-decreasing. The returned step cost charges
// the bracket penalty by arrival time and nothing before the first bracket.
plf::StepCost soft_window_penalty(double window_end, const std::vector<std::pair<double, double>>& brackets,
                                  double units_per_minute = 60.0);

}  // namespace tdroute::scheduler
