#include "tdroute/scheduler/scheduler.hpp"

#include <algorithm>
#include <cmath>

namespace tdroute::scheduler {

using plf::Atf;
using plf::CostPiece;
using plf::StepCost;

double CostModel::overtime_cost(double d) const {
  const auto& p = overtime;
  if (p.empty()) return 0.0;
  if (p.size() == 1) return p[0].y;
  std::size_t k = 0;
  while (k + 2 < p.size() && d > p[k + 1].x) ++k;
  return p[k].y + (p[k + 1].y - p[k].y) * (d - p[k].x) / (p[k + 1].x - p[k].x);
}

double CostModel::work_cost(double t0, double t1) const {
  if (!(t1 > t0)) return 0.0;
  auto p = work_rate.pieces();
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(p.begin() + 1, p.end(), t0, [](double t, const CostPiece& c) { return t < c.t; }) - p.begin() - 1);
  double sum = 0.0, x = t0;
  while (x < t1) {
    const double end = k + 1 < p.size() ? std::min(t1, p[k + 1].t) : t1;
    sum += p[k].c * (end - x);
    x = end;
    ++k;
  }
  return sum / units_per_hour;
}

void CostModel::validate() const {
  if (!(units_per_hour > 0)) throw InvalidArgument("units_per_hour must be positive");
  for (std::size_t k = 0; k + 1 < overtime.size(); ++k) {
    if (!(overtime[k + 1].x > overtime[k].x)) throw InvalidArgument("overtime knots must be increasing");
    if (overtime[k + 1].y < overtime[k].y) throw InvalidArgument("overtime cost must be non-decreasing");
  }
}

CostModel CostModel::linear_duration(double rate, double uph) {
  CostModel m;
  m.overtime = {{0.0, 0.0}, {uph, rate}};
  m.units_per_hour = uph;
  return m;
}

ScheduleResult cost_breakdown(const Atf& a, const CostModel& m, double t0) {
  if (t0 < a.t_min() - EPS_T || t0 > a.t_max() + EPS_T) throw OutOfDomain("start time outside the tour domain");
  const double end = a(std::clamp(t0, a.t_min(), a.t_max()));
  ScheduleResult r;
  r.t0 = t0;
  r.arrival_cost = a.cost()(t0);
  r.overtime_cost = m.overtime_cost(end - t0);
  r.work_cost = m.work_cost(t0, end);
  r.total_cost = r.arrival_cost + r.overtime_cost + r.work_cost;
  return r;
}

double total_cost(const Atf& a, const CostModel& m, double t0) { return cost_breakdown(a, m, t0).total_cost; }

ScheduleResult optimal_start(const Atf& a, const CostModel& m) {
  auto bps = a.breakpoints();
  const double hi = a.t_max();
  auto ca = a.cost().pieces();
  auto wt = m.work_rate.pieces();

  // interior knots of c_ot, where its slope changes
  std::vector<double> knots;
  for (std::size_t k = 1; k + 1 < m.overtime.size(); ++k) knots.push_back(m.overtime[k].x);

  std::vector<double> events;
  events.reserve(bps.size() + ca.size() + 2 * wt.size() + 2);
  std::size_t pa = 1, pw = 1, pwa = 1;  // next jump of c_a, of c_wt at t, of c_wt at a(t)
  std::vector<double> local;
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double t0 = bps[k].t, t1 = bps[k + 1].t;
    const double v0 = bps[k].v, v1 = bps[k + 1].v;
    local.clear();
    local.push_back(t0);
    while (pa < ca.size() && ca[pa].t < t1) {
      if (ca[pa].t > t0) local.push_back(ca[pa].t);
      ++pa;
    }
    while (pw < wt.size() && wt[pw].t < t1) {
      if (wt[pw].t > t0) local.push_back(wt[pw].t);
      ++pw;
    }
    while (pwa < wt.size() && wt[pwa].t <= v0) ++pwa;
    while (pwa < wt.size() && wt[pwa].t < v1) {
      // a is increasing here, solve a(t) = w
      const double w = wt[pwa].t;
      local.push_back(t0 + (w - v0) * (t1 - t0) / (v1 - v0));
      ++pwa;
    }
    const double d0 = v0 - t0, d1 = v1 - t1;
    if (d0 != d1) {
      for (double x : knots) {
        if ((x > d0 && x < d1) || (x < d0 && x > d1)) local.push_back(t0 + (x - d0) * (t1 - t0) / (d1 - d0));
      }
    }
    std::sort(local.begin(), local.end());
    for (double t : local) {
      if (t >= t0 && t < t1) events.push_back(t);
    }
  }
  events.push_back(hi);

  ScheduleResult best;
  std::vector<double> costs(events.size());
  double mn = kInf;
  for (std::size_t e = 0; e < events.size(); ++e) {
    costs[e] = total_cost(a, m, events[e]);
    mn = std::min(mn, costs[e]);
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(mn));
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (costs[e] <= mn + tol) {
      best = cost_breakdown(a, m, events[e]);
      break;
    }
  }
  best.events = events.size();
  return best;
}

StepCost soft_window_penalty(double window_end, const std::vector<std::pair<double, double>>& brackets,
                             double units_per_minute) {
  if (brackets.empty()) return StepCost{};
  std::vector<CostPiece> p{{-kInf, 0.0}};
  for (std::size_t k = 0; k < brackets.size(); ++k) {
    const auto [off, pen] = brackets[k];
    if (!(off > 0) || !std::isfinite(pen) || pen < 0) throw InvalidArgument("malformed penalty bracket");
    if (k > 0 && (off >= brackets[k - 1].first || pen < brackets[k - 1].second))
      throw InvalidArgument("brackets must tighten towards the deadline with non-decreasing penalties");
    p.push_back({window_end - off * units_per_minute, pen});
  }
  return StepCost::from_pieces(std::move(p));
}

}  // namespace tdroute::scheduler
