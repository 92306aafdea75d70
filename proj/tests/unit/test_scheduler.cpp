#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tdroute/scheduler/scheduler.hpp"

using namespace tdroute;
using namespace tdroute::plf;
using namespace tdroute::scheduler;

namespace {

struct Brute {
  double t0;
  double cost;
};

double brute_cost(const Atf& a, const CostModel& m, double t) {
  const double end = oracle::eval(a, t);
  return oracle::step(a.cost(), t) + oracle::pl_extended(m.overtime, end - t) +
         oracle::step_integral(m.work_rate, t, end) / m.units_per_hour;
}

// every abscissa where the total cost can bend or jump, plus a uniform grid
Brute brute_force(const Atf& a, const CostModel& m, int grid) {
  std::vector<double> ts = oracle::samples(a.t_min(), a.t_max(), grid);
  auto in = [&](double t) { return t >= a.t_min() && t <= a.t_max(); };
  for (auto& b : a.breakpoints()) ts.push_back(b.t);
  for (auto& p : a.cost().pieces())
    if (in(p.t)) ts.push_back(p.t);
  for (auto& p : m.work_rate.pieces()) {
    if (in(p.t)) ts.push_back(p.t);
  }
  auto bp = a.breakpoints();
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double t0 = bp[k].t, t1 = bp[k + 1].t;
    auto dur = [&](double t) { return oracle::eval(a, t) - t; };
    for (auto& q : m.overtime) {
      auto g = [&](double t) { return dur(t) - q.x; };
      if ((g(t0) < 0) != (g(t1) < 0)) {
        ts.push_back(oracle::bisect(g, t0, t1));
        ts.push_back(std::nextafter(ts.back(), -INFINITY));
      }
    }
    for (auto& p : m.work_rate.pieces()) {
      auto g = [&](double t) { return oracle::eval(a, t) - p.t; };
      if (std::isfinite(p.t) && (g(t0) < 0) != (g(t1) < 0)) {
        ts.push_back(oracle::bisect(g, t0, t1));
        ts.push_back(std::nextafter(ts.back(), -INFINITY));
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  Brute best{0, INFINITY};
  for (double t : ts) {
    if (!in(t)) continue;
    const double c = brute_cost(a, m, t);
    if (c < best.cost - 1e-9 * std::max(1.0, std::abs(c))) best = {t, c};
  }
  return best;
}

CostModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nk(0, 4);
  std::uniform_real_distribution<double> u(0, 1);
  CostModel m;
  m.units_per_hour = 10;
  int k = nk(rng);
  double x = 0, y = std::round(u(rng) * 3);
  for (int i = 0; i < k; ++i) {
    m.overtime.push_back({x, y});
    x += 0.5 + 4 * u(rng);
    y += std::round(u(rng) * 8);
  }
  if (u(rng) < 0.7) m.work_rate = oracle::random_cost(rng, 0, 40, 4);
  return m;
}

}  // namespace

TEST_CASE("total cost examples") {
  Atf w({{4, 4.1}, {5, 5.1}});
  CostModel zero;
  CHECK(total_cost(w, zero, 4.5) == 0);
  CostModel m;
  m.overtime = {{0, 0}, {1, 1}};
  CHECK(total_cost(w, m, 4) == doctest::Approx(0.1));
  CHECK_THROWS_AS(total_cost(w, m, 6), OutOfDomain);
  CostModel wt;
  wt.work_rate = StepCost::constant(20);
  Atf two_hours({{0, 7200}, {100, 7300}});
  CHECK(total_cost(two_hours, wt, 50) == doctest::Approx(40));
  auto r = cost_breakdown(w, m, 4.5);
  CHECK(r.total_cost == r.arrival_cost + r.overtime_cost + r.work_cost);
}

TEST_CASE("optimal start examples") {
  Atf w({{4, 4.1}, {5, 5.1}});
  CostModel m;
  m.overtime = {{0, 0}, {1, 1}};
  auto r = optimal_start(w, m);
  CHECK(r.t0 == 4);
  CHECK(r.total_cost == doctest::Approx(0.1));
  auto grid = brute_force(w, m, 100000);
  CHECK(grid.t0 == 4);

  Atf id = Atf::identity(100);
  auto r2 = optimal_start(id, m);
  CHECK(r2.t0 == id.t_min());
  CHECK(r2.total_cost == 0);

  // one-point domain
  Atf point({{3, 8}});
  auto r3 = optimal_start(point, m);
  CHECK(r3.t0 == 3);
  CHECK(r3.total_cost == doctest::Approx(5));
}

TEST_CASE("optimal start matches brute force") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> nb(1, 8);
  for (int rep = 0; rep < 1000; ++rep) {
    CAPTURE(rep);
    Atf a = oracle::random_atf(rng, nb(rng), 0, 30, 8).with_cost(oracle::random_cost(rng, 0, 30, 3));
    CostModel m = random_model(rng);
    auto r = optimal_start(a, m);
    auto b = brute_force(a, m, rep < 50 ? 100000 : 10000);
    CHECK(r.t0 >= a.t_min());
    CHECK(r.t0 <= a.t_max());
    CHECK(r.total_cost == doctest::Approx(b.cost).epsilon(1e-7));
    CHECK(r.total_cost <= b.cost + 1e-7);
    CHECK(brute_cost(a, m, r.t0) == doctest::Approx(r.total_cost).epsilon(1e-9));
    CHECK(r.t0 <= b.t0 + 1e-9);
    CHECK(r.total_cost == r.arrival_cost + r.overtime_cost + r.work_cost);
    const std::size_t bound = (m.overtime.size() + 1) * a.size() + a.cost().discontinuities() +
                              2 * m.work_rate.discontinuities() + a.size() + 2;
    CHECK(r.events <= bound);
  }
}

TEST_CASE("soft window penalty") {
  const double end = 18 * 3600;
  auto p = soft_window_penalty(end, {{15, 1}, {10, 2}, {5, 4}});
  CHECK(p(end - 20 * 60) == 0);
  CHECK(p(end - 14 * 60) == 1);
  CHECK(p(end - 10 * 60 + 1) == 2);
  CHECK(p(end - 7 * 60) == 2);
  CHECK(p(end - 60) == 4);
  CHECK(p(end) == 4);
  // lower semi-continuity takes the cheaper side at a bracket start
  CHECK(p(end - 15 * 60) == 0);
  CHECK(p.right_value(end - 15 * 60) == 1);
  CHECK(soft_window_penalty(end, {}).is_zero());
  auto agg = soft_window_penalty(end, {{15, 2}, {10, 4}, {5, 8}});
  CHECK(agg == p.scaled(2));
  CHECK_THROWS_AS(soft_window_penalty(end, {{10, 1}, {15, 2}}), InvalidArgument);
  CHECK_THROWS_AS(soft_window_penalty(end, {{15, 2}, {10, 1}}), InvalidArgument);
}
