#include "tdroute/solver/solution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdroute/plf/ops.hpp"

namespace tdroute::solver {

namespace {

constexpr double kNear = 1e-6;  // time tolerance at cost jumps

template <class... A>
std::string str(const A&... a) {
  std::ostringstream os;
  os.precision(12);
  (os << ... << a);
  return os.str();
}

}  // namespace

std::optional<Atf> fold_tour(const Instance& in, const TourPlan& t) {
  const Vehicle& v = in.vehicles[t.vehicle];
  Stop cur = start_stop(v);
  std::optional<Atf> acc;
  for (std::size_t x = 0; x <= t.visits.size(); ++x) {
    const std::size_t next = x < t.visits.size() ? stop_of(in, t.visits[x]).addr : v.end_addr;
    Atf step = plf::compose(Atf::window(cur.open, cur.close, cur.duration, cur.penalty), in.arc(cur.addr, next));
    acc = acc ? plf::try_compose(*acc, step) : std::optional<Atf>(step);
    if (!acc) return std::nullopt;
    if (x < t.visits.size()) cur = stop_of(in, t.visits[x]);
  }
  return plf::try_compose(*acc, Atf::identity(v.return_by));
}

Report validate(const Solution& s, const Instance& in) {
  Report r;
  auto bad = [&](std::string m) {
    r.feasible = false;
    r.violations.push_back(std::move(m));
  };
  const std::size_t n = in.items.size();
  std::vector<int> tour_of_pick(n, -1), tour_of_del(n, -1);
  std::vector<char> used(in.vehicles.size(), 0);
  for (std::size_t k = 0; k < s.tours.size(); ++k) {
    const TourPlan& t = s.tours[k];
    TourCheck tc;
    tc.start = t.start;
    if (t.vehicle >= in.vehicles.size()) {
      bad(str("tour ", k, ": unknown vehicle ", t.vehicle));
      r.tours.push_back(tc);
      continue;
    }
    if (used[t.vehicle]) bad(str("tour ", k, ": vehicle ", t.vehicle, " used twice"));
    used[t.vehicle] = 1;
    const Vehicle& v = in.vehicles[t.vehicle];
    bool codes_ok = true;
    for (std::size_t x = 0; x < t.visits.size(); ++x) {
      const int c = t.visits[x];
      if (c < 0 || item_of(c) >= n) {
        bad(str("tour ", k, ": bad visit code ", c));
        codes_ok = false;
        continue;
      }
      const std::size_t it = item_of(c);
      auto& slot = is_delivery(c) ? tour_of_del[it] : tour_of_pick[it];
      if (slot != -1) bad(str("item ", in.items[it].name, " visited twice"));
      slot = static_cast<int>(k);
      if (!is_delivery(c)) {
        if (in.items[it].preloaded) bad(str("item ", in.items[it].name, " is preloaded but has a pickup visit"));
      } else if (!in.items[it].preloaded) {
        const auto pos = std::find(t.visits.begin(), t.visits.begin() + static_cast<std::ptrdiff_t>(x), pickup_code(it));
        if (pos == t.visits.begin() + static_cast<std::ptrdiff_t>(x))
          bad(str("item ", in.items[it].name, " delivered before pickup or in another tour"));
      }
    }
    if (!codes_ok) {
      r.tours.push_back(tc);
      continue;
    }
    // capacity
    if (!v.capacity.empty()) {
      const std::size_t dims = v.capacity.size();
      std::vector<double> load(dims, 0.0);
      for (int c : t.visits) {
        const Item& it = in.items[item_of(c)];
        if (it.preloaded)
          for (std::size_t d = 0; d < dims; ++d) load[d] += it.demand[d];
      }
      auto over = [&] {
        for (std::size_t d = 0; d < dims; ++d)
          if (load[d] > v.capacity[d] + 1e-9) return true;
        return false;
      };
      bool exceeded = over();
      for (int c : t.visits) {
        const Item& it = in.items[item_of(c)];
        if (it.preloaded) {
          for (std::size_t d = 0; d < dims; ++d) load[d] -= it.demand[d];
        } else {
          const double sgn = is_delivery(c) ? -1.0 : 1.0;
          for (std::size_t d = 0; d < dims; ++d) load[d] += sgn * it.demand[d];
        }
        exceeded = exceeded || over();
      }
      if (exceeded) bad(str("tour ", k, ": capacity exceeded"));
    }
    // timing: simulate from the planned start
    if (t.start < v.start_open - 1e-9 || t.start > v.start_close + 1e-9)
      bad(str("tour ", k, ": start ", t.start, " outside vehicle availability"));
    double time = std::max(t.start, v.start_open);
    std::size_t at = v.start_addr;
    double arc_cost = 0;
    for (int c : t.visits) {
      const Stop& st = stop_of(in, c);
      const Atf& a = in.arc(at, st.addr);
      arc_cost += a.cost().min_near(time, kNear);
      time = a.eval_relaxed(time);
      tc.arrivals.push_back(time);
      if (time > st.close + 1e-7) bad(str("tour ", k, ": visit ", c, " arrives at ", time, " after close ", st.close));
      arc_cost += st.penalty.min_near(time, kNear);
      time = std::max(time, st.open) + st.duration;
      at = st.addr;
    }
    const Atf& back = in.arc(at, v.end_addr);
    arc_cost += back.cost().min_near(time, kNear);
    time = back.eval_relaxed(time);
    if (time > v.return_by + 1e-7) bad(str("tour ", k, ": returns at ", time, " after ", v.return_by));
    const double duration = time - t.start;
    if (duration > v.max_duration + 1e-7) bad(str("tour ", k, ": duration ", duration, " exceeds the limit"));
    tc.cost = v.fixed_cost + arc_cost + in.model.overtime_cost(duration) + in.model.work_cost(t.start, time);

    auto atf = fold_tour(in, t);
    if (!atf) {
      bad(str("tour ", k, ": no feasible start time"));
      tc.optimal_cost = tc.cost;
    } else {
      tc.optimal_cost = v.fixed_cost + scheduler::optimal_start(*atf, in.model).total_cost;
      if (t.start <= atf->t_max() + 1e-9) {
        double folded = kInf;
        for (double dt : {-kNear, 0.0, kNear})
          folded = std::min(folded, v.fixed_cost + scheduler::total_cost(*atf, in.model, std::clamp(t.start + dt, atf->t_min(), atf->t_max())));
        if (t.start >= atf->t_min() && std::abs(folded - tc.cost) > 1e-6 * std::max(1.0, std::abs(tc.cost)))
          bad(str("tour ", k, ": folded cost ", folded, " disagrees with simulation ", tc.cost));
      }
    }
    if (std::abs(t.cost - tc.cost) > 1e-6 * std::max(1.0, std::abs(tc.cost)))
      bad(str("tour ", k, ": reported cost ", t.cost, " but recomputed ", tc.cost));
    r.cost += tc.cost;
    r.tours.push_back(tc);
  }
  std::vector<char> listed(n, 0);
  for (std::size_t u : s.unserved) {
    if (u >= n) {
      bad(str("unserved list has unknown item ", u));
      continue;
    }
    if (listed[u]) bad(str("item ", in.items[u].name, " listed as unserved twice"));
    listed[u] = 1;
    r.cost += in.items[u].unserved_penalty;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool served = tour_of_del[i] != -1;
    if (served && !in.items[i].preloaded && tour_of_pick[i] != tour_of_del[i])
      bad(str("item ", in.items[i].name, " picked up and delivered in different tours"));
    if (!served && tour_of_pick[i] != -1) bad(str("item ", in.items[i].name, " picked up but never delivered"));
    if (served == static_cast<bool>(listed[i]))
      bad(str("item ", in.items[i].name, served ? " served and listed as unserved" : " neither served nor listed"));
  }
  if (std::abs(r.cost - s.cost) > 1e-6 * std::max(1.0, std::abs(r.cost)))
    bad(str("reported total ", s.cost, " but recomputed ", r.cost));
  return r;
}

}  // namespace tdroute::solver
