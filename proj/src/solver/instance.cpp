#include "tdroute/solver/instance.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tdroute/plf/ops.hpp"

namespace tdroute::solver {

void Instance::check() const {
  if (arcs.size() != addresses * addresses) throw InvalidArgument("arc matrix size does not match the address count");
  if (vehicles.empty()) throw InvalidArgument("instance has no vehicles");
  auto addr_ok = [&](std::size_t a) {
    if (a >= addresses) throw InvalidArgument("address index out of range");
  };
  for (const auto& v : vehicles) {
    addr_ok(v.start_addr);
    addr_ok(v.end_addr);
    if (v.start_close < v.start_open) throw InvalidArgument("vehicle availability is empty");
    if (!v.capacity.empty() && v.capacity.size() != vehicles.front().capacity.size())
      throw InvalidArgument("capacity dimensions differ between vehicles");
  }
  const std::size_t dims = vehicles.front().capacity.size();
  for (const auto& it : items) {
    addr_ok(it.pickup.addr);
    addr_ok(it.delivery.addr);
    for (const Stop* s : {&it.pickup, &it.delivery}) {
      if (s->close < s->open) throw InvalidArgument("empty time window for item " + it.name);
      if (s->duration < 0) throw InvalidArgument("negative duration for item " + it.name);
    }
    if (dims > 0 && it.demand.size() != dims) throw InvalidArgument("demand dimension mismatch for item " + it.name);
  }
  model.validate();
}

const Stop& stop_of(const Instance& in, int code) {
  const Item& it = in.items[item_of(code)];
  return is_delivery(code) ? it.delivery : it.pickup;
}

Atf stop_action(const Instance& in, const Stop& s, std::size_t next) {
  return plf::compose(Atf::window(s.open, s.close, s.duration, s.penalty), in.arc(s.addr, next));
}

Stop start_stop(const Vehicle& v) {
  Stop s;
  s.addr = v.start_addr;
  s.open = v.start_open;
  s.close = v.start_close;
  return s;
}

double lower_travel(const Instance& in, std::size_t p, std::size_t q) { return in.arc(p, q).travel_bounds().lo; }

namespace {

// earliest finish of a route through the stops in order, from the depot at
// time t; returns the total lower-bound travel, or +inf when a window is missed
double route_bound(const Instance& in, std::size_t depot, double t, std::span<const Stop* const> stops) {
  double travel = 0;
  std::size_t at = depot;
  for (const Stop* s : stops) {
    const double d = lower_travel(in, at, s->addr);
    t += d;
    travel += d;
    if (t > s->close + 1e-9) return kInf;
    t = std::max(t, s->open) + s->duration;
    at = s->addr;
  }
  return travel + lower_travel(in, at, depot);
}

double item_bound(const Instance& in, const Item& it, std::size_t depot, double t0, std::vector<const Stop*>& buf) {
  buf.clear();
  if (!it.preloaded) buf.push_back(&it.pickup);
  buf.push_back(&it.delivery);
  return route_bound(in, depot, t0, buf);
}

}  // namespace

void compute_friends(Instance& in, double ratio) {
  const std::size_t n = in.items.size();
  const Vehicle& v = in.vehicles.front();
  const std::size_t depot = v.start_addr;
  const double t0 = v.start_open;
  std::vector<double> alone(n);
  std::vector<const Stop*> buf;
  for (std::size_t i = 0; i < n; ++i) {
    alone[i] = item_bound(in, in.items[i], depot, t0, buf);
    in.items[i].friends.clear();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Item& a = in.items[i];
      const Item& b = in.items[j];
      double best = kInf;
      // a few natural orders; the pickup always precedes its delivery
      std::vector<std::vector<const Stop*>> orders;
      if (a.preloaded && b.preloaded) {
        orders = {{&a.delivery, &b.delivery}, {&b.delivery, &a.delivery}};
      } else {
        std::vector<const Stop*> pa, pb;
        if (!a.preloaded) pa.push_back(&a.pickup);
        if (!b.preloaded) pb.push_back(&b.pickup);
        auto cat = [](std::vector<const Stop*> x, std::initializer_list<const Stop*> y) {
          x.insert(x.end(), y.begin(), y.end());
          return x;
        };
        std::vector<const Stop*> both = pa;
        both.insert(both.end(), pb.begin(), pb.end());
        orders = {cat(both, {&a.delivery, &b.delivery}), cat(both, {&b.delivery, &a.delivery})};
        auto seq_ab = pa;
        seq_ab.push_back(&a.delivery);
        seq_ab.insert(seq_ab.end(), pb.begin(), pb.end());
        seq_ab.push_back(&b.delivery);
        auto seq_ba = pb;
        seq_ba.push_back(&b.delivery);
        seq_ba.insert(seq_ba.end(), pa.begin(), pa.end());
        seq_ba.push_back(&a.delivery);
        orders.push_back(seq_ab);
        orders.push_back(seq_ba);
      }
      for (auto& o : orders) best = std::min(best, route_bound(in, depot, t0, o));
      const double sep = alone[i] + alone[j];
      if (std::isfinite(best) && sep > 0 && best <= ratio * sep) {
        in.items[i].friends.push_back(j);
        in.items[j].friends.push_back(i);
      }
    }
  }
}

}  // namespace tdroute::solver
