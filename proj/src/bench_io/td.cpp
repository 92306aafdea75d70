#include "tdroute/bench_io/td.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "tdroute/plf/simplify.hpp"
#include "tdroute/scheduler/scheduler.hpp"

namespace tdroute::bench_io {

using solver::Item;
using solver::Stop;
using solver::Vehicle;

namespace {
constexpr double kHour = 3600;
constexpr double kDayStart = 15 * kHour;
constexpr double kWindowsEnd = 21 * kHour;
constexpr double kArcsEnd = 26 * kHour;  // last departure any arc accepts
constexpr double kNear = 1e-6;
}  // namespace

std::vector<SpeedProfile> default_profiles() {
  // 15:00 .. 22:00, evening peak around 17:00
  return {
      {{0.9, 0.65, 0.5, 0.6, 0.8, 0.95, 1.0}},
      {{1.0, 0.8, 0.7, 0.75, 0.9, 1.0, 1.0}},
      {{1.0, 0.95, 0.85, 0.9, 1.0, 1.0, 1.0}},
  };
}

std::vector<SpeedProfile> read_profiles(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0);
  std::vector<SpeedProfile> out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(f, line)) {
    ++ln;
    std::istringstream ls(line);
    SpeedProfile p;
    for (std::string w; ls >> w;) {
      char* end = nullptr;
      const double s = std::strtod(w.c_str(), &end);
      if (*end != '\0' || !(s > 0) || !std::isfinite(s)) throw ParseError("speed must be a positive number", ln, p.speed.size() + 1);
      p.speed.push_back(s);
    }
    if (!p.speed.empty()) out.push_back(std::move(p));
  }
  if (out.empty()) throw ParseError("no profiles", ln);
  return out;
}

Atf speed_atf(double free, const SpeedProfile& p, double ps, double hour, double from, double to) {
  const auto& s = p.speed;
  if (s.empty()) throw InvalidArgument("empty speed profile");
  if (free == 0 || std::all_of(s.begin(), s.end(), [&](double x) { return x == s[0]; }))
    return Atf::travel(from, to, free / s[0]);
  const std::size_t K = s.size();
  std::vector<double> cum(K + 1, 0.0);  // distance covered up to each slot boundary
  for (std::size_t k = 0; k < K; ++k) cum[k + 1] = cum[k] + s[k] * hour;
  auto F = [&](double t) {
    if (t <= ps) return s[0] * (t - ps);
    const double k = std::floor((t - ps) / hour);
    if (k >= static_cast<double>(K)) return cum[K] + s[K - 1] * (t - ps - static_cast<double>(K) * hour);
    const auto i = static_cast<std::size_t>(k);
    return cum[i] + s[i] * (t - ps - static_cast<double>(i) * hour);
  };
  auto Finv = [&](double y) {
    if (y <= 0) return ps + y / s[0];
    if (y >= cum[K]) return ps + static_cast<double>(K) * hour + (y - cum[K]) / s[K - 1];
    const auto i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), y) - cum.begin()) - 1;
    return ps + static_cast<double>(i) * hour + (y - cum[i]) / s[i];
  };
  std::vector<double> ts{from, to};
  for (std::size_t k = 0; k <= K; ++k) {
    const double b = ps + static_cast<double>(k) * hour;
    for (double t : {b, Finv(cum[k] - free)})
      if (t > from && t < to) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  std::vector<plf::Breakpoint> bps;
  for (double t : ts) {
    if (!bps.empty() && t - bps.back().t < EPS_T) continue;
    double a = Finv(F(t) + free);
    if (!bps.empty()) a = std::max(a, bps.back().v);  // rounding
    bps.push_back({t, std::max(a, t)});
  }
  return Atf(std::move(bps));
}

namespace {

double constant_travel(const Atf& a) {
  const auto b = a.travel_bounds();
  if (b.hi - b.lo > 1e-9 * std::max(1.0, b.hi)) throw InvalidArgument("base instance must have constant travel times");
  return a.breakpoints().front().v - a.t_min();
}

// simplified copy when that saves breakpoints
Atf fewer(const Atf& g) {
  Atf s = plf::simplify_default(g);
  return s.size() < g.size() ? s : g;
}

}  // namespace

Instance generate_td(const Instance& base, const std::vector<SpeedProfile>& profiles, std::uint64_t seed,
                     const TdOptions& opt) {
  if (profiles.empty()) throw InvalidArgument("no speed profiles");
  std::mt19937_64 rng(seed);
  const std::size_t A = base.addresses;
  std::vector<std::size_t> prof(A * A, 0);
  for (std::size_t p = 0; p < A; ++p)
    for (std::size_t q = p + 1; q < A; ++q) prof[p * A + q] = prof[q * A + p] = rng() % profiles.size();

  Instance out;
  if (!opt.delivery_day) {
    out = base;
    for (std::size_t p = 0; p < A; ++p) {
      for (std::size_t q = 0; q < A; ++q) {
        const Atf& a = base.arc(p, q);
        Atf g = speed_atf(constant_travel(a), profiles[prof[p * A + q]], opt.profile_start, opt.hour, a.t_min(), a.t_max());
        out.arc(p, q) = fewer(g).with_cost(a.cost());
      }
    }
    solver::compute_friends(out);
    return out;
  }

  out.name = base.name + "-td";
  out.addresses = A;
  out.depot = base.depot;
  out.horizon_start = kDayStart;
  out.horizon_end = kWindowsEnd;
  out.model = scheduler::CostModel::linear_duration(20.0, kHour);
  out.arcs.reserve(A * A);
  for (std::size_t p = 0; p < A; ++p) {
    for (std::size_t q = 0; q < A; ++q) {
      const double free = constant_travel(base.arc(p, q)) * opt.seconds_per_unit;
      out.arcs.push_back(fewer(speed_atf(free, profiles[prof[p * A + q]], kDayStart, kHour, kDayStart, kArcsEnd)));
    }
  }
  for (const auto& b : base.items) {
    Item it;
    it.name = b.name;
    it.preloaded = true;
    it.pickup.addr = base.depot;
    it.delivery.addr = b.delivery.addr;
    it.delivery.duration = 180;
    if (rng() % 2 == 0) {
      it.delivery.open = kDayStart + 1800 + 1800 * static_cast<double>(rng() % 10);
      it.delivery.close = it.delivery.open + kHour;
    } else {
      it.delivery.open = kDayStart + 1800;
      it.delivery.close = kWindowsEnd;
    }
    out.items.push_back(std::move(it));
  }
  Vehicle v;
  v.start_addr = v.end_addr = base.depot;
  v.fixed_cost = 200;
  v.start_open = kDayStart;
  v.start_close = kArcsEnd;
  v.return_by = kArcsEnd;
  out.vehicles.assign(std::max<std::size_t>(1, out.items.size()), v);
  out.check();
  solver::compute_friends(out);
  return out;
}

FlattenMode parse_flatten_mode(const std::string& s) {
  if (s == "worst") return FlattenMode::worst;
  if (s == "average") return FlattenMode::average;
  if (s == "mixed") return FlattenMode::mixed;
  throw InvalidArgument("flatten mode must be worst, average or mixed");
}

Instance flatten(const Instance& in, FlattenMode mode) {
  Instance out = in;
  for (auto& a : out.arcs) {
    const auto tb = a.travel_bounds();
    if (tb.hi - tb.lo <= 1e-9 * std::max(1.0, tb.hi)) continue;  // constant up to rounding
    const auto b = a.breakpoints();
    double worst = 0, area = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      worst = std::max(worst, b[i].v - b[i].t);
      if (i > 0) area += 0.5 * ((b[i - 1].v - b[i - 1].t) + (b[i].v - b[i].t)) * (b[i].t - b[i - 1].t);
    }
    const double span = a.t_max() - a.t_min();
    const double avg = span > 0 ? area / span : worst;
    const double d = mode == FlattenMode::worst ? worst : mode == FlattenMode::average ? avg : 0.5 * (worst + avg);
    a = Atf::travel(a.t_min(), a.t_max(), d, a.cost());
  }
  out.name = in.name + (mode == FlattenMode::worst ? "-worst" : mode == FlattenMode::average ? "-average" : "-mixed");
  return out;
}

std::vector<std::pair<double, double>> parse_brackets(const std::string& spec) {
  if (spec.empty() || spec == "none") return {};
  if (spec == "default") return {{15, 1}, {10, 2}, {5, 4}};
  if (spec == "aggressive") return {{15, 2}, {10, 4}, {5, 8}};
  std::vector<std::pair<double, double>> out;
  std::istringstream is(spec);
  for (std::string part; std::getline(is, part, ',');) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw InvalidArgument("soft windows: expected minutes:dollars, got '" + part + "'");
    try {
      out.push_back({std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
    } catch (const std::exception&) {
      throw InvalidArgument("soft windows: bad number in '" + part + "'");
    }
  }
  return out;
}

Instance with_soft_windows(const Instance& in, const std::vector<std::pair<double, double>>& brackets) {
  Instance out = in;
  if (brackets.empty()) return out;
  const double upm = in.model.units_per_hour / 60.0;
  auto soften = [&](Stop& s) {
    if (s.close >= kTimeBound / 2) return;
    s.penalty = s.penalty + scheduler::soft_window_penalty(s.close, brackets, upm);
  };
  for (auto& it : out.items) {
    if (!it.preloaded) soften(it.pickup);
    soften(it.delivery);
  }
  return out;
}

Evaluation evaluate_under(const Instance& in, const Solution& s, bool keep_start) {
  Evaluation e;
  const double upm = in.model.units_per_hour / 60.0;
  for (const auto& p : s.tours) {
    if (p.visits.empty()) continue;
    ++e.tours;
    const Vehicle& v = in.vehicles.at(p.vehicle);
    double t0 = p.start;
    if (!keep_start) {
      if (auto a = solver::fold_tour(in, p)) {
        t0 = scheduler::optimal_start(*a, in.model).t0;
        ++e.rescheduled;
      }
    }
    double t = std::max(t0, v.start_open), cost = v.fixed_cost;
    std::size_t at = v.start_addr;
    for (int c : p.visits) {
      const Stop& st = solver::stop_of(in, c);
      const Atf& arc = in.arc(at, st.addr);
      cost += arc.cost().min_near(t, kNear);
      const double arr = arc.eval_relaxed(t);
      cost += st.penalty.min_near(arr, kNear);
      const double begin = std::max(arr, st.open);
      ++e.visits;
      if (begin > st.close + 1e-7) {
        ++e.late;
        e.max_delay = std::max(e.max_delay, begin - st.close);
      } else {
        const double slack = (st.close - begin) / upm;
        if (slack < 5) ++e.slack[2];
        else if (slack < 10) ++e.slack[1];
        else if (slack < 15) ++e.slack[0];
      }
      t = begin + st.duration;
      at = st.addr;
    }
    const Atf& back = in.arc(at, v.end_addr);
    cost += back.cost().min_near(t, kNear);
    const double end = back.eval_relaxed(t);
    cost += in.model.overtime_cost(end - t0) + in.model.work_cost(t0, end);
    e.cost += cost;
  }
  for (std::size_t u : s.unserved) {
    e.cost += in.items.at(u).unserved_penalty;
    ++e.late;
  }
  return e;
}

}  // namespace tdroute::bench_io
