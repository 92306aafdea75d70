#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdroute/plf/ops.hpp"
#include "tdroute/solver/solver.hpp"

namespace tdroute::solver {

using touratf::Part;
using touratf::Range;

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);
constexpr double kTol = 1e-7;
constexpr double kImprove = 1e-9;
std::uint64_t next_version() {
  static thread_local std::uint64_t v = 0;
  return ++v;
}

// last t with a(t) <= L, or -inf
double last_at_most(const Atf& a, double L) {
  auto b = a.breakpoints();
  if (b.back().v <= L) return b.back().t;
  if (b.front().v > L) return -kInf;
  std::size_t lo = 0, hi = b.size() - 1;  // b[lo].v <= L < b[hi].v
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (b[mid].v <= L ? lo : hi) = mid;
  }
  const double t = b[lo].t + (L - b[lo].v) * (b[hi].t - b[lo].t) / (b[hi].v - b[lo].v);
  return std::clamp(t, b[lo].t, b[hi].t);
}

}  // namespace

Search::Search(const Instance& in, int levels) : in_(&in), levels_(levels) {
  const std::size_t n = in.items.size(), V = in.vehicles.size(), A = in.addresses;
  cache_.resize((2 * n + V) * A);
  is_unserved_.assign(n, 1);
  tour_of_.assign(n, npos);
  unserved_.resize(n);
  std::iota(unserved_.begin(), unserved_.end(), 0);
  lb_.resize(A * A);
  for (std::size_t p = 0; p < A; ++p)
    for (std::size_t q = 0; q < A; ++q) lb_[p * A + q] = in.arc(p, q).travel_bounds().lo;
  for (const auto& v : in.vehicles) starts_.push_back(start_stop(v));

  bool zero_model = in.model.work_rate.is_zero();
  for (const auto& p : in.model.overtime) zero_model = zero_model && p.y == 0;
  static_costs_ = zero_model;
  for (const auto& a : in.arcs) static_costs_ = static_costs_ && a.cost().is_constant();
  for (const auto& it : in.items)
    static_costs_ = static_costs_ && it.pickup.penalty.is_zero() && it.delivery.penalty.is_zero();

  tours_.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    tours_[v].vehicle = v;
    rebuild(tours_[v]);
  }
}

const Stop& Search::stop_by_id(std::size_t id) const {
  const std::size_t n2 = 2 * in_->items.size();
  return id < n2 ? stop_of(*in_, static_cast<int>(id)) : starts_[id - n2];
}

const Atf& Search::act(std::size_t id, std::size_t next) {
  auto& slot = cache_[id * in_->addresses + next];
  if (!slot) slot = stop_action(*in_, stop_by_id(id), next);
  return *slot;
}

std::size_t Search::pos_addr(const Tour& t, std::size_t x) const {
  if (x == 0) return in_->vehicles[t.vehicle].start_addr;
  if (x == t.m() + 1) return in_->vehicles[t.vehicle].end_addr;
  return stop_of(*in_, t.visits[x - 1]).addr;
}

const Stop& Search::pos_stop(const Tour& t, std::size_t x) const {
  return x == 0 ? starts_[t.vehicle] : stop_of(*in_, t.visits[x - 1]);
}

std::size_t Search::el_stop(const Tour& t, const El& e) const {
  if (e.old < 0) return static_cast<std::size_t>(e.code);
  if (e.old == 0) return start_id(t.vehicle);
  return static_cast<std::size_t>(t.visits[static_cast<std::size_t>(e.old) - 1]);
}

std::size_t Search::el_addr(const Tour& t, const El& e) const {
  return e.old < 0 ? stop_of(*in_, e.code).addr : pos_addr(t, static_cast<std::size_t>(e.old));
}

void Search::touch(Tour& t) {
  if (!journaling_ || saved_[t.vehicle]) return;
  saved_[t.vehicle] = 1;
  journal_.push_back(t);
}

void Search::rebuild(Tour& t) {
  const std::size_t m = t.m();
  std::vector<Atf> acts;
  acts.reserve(m + 2);
  for (std::size_t x = 1; x <= m + 1; ++x) {
    const std::size_t id = x == 1 ? start_id(t.vehicle) : static_cast<std::size_t>(t.visits[x - 2]);
    acts.push_back(act(id, pos_addr(t, x)));
  }
  acts.push_back(Atf::identity(in_->vehicles[t.vehicle].return_by));
  t.store.emplace(std::move(acts), levels_);
  refresh(t);
}

std::optional<std::pair<double, double>> Search::schedule(const Tour& t, const Atf& a) const {
  const Vehicle& v = in_->vehicles[t.vehicle];
  auto r = scheduler::optimal_start(a, in_->model);
  if (std::isfinite(v.max_duration) && a(r.t0) - r.t0 > v.max_duration + kTol) return std::nullopt;
  return std::make_pair(v.fixed_cost + r.total_cost, r.t0);
}

void Search::refresh(Tour& t) {
  const std::size_t m = t.m(), n = m + 2;
  const auto& s = *t.store;
  t.version = next_version();
  t.feasible = true;
  if (m == 0) {
    t.cost = 0;
    t.start = in_->vehicles[t.vehicle].start_open;
  } else {
    auto a = s.try_query(0, n);
    std::optional<std::pair<double, double>> sc;
    if (a) sc = schedule(t, *a);
    if (!sc) {
      t.feasible = false;
      t.cost = kInf;
      return;
    }
    t.cost = sc->first;
    t.start = sc->second;
  }
  t.earliest.assign(m + 2, 0.0);
  t.latest.assign(m + 2, 0.0);
  double e = s.action(1).t_min();
  t.earliest[0] = e;
  for (std::size_t x = 1; x <= m + 1; ++x) {
    const Atf& a = s.action(x);
    e = a(std::min(e, a.t_max()));
    t.earliest[x] = e;
  }
  double l = in_->vehicles[t.vehicle].return_by;
  t.latest[m + 1] = l;
  for (std::size_t x = m + 1; x >= 1; --x) {
    l = last_at_most(s.action(x), l);
    t.latest[x - 1] = l;
  }
  const auto& cap = in_->vehicles[t.vehicle].capacity;
  const std::size_t dims = cap.size();
  t.load.assign(m + 1, std::vector<double>(dims, 0.0));
  if (dims > 0) {
    for (int c : t.visits) {
      const Item& it = in_->items[item_of(c)];
      if (it.preloaded)
        for (std::size_t d = 0; d < dims; ++d) t.load[0][d] += it.demand[d];
    }
    for (std::size_t x = 1; x <= m; ++x) {
      const int c = t.visits[x - 1];
      const Item& it = in_->items[item_of(c)];
      const double sgn = (it.preloaded || is_delivery(c)) ? -1.0 : 1.0;
      for (std::size_t d = 0; d < dims; ++d) t.load[x][d] = t.load[x - 1][d] + sgn * it.demand[d];
    }
  }
}

std::optional<std::pair<double, double>> Search::eval_seq(const Tour& t, const std::vector<El>& seq) {
  ++stats_.evaluations;
  if (seq.size() == 2) return std::make_pair(0.0, in_->vehicles[t.vehicle].start_open);
  const std::size_t m = t.m();
  std::vector<Part> parts;
  parts.reserve(seq.size() + 2);
  std::size_t run = 0;  // old position where the current run of kept actions starts
  for (std::size_t q = 1; q < seq.size(); ++q) {
    const El& u = seq[q - 1];
    const El& w = seq[q];
    if (u.old >= 0 && w.old == u.old + 1) continue;
    if (u.old >= 0 && static_cast<std::size_t>(u.old) > run) parts.push_back(Range{run, static_cast<std::size_t>(u.old)});
    parts.push_back(&act(el_stop(t, u), el_addr(t, w)));
    if (w.old >= 0) run = static_cast<std::size_t>(w.old);
  }
  parts.push_back(Range{run, m + 2});
  auto a = t.store->eval_splice(parts);
  if (!a) return std::nullopt;
  return schedule(t, *a);
}

double Search::static_cost(const Tour& t, const std::vector<El>& seq) const {
  if (seq.size() == 2) return 0.0;
  double c = in_->vehicles[t.vehicle].fixed_cost;
  for (std::size_t q = 1; q < seq.size(); ++q)
    c += in_->arc(el_addr(t, seq[q - 1]), el_addr(t, seq[q])).cost().pieces()[0].c;
  return c;
}

bool Search::capacity_ok(const Tour& t, const std::vector<El>& seq) const {
  const auto& cap = in_->vehicles[t.vehicle].capacity;
  const std::size_t dims = cap.size();
  if (dims == 0) return true;
  std::vector<double> load(dims, 0.0);
  auto code_of = [&](const El& e) { return e.old < 0 ? e.code : t.visits[static_cast<std::size_t>(e.old) - 1]; };
  for (std::size_t q = 1; q + 1 < seq.size(); ++q) {
    const Item& it = in_->items[item_of(code_of(seq[q]))];
    if (it.preloaded)
      for (std::size_t d = 0; d < dims; ++d) load[d] += it.demand[d];
  }
  for (std::size_t d = 0; d < dims; ++d)
    if (load[d] > cap[d] + 1e-9) return false;
  for (std::size_t q = 1; q + 1 < seq.size(); ++q) {
    const int c = code_of(seq[q]);
    const Item& it = in_->items[item_of(c)];
    const double sgn = (it.preloaded || is_delivery(c)) ? -1.0 : 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      load[d] += sgn * it.demand[d];
      if (load[d] > cap[d] + 1e-9) return false;
    }
  }
  return true;
}

bool Search::chain_may_fit(const Tour& t, std::size_t x, const std::vector<int>& chain, std::size_t y) const {
  const Stop& s0 = pos_stop(t, x);
  double dep = std::max(t.earliest[x], s0.open) + s0.duration;
  std::size_t at = pos_addr(t, x);
  const std::size_t A = in_->addresses;
  for (int c : chain) {
    const Stop& s = stop_of(*in_, c);
    const double arr = dep + lb_[at * A + s.addr];
    if (arr > s.close + kTol) return false;
    dep = std::max(arr, s.open) + s.duration;
    at = s.addr;
  }
  return dep + lb_[at * A + pos_addr(t, y)] <= t.latest[y] + kTol;
}

Candidate Search::cheapest_insertion(std::size_t vehicle, std::size_t item, bool prune) {
  Tour& t = tours_[vehicle];
  const Item& it = in_->items[item];
  const std::size_t m = t.m();
  const auto& cap = in_->vehicles[vehicle].capacity;
  const std::size_t dims = cap.size();
  const int pc = pickup_code(item), dc = delivery_code(item);
  Candidate best;
  best.vehicle = vehicle;
  if (!t.feasible) return best;

  struct Option {
    std::size_t i, j;
    double key;
  };
  std::vector<Option> opts;
  auto fits = [&](const std::vector<double>& load) {
    for (std::size_t d = 0; d < dims; ++d)
      if (load[d] + it.demand[d] > cap[d] + 1e-9) return false;
    return true;
  };
  auto seq_for = [&](std::size_t i, std::size_t j) {
    std::vector<El> seq;
    seq.reserve(m + 4);
    for (std::size_t x = 0; x <= m + 1; ++x) {
      if (!it.preloaded && x == i) seq.push_back({-1, pc});
      if (x == j) seq.push_back({-1, dc});
      seq.push_back({static_cast<int>(x), 0});
    }
    return seq;
  };

  if (it.preloaded) {
    std::vector<double> run(dims, -kInf);
    for (std::size_t j = 1; j <= m + 1; ++j) {
      for (std::size_t d = 0; d < dims; ++d) run[d] = std::max(run[d], t.load[j - 1][d]);
      if (dims > 0 && !fits(run)) break;
      if (prune && !chain_may_fit(t, j - 1, {dc}, j)) {
        ++stats_.pruned;
        continue;
      }
      opts.push_back({j, j, 0.0});
    }
  } else {
    for (std::size_t i = 1; i <= m + 1; ++i) {
      if (prune && !chain_may_fit(t, i - 1, {pc}, i) && !chain_may_fit(t, i - 1, {pc, dc}, i)) {
        ++stats_.pruned;
        continue;
      }
      std::vector<double> run(dims, -kInf);
      for (std::size_t j = i; j <= m + 1; ++j) {
        for (std::size_t d = 0; d < dims; ++d) run[d] = std::max(run[d], t.load[j - 1][d]);
        if (dims > 0 && !fits(run)) break;
        if (prune) {
          const bool ok = i == j ? chain_may_fit(t, i - 1, {pc, dc}, i)
                                 : chain_may_fit(t, i - 1, {pc}, i) && chain_may_fit(t, j - 1, {dc}, j);
          if (!ok) {
            ++stats_.pruned;
            continue;
          }
        }
        opts.push_back({i, j, 0.0});
      }
    }
  }
  if (static_costs_) {
    for (auto& o : opts) o.key = static_cost(t, seq_for(o.i, o.j));
    std::stable_sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) { return a.key < b.key; });
  }
  for (const auto& o : opts) {
    if (static_costs_ && best.feasible && o.key >= best.cost - kImprove) break;
    auto r = eval_seq(t, seq_for(o.i, o.j));
    if (!r) continue;
    if (!best.feasible || r->first < best.cost - kImprove) {
      best.feasible = true;
      best.cost = r->first;
      best.i = o.i;
      best.j = o.j;
    }
  }
  if (best.feasible) best.delta = best.cost - t.cost;
  return best;
}

void Search::apply(const Candidate& c, std::size_t item) {
  Tour& t = tours_[c.vehicle];
  touch(t);
  const Item& it = in_->items[item];
  const int pc = pickup_code(item), dc = delivery_code(item);
  if (t.empty()) {
    std::vector<int> v;
    if (!it.preloaded) v.push_back(pc);
    v.push_back(dc);
    t.visits = std::move(v);
    rebuild(t);
  } else {
    auto& s = *t.store;
    const std::size_t i = c.i, j = c.j;
    auto id_at = [&](std::size_t x) { return x == 0 ? start_id(t.vehicle) : static_cast<std::size_t>(t.visits[x - 1]); };
    const std::size_t da = it.delivery.addr;
    if (it.preloaded) {
      s.update_action(j, act(id_at(j - 1), da));
      s.insert_action(j + 1, act(static_cast<std::size_t>(dc), pos_addr(t, j)));
      t.visits.insert(t.visits.begin() + static_cast<std::ptrdiff_t>(j - 1), dc);
    } else if (i == j) {
      s.update_action(i, act(id_at(i - 1), it.pickup.addr));
      s.insert_action(i + 1, act(static_cast<std::size_t>(pc), da));
      s.insert_action(i + 2, act(static_cast<std::size_t>(dc), pos_addr(t, i)));
      t.visits.insert(t.visits.begin() + static_cast<std::ptrdiff_t>(i - 1), {pc, dc});
    } else {
      s.update_action(j, act(id_at(j - 1), da));
      s.insert_action(j + 1, act(static_cast<std::size_t>(dc), pos_addr(t, j)));
      s.update_action(i, act(id_at(i - 1), it.pickup.addr));
      s.insert_action(i + 1, act(static_cast<std::size_t>(pc), pos_addr(t, i)));
      t.visits.insert(t.visits.begin() + static_cast<std::ptrdiff_t>(j - 1), dc);
      t.visits.insert(t.visits.begin() + static_cast<std::ptrdiff_t>(i - 1), pc);
    }
    refresh(t);
  }
  tour_of_[item] = c.vehicle;
  is_unserved_[item] = 0;
  unserved_.erase(std::remove(unserved_.begin(), unserved_.end(), item), unserved_.end());
}

void Search::set_visits(Tour& t, std::vector<int> visits) {
  touch(t);
  t.visits = std::move(visits);
  for (int c : t.visits) tour_of_[item_of(c)] = t.vehicle;
  rebuild(t);
}

void Search::mark_unserved(std::size_t item) {
  if (is_unserved_[item]) return;
  is_unserved_[item] = 1;
  tour_of_[item] = npos;
  unserved_.push_back(item);
}

void Search::remove_items(const std::vector<std::size_t>& items) {
  std::vector<char> drop(in_->items.size(), 0), changed(tours_.size(), 0);
  for (std::size_t u : items) {
    if (is_unserved_[u]) continue;
    drop[u] = 1;
    changed[tour_of_[u]] = 1;
  }
  for (std::size_t v = 0; v < tours_.size(); ++v) {
    if (!changed[v]) continue;
    Tour& t = tours_[v];
    std::vector<int> keep;
    for (int c : t.visits)
      if (!drop[item_of(c)]) keep.push_back(c);
    set_visits(t, std::move(keep));
    if (!t.feasible) {
      // removing stops made the rest late (travel times without the
      // triangle inequality); give up the whole tour
      for (int c : t.visits) drop[item_of(c)] = 1;
      t.visits.clear();
      rebuild(t);
    }
  }
  for (std::size_t u = 0; u < drop.size(); ++u)
    if (drop[u]) mark_unserved(u);
}

std::optional<Candidate> Search::new_tour_insertion(std::size_t item) {
  for (std::size_t v = 0; v < tours_.size(); ++v) {
    if (tours_[v].empty()) {
      Candidate c = cheapest_insertion(v, item);
      if (!c.feasible) return std::nullopt;
      return c;
    }
  }
  return std::nullopt;
}

std::size_t Search::used_tours() const {
  std::size_t k = 0;
  for (const auto& t : tours_) k += !t.empty();
  return k;
}

double Search::cost() const {
  double c = 0;
  for (const auto& t : tours_) c += t.cost;
  for (std::size_t u : unserved_) c += in_->items[u].unserved_penalty;
  return c;
}

Solution Search::solution() const {
  Solution s;
  for (const auto& t : tours_) {
    if (t.empty()) continue;
    s.tours.push_back({t.vehicle, t.visits, t.start, t.cost});
  }
  s.unserved = unserved_;
  std::sort(s.unserved.begin(), s.unserved.end());
  s.cost = cost();
  return s;
}

void Search::load(const Solution& s) {
  for (auto& t : tours_) {
    if (!t.empty()) {
      touch(t);
      t.visits.clear();
      rebuild(t);
    }
  }
  std::fill(tour_of_.begin(), tour_of_.end(), npos);
  std::fill(is_unserved_.begin(), is_unserved_.end(), 1);
  for (const auto& p : s.tours) {
    set_visits(tours_[p.vehicle], p.visits);
    for (int c : p.visits) is_unserved_[item_of(c)] = 0;
  }
  unserved_.clear();
  for (std::size_t u = 0; u < is_unserved_.size(); ++u)
    if (is_unserved_[u]) unserved_.push_back(u);
}

std::optional<double> Search::sequence_cost(std::size_t vehicle, const std::vector<int>& visits) {
  Tour t;
  t.vehicle = vehicle;
  t.visits = visits;
  std::vector<El> seq{{0, 0}};
  for (int c : visits) seq.push_back({-1, c});
  seq.push_back({static_cast<int>(visits.size()) + 1, 0});
  if (!capacity_ok(t, seq)) return std::nullopt;
  rebuild(t);
  if (!t.feasible) return std::nullopt;
  return t.cost;
}

}  // namespace tdroute::solver
