#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>

#include "tdroute/solver/solver.hpp"

namespace tdroute::solver {

void Search::open_seed_tours(const std::vector<std::size_t>& seeds) {
  for (std::size_t u : seeds) {
    if (!is_unserved_[u]) continue;
    auto c = new_tour_insertion(u);
    if (c) apply(*c, u);
  }
}

double importance(const Instance& in, std::size_t item) {
  const Item& it = in.items[item];
  double remote = lower_travel(in, in.depot, it.delivery.addr);
  if (!it.preloaded) remote = std::min(remote, lower_travel(in, in.depot, it.pickup.addr));
  return it.unserved_penalty + remote;
}

std::vector<std::size_t> select_seeds(const Instance& in, std::size_t max_seeds) {
  const std::size_t n = in.items.size();
  std::vector<double> score(n);
  for (std::size_t u = 0; u < n; ++u) score[u] = importance(in, u);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<char> blocked(n, 0);
  std::vector<std::size_t> out;
  for (std::size_t u : order) {
    if (max_seeds > 0 && out.size() >= max_seeds) break;
    if (blocked[u]) continue;
    out.push_back(u);
    for (std::size_t f : in.items[u].friends) blocked[f] = 1;
    // friendship is read in both directions
    for (std::size_t v = 0; v < n; ++v) {
      const auto& fv = in.items[v].friends;
      if (std::find(fv.begin(), fv.end(), u) != fv.end()) blocked[v] = 1;
    }
  }
  return out;
}

namespace {

std::size_t capacity_bound(const Instance& in) {
  if (in.vehicles.empty() || in.vehicles.front().capacity.empty()) return 1;
  const auto& cap = in.vehicles.front().capacity;
  double k = 1;
  for (std::size_t d = 0; d < cap.size(); ++d) {
    double total = 0;
    for (const auto& it : in.items) total += d < it.demand.size() ? it.demand[d] : 0.0;
    if (cap[d] > 0) k = std::max(k, std::ceil(total / cap[d] - 1e-9));
  }
  return static_cast<std::size_t>(k);
}

void construct(Search& s, std::uint64_t seed, double noise, const Config& cfg) {
  const Instance& in = s.instance();
  std::mt19937_64 rng(seed);
  s.open_seed_tours(select_seeds(in, cfg.max_seeds ? cfg.max_seeds : capacity_bound(in)));
  s.regret_insert(rng, noise, cfg.ls_every);
}

}  // namespace

Solution regret_construct(const Instance& in, std::uint64_t seed, const Config& cfg) {
  Search s(in, cfg.levels);
  construct(s, seed, cfg.construct_noise, cfg);
  return s.solution();
}

Solution random_walk(const Instance& in, const Solution& start, std::uint64_t seed, std::size_t budget, int levels) {
  if (budget == 0) return start;
  Search s(in, levels);
  s.load(start);
  std::mt19937_64 rng(seed);
  s.random_walk(rng, budget, 0);
  return s.solution();
}

int default_workers() {
  if (const char* e = std::getenv("TDROUTE_THREADS")) {
    const int w = std::atoi(e);
    if (w > 0) return w;
  }
  return 1;
}

Solution solve(const Instance& in, const Config& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const int W = std::max(1, cfg.workers > 0 ? cfg.workers : default_workers());
  const std::size_t iters = cfg.iterations ? cfg.iterations : (cfg.high_effort ? 20000 : 4000);
  auto remaining = [&](double frac) {
    if (cfg.time_limit <= 0) return 0.0;
    const double used = std::chrono::duration<double>(clock::now() - t0).count();
    return std::max(1e-3, (cfg.time_limit - used) * frac);
  };

  std::mutex mu;
  Solution best;
  bool have = false;
  auto offer = [&](const Search& s) {
    const double c = s.cost();
    std::lock_guard<std::mutex> lock(mu);
    if (!have || c < best.cost) {
      best = s.solution();
      have = true;
    }
  };

  std::vector<std::optional<Search>> searches(static_cast<std::size_t>(W));
  std::vector<std::mt19937_64> rngs;
  for (int w = 0; w < W; ++w) rngs.emplace_back(cfg.seed + 7919ULL * static_cast<std::uint64_t>(w));

  auto phase1 = [&](int w) {
    auto& s = searches[static_cast<std::size_t>(w)];
    s.emplace(in, cfg.levels);
    const double noise = w == 0 ? cfg.construct_noise : cfg.construct_noise + 0.1;
    construct(*s, cfg.seed + 7919ULL * static_cast<std::uint64_t>(w), noise, cfg);
    if (!cfg.construct_only) {
      for (int k = 0; k < 100 && s->local_search_pass(); ++k) {
      }
      offer(*s);
      s->random_walk(rngs[static_cast<std::size_t>(w)], iters / 2, remaining(0.5), [&](Search& me) { offer(me); });
    }
    offer(*s);
  };
  auto phase2 = [&](int w) {
    auto& s = *searches[static_cast<std::size_t>(w)];
    Solution start;
    {
      std::lock_guard<std::mutex> lock(mu);
      start = best;
    }
    s.load(start);
    s.random_walk(rngs[static_cast<std::size_t>(w)], iters - iters / 2, remaining(1.0), [&](Search& me) { offer(me); });
    offer(s);
  };
  auto run = [&](auto&& fn) {
    if (W == 1) {
      fn(0);
      return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < W; ++w) pool.emplace_back(fn, w);
    for (auto& th : pool) th.join();
  };

  run(phase1);
  if (!cfg.construct_only) run(phase2);
  return best;
}

}  // namespace tdroute::solver
