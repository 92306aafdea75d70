#include <algorithm>
#include <chrono>
#include <cmath>

#include "tdroute/solver/solver.hpp"

namespace tdroute::solver {

namespace {
constexpr std::size_t npos = static_cast<std::size_t>(-1);
constexpr double kImprove = 1e-9;
constexpr double kNoVehicle = 1e6;
constexpr std::size_t kMaxBlockItems = 3;
}  // namespace

void Search::begin_journal() {
  journaling_ = true;
  saved_.assign(tours_.size(), 0);
  journal_.clear();
  saved_unserved_ = unserved_;
}

void Search::rollback() {
  journaling_ = false;
  for (auto& t : journal_) {
    const std::size_t v = t.vehicle;
    tours_[v] = std::move(t);
  }
  journal_.clear();
  unserved_ = saved_unserved_;
  std::fill(is_unserved_.begin(), is_unserved_.end(), 0);
  for (std::size_t u : unserved_) {
    is_unserved_[u] = 1;
    tour_of_[u] = npos;
  }
  for (const auto& t : tours_)
    for (int c : t.visits) tour_of_[item_of(c)] = t.vehicle;
}

const Candidate& Search::cached(std::size_t item, std::size_t vehicle) {
  const std::size_t V = tours_.size();
  if (ins_cache_.empty()) ins_cache_.resize(in_->items.size() * V);
  Cached& c = ins_cache_[item * V + vehicle];
  if (c.version != tours_[vehicle].version) {
    c.c = cheapest_insertion(vehicle, item);
    c.version = tours_[vehicle].version;
  }
  return c.c;
}

std::vector<double> Search::regrets() {
  std::vector<double> out;
  std::vector<std::size_t> open;
  std::size_t free_v = npos;
  for (std::size_t v = 0; v < tours_.size(); ++v) {
    if (!tours_[v].empty()) open.push_back(v);
    else if (free_v == npos) free_v = v;
  }
  for (std::size_t u : unserved_) {
    double sentinel = kNoVehicle, best = kInf, sum = 0;
    if (free_v != npos) {
      const Candidate& nc = cached(u, free_v);
      if (nc.feasible) sentinel = best = nc.delta;
    }
    for (std::size_t v : open) {
      const Candidate& c = cached(u, v);
      const double val = c.feasible ? c.delta : sentinel;
      if (c.feasible) best = std::min(best, c.delta);
      sum += val;
    }
    out.push_back(open.empty() || !std::isfinite(best) ? 0.0 : sum / static_cast<double>(open.size()) - best);
  }
  return out;
}

std::optional<std::size_t> Search::regret_step(std::mt19937_64& rng, double noise) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::size_t> open;
  std::size_t free_v = npos;
  for (std::size_t v = 0; v < tours_.size(); ++v) {
    if (!tours_[v].empty()) open.push_back(v);
    else if (free_v == npos) free_v = v;
  }
  std::vector<std::size_t> pending = unserved_;
  std::sort(pending.begin(), pending.end());
  std::size_t pick = npos;
  double pick_regret = -kInf, pick_val = kInf;
  Candidate pick_c;
  for (std::size_t u : pending) {
    double sentinel = kNoVehicle, best = kInf, sum = 0;
    Candidate bc;
    if (free_v != npos) {
      const Candidate& nc = cached(u, free_v);
      if (nc.feasible) {
        sentinel = best = nc.delta;
        bc = nc;
      }
    }
    for (std::size_t v : open) {
      const Candidate& c = cached(u, v);
      if (c.feasible) {
        sum += c.delta;
        if (c.delta < best - kImprove) {
          best = c.delta;
          bc = c;
        }
      } else {
        sum += sentinel;
      }
    }
    if (!bc.feasible) continue;  // fits nowhere, stays unserved
    double regret = open.empty() ? 0.0 : sum / static_cast<double>(open.size()) - best;
    if (noise > 0) regret *= 1.0 + noise * unit(rng);
    const bool better = regret > pick_regret + 1e-12 ||
                        (std::abs(regret - pick_regret) <= 1e-12 && best < pick_val - 1e-12);
    if (better) {
      pick = u;
      pick_regret = regret;
      pick_val = best;
      pick_c = bc;
    }
  }
  if (pick == npos) return std::nullopt;
  apply(pick_c, pick);
  return pick;
}

void Search::regret_insert(std::mt19937_64& rng, double noise, std::size_t ls_every) {
  std::size_t inserted = 0;
  while (regret_step(rng, noise)) {
    if (ls_every > 0 && ++inserted % ls_every == 0) local_search_pass();
  }
}

std::vector<std::vector<int>> Search::blocks_of(const Tour& t, std::size_t a) const {
  std::vector<std::vector<int>> out;
  std::vector<int> blk;
  std::vector<std::size_t> items;
  std::size_t open_pd = 0;
  for (std::size_t x = a; x <= t.m(); ++x) {
    const int c = t.visits[x - 1];
    const std::size_t u = item_of(c);
    const Item& it = in_->items[u];
    if (it.preloaded) {
      items.push_back(u);
    } else if (!is_delivery(c)) {
      items.push_back(u);
      ++open_pd;
    } else {
      if (std::find(items.begin(), items.end(), u) == items.end()) break;  // its pickup is outside
      --open_pd;
    }
    if (items.size() > kMaxBlockItems) break;
    blk.push_back(c);
    if (open_pd == 0) out.push_back(blk);
  }
  return out;
}

bool Search::reversible(const std::vector<int>& block) const {
  for (int c : block)
    if (!in_->items[item_of(c)].preloaded) return false;
  return true;
}

std::vector<std::vector<char>> Search::related() const {
  const std::size_t V = tours_.size();
  std::vector<std::vector<char>> rel(V, std::vector<char>(V, 0));
  for (const auto& t : tours_) {
    for (int c : t.visits) {
      for (std::size_t f : in_->items[item_of(c)].friends) {
        if (tour_of_[f] != npos) rel[t.vehicle][tour_of_[f]] = 1;
      }
    }
  }
  return rel;
}

namespace {

bool befriended(const Instance& in, const std::vector<int>& blk, int code) {
  const std::size_t v = item_of(code);
  for (int c : blk) {
    const auto& f = in.items[item_of(c)].friends;
    if (std::binary_search(f.begin(), f.end(), v)) return true;
  }
  return false;
}

std::vector<std::vector<int>> orientations(const std::vector<int>& blk, bool rev) {
  std::vector<std::vector<int>> o{blk};
  if (rev && blk.size() > 1) o.emplace_back(blk.rbegin(), blk.rend());
  return o;
}

}  // namespace

bool Search::relocate(std::size_t va, std::size_t vb) {
  Tour& A = tours_[va];
  Tour& B = tours_[vb];
  if (A.empty() || B.empty() || va == vb) return false;
  const std::size_t mA = A.m(), mB = B.m();
  for (std::size_t a = 1; a <= mA; ++a) {
    for (const auto& blk : blocks_of(A, a)) {
      const std::size_t b = a + blk.size() - 1;
      std::vector<El> sa;
      for (std::size_t x = 0; x <= mA + 1; ++x)
        if (x < a || x > b) sa.push_back({static_cast<int>(x), 0});
      double ca;
      if (static_costs_) {
        ca = static_cost(A, sa);
        if (ca - A.cost >= -kImprove) continue;
      }
      auto ra = eval_seq(A, sa);
      if (!ra) continue;
      ca = ra->first;
      const double dA = ca - A.cost;
      if (dA >= -kImprove) continue;
      for (std::size_t g = 1; g <= mB + 1; ++g) {
        if (mB > 2) {
          const bool near = (g >= 2 && befriended(*in_, blk, B.visits[g - 2])) || (g <= mB && befriended(*in_, blk, B.visits[g - 1]));
          if (!near) continue;
        }
        for (const auto& o : orientations(blk, reversible(blk))) {
          if (!B.feasible || !chain_may_fit(B, g - 1, o, g)) continue;
          std::vector<El> sb;
          for (std::size_t x = 0; x <= mB + 1; ++x) {
            if (x == g)
              for (int c : o) sb.push_back({-1, c});
            sb.push_back({static_cast<int>(x), 0});
          }
          if (!capacity_ok(B, sb)) continue;
          if (static_costs_ && dA + static_cost(B, sb) - B.cost >= -kImprove) continue;
          auto rb = eval_seq(B, sb);
          if (!rb || dA + rb->first - B.cost >= -kImprove) continue;
          std::vector<int> na, nb;
          for (std::size_t x = 1; x <= mA; ++x)
            if (x < a || x > b) na.push_back(A.visits[x - 1]);
          nb = B.visits;
          nb.insert(nb.begin() + static_cast<std::ptrdiff_t>(g - 1), o.begin(), o.end());
          set_visits(B, std::move(nb));
          set_visits(A, std::move(na));
          return true;
        }
      }
    }
  }
  return false;
}

bool Search::segment_swap(std::size_t va, std::size_t vb) {
  Tour& A = tours_[va];
  Tour& B = tours_[vb];
  if (A.empty() || B.empty() || va == vb) return false;
  const std::size_t mA = A.m(), mB = B.m();
  // best replacement of positions [x, y] of t by one orientation of blk
  auto best_fill = [&](Tour& t, std::size_t x, std::size_t y, const std::vector<int>& blk, std::vector<int>& chosen) {
    double best = kInf;
    for (const auto& o : orientations(blk, reversible(blk))) {
      if (!chain_may_fit(t, x - 1, o, y + 1)) continue;
      std::vector<El> s;
      for (std::size_t p = 0; p <= t.m() + 1; ++p) {
        if (p == x)
          for (int c : o) s.push_back({-1, c});
        if (p < x || p > y) s.push_back({static_cast<int>(p), 0});
      }
      if (!capacity_ok(t, s)) continue;
      if (static_costs_ && static_cost(t, s) >= best - kImprove) continue;
      auto r = eval_seq(t, s);
      if (r && r->first < best - kImprove) {
        best = r->first;
        chosen = o;
      }
    }
    return best;
  };
  for (std::size_t a = 1; a <= mA; ++a) {
    for (const auto& X : blocks_of(A, a)) {
      const std::size_t b = a + X.size() - 1;
      for (std::size_t c = 1; c <= mB; ++c) {
        for (const auto& Y : blocks_of(B, c)) {
          bool fr = false;
          for (int y : Y) fr = fr || befriended(*in_, X, y);
          if (!fr) continue;
          const std::size_t d = c + Y.size() - 1;
          std::vector<int> oy, ox;
          const double na = best_fill(A, a, b, Y, oy);
          if (!std::isfinite(na)) continue;
          const double nb = best_fill(B, c, d, X, ox);
          if (!std::isfinite(nb)) continue;
          if (na + nb >= A.cost + B.cost - kImprove) continue;
          std::vector<int> va2(A.visits.begin(), A.visits.begin() + static_cast<std::ptrdiff_t>(a - 1));
          va2.insert(va2.end(), oy.begin(), oy.end());
          va2.insert(va2.end(), A.visits.begin() + static_cast<std::ptrdiff_t>(b), A.visits.end());
          std::vector<int> vb2(B.visits.begin(), B.visits.begin() + static_cast<std::ptrdiff_t>(c - 1));
          vb2.insert(vb2.end(), ox.begin(), ox.end());
          vb2.insert(vb2.end(), B.visits.begin() + static_cast<std::ptrdiff_t>(d), B.visits.end());
          set_visits(A, std::move(va2));
          set_visits(B, std::move(vb2));
          return true;
        }
      }
    }
  }
  return false;
}

bool Search::intra_relocate(std::size_t v) {
  Tour& T = tours_[v];
  const std::size_t m = T.m();
  if (m < 2) return false;
  for (std::size_t a = 1; a <= m; ++a) {
    for (const auto& blk : blocks_of(T, a)) {
      const std::size_t b = a + blk.size() - 1;
      std::vector<int> rest;  // old positions without the block
      for (std::size_t x = 0; x <= m + 1; ++x)
        if (x < a || x > b) rest.push_back(static_cast<int>(x));
      for (std::size_t h = 1; h < rest.size(); ++h) {
        if (rest[h - 1] == static_cast<int>(a) - 1) continue;  // original place
        for (const auto& o : orientations(blk, reversible(blk))) {
          std::vector<El> s;
          for (std::size_t q = 0; q < rest.size(); ++q) {
            if (q == h)
              for (int c : o) s.push_back({-1, c});
            s.push_back({rest[q], 0});
          }
          if (!capacity_ok(T, s)) continue;
          if (static_costs_ && static_cost(T, s) >= T.cost - kImprove) continue;
          auto r = eval_seq(T, s);
          if (!r || r->first >= T.cost - kImprove) continue;
          std::vector<int> nv;
          for (const auto& e : s) {
            if (e.old < 0) nv.push_back(e.code);
            else if (e.old >= 1 && e.old <= static_cast<int>(m)) nv.push_back(T.visits[static_cast<std::size_t>(e.old) - 1]);
          }
          set_visits(T, std::move(nv));
          return true;
        }
      }
    }
  }
  return false;
}

bool Search::local_search_pass() {
  bool any = false;
  auto rel = related();
  std::vector<std::size_t> used;
  for (const auto& t : tours_)
    if (!t.empty()) used.push_back(t.vehicle);
  for (std::size_t va : used) {
    for (std::size_t vb : used) {
      if (va == vb || !rel[va][vb]) continue;
      for (int k = 0; k < 50 && relocate(va, vb); ++k) any = true;
    }
  }
  for (std::size_t x = 0; x < used.size(); ++x) {
    for (std::size_t y = x + 1; y < used.size(); ++y) {
      if (!rel[used[x]][used[y]]) continue;
      for (int k = 0; k < 50 && segment_swap(used[x], used[y]); ++k) any = true;
    }
  }
  for (std::size_t v : used)
    for (int k = 0; k < 50 && intra_relocate(v); ++k) any = true;
  return any;
}

void Search::ruin_strings(std::mt19937_64& rng) {
  std::vector<std::size_t> served;
  for (std::size_t u = 0; u < tour_of_.size(); ++u)
    if (tour_of_[u] != npos) served.push_back(u);
  if (served.empty()) return;
  const std::size_t s = served[rng() % served.size()];
  const std::size_t anchor = in_->items[s].delivery.addr;
  const std::size_t A = in_->addresses;
  std::vector<std::pair<double, std::size_t>> near;  // (distance, vehicle)
  for (const auto& t : tours_) {
    if (t.empty()) continue;
    double d = kInf;
    for (int c : t.visits) d = std::min(d, lb_[anchor * A + stop_of(*in_, c).addr]);
    near.push_back({d, t.vehicle});
  }
  std::sort(near.begin(), near.end());
  const std::size_t k = std::min<std::size_t>(near.size(), 1 + rng() % 3);
  std::vector<std::size_t> drop;
  for (std::size_t q = 0; q < k; ++q) {
    const Tour& t = tours_[near[q].second];
    const std::size_t m = t.m();
    std::size_t xs = 1;
    double bd = kInf;
    for (std::size_t x = 1; x <= m; ++x) {
      const double d = lb_[anchor * A + stop_of(*in_, t.visits[x - 1]).addr];
      if (d < bd) {
        bd = d;
        xs = x;
      }
    }
    const std::size_t len = 1 + rng() % std::min<std::size_t>(m, 10);
    std::size_t from = xs > rng() % len ? xs - rng() % len : 1;
    from = std::clamp<std::size_t>(from, 1, m - len + 1);
    for (std::size_t x = from; x < from + len; ++x) drop.push_back(item_of(t.visits[x - 1]));
  }
  std::sort(drop.begin(), drop.end());
  drop.erase(std::unique(drop.begin(), drop.end()), drop.end());
  remove_items(drop);
}

void Search::ruin_tour(std::mt19937_64& rng) {
  std::vector<std::size_t> used;
  for (const auto& t : tours_)
    if (!t.empty()) used.push_back(t.vehicle);
  if (used.empty()) return;
  std::size_t pick = used[rng() % used.size()];
  for (int k = 0; k < 2; ++k) {
    const std::size_t other = used[rng() % used.size()];
    if (tours_[other].m() < tours_[pick].m()) pick = other;
  }
  std::vector<std::size_t> drop;
  for (int c : tours_[pick].visits) drop.push_back(item_of(c));
  std::sort(drop.begin(), drop.end());
  drop.erase(std::unique(drop.begin(), drop.end()), drop.end());
  remove_items(drop);
}

void Search::random_walk(std::mt19937_64& rng, std::size_t iterations, double time_limit_s,
                         const std::function<void(Search&)>& exchange) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t it = 0; it < iterations; ++it) {
    if (time_limit_s > 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > time_limit_s)
      break;
    ++stats_.walks;
    const double before = cost();
    begin_journal();
    if (it % 2 == 0) ruin_strings(rng);
    else ruin_tour(rng);
    regret_insert(rng, 0.15, 0);
    const double after = cost();
    if (after <= before + 1e-9 * std::max(1.0, std::abs(before))) {
      journaling_ = false;
      journal_.clear();
      ++stats_.accepted;
      if (exchange) exchange(*this);
    } else {
      rollback();
    }
  }
}

}  // namespace tdroute::solver
