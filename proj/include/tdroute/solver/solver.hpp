#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "tdroute/solver/instance.hpp"
#include "tdroute/solver/solution.hpp"
#include "tdroute/touratf/segment_store.hpp"

namespace tdroute::solver {

struct Config {
  int workers = 1;
  std::uint64_t seed = 1;
  bool high_effort = false;
  std::size_t iterations = 0;  // random-walk iterations per worker, 0 = by mode
  double time_limit = 0;       // seconds, 0 = none
  int levels = 2;
  bool construct_only = false;
  std::size_t ls_every = 25;  // insertions between local-search passes while constructing
  std::size_t max_seeds = 0;  // 0 = capacity lower bound
  double construct_noise = 0;  // relative regret noise of worker 0; others add 0.1
};

// Worker-local tour with its segment store and cached bounds.
struct Tour {
  std::size_t vehicle = 0;
  std::vector<int> visits;
  std::optional<touratf::SegmentStore> store;
  std::vector<double> earliest;  // earliest arrival at each position 0..m+1
  std::vector<double> latest;    // latest arrival keeping the rest feasible
  std::vector<std::vector<double>> load;  // after position x, x = 0..m
  double cost = 0;   // fixed + scheduled cost, 0 when unused
  double start = 0;
  bool feasible = true;
  std::uint64_t version = 0;
  std::size_t m() const { return visits.size(); }
  bool empty() const { return visits.empty(); }
};

struct Candidate {
  std::size_t vehicle = 0;
  std::size_t i = 0;  // pickup goes before position i
  std::size_t j = 0;  // delivery goes before position j
  double cost = kInf;   // tour cost afterwards
  double delta = kInf;  // cost increase
  bool feasible = false;
};

struct SearchStats {
  std::uint64_t evaluations = 0;
  std::uint64_t pruned = 0;
  std::uint64_t walks = 0;
  std::uint64_t accepted = 0;
};

class Search {
 public:
  explicit Search(const Instance& in, int levels = 2);

  const Instance& instance() const { return *in_; }
  void load(const Solution& s);
  Solution solution() const;
  double cost() const;
  const std::vector<Tour>& tours() const { return tours_; }
  const std::vector<std::size_t>& unserved() const { return unserved_; }
  std::size_t used_tours() const;
  const SearchStats& stats() const { return stats_; }

  // Best insertion of an unserved item into the tour of `vehicle`.
  Candidate cheapest_insertion(std::size_t vehicle, std::size_t item, bool prune = true);
  void apply(const Candidate& c, std::size_t item);
  // Cost of a new single-item tour on the first unused vehicle, or nullopt.
  std::optional<Candidate> new_tour_insertion(std::size_t item);

  void open_seed_tours(const std::vector<std::size_t>& seeds);
  // Regret insertion of the currently unserved items. Items that fit
  // nowhere stay unserved.
  void regret_insert(std::mt19937_64& rng, double noise, std::size_t ls_every);
  // One insertion of the max-regret item; nullopt when nothing fits.
  std::optional<std::size_t> regret_step(std::mt19937_64& rng, double noise);
  // Average regret of every unserved item against the open tours (exposed
  // for tests); sentinel per item as used by regret_insert.
  std::vector<double> regrets();

  // Relocate / swap / intra-tour relocate over all tour pairs.
  bool local_search_pass();
  bool segment_swap(std::size_t va, std::size_t vb);
  bool relocate(std::size_t va, std::size_t vb);
  bool intra_relocate(std::size_t v);

  // Ruin and recreate; keeps the result iff the cost does not increase.
  // `exchange` is called after each accepted move and may replace the state.
  void random_walk(std::mt19937_64& rng, std::size_t iterations, double time_limit_s,
                   const std::function<void(Search&)>& exchange = {});

  // Tour cost for an explicit visit sequence on `vehicle`; nullopt when
  // infeasible. Evaluated on a freshly built tour.
  std::optional<double> sequence_cost(std::size_t vehicle, const std::vector<int>& visits);

  void remove_items(const std::vector<std::size_t>& items);

 private:
  struct El {
    int old;   // position in the current tour, or -1
    int code;  // visit code when old == -1
  };

  const Atf& act(std::size_t stop_id, std::size_t next);
  std::size_t start_id(std::size_t vehicle) const { return 2 * in_->items.size() + vehicle; }
  const Stop& stop_by_id(std::size_t id) const;
  std::size_t el_stop(const Tour& t, const El& e) const;
  std::size_t el_addr(const Tour& t, const El& e) const;
  std::size_t pos_addr(const Tour& t, std::size_t x) const;
  const Stop& pos_stop(const Tour& t, std::size_t x) const;

  void rebuild(Tour& t);
  void refresh(Tour& t);
  std::optional<std::pair<double, double>> schedule(const Tour& t, const Atf& a) const;
  std::optional<std::pair<double, double>> eval_seq(const Tour& t, const std::vector<El>& seq);
  bool capacity_ok(const Tour& t, const std::vector<El>& seq) const;
  // Lower-bound check of a visit chain between positions x and y of t.
  bool chain_may_fit(const Tour& t, std::size_t x, const std::vector<int>& chain, std::size_t y) const;
  void set_visits(Tour& t, std::vector<int> visits);
  std::vector<std::vector<int>> blocks_of(const Tour& t, std::size_t a) const;
  bool reversible(const std::vector<int>& block) const;
  void mark_unserved(std::size_t item);
  double static_cost(const Tour& t, const std::vector<El>& seq) const;
  void touch(Tour& t);
  void begin_journal();
  void rollback();
  const Candidate& cached(std::size_t item, std::size_t vehicle);
  std::vector<std::vector<char>> related() const;
  void ruin_strings(std::mt19937_64& rng);
  void ruin_tour(std::mt19937_64& rng);

  const Instance* in_;
  int levels_;
  std::vector<Tour> tours_;  // indexed by vehicle
  std::vector<std::optional<Atf>> cache_;
  std::vector<std::size_t> unserved_;
  std::vector<char> is_unserved_;
  std::vector<std::size_t> tour_of_;  // vehicle serving each item, or npos
  bool static_costs_ = false;
  std::vector<double> lb_;
  std::vector<Stop> starts_;
  bool journaling_ = false;
  std::vector<char> saved_;
  std::vector<Tour> journal_;
  std::vector<std::size_t> saved_unserved_;
  struct Cached {
    std::uint64_t version = 0;
    Candidate c;
  };
  std::vector<Cached> ins_cache_;  // item x vehicle
  SearchStats stats_;

  friend class SearchAccess;
};

// Greedy maximal set by descending importance, skipping friends of chosen seeds.
std::vector<std::size_t> select_seeds(const Instance& in, std::size_t max_seeds);
double importance(const Instance& in, std::size_t item);

Solution regret_construct(const Instance& in, std::uint64_t seed, const Config& cfg = {});
Solution random_walk(const Instance& in, const Solution& start, std::uint64_t seed, std::size_t budget, int levels = 2);
Solution solve(const Instance& in, const Config& cfg);

// Worker count from TDROUTE_THREADS, default 1.
int default_workers();

}  // namespace tdroute::solver
