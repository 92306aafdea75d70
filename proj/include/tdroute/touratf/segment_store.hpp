#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tdroute/plf/atf.hpp"

namespace tdroute::touratf {

using plf::Atf;

namespace detail {
class Level;
}

// a_{i,j} over a stored range of logical positions, or an explicit ATF.
struct Range {
  std::size_t i;
  std::size_t j;
};
using Part = std::variant<Range, const Atf*>;

struct StoreStats {
  std::uint64_t build_composes = 0;
  std::uint64_t maintenance_composes = 0;
  std::uint64_t last_eval_composes = 0;  // composes of the most recent query/eval
};

// Compositions of a tour's action ATFs. Positions run 0..n; action x
// (1-based) leads from position x-1 to x, and a_{i,j} composes actions
// i+1..j.
class SegmentStore {
 public:
  explicit SegmentStore(std::vector<Atf> actions, int levels = 2);
  SegmentStore(const SegmentStore& o);
  SegmentStore& operator=(const SegmentStore& o);
  SegmentStore(SegmentStore&&) noexcept;
  SegmentStore& operator=(SegmentStore&&) noexcept;
  ~SegmentStore();

  std::size_t size() const { return logical_.size(); }
  int levels() const { return k_; }
  const Atf& action(std::size_t x) const;

  // Throws IndexOutOfRange or EmptyDomain.
  Atf query(std::size_t i, std::size_t j) const;
  std::optional<Atf> try_query(std::size_t i, std::size_t j) const;

  void update_action(std::size_t x, Atf a);
  // Replaces the action by the identity; later actions shift down by one.
  void remove_action(std::size_t x);
  // The new action becomes action x (1 <= x <= n+1).
  void insert_action(std::size_t x, Atf a);

  // Composition of the parts in order (first part applied first).
  std::optional<Atf> eval_splice(std::span<const Part> parts) const;
  // a_{j,n} o a_d o a_j' o a_{i,j-1} o a_p o a_i' o a_{0,i-1}, for 1 <= i < j <= n.
  std::optional<Atf> eval_insertion(std::size_t i, std::size_t j, const Atf& a_i, const Atf& a_p,
                                    const Atf& a_j, const Atf& a_d) const;
  // Replaces actions i_from+1..i_to by the bridge: a_{i_to,n} o bridge o a_{0,i_from}.
  std::optional<Atf> eval_removal(std::size_t i_from, std::size_t i_to, const Atf& bridge) const;

  // Recomputes everything left dirty by updates. Call before sharing the
  // store between threads.
  void flush() const;
  void rebuild();

  const StoreStats& stats() const { return stats_; }
  std::size_t structural_changes() const { return structural_; }

 private:
  std::size_t phys(std::size_t i) const;
  std::optional<Atf> range(std::size_t i, std::size_t j) const;

  int k_;
  std::vector<std::size_t> logical_;  // logical action x -> physical action logical_[x-1]
  std::unique_ptr<detail::Level> level_;
  std::size_t structural_ = 0;
  mutable StoreStats stats_;
};

// Both tours after exchanging their segments: part lists are spliced
// independently, the stores are not modified.
std::pair<std::optional<Atf>, std::optional<Atf>> eval_swap(const SegmentStore& a, std::span<const Part> parts_a,
                                                             const SegmentStore& b, std::span<const Part> parts_b);

}  // namespace tdroute::touratf
