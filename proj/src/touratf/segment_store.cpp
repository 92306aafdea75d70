#include "tdroute/touratf/segment_store.hpp"

#include <algorithm>
#include <cmath>

#include "tdroute/plf/ops.hpp"

namespace tdroute::touratf {

using Slot = std::optional<Atf>;

namespace {

Slot comp(const Slot& f, const Slot& g) {
  if (!f || !g) return std::nullopt;
  return plf::try_compose(*f, *g);
}

}  // namespace

namespace detail {

// Balanced search tree over the positions 0..len of one block. Every node
// keeps the compositions towards all of its descendants.
struct Block {
  std::size_t start = 0;
  std::size_t len = 0;
  int root = -1;
  std::vector<int> left, right, lo, hi;
  std::vector<std::vector<Slot>> lchain, rchain;  // lchain[h][d] = a_{h-1-d,h}, rchain[h][d] = a_{h,h+1+d}
  std::vector<char> dirty_l, dirty_r;
  std::vector<Slot> prefix, suffix;  // a_{0,x} and a_{x,len}
  std::size_t pre_ok = 0;            // prefix valid for x <= pre_ok
  std::size_t suf_ok = 0;            // suffix valid for x >= suf_ok

  int build_tree(int a, int b) {
    if (a > b) return -1;
    const int m = (a + b) / 2;
    lo[m] = a;
    hi[m] = b;
    left[m] = build_tree(a, m - 1);
    right[m] = build_tree(m + 1, b);
    return m;
  }

  int lca(std::size_t i, std::size_t j) const {
    int h = root;
    while (true) {
      if (static_cast<int>(j) < h) {
        h = left[h];
      } else if (static_cast<int>(i) > h) {
        h = right[h];
      } else {
        return h;
      }
    }
  }
};

class Level {
 public:
  Level(std::vector<Slot> acts, int k, std::uint64_t* maint) : k_(k), maint_(maint) {
    acts_.reserve(acts.size() + 1);
    acts_.emplace_back();
    for (auto& a : acts) acts_.push_back(std::move(a));
    layout();
  }

  Level(const Level& o)
      : k_(o.k_),
        maint_(o.maint_),
        acts_(o.acts_),
        blocks_(o.blocks_),
        upper_(o.upper_ ? std::make_unique<Level>(*o.upper_) : nullptr),
        total_dirty_(o.total_dirty_) {}

  void set_counter(std::uint64_t* m) {
    maint_ = m;
    if (upper_) upper_->set_counter(m);
  }

  std::size_t n() const { return acts_.size() - 1; }
  const Slot& act(std::size_t x) const { return acts_[x]; }

  Slot query(std::size_t i, std::size_t j) const {
    if (blocks_.size() == 1) return local(blocks_[0], i, j);
    const std::size_t bi = block_from(i), bj = block_to(j);
    if (bi == bj) {
      const Block& B = blocks_[bi];
      return local(B, i - B.start, j - B.start);
    }
    sync_upper();
    Slot out;
    bool have = false;
    auto push = [&](Slot s) {
      if (!have) {
        out = std::move(s);
        have = true;
      } else {
        out = comp(out, s);
      }
    };
    std::size_t left_block = bi, right_block = bj + 1;
    if (i != blocks_[bi].start) {
      push(suffix(blocks_[bi], i - blocks_[bi].start));
      left_block = bi + 1;
    }
    const Block& BJ = blocks_[bj];
    const bool cut_right = j != BJ.start + BJ.len;
    if (cut_right) right_block = bj;
    if (left_block < right_block) push(upper_->query(left_block, right_block));
    if (cut_right) push(prefix(BJ, j - BJ.start));
    return out;
  }

  void update(std::size_t x, Slot a) {
    acts_[x] = std::move(a);
    const std::size_t b = block_to(x);
    Block& B = blocks_[b];
    const std::size_t lx = x - B.start;
    mark_path(B, lx - 1, lx, true);
    mark_path(B, lx, lx, false);
    B.pre_ok = std::min(B.pre_ok, lx - 1);
    B.suf_ok = std::max(B.suf_ok, lx);
    if (upper_) total_dirty_[b] = 1;
  }

  void insert(std::size_t x, Slot a) {
    acts_.insert(acts_.begin() + static_cast<std::ptrdiff_t>(x), std::move(a));
    const std::size_t b = x > n() - 1 ? blocks_.size() - 1 : block_to(x);
    blocks_[b].len += 1;
    for (std::size_t c = b + 1; c < blocks_.size(); ++c) blocks_[c].start += 1;
    init_block(blocks_[b]);
    if (upper_) total_dirty_[b] = 1;
  }

  void flush() const {
    for (const Block& B : blocks_) {
      for (std::size_t h = 0; h <= B.len; ++h) {
        refresh_l(B, h);
        refresh_r(B, h);
      }
      if (B.len > 0) {
        prefix(B, B.len);
        suffix(B, 0);
      }
    }
    if (upper_) {
      sync_upper();
      upper_->flush();
    }
  }

 private:
  void layout() {
    const std::size_t N = n();
    std::size_t p = N;
    if (k_ > 1 && N > 1) {
      p = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(N), 1.0 / k_) - 1e-9));
      p = std::max<std::size_t>(p, 2);
    }
    blocks_.clear();
    for (std::size_t s = 0; s < N || blocks_.empty(); s += p) {
      Block B;
      B.start = s;
      B.len = std::min(p, N - s);
      blocks_.push_back(std::move(B));
      if (N == 0) break;
    }
    for (auto& B : blocks_) init_block(B);
    if (blocks_.size() > 1) {
      std::vector<Slot> totals;
      totals.reserve(blocks_.size());
      for (const auto& B : blocks_) totals.push_back(prefix(B, B.len));
      upper_ = std::make_unique<Level>(std::move(totals), k_ - 1 > 0 ? k_ - 1 : 1, maint_);
      total_dirty_.assign(blocks_.size(), 0);
    } else {
      upper_.reset();
      total_dirty_.clear();
    }
  }

  void init_block(Block& B) {
    const std::size_t m = B.len + 1;
    B.left.assign(m, -1);
    B.right.assign(m, -1);
    B.lo.assign(m, 0);
    B.hi.assign(m, 0);
    B.root = B.build_tree(0, static_cast<int>(B.len));
    B.lchain.assign(m, {});
    B.rchain.assign(m, {});
    B.dirty_l.assign(m, 1);
    B.dirty_r.assign(m, 1);
    B.prefix.assign(m, std::nullopt);
    B.suffix.assign(m, std::nullopt);
    B.pre_ok = 0;
    B.suf_ok = B.len;
    for (std::size_t h = 0; h < m; ++h) {
      refresh_l(B, h);
      refresh_r(B, h);
    }
    if (B.len > 0) {
      prefix(B, B.len);
      suffix(B, 0);
    }
  }

  // left chains of ancestors of action-1 at or right of the action, right chains of ancestors of action left of it
  static void mark_path(Block& B, std::size_t pos, std::size_t action, bool lside) {
    int h = B.root;
    while (h >= 0) {
      if (lside && static_cast<std::size_t>(h) >= action) B.dirty_l[h] = 1;
      if (!lside && static_cast<std::size_t>(h) < action) B.dirty_r[h] = 1;
      if (static_cast<int>(pos) == h) break;
      h = static_cast<int>(pos) < h ? B.left[h] : B.right[h];
    }
  }

  const Slot& a(const Block& B, std::size_t local_action) const { return acts_[B.start + local_action]; }

  void refresh_l(const Block& cB, std::size_t h) const {
    Block& B = const_cast<Block&>(cB);
    if (!B.dirty_l[h]) return;
    const std::uint64_t before = plf::compose_count();
    const std::size_t cnt = h - static_cast<std::size_t>(B.lo[h]);
    auto& ch = B.lchain[h];
    ch.assign(cnt, std::nullopt);
    for (std::size_t d = 0; d < cnt; ++d) ch[d] = d == 0 ? a(B, h) : comp(a(B, h - d), ch[d - 1]);
    B.dirty_l[h] = 0;
    *maint_ += plf::compose_count() - before;
  }

  void refresh_r(const Block& cB, std::size_t h) const {
    Block& B = const_cast<Block&>(cB);
    if (!B.dirty_r[h]) return;
    const std::uint64_t before = plf::compose_count();
    const std::size_t cnt = static_cast<std::size_t>(B.hi[h]) - h;
    auto& ch = B.rchain[h];
    ch.assign(cnt, std::nullopt);
    for (std::size_t d = 0; d < cnt; ++d) ch[d] = d == 0 ? a(B, h + 1) : comp(ch[d - 1], a(B, h + 1 + d));
    B.dirty_r[h] = 0;
    *maint_ += plf::compose_count() - before;
  }

  const Slot& prefix(const Block& cB, std::size_t x) const {
    Block& B = const_cast<Block&>(cB);
    if (x > B.pre_ok || B.pre_ok == 0) {
      const std::uint64_t before = plf::compose_count();
      std::size_t from = std::max<std::size_t>(B.pre_ok, 1);
      if (B.pre_ok == 0) {
        B.prefix[1] = a(B, 1);
        from = 1;
      }
      for (std::size_t y = from + 1; y <= x; ++y) B.prefix[y] = comp(B.prefix[y - 1], a(B, y));
      B.pre_ok = std::max(B.pre_ok, x);
      *maint_ += plf::compose_count() - before;
    }
    return B.prefix[x];
  }

  const Slot& suffix(const Block& cB, std::size_t x) const {
    Block& B = const_cast<Block&>(cB);
    if (x < B.suf_ok || B.suf_ok == B.len) {
      const std::uint64_t before = plf::compose_count();
      std::size_t from = std::min(B.suf_ok, B.len - 1);
      if (B.suf_ok == B.len) {
        B.suffix[B.len - 1] = a(B, B.len);
        from = B.len - 1;
      }
      for (std::size_t y = from; y-- > x;) B.suffix[y] = comp(a(B, y + 1), B.suffix[y + 1]);
      B.suf_ok = std::min(B.suf_ok, x);
      *maint_ += plf::compose_count() - before;
    }
    return B.suffix[x];
  }

  Slot local(const Block& B, std::size_t i, std::size_t j) const {
    if (i == 0 && j == B.len) return prefix(B, j);
    if (i == 0) return prefix(B, j);
    if (j == B.len) return suffix(B, i);
    const int h = B.lca(i, j);
    const std::size_t hh = static_cast<std::size_t>(h);
    if (hh == i) {
      refresh_r(B, hh);
      return B.rchain[hh][j - i - 1];
    }
    if (hh == j) {
      refresh_l(B, hh);
      return B.lchain[hh][j - i - 1];
    }
    refresh_l(B, hh);
    refresh_r(B, hh);
    return comp(B.lchain[hh][hh - i - 1], B.rchain[hh][j - hh - 1]);
  }

  // block containing position i as a left end (i < n)
  std::size_t block_from(std::size_t i) const {
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), i,
                               [](std::size_t v, const Block& B) { return v < B.start; });
    return static_cast<std::size_t>(it - blocks_.begin()) - 1;
  }
  // block containing position j as a right end (j > 0)
  std::size_t block_to(std::size_t j) const { return block_from(j - 1); }

  void sync_upper() const {
    if (!upper_) return;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (!total_dirty_[b]) continue;
      const std::uint64_t before = plf::compose_count();
      Slot t = prefix(blocks_[b], blocks_[b].len);
      *maint_ += plf::compose_count() - before;
      const_cast<Level*>(this)->total_dirty_[b] = 0;
      upper_->update(b + 1, std::move(t));
    }
  }

  int k_;
  std::uint64_t* maint_;
  std::vector<Slot> acts_;  // 1-based
  mutable std::vector<Block> blocks_;
  std::unique_ptr<Level> upper_;
  std::vector<char> total_dirty_;
};

}  // namespace detail

SegmentStore::SegmentStore(std::vector<Atf> actions, int levels) : k_(levels) {
  if (levels < 1) throw InvalidArgument("level count must be positive");
  if (actions.empty()) throw InvalidArgument("store needs at least one action");
  logical_.resize(actions.size());
  for (std::size_t x = 0; x < actions.size(); ++x) logical_[x] = x + 1;
  std::vector<Slot> slots(actions.begin(), actions.end());
  const std::uint64_t before = plf::compose_count();
  std::uint64_t dummy = 0;
  level_ = std::make_unique<detail::Level>(std::move(slots), k_, &dummy);
  level_->set_counter(&stats_.maintenance_composes);
  stats_.build_composes = plf::compose_count() - before;
}

SegmentStore::SegmentStore(const SegmentStore& o)
    : k_(o.k_),
      logical_(o.logical_),
      level_(std::make_unique<detail::Level>(*o.level_)),
      structural_(o.structural_),
      stats_(o.stats_) {
  level_->set_counter(&stats_.maintenance_composes);
}

SegmentStore& SegmentStore::operator=(const SegmentStore& o) {
  if (this != &o) {
    SegmentStore tmp(o);
    *this = std::move(tmp);
  }
  return *this;
}

SegmentStore::SegmentStore(SegmentStore&& o) noexcept
    : k_(o.k_), logical_(std::move(o.logical_)), level_(std::move(o.level_)), structural_(o.structural_), stats_(o.stats_) {
  if (level_) level_->set_counter(&stats_.maintenance_composes);
}

SegmentStore& SegmentStore::operator=(SegmentStore&& o) noexcept {
  k_ = o.k_;
  logical_ = std::move(o.logical_);
  level_ = std::move(o.level_);
  structural_ = o.structural_;
  stats_ = o.stats_;
  if (level_) level_->set_counter(&stats_.maintenance_composes);
  return *this;
}

SegmentStore::~SegmentStore() = default;

const Atf& SegmentStore::action(std::size_t x) const {
  if (x < 1 || x > size()) throw IndexOutOfRange("action index");
  return *level_->act(logical_[x - 1]);
}

std::size_t SegmentStore::phys(std::size_t i) const {
  if (i == 0) return 0;
  if (i == size()) return level_->n();
  return logical_[i - 1];
}

std::optional<Atf> SegmentStore::range(std::size_t i, std::size_t j) const {
  if (i >= j || j > size()) throw IndexOutOfRange("query range");
  return level_->query(phys(i), phys(j));
}

std::optional<Atf> SegmentStore::try_query(std::size_t i, std::size_t j) const {
  const std::uint64_t c0 = plf::compose_count(), m0 = stats_.maintenance_composes;
  auto r = range(i, j);
  stats_.last_eval_composes = (plf::compose_count() - c0) - (stats_.maintenance_composes - m0);
  return r;
}

Atf SegmentStore::query(std::size_t i, std::size_t j) const {
  auto r = try_query(i, j);
  if (!r) throw EmptyDomain("segment has an empty domain");
  return std::move(*r);
}

void SegmentStore::update_action(std::size_t x, Atf a) {
  if (x < 1 || x > size()) throw IndexOutOfRange("action index");
  level_->update(logical_[x - 1], std::move(a));
}

void SegmentStore::remove_action(std::size_t x) {
  if (x < 1 || x > size()) throw IndexOutOfRange("action index");
  if (size() == 1) throw InvalidArgument("cannot remove the last action");
  level_->update(logical_[x - 1], Atf::identity());
  logical_.erase(logical_.begin() + static_cast<std::ptrdiff_t>(x - 1));
  if (++structural_ >= static_cast<std::size_t>(std::ceil(std::log2(size() + 1.0)))) rebuild();
}

void SegmentStore::insert_action(std::size_t x, Atf a) {
  if (x < 1 || x > size() + 1) throw IndexOutOfRange("insert position");
  const std::size_t p = x == 1 ? 1 : logical_[x - 2] + 1;
  level_->insert(p, std::move(a));
  for (auto& q : logical_) {
    if (q >= p) ++q;
  }
  logical_.insert(logical_.begin() + static_cast<std::ptrdiff_t>(x - 1), p);
  if (++structural_ >= static_cast<std::size_t>(std::ceil(std::log2(size() + 1.0)))) rebuild();
}

void SegmentStore::rebuild() {
  std::vector<Atf> acts;
  acts.reserve(size());
  for (std::size_t x = 1; x <= size(); ++x) acts.push_back(action(x));
  const StoreStats keep = stats_;
  *this = SegmentStore(std::move(acts), k_);
  stats_.maintenance_composes = keep.maintenance_composes + stats_.build_composes;
  stats_.build_composes = keep.build_composes;
}

void SegmentStore::flush() const { level_->flush(); }

std::optional<Atf> SegmentStore::eval_splice(std::span<const Part> parts) const {
  const std::uint64_t c0 = plf::compose_count(), m0 = stats_.maintenance_composes;
  std::vector<Atf> owned;
  owned.reserve(parts.size());
  std::vector<const Atf*> chain;
  chain.reserve(parts.size());
  bool ok = true;
  for (const auto& p : parts) {
    if (const Range* r = std::get_if<Range>(&p)) {
      if (r->i == r->j) continue;
      auto s = range(r->i, r->j);
      if (!s) {
        ok = false;
        break;
      }
      owned.push_back(std::move(*s));
      chain.push_back(&owned.back());
    } else {
      chain.push_back(std::get<const Atf*>(p));
    }
  }
  std::optional<Atf> out;
  if (ok && !chain.empty()) out = plf::try_compose_chain(chain);
  if (ok && chain.empty()) out = Atf::identity();
  stats_.last_eval_composes = (plf::compose_count() - c0) - (stats_.maintenance_composes - m0);
  return out;
}

std::optional<Atf> SegmentStore::eval_insertion(std::size_t i, std::size_t j, const Atf& a_i, const Atf& a_p,
                                                const Atf& a_j, const Atf& a_d) const {
  if (!(1 <= i && i < j && j <= size())) throw IndexOutOfRange("insertion positions");
  const Part parts[] = {Range{0, i - 1}, &a_i, &a_p, Range{i, j - 1}, &a_j, &a_d, Range{j, size()}};
  return eval_splice(parts);
}

std::optional<Atf> SegmentStore::eval_removal(std::size_t i_from, std::size_t i_to, const Atf& bridge) const {
  if (i_from > i_to || i_to > size()) throw IndexOutOfRange("removal range");
  const Part parts[] = {Range{0, i_from}, &bridge, Range{i_to, size()}};
  return eval_splice(parts);
}

std::pair<std::optional<Atf>, std::optional<Atf>> eval_swap(const SegmentStore& a, std::span<const Part> parts_a,
                                                             const SegmentStore& b, std::span<const Part> parts_b) {
  return {a.eval_splice(parts_a), b.eval_splice(parts_b)};
}

}  // namespace tdroute::touratf
