#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tdroute/plf/ops.hpp"
#include "tdroute/touratf/segment_store.hpp"

using namespace tdroute;
using namespace tdroute::plf;
using tdroute::touratf::Part;
using tdroute::touratf::Range;
using tdroute::touratf::SegmentStore;

namespace {

std::vector<Atf> random_tour(std::mt19937_64& rng, std::size_t n, bool costs = true) {
  std::uniform_int_distribution<int> nb(1, 5);
  std::vector<Atf> v;
  for (std::size_t x = 0; x < n; ++x) {
    // wide domain so long chains stay feasible; random closing time
    std::uniform_real_distribution<double> close(700, 1000), u(0, 1);
    Atf a = oracle::random_atf(rng, nb(rng), 0, close(rng), 2.0);
    std::vector<Breakpoint> b(a.breakpoints().begin(), a.breakpoints().end());
    if (b.front().t > 0) b.insert(b.begin(), {0, std::min(b.front().v, 1.5 * u(rng))});
    a = Atf(b);
    if (costs) a = a.with_cost(oracle::random_cost(rng, 0, 1000, 2));
    v.push_back(a);
  }
  return v;
}

// sequential pointwise evaluation; nullopt when some step falls outside a domain
std::optional<std::pair<double, double>> run(const std::vector<const Atf*>& list, double t) {
  double c = 0;
  for (const Atf* a : list) {
    if (t > a->t_max() + 1e-9) return std::nullopt;
    c += oracle::step(a->cost(), t);
    t = oracle::eval(*a, std::min(t, a->t_max()));
  }
  return std::make_pair(t, c);
}

std::optional<Atf> fold(const std::vector<const Atf*>& list) {
  std::optional<Atf> acc = *list[0];
  for (std::size_t x = 1; x < list.size() && acc; ++x) acc = try_compose(*acc, *list[x]);
  return acc;
}

bool same(const Atf& a, const Atf& b) {
  auto pa = a.breakpoints(), pb = b.breakpoints();
  if (pa.size() != pb.size()) return false;
  for (std::size_t x = 0; x < pa.size(); ++x) {
    const double s = std::max(1.0, std::abs(pa[x].t));
    if (std::abs(pa[x].t - pb[x].t) > 1e-9 * s || std::abs(pa[x].v - pb[x].v) > 1e-9 * s) return false;
  }
  return true;
}

// checks r against the explicit action list
void check_against(const std::optional<Atf>& r, const std::vector<const Atf*>& list) {
  auto f = fold(list);
  REQUIRE(r.has_value() == f.has_value());
  if (!r) return;
  CHECK(same(*r, *f));
  std::vector<double> ts = oracle::samples(r->t_min() - 5, r->t_max(), 40);
  for (auto& b : r->breakpoints()) ts.push_back(b.t);
  for (double t : ts) {
    auto o = run(list, t);
    REQUIRE(o.has_value());
    CHECK(o->first == doctest::Approx((*r)(t)).epsilon(1e-9));
    CHECK(o->second == doctest::Approx(oracle::step(r->cost(), t)).epsilon(1e-9));
  }
  // domain is maximal
  CHECK_FALSE(run(list, r->t_max() + 1e-6 * std::max(1.0, r->t_max())).has_value());
}

std::vector<const Atf*> ptrs(const std::vector<Atf>& v, std::size_t i, std::size_t j) {
  std::vector<const Atf*> out;
  for (std::size_t x = i; x < j; ++x) out.push_back(&v[x]);
  return out;
}

std::uint64_t query_cost(const SegmentStore& s, std::size_t i, std::size_t j) {
  s.try_query(i, j);
  return s.stats().last_eval_composes;
}

}  // namespace

TEST_CASE("single action") {
  std::mt19937_64 rng(1);
  auto v = random_tour(rng, 1);
  SegmentStore s(v);
  CHECK(s.query(0, 1) == v[0]);
  CHECK(s.stats().last_eval_composes == 0);
}

TEST_CASE("seven actions, one level") {
  std::mt19937_64 rng(2);
  auto v = random_tour(rng, 7);
  SegmentStore s(v, 1);
  auto r = s.try_query(1, 4);
  CHECK(s.stats().last_eval_composes == 1);
  check_against(r, ptrs(v, 1, 4));
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(s.query(i, i + 1) == v[i]);
    CHECK(s.stats().last_eval_composes == 0);
  }
  s.try_query(0, 7);
  CHECK(s.stats().last_eval_composes == 0);
}

TEST_CASE("identity actions") {
  std::vector<Atf> v(9, Atf::identity());
  SegmentStore s(v);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = i + 1; j <= 9; ++j) CHECK(s.query(i, j).is_identity());
}

TEST_CASE("queries match the fold and respect budgets") {
  std::mt19937_64 rng(3);
  for (int k = 1; k <= 3; ++k) {
    for (std::size_t n : {1u, 2u, 5u, 16u, 37u, 64u}) {
      auto v = random_tour(rng, n);
      SegmentStore s(v, k);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
          if (n > 16 && (i + j) % 7 != 0) continue;
          auto r = s.try_query(i, j);
          const auto used = s.stats().last_eval_composes;
          CHECK(used <= static_cast<std::uint64_t>(2 * k - 1));
          if (i == 0 || j == n) CHECK(used <= static_cast<std::uint64_t>(k - 1));
          check_against(r, ptrs(v, i, j));
        }
      }
    }
  }
}

TEST_CASE("bad indices") {
  std::mt19937_64 rng(4);
  SegmentStore s(random_tour(rng, 4));
  CHECK_THROWS_AS(s.query(2, 2), IndexOutOfRange);
  CHECK_THROWS_AS(s.query(0, 5), IndexOutOfRange);
  CHECK_THROWS_AS(s.update_action(0, Atf::identity()), IndexOutOfRange);
  CHECK_THROWS_AS(s.remove_action(5), IndexOutOfRange);
  CHECK_THROWS_AS(s.insert_action(6, Atf::identity()), IndexOutOfRange);
  CHECK_THROWS_AS(SegmentStore({}, 2), InvalidArgument);
}

TEST_CASE("updates agree with a fresh build") {
  std::mt19937_64 rng(5);
  for (int k = 1; k <= 3; ++k) {
    for (int rep = 0; rep < 6; ++rep) {
      auto v = random_tour(rng, 20 + rep * 7);
      SegmentStore s(v, k);
      std::uniform_int_distribution<int> op(0, 2);
      for (int step = 0; step < 50; ++step) {
        const int o = v.size() == 1 ? 1 : op(rng);
        if (o == 0) {
          std::size_t x = std::uniform_int_distribution<std::size_t>(1, v.size())(rng);
          s.remove_action(x);
          v.erase(v.begin() + static_cast<std::ptrdiff_t>(x - 1));
        } else if (o == 1) {
          std::size_t x = std::uniform_int_distribution<std::size_t>(1, v.size() + 1)(rng);
          Atf a = random_tour(rng, 1)[0];
          s.insert_action(x, a);
          v.insert(v.begin() + static_cast<std::ptrdiff_t>(x - 1), a);
        } else {
          std::size_t x = std::uniform_int_distribution<std::size_t>(1, v.size())(rng);
          Atf a = random_tour(rng, 1)[0];
          s.update_action(x, a);
          v[x - 1] = a;
        }
        REQUIRE(s.size() == v.size());
        std::size_t i = std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng);
        std::size_t j = std::uniform_int_distribution<std::size_t>(i + 1, v.size())(rng);
        auto r = s.try_query(i, j);
        check_against(r, ptrs(v, i, j));
      }
      SegmentStore fresh(v, k);
      for (std::size_t x = 1; x <= v.size(); ++x) CHECK(s.action(x) == v[x - 1]);
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j <= v.size(); j += 3) {
          auto a = s.try_query(i, j), b = fresh.try_query(i, j);
          REQUIRE(a.has_value() == b.has_value());
          if (a) CHECK(same(*a, *b));
        }
      }
    }
  }
}

TEST_CASE("replacing with the same function changes nothing") {
  std::mt19937_64 rng(6);
  auto v = random_tour(rng, 30);
  SegmentStore s(v);
  auto before = s.query(0, 30);
  s.update_action(11, v[10]);
  CHECK(s.query(0, 30) == before);
}

TEST_CASE("remove all but one, insert at end") {
  std::mt19937_64 rng(7);
  auto v = random_tour(rng, 12);
  SegmentStore s(v);
  while (s.size() > 1) s.remove_action(1);
  CHECK(s.query(0, 1) == v.back());
  Atf extra = random_tour(rng, 1)[0];
  s.insert_action(2, extra);
  check_against(s.try_query(0, 2), {&v.back(), &extra});
}

TEST_CASE("eval_insertion") {
  std::mt19937_64 rng(8);
  for (int k = 1; k <= 3; ++k) {
    auto v = random_tour(rng, 40);
    SegmentStore s(v, k);
    const auto full = s.query(0, 40);
    for (int rep = 0; rep < 60; ++rep) {
      std::size_t i = std::uniform_int_distribution<std::size_t>(1, 39)(rng);
      std::size_t j = std::uniform_int_distribution<std::size_t>(i + 1, 40)(rng);
      auto extra = random_tour(rng, 4);
      auto r = s.eval_insertion(i, j, extra[0], extra[1], extra[2], extra[3]);
      CHECK(s.stats().last_eval_composes <= static_cast<std::uint64_t>(4 * k + 3));
      std::vector<const Atf*> list = ptrs(v, 0, i - 1);
      list.push_back(&extra[0]);
      list.push_back(&extra[1]);
      for (std::size_t x = i; x < j - 1; ++x) list.push_back(&v[x]);
      list.push_back(&extra[2]);
      list.push_back(&extra[3]);
      for (std::size_t x = j; x < 40; ++x) list.push_back(&v[x]);
      check_against(r, list);
    }
    const Atf id = Atf::identity();
    // a_i' = a_i and a_j' = a_j with identity pickup and delivery
    auto r = s.eval_insertion(3, 9, v[2], id, v[8], id);
    REQUIRE(r);
    CHECK(same(*r, full));
    CHECK(s.query(0, 40) == full);  // not mutated
  }
}

TEST_CASE("eval_insertion reports infeasible detours") {
  std::vector<Atf> v;
  for (int x = 0; x < 6; ++x) v.push_back(Atf::window(10.0 * x, 10.0 * x + 5, 1));
  SegmentStore s(v);
  Atf detour = Atf::travel(0, kTimeBound, 500);
  CHECK_FALSE(s.eval_insertion(2, 4, detour, Atf::identity(), Atf::identity(), Atf::identity()).has_value());
}

TEST_CASE("eval_removal and eval_swap") {
  std::mt19937_64 rng(9);
  auto v = random_tour(rng, 30);
  auto w = random_tour(rng, 25);
  SegmentStore s(v), u(w);
  const Atf id = Atf::identity();
  auto same_tour = s.eval_removal(7, 7, id);
  REQUIRE(same_tour);
  CHECK(same(*same_tour, s.query(0, 30)));
  for (int rep = 0; rep < 40; ++rep) {
    std::size_t a = std::uniform_int_distribution<std::size_t>(0, 29)(rng);
    std::size_t b = std::uniform_int_distribution<std::size_t>(a, std::min<std::size_t>(30, a + 4))(rng);
    Atf bridge = random_tour(rng, 1)[0];
    auto r = s.eval_removal(a, b, bridge);
    std::vector<const Atf*> list = ptrs(v, 0, a);
    list.push_back(&bridge);
    for (std::size_t x = b; x < 30; ++x) list.push_back(&v[x]);
    check_against(r, list);
  }
  // exchange v[10..12) with w[5..8)
  const Part pa[] = {Range{0, 10}, &w[5], &w[6], &w[7], Range{12, 30}};
  const Part pb[] = {Range{0, 5}, &v[10], &v[11], Range{8, 25}};
  auto [ra, rb] = touratf::eval_swap(s, pa, u, pb);
  std::vector<const Atf*> la = ptrs(v, 0, 10);
  for (int x = 5; x < 8; ++x) la.push_back(&w[x]);
  for (std::size_t x = 12; x < 30; ++x) la.push_back(&v[x]);
  std::vector<const Atf*> lb = ptrs(w, 0, 5);
  lb.push_back(&v[10]);
  lb.push_back(&v[11]);
  for (std::size_t x = 8; x < 25; ++x) lb.push_back(&w[x]);
  check_against(ra, la);
  check_against(rb, lb);
  // same segment between identical tours
  SegmentStore s2(v);
  const Part keep[] = {Range{0, 30}};
  auto [x1, x2] = touratf::eval_swap(s, keep, s2, keep);
  CHECK(same(*x1, s.query(0, 30)));
  CHECK(same(*x2, s.query(0, 30)));
}

TEST_CASE("build cost grows like n log n") {
  std::mt19937_64 rng(10);
  for (int k = 1; k <= 3; ++k) {
    double worst = 0;
    for (std::size_t n : {16u, 64u, 256u, 1024u}) {
      std::vector<Atf> v;
      for (std::size_t x = 0; x < n; ++x) v.push_back(Atf::travel(0, 1e6, 1));
      SegmentStore s(v, k);
      const double r = static_cast<double>(s.stats().build_composes) / (n * std::log2(static_cast<double>(n)));
      worst = std::max(worst, r);
      CHECK(r <= 4.0);
    }
    MESSAGE("k=" << k << " build/(n log n) max " << worst);
  }
}
