#include "tdroute/plf/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tdroute::plf {

namespace {

thread_local std::uint64_t g_compose_count = 0;

// Evaluates a breakpoint list at increasing arguments with a moving cursor.
class Cursor {
 public:
  explicit Cursor(std::span<const Breakpoint> b) : b_(b) {}

  double operator()(double x) {
    if (x <= b_.front().t) return b_.front().v;
    while (i_ + 1 < b_.size() && b_[i_ + 1].t <= x) ++i_;
    if (i_ + 1 == b_.size()) return b_.back().v;
    const auto& p = b_[i_];
    const auto& q = b_[i_ + 1];
    const double d0 = p.v - p.t, d1 = q.v - q.t;
    return std::clamp(x + d0 + (x - p.t) * ((d1 - d0) / (q.t - p.t)), p.v, q.v);
  }

 private:
  std::span<const Breakpoint> b_;
  std::size_t i_ = 0;
};

double preimage_on(const Breakpoint& p, const Breakpoint& q, double s) {
  double t = p.t + (s - p.v) * ((q.t - p.t) / (q.v - p.v));
  return std::clamp(t, p.t, q.t);
}

// First t with f(t) >= s; -inf when f starts at or above s.
double first_reach(std::span<const Breakpoint> f, double s) {
  auto it = std::lower_bound(f.begin(), f.end(), s,
                             [](const Breakpoint& b, double x) { return b.v < x; });
  if (it == f.begin()) return -kInf;
  if (it == f.end()) return kInf;
  return preimage_on(*(it - 1), *it, s);
}

// Last t with f(t) <= s; +inf when f never exceeds s.
double last_at_most(std::span<const Breakpoint> f, double s) {
  auto it = std::upper_bound(f.begin(), f.end(), s,
                             [](double x, const Breakpoint& b) { return x < b.v; });
  if (it == f.begin()) return -kInf;
  if (it == f.end()) return kInf;
  const auto& p = *(it - 1);
  if (p.v == s) return p.t;
  return preimage_on(p, *it, s);
}

}  // namespace

std::uint64_t compose_count() { return g_compose_count; }

StepCost compose_cost(const StepCost& g_cost, std::span<const Breakpoint> f, double t_end) {
  if (g_cost.is_constant()) return g_cost;
  const double v0 = f.front().v;
  std::vector<CostPiece> out{{-kInf, g_cost(v0)}};
  auto pieces = g_cost.pieces();
  for (std::size_t q = 1; q < pieces.size(); ++q) {
    const double s = pieces[q].t;
    const double left = pieces[q - 1].c, right = pieces[q].c;
    if (s < v0) continue;
    double tau;
    if (right < left) {
      if (s == v0) continue;
      tau = first_reach(f, s);
    } else {
      tau = last_at_most(f, s);
    }
    if (!(tau < t_end) || tau == -kInf) continue;
    if (tau <= out.back().t) {
      out.back().c = right;
    } else {
      out.push_back({tau, right});
    }
  }
  return StepCost::from_pieces(std::move(out));
}

std::optional<Atf> try_compose(const Atf& f, const Atf& g) {
  ++g_compose_count;
  const auto F = f.breakpoints();
  const auto G = g.breakpoints();
  const double g_end = g.t_max();

  if (F.front().v > g_end) return std::nullopt;

  if (f.is_identity()) {
    const double T = std::min(f.t_max(), g_end);
    Atf r = g.restricted(T);
    return r.with_cost(g.cost().truncated(T) + f.cost().truncated(T));
  }

  // clip f to the part whose arrivals stay inside g's domain
  std::vector<Breakpoint> pts;
  pts.reserve(F.size() + 1);
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i].v <= g_end) {
      pts.push_back(F[i]);
      continue;
    }
    pts.push_back({preimage_on(F[i - 1], F[i], g_end), g_end});
    if (pts.back().t <= pts[pts.size() - 2].t) pts.pop_back();
    break;
  }
  const double T = pts.back().t;

  StepCost cost = compose_cost(g.cost(), pts, T) + f.cost().truncated(T);

  if (g.is_identity()) return Atf(Atf::Unchecked{}, std::move(pts), std::move(cost));

  std::vector<Breakpoint> out;
  out.reserve(pts.size() + G.size());
  Cursor gc(G);
  std::size_t k = 0;
  out.push_back({pts[0].t, gc(pts[0].v)});
  while (k < G.size() && G[k].t <= pts[0].v) ++k;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[i + 1];
    while (k < G.size() && G[k].t < q.v) {
      if (G[k].t > p.v) out.push_back({preimage_on(p, q, G[k].t), G[k].v});
      ++k;
    }
    out.push_back({q.t, gc(q.v)});
    while (k < G.size() && G[k].t <= q.v) ++k;
  }
  // guard against rounding in the interpolated values
  for (std::size_t i = 1; i < out.size(); ++i) out[i].v = std::max(out[i].v, out[i - 1].v);
  return Atf(Atf::Unchecked{}, std::move(out), std::move(cost));
}

Atf compose(const Atf& f, const Atf& g) {
  auto r = try_compose(f, g);
  if (!r) throw EmptyDomain("composition has an empty domain");
  return std::move(*r);
}

namespace {

std::optional<Atf> chain_rec(std::span<const Atf* const> list) {
  if (list.size() == 1) return *list[0];
  const std::size_t mid = list.size() / 2;
  auto lo = chain_rec(list.first(mid));
  if (!lo) return std::nullopt;
  auto hi = chain_rec(list.subspan(mid));
  if (!hi) return std::nullopt;
  return try_compose(*lo, *hi);
}

}  // namespace

std::optional<Atf> try_compose_chain(std::span<const Atf* const> list) {
  if (list.empty()) throw InvalidArgument("compose_chain needs a non-empty list");
  return chain_rec(list);
}

Atf compose_chain(std::span<const Atf> list) {
  std::vector<const Atf*> ptrs;
  ptrs.reserve(list.size());
  for (const auto& a : list) ptrs.push_back(&a);
  auto r = try_compose_chain(ptrs);
  if (!r) throw EmptyDomain("composition chain has an empty domain");
  return std::move(*r);
}

namespace {

enum Owner : int { kFirst = 0, kSecond = 1, kTie = 2 };

int sign_of(double d, double scale) {
  const double tol = 1e-12 * std::max(1.0, std::abs(scale));
  if (d < -tol) return -1;
  if (d > tol) return 1;
  return 0;
}

int owner_of(int s) { return s < 0 ? kFirst : s > 0 ? kSecond : kTie; }

struct OwnerSpan {
  double start;
  int owner;
};

StepCost merge_costs(const std::vector<OwnerSpan>& owners, const StepCost& ca, const StepCost& cb) {
  auto pa = ca.pieces();
  auto pb = cb.pieces();
  std::size_t io = 1, ia = 1, ib = 1;
  int own = owners[0].owner;
  double va = pa[0].c, vb = pb[0].c;
  auto value = [&] { return own == kFirst ? va : own == kSecond ? vb : std::min(va, vb); };
  std::vector<CostPiece> out{{-kInf, value()}};
  while (io < owners.size() || ia < pa.size() || ib < pb.size()) {
    double t = kInf;
    if (io < owners.size()) t = std::min(t, owners[io].start);
    if (ia < pa.size()) t = std::min(t, pa[ia].t);
    if (ib < pb.size()) t = std::min(t, pb[ib].t);
    if (io < owners.size() && owners[io].start == t) own = owners[io++].owner;
    if (ia < pa.size() && pa[ia].t == t) va = pa[ia++].c;
    if (ib < pb.size() && pb[ib].t == t) vb = pb[ib++].c;
    out.push_back({t, value()});
  }
  return StepCost::from_pieces(std::move(out));
}

}  // namespace

Atf min2(const Atf& a, const Atf& b) {
  const double T = std::min(a.t_max(), b.t_max());
  const double x0 = std::min(std::min(a.t_min(), b.t_min()), T);
  auto A = a.breakpoints();
  auto B = b.breakpoints();

  std::vector<double> xs{x0};
  {
    std::size_t i = 0, j = 0;
    while (i < A.size() || j < B.size()) {
      double x;
      if (j == B.size() || (i < A.size() && A[i].t <= B[j].t)) {
        x = A[i++].t;
      } else {
        x = B[j++].t;
      }
      if (x <= xs.back() || x >= T) continue;
      if (x - xs.back() <= EPS_T) continue;
      xs.push_back(x);
    }
    if (T - xs.back() > EPS_T) {
      xs.push_back(T);
    } else {
      xs.back() = T;
    }
  }

  Cursor ea(A), eb(B);
  std::vector<double> va(xs.size()), vb(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    va[k] = ea(xs[k]);
    vb[k] = eb(xs[k]);
  }

  std::vector<Breakpoint> out;
  out.reserve(2 * xs.size());
  std::vector<OwnerSpan> owners;
  auto add_owner = [&](double start, int o) {
    if (!owners.empty() && owners.back().owner == o) return;
    if (!owners.empty() && owners.back().start == start) {
      owners.back().owner = o;
      if (owners.size() >= 2 && owners[owners.size() - 2].owner == o) owners.pop_back();
      return;
    }
    owners.push_back({start, o});
  };

  int s0 = sign_of(va[0] - vb[0], va[0]);
  add_owner(-kInf, owner_of(s0));
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    out.push_back({xs[k], std::min(va[k], vb[k])});
    const double d0 = va[k] - vb[k], d1 = va[k + 1] - vb[k + 1];
    const int sa = sign_of(d0, va[k]), sb = sign_of(d1, va[k + 1]);
    if (sa * sb < 0) {
      const double w = d0 / (d0 - d1);
      const double x = xs[k] + (xs[k + 1] - xs[k]) * w;
      const double y = va[k] + (va[k + 1] - va[k]) * w;
      if (x > xs[k] && x < xs[k + 1]) {
        out.push_back({x, std::clamp(y, out.back().v, std::min(va[k + 1], vb[k + 1]))});
        add_owner(xs[k], owner_of(sa));
        add_owner(x, owner_of(sb));
      } else {
        add_owner(xs[k], owner_of(x <= xs[k] ? sb : sa));
      }
    } else {
      add_owner(xs[k], owner_of(sa != 0 ? sa : sb));
    }
  }
  out.push_back({xs.back(), std::min(va.back(), vb.back())});
  if (xs.size() == 1) owners.assign({{-kInf, owner_of(s0)}});

  for (std::size_t i = 1; i < out.size(); ++i) out[i].v = std::max(out[i].v, out[i - 1].v);
  StepCost cost = merge_costs(owners, a.cost().truncated(T), b.cost().truncated(T));
  return Atf(Atf::Unchecked{}, std::move(out), std::move(cost));
}

}  // namespace tdroute::plf
