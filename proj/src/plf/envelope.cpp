#include "tdroute/plf/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdroute::plf {

PiecewiseLinear::PiecewiseLinear(std::vector<Point> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw InvalidArgument("piecewise-linear function needs a point");
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    if (!(pts_[i].x > pts_[i - 1].x)) throw InvalidArgument("abscissae must increase");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (x < x_min() - EPS_T || x > x_max() + EPS_T) throw OutOfDomain("outside piecewise-linear domain");
  if (x <= x_min()) return pts_.front().y;
  if (x >= x_max()) return pts_.back().y;
  auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                             [](double v, const Point& p) { return v < p.x; });
  const Point& q = *it;
  const Point& p = *(it - 1);
  return p.y + (q.y - p.y) * ((x - p.x) / (q.x - p.x));
}

std::size_t ConcaveEnvelope::piece_at(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
}

double ConcaveEnvelope::operator()(double x) const { return lines[piece_at(x)](x); }

PiecewiseLinear ConcaveEnvelope::on(double x0, double x1) const {
  std::vector<Point> pts{{x0, (*this)(x0)}};
  for (std::size_t i = piece_at(x0); i < breaks.size() && breaks[i] < x1; ++i) {
    if (breaks[i] > x0) pts.push_back({breaks[i], lines[i + 1](breaks[i])});
  }
  if (x1 > x0) pts.push_back({x1, (*this)(x1)});
  return PiecewiseLinear(std::move(pts));
}

ConcaveEnvelope envelope_affine(std::span<const Line> lines) {
  ConcaveEnvelope env;
  auto& hull = env.lines;
  auto& br = env.breaks;
  for (std::size_t r = lines.size(); r-- > 0;) {
    const Line& l = lines[r];
    if (!hull.empty() && hull.back().slope == l.slope) {
      if (l.intercept > hull.back().intercept) continue;
      hull.pop_back();
      if (!br.empty()) br.pop_back();
    }
    double x = 0.0;
    while (!hull.empty()) {
      const Line& h = hull.back();
      x = (l.intercept - h.intercept) / (h.slope - l.slope);
      if (!br.empty() && x <= br.back()) {
        hull.pop_back();
        br.pop_back();
        continue;
      }
      break;
    }
    if (!hull.empty()) br.push_back(x);
    hull.push_back(l);
  }
  return env;
}

std::vector<std::vector<std::size_t>> multi_sort(std::span<const double> values,
                                                 std::span<const std::vector<std::size_t>> sets) {
  // inverted lists: for each value index, the sets that contain it
  std::vector<std::size_t> head(values.size() + 1, 0);
  for (const auto& s : sets) {
    for (std::size_t x : s) {
      if (x >= values.size()) throw IndexOutOfRange("multi_sort index");
      ++head[x + 1];
    }
  }
  std::partial_sum(head.begin(), head.end(), head.begin());
  std::vector<std::size_t> members(head.back());
  {
    std::vector<std::size_t> fill(head.begin(), head.end() - 1);
    for (std::size_t si = 0; si < sets.size(); ++si) {
      for (std::size_t x : sets[si]) members[fill[x]++] = si;
    }
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::vector<std::size_t>> out(sets.size());
  for (std::size_t si = 0; si < sets.size(); ++si) out[si].reserve(sets[si].size());
  for (std::size_t x : order) {
    for (std::size_t m = head[x]; m < head[x + 1]; ++m) out[members[m]].push_back(x);
  }
  return out;
}

namespace {

struct Event {
  double x;
  int fn;
};

struct Node {
  std::size_t first_leaf;
  std::size_t leaves;
  std::vector<int> assigned;  // -1 marks a padding function
};

class MinN {
 public:
  explicit MinN(std::span<const PiecewiseLinear> fs) : fs_(fs) {}

  LabeledMinimum run();

 private:
  std::size_t seg_at(int fn, std::size_t leaf) const {
    const auto& ev = events_of_[fn];
    return seg_base_[fn] + static_cast<std::size_t>(std::lower_bound(ev.begin(), ev.end(), leaf) - ev.begin());
  }
  void assign(std::size_t first_leaf, int depth, std::vector<int> fns);
  void chunk(std::size_t first_leaf);

  std::span<const PiecewiseLinear> fs_;
  double x0_ = 0, x1_ = 0;
  std::vector<Line> seg_;
  std::vector<int> seg_fn_;
  std::vector<std::size_t> seg_base_;
  std::vector<Event> events_;
  std::vector<std::vector<std::size_t>> events_of_;
  std::vector<double> bx_;
  std::size_t leaves_ = 0;
  int k_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::size_t> stamp_;
  std::size_t stamp_gen_ = 0;
  std::vector<Point> out_;
  std::vector<int> owner_;
};

void MinN::assign(std::size_t first_leaf, int depth, std::vector<int> fns) {
  if (depth == 0) return;
  const std::size_t half = std::size_t{1} << (depth - 1);
  for (int side = 0; side < 2; ++side) {
    const std::size_t lo = first_leaf + side * half;
    ++stamp_gen_;
    // functions with a breakpoint strictly inside this child are not affine on it
    for (std::size_t e = lo; e + 1 < lo + half && e < events_.size(); ++e) stamp_[events_[e].fn] = stamp_gen_;
    Node node{lo, half, {}};
    std::vector<int> rest;
    for (int f : fns) {
      bool affine = f < 0 || stamp_[f] != stamp_gen_;
      if (affine && node.assigned.size() < half) {
        node.assigned.push_back(f);
      } else {
        rest.push_back(f);
      }
    }
    nodes_.push_back(std::move(node));
    assign(lo, depth - 1, std::move(rest));
  }
}

void MinN::chunk(std::size_t first_leaf) {
  const std::size_t C = std::size_t{1} << k_;
  nodes_.clear();
  std::vector<int> all(C - 1, -1);
  for (std::size_t i = 0; i < fs_.size(); ++i) all[i] = static_cast<int>(i);
  assign(first_leaf, k_, std::move(all));

  // per-node envelopes of the assigned segments, sorted by slope together
  std::vector<double> slopes(seg_.size());
  for (std::size_t g = 0; g < seg_.size(); ++g) slopes[g] = seg_[g].slope;
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> set_node;
  for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
    std::vector<std::size_t> s;
    for (int f : nodes_[ni].assigned) {
      if (f >= 0) s.push_back(seg_at(f, nodes_[ni].first_leaf));
    }
    if (s.empty()) continue;
    sets.push_back(std::move(s));
    set_node.push_back(ni);
  }
  auto sorted = multi_sort(slopes, sets);

  std::vector<std::vector<std::size_t>> cand(C);
  std::vector<Line> buf;
  for (std::size_t si = 0; si < sorted.size(); ++si) {
    buf.clear();
    for (std::size_t g : sorted[si]) buf.push_back({seg_[g].slope, seg_[g].intercept, static_cast<int>(g)});
    ConcaveEnvelope env = envelope_affine(buf);
    const Node& nd = nodes_[set_node[si]];
    std::size_t p = 0;
    for (std::size_t l = nd.first_leaf; l < nd.first_leaf + nd.leaves && l < leaves_; ++l) {
      const double a = bx_[l], b = bx_[l + 1];
      if (!(b > a)) continue;
      while (p < env.breaks.size() && env.breaks[p] <= a) ++p;
      for (std::size_t q = p; q < env.lines.size(); ++q) {
        if (q > 0 && env.breaks[q - 1] >= b) break;
        cand[l - first_leaf].push_back(static_cast<std::size_t>(env.lines[q].label));
      }
    }
  }

  std::vector<std::vector<std::size_t>> leaf_sets;
  std::vector<std::size_t> leaf_ids;
  for (std::size_t i = 0; i < C; ++i) {
    if (cand[i].empty()) continue;
    leaf_sets.push_back(std::move(cand[i]));
    leaf_ids.push_back(first_leaf + i);
  }
  auto leaf_sorted = multi_sort(slopes, leaf_sets);
  for (std::size_t li = 0; li < leaf_sorted.size(); ++li) {
    const std::size_t l = leaf_ids[li];
    buf.clear();
    for (std::size_t g : leaf_sorted[li]) buf.push_back({seg_[g].slope, seg_[g].intercept, static_cast<int>(g)});
    ConcaveEnvelope env = envelope_affine(buf);
    const double a = bx_[l], b = bx_[l + 1];
    std::size_t p = env.piece_at(a);
    if (out_.empty() || out_.back().x < a) {
      out_.push_back({a, env(a)});
    }
    for (; p < env.breaks.size() && env.breaks[p] < b; ++p) {
      owner_.push_back(seg_fn_[env.lines[p].label]);
      out_.push_back({env.breaks[p], env.lines[p + 1](env.breaks[p])});
    }
    owner_.push_back(seg_fn_[env.lines[p].label]);
    out_.push_back({b, env(b)});
  }
}

LabeledMinimum MinN::run() {
  const std::size_t n = fs_.size();
  x0_ = fs_[0].x_min();
  x1_ = fs_[0].x_max();
  for (const auto& f : fs_) {
    if (std::abs(f.x_min() - x0_) > EPS_T || std::abs(f.x_max() - x1_) > EPS_T)
      throw MismatchedDomain("min_n inputs must share one domain");
  }
  if (n == 1) {
    return {fs_[0], std::vector<int>(fs_[0].size() > 1 ? fs_[0].size() - 1 : 0, 0)};
  }
  if (!(x1_ > x0_)) {
    double y = kInf;
    for (const auto& f : fs_) y = std::min(y, f.points().front().y);
    return {PiecewiseLinear({{x0_, y}}), {}};
  }

  // coordinates relative to x0 keep intercepts small
  seg_base_.resize(n);
  events_of_.resize(n);
  for (std::size_t h = 0; h < n; ++h) {
    seg_base_[h] = seg_.size();
    auto P = fs_[h].points();
    for (std::size_t i = 0; i + 1 < P.size(); ++i) {
      const double s = (P[i + 1].y - P[i].y) / (P[i + 1].x - P[i].x);
      seg_.push_back({s, P[i].y - s * (P[i].x - x0_), -1});
      seg_fn_.push_back(static_cast<int>(h));
      if (i > 0) events_.push_back({P[i].x - x0_, static_cast<int>(h)});
    }
  }
  // ties in x are ordered by function index, a symbolic perturbation
  std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
    return a.x < b.x || (a.x == b.x && a.fn < b.fn);
  });
  for (std::size_t e = 0; e < events_.size(); ++e) events_of_[events_[e].fn].push_back(e);

  leaves_ = events_.size() + 1;
  bx_.resize(leaves_ + 1);
  bx_[0] = 0.0;
  for (std::size_t e = 0; e < events_.size(); ++e) bx_[e + 1] = events_[e].x;
  bx_[leaves_] = x1_ - x0_;
  while (k_ < 62 && ((std::size_t{1} << k_) - 1) < n) ++k_;
  const std::size_t C = std::size_t{1} << k_;
  stamp_.assign(n, 0);
  for (std::size_t first = 0; first < leaves_; first += C) chunk(first);

  for (auto& p : out_) p.x += x0_;
  out_.front().x = x0_;
  out_.back().x = x1_;
  // drop collinear points with the same owner
  std::vector<Point> pts{out_[0]};
  std::vector<int> own;
  for (std::size_t i = 1; i < out_.size(); ++i) {
    if (out_[i].x - pts.back().x <= 0) continue;
    if (own.size() >= 1 && own.back() == owner_[i - 1]) {
      const Point& a = pts[pts.size() - 2];
      const Point& b = pts.back();
      const double s1 = (b.y - a.y) / (b.x - a.x);
      const double s2 = (out_[i].y - b.y) / (out_[i].x - b.x);
      if (std::abs(s1 - s2) <= EPS_SLOPE) {
        pts.back() = out_[i];
        continue;
      }
    }
    pts.push_back(out_[i]);
    own.push_back(owner_[i - 1]);
  }
  return {PiecewiseLinear(std::move(pts)), std::move(own)};
}

}  // namespace

LabeledMinimum min_n_labeled(std::span<const PiecewiseLinear> fs) {
  if (fs.empty()) throw InvalidArgument("min_n needs at least one function");
  return MinN(fs).run();
}

PiecewiseLinear min_n(std::span<const PiecewiseLinear> fs) { return min_n_labeled(fs).f; }

Atf min_n(std::span<const Atf> fs) {
  if (fs.empty()) throw InvalidArgument("min_n needs at least one function");
  if (fs.size() == 1) return fs[0];
  double T = kInf, x0 = kInf;
  for (const auto& a : fs) {
    T = std::min(T, a.t_max());
    x0 = std::min(x0, a.t_min());
  }
  x0 = std::min(x0, T);
  std::vector<PiecewiseLinear> pl;
  pl.reserve(fs.size());
  for (const auto& a : fs) {
    std::vector<Point> pts{{x0, a(x0)}};
    for (const auto& b : a.breakpoints()) {
      if (b.t > x0 && b.t < T) pts.push_back({b.t, b.v});
    }
    if (T > x0) pts.push_back({T, a(T)});
    pl.emplace_back(std::move(pts));
  }
  LabeledMinimum m = min_n_labeled(pl);
  auto P = m.f.points();
  std::vector<Breakpoint> bps;
  bps.reserve(P.size());
  for (const auto& p : P) bps.push_back({p.x, std::max(p.y, bps.empty() ? p.y : bps.back().v)});

  // cost follows the minimal input; ties fall to the lower semi-continuous rule
  std::vector<CostPiece> cost;
  auto add = [&](double t, double c) {
    if (!cost.empty() && cost.back().t >= t) {
      cost.back().c = c;
    } else {
      cost.push_back({t, c});
    }
  };
  const int first_owner = m.owner.empty() ? 0 : m.owner.front();
  for (const auto& piece : fs[first_owner].cost().pieces()) {
    if (piece.t < x0) add(piece.t, piece.c);
  }
  for (std::size_t s = 0; s < m.owner.size(); ++s) {
    const StepCost& c = fs[m.owner[s]].cost();
    const double a = P[s].x, b = P[s + 1].x;
    add(a, c.right_value(a));
    for (const auto& piece : c.pieces()) {
      if (piece.t > a && piece.t < b) add(piece.t, piece.c);
    }
  }
  return Atf(Atf::Unchecked{}, std::move(bps), StepCost::from_pieces(std::move(cost)));
}

}  // namespace tdroute::plf
