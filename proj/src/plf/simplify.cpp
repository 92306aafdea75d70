#include "tdroute/plf/simplify.hpp"

#include "tdroute/plf/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tdroute::plf {

namespace {

struct Vec2 {
  double a;  // line value at the window's right end b
  double b;  // line value at the probe abscissa c
};

// alpha * p.a + beta * p.b <= gamma
struct HalfPlane {
  double alpha, beta, gamma;
  double eval(const Vec2& p) const { return alpha * p.a + beta * p.b - gamma; }
};

using Polygon = std::vector<Vec2>;

Polygon clip(const Polygon& poly, const HalfPlane& h) {
  if (poly.empty()) return {};
  const double tol = 1e-10 * std::max(1.0, std::abs(h.gamma));
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double dp = h.eval(p), dq = h.eval(q);
    if (dp <= tol) out.push_back(p);
    if ((dp < -tol && dq > tol) || (dp > tol && dq < -tol)) {
      const double w = dp / (dp - dq);
      out.push_back({p.a + (q.a - p.a) * w, p.b + (q.b - p.b) * w});
    }
    if (n == 1) break;
  }
  return out;
}

struct Window {
  Point A;  // left end
  Point B;  // right end
  bool a_upper;  // A lies on the upper chain; the way on is above the window
};

class Corridor {
 public:
  Corridor(const Atf& f, double eps) : f_(f), bps_(f.breakpoints()), eps_(eps) {}

  Atf run();

 private:
  double lo(double x) const { return f_(x); }
  double hi(double x) const { return f_(x) + eps_; }
  // index of the first breakpoint with t > x
  std::size_t after(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(bps_.begin(), bps_.end(), x, [](double v, const Breakpoint& b) { return v < b.t; }) -
        bps_.begin());
  }
  double line_at(const Vec2& p, double x) const { return p.a + (p.b - p.a) * ((x - b_) / (c_ - b_)); }
  HalfPlane at_most(double x, double y) const {
    const double lam = (x - b_) / (c_ - b_);
    return {1.0 - lam, lam, y};
  }
  HalfPlane at_least(double x, double y) const {
    const double lam = (x - b_) / (c_ - b_);
    return {lam - 1.0, -lam, -y};
  }
  Point cross_window(const Vec2& p, const Window& w) const;
  bool tight(const Vec2& p, double x, bool upper) const {
    const double y = upper ? hi(x) : lo(x);
    return std::abs(line_at(p, x) - y) <= 1e-9 * std::max(1.0, std::abs(y));
  }

  const Atf& f_;
  std::span<const Breakpoint> bps_;
  double eps_;
  double b_ = 0, c_ = 1;
};

Point Corridor::cross_window(const Vec2& p, const Window& w) const {
  const double da = line_at(p, w.A.x) - w.A.y;
  const double db = line_at(p, w.B.x) - w.B.y;
  if (da == db) return w.A;
  const double lam = std::clamp(da / (da - db), 0.0, 1.0);
  const double x = w.A.x + (w.B.x - w.A.x) * lam;
  return {x, line_at(p, x)};
}

Atf Corridor::run() {
  const double t_end = f_.t_max();
  const double h0 = bps_.front().v + eps_;
  Window w;
  {
    // first point where f climbs to f(t_min) + eps
    std::size_t i = 1;
    while (bps_[i].v < h0) ++i;
    const auto& p = bps_[i - 1];
    const auto& q = bps_[i];
    double x = p.t + (h0 - p.v) * ((q.t - p.t) / (q.v - p.v));
    x = std::clamp(x, p.t, q.t);
    w = {{bps_.front().t, h0}, {x, h0}, true};
  }

  std::vector<Breakpoint> out;
  auto emit = [&](Point p) {
    if (!out.empty() && p.x <= out.back().t) {
      out.back().v = std::max(out.back().v, p.y);
      return;
    }
    out.push_back({p.x, p.y});
  };

  while (true) {
    const double a = w.A.x;
    b_ = w.B.x;
    std::size_t ci = after(b_ + EPS_T);
    if (ci >= bps_.size()) {
      // the window already touches the end of the domain
      emit(w.A);
      emit({t_end, std::clamp(w.B.y, lo(t_end), hi(t_end))});
      break;
    }
    c_ = bps_[ci].t;

    Polygon F;
    if (w.a_upper) {
      F = {{w.B.y, lo(c_)}, {hi(b_), lo(c_)}, {hi(b_), hi(c_)}, {w.B.y, hi(c_)}};
      F = clip(F, at_most(a, w.A.y));
      for (std::size_t j = after(a); j < bps_.size() && bps_[j].t < b_; ++j) F = clip(F, at_most(bps_[j].t, hi(bps_[j].t)));
    } else {
      F = {{lo(b_), lo(c_)}, {w.B.y, lo(c_)}, {w.B.y, hi(c_)}, {lo(b_), hi(c_)}};
      F = clip(F, at_least(a, w.A.y));
      for (std::size_t j = after(a); j < bps_.size() && bps_[j].t < b_; ++j) F = clip(F, at_least(bps_[j].t, lo(bps_[j].t)));
    }
    if (F.empty()) {
      // rounding only: the chain itself leaves the window's end
      F = {{w.B.y, w.a_upper ? lo(c_) : hi(c_)}};
    }

    double z_prev = c_;
    std::size_t zi = ci + 1;
    double reach = kInf;
    bool exit_low = true;
    while (zi < bps_.size()) {
      const double z = bps_[zi].t;
      double xl = z_prev, xu = z_prev;
      for (const auto& p : F) {
        const double l0 = line_at(p, z_prev) - lo(z_prev), l1 = line_at(p, z) - lo(z);
        const double u0 = line_at(p, z_prev) - hi(z_prev), u1 = line_at(p, z) - hi(z);
        xl = std::max(xl, l1 >= 0 ? z : z_prev + (z - z_prev) * (std::max(l0, 0.0) / (l0 - l1)));
        xu = std::max(xu, u1 <= 0 ? z : z_prev + (z - z_prev) * (std::min(u0, 0.0) / (u0 - u1)));
      }
      if (std::min(xl, xu) >= z) {
        Polygon G = clip(clip(F, at_least(z, lo(z))), at_most(z, hi(z)));
        if (!G.empty()) {
          F = std::move(G);
          z_prev = z;
          ++zi;
          continue;
        }
      }
      reach = std::min(std::min(xl, xu), z);
      exit_low = xl <= xu;
      break;
    }

    auto steepest = [](const Polygon& P) {
      return *std::max_element(P.begin(), P.end(),
                               [](const Vec2& x, const Vec2& y) { return (x.b - x.a) < (y.b - y.a); });
    };

    if (reach == kInf) {
      const Vec2 l = steepest(F);
      emit(cross_window(l, w));
      emit({t_end, std::clamp(line_at(l, t_end), lo(t_end), hi(t_end))});
      break;
    }

    Polygon G = clip(clip(F, at_least(reach, lo(reach))), at_most(reach, hi(reach)));
    const Vec2 l = steepest(G.empty() ? F : G);
    const Point q = cross_window(l, w);
    emit(q);

    // new window: along l from its last contact with the chain opposite the exit
    const bool opp_upper = exit_low;
    Point start = q;
    if (w.a_upper == opp_upper && w.A.x >= q.x && tight(l, w.A.x, opp_upper)) {
      start = w.A;
    }
    if (!w.a_upper == opp_upper && w.B.x >= q.x && tight(l, w.B.x, opp_upper)) {
      start = w.B;
    }
    for (std::size_t j = after(q.x); j < bps_.size() && bps_[j].t < reach; ++j) {
      const double x = bps_[j].t;
      if (x > start.x && tight(l, x, opp_upper)) {
        start = {x, line_at(l, x)};
        }
    }
    const Point exit{reach, exit_low ? lo(reach) : hi(reach)};
    if (!(exit.x > start.x)) start = q;
    w = {start, exit, opp_upper};
  }
  return Atf(Atf::Unchecked{}, std::move(out), f_.cost());
}

}  // namespace

Atf simplify(const Atf& f, double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) throw InvalidEpsilon("epsilon must be positive");
  auto bps = f.breakpoints();
  if (bps.back().v <= bps.front().v + eps) return Atf::constant(bps.back().v, f.t_max(), f.cost());
  return Corridor(f, eps).run();
}

double default_epsilon(const Atf& f) { return 0.005 * f.travel_bounds().lo; }

Atf simplify_default(const Atf& f) {
  const double eps = default_epsilon(f);
  if (!(eps > 0)) return f;
  return simplify(f, eps);
}

Atf polish(const Atf& g, const Atf& f, double eps) {
  (void)eps;
  std::vector<Breakpoint> q(g.breakpoints().begin(), g.breakpoints().end());
  auto F = f.breakpoints();
  auto between = [&](double x0, double x1) {
    auto lo = std::upper_bound(F.begin(), F.end(), x0, [](double v, const Breakpoint& b) { return v < b.t; });
    auto hi = std::lower_bound(F.begin(), F.end(), x1, [](const Breakpoint& b, double v) { return b.t < v; });
    return std::span<const Breakpoint>(lo, hi < lo ? lo : hi);
  };
  for (std::size_t j = 0; j < q.size(); ++j) {
    double need = f(q[j].t);
    if (j > 0) {
      need = std::max(need, q[j - 1].v);
      const double x0 = q[j - 1].t, y0 = q[j - 1].v, x1 = q[j].t;
      for (const auto& s : between(x0, x1)) {
        const double w = (s.t - x0) / (x1 - x0);
        need = std::max(need, y0 + (s.v - y0) / w);
      }
    }
    if (j + 1 < q.size()) {
      const double x1 = q[j + 1].t, y1 = q[j + 1].v, x0 = q[j].t;
      for (const auto& s : between(x0, x1)) {
        const double w = (s.t - x0) / (x1 - x0);
        need = std::max(need, (s.v - w * y1) / (1.0 - w));
      }
    }
    if (need < q[j].v) q[j].v = need;
  }
  return Atf(Atf::Unchecked{}, std::move(q), g.cost());
}

}  // namespace tdroute::plf
