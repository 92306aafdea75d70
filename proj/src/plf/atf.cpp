#include "tdroute/plf/atf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tdroute::plf {

namespace {

double slope(const Breakpoint& a, const Breakpoint& b) { return (b.v - a.v) / (b.t - a.t); }

}  // namespace

void normalize_breakpoints(std::vector<Breakpoint>& bps) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < bps.size(); ++r) {
    Breakpoint p = bps[r];
    if (w > 0 && p.t - bps[w - 1].t <= EPS_T) {
      // coincident abscissae: keep the later value, it is the one reached by
      // the following segment
      p.v = std::max(p.v, bps[w - 1].v);
      p.t = std::max(p.t, bps[w - 1].t);
      bps[w - 1] = p;
      continue;
    }
    while (w >= 2 && std::abs(slope(bps[w - 2], bps[w - 1]) - slope(bps[w - 1], p)) <= EPS_SLOPE) --w;
    // leading flat piece merges into the constant prefix
    if (w == 1 && std::abs(p.v - bps[0].v) <= EPS_SLOPE * (p.t - bps[0].t)) w = 0;
    bps[w++] = p;
  }
  bps.resize(w);
}

Atf::Atf(std::vector<Breakpoint> bps, StepCost cost) : bps_(std::move(bps)), cost_(std::move(cost)) {
  auto problems = check(bps_);
  if (!problems.empty()) throw InvalidArgument("invalid ATF: " + problems.front());
  for (std::size_t i = 1; i < bps_.size(); ++i) bps_[i].v = std::max(bps_[i].v, bps_[i - 1].v);
  normalize();
}

Atf::Atf(Unchecked, std::vector<Breakpoint> bps, StepCost cost)
    : bps_(std::move(bps)), cost_(std::move(cost)) {
  normalize();
}

void Atf::normalize() {
  normalize_breakpoints(bps_);
  cost_ = cost_.truncated(t_max());
}

std::vector<std::string> Atf::check(std::span<const Breakpoint> bps) {
  std::vector<std::string> out;
  if (bps.empty()) {
    out.push_back("no breakpoints");
    return out;
  }
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const auto& p = bps[i];
    std::ostringstream at;
    at << " at breakpoint " << i;
    if (!std::isfinite(p.t) || !std::isfinite(p.v)) out.push_back("non-finite coordinate" + at.str());
    const double tol = 1e-9 * std::max(1.0, std::abs(p.t));
    if (p.v < p.t - tol) out.push_back("negative travel time" + at.str());
    if (i > 0) {
      if (!(p.t > bps[i - 1].t)) out.push_back("abscissae not increasing" + at.str());
      if (p.v < bps[i - 1].v - tol) out.push_back("arrival decreases (FIFO)" + at.str());
    }
  }
  return out;
}

Atf Atf::constant(double value, double t_max, StepCost cost) {
  return Atf({{t_max, value}}, std::move(cost));
}

Atf Atf::identity(double t_max, StepCost cost) {
  return Atf(Unchecked{}, {{-kTimeBound, -kTimeBound}, {t_max, t_max}}, std::move(cost));
}

Atf Atf::window(double open, double close, double duration, StepCost cost) {
  if (close < open) throw InvalidArgument("window closes before it opens");
  if (duration < 0) throw InvalidArgument("negative duration");
  if (close == open) return Atf({{open, open + duration}}, std::move(cost));
  return Atf({{open, open + duration}, {close, close + duration}}, std::move(cost));
}

Atf Atf::travel(double from, double t_max, double duration, StepCost cost) {
  if (t_max < from) throw InvalidArgument("travel domain is empty");
  if (duration < 0) throw InvalidArgument("negative duration");
  if (t_max == from) return Atf({{from, from + duration}}, std::move(cost));
  return Atf({{from, from + duration}, {t_max, t_max + duration}}, std::move(cost));
}

double Atf::interpolate(std::size_t seg, double t) const {
  // Interpolating the travel time a(t) - t keeps slope-1 pieces exact.
  const auto& p = bps_[seg];
  const auto& q = bps_[seg + 1];
  const double d0 = p.v - p.t;
  const double d1 = q.v - q.t;
  double v = t + d0 + (t - p.t) * ((d1 - d0) / (q.t - p.t));
  return std::clamp(v, p.v, q.v);
}

double Atf::operator()(double t) const {
  if (t > t_max()) {
    std::ostringstream os;
    os.precision(17);
    os << "t = " << t << " beyond t_max = " << t_max();
    throw OutOfDomain(os.str());
  }
  if (t <= bps_.front().t) return bps_.front().v;
  if (t == t_max()) return bps_.back().v;
  auto it = std::upper_bound(bps_.begin(), bps_.end(), t,
                             [](double x, const Breakpoint& b) { return x < b.t; });
  std::size_t seg = static_cast<std::size_t>(it - bps_.begin()) - 1;
  return interpolate(seg, t);
}

double Atf::eval_relaxed(double t) const {
  if (t > t_max()) return bps_.back().v + (t - t_max());
  return (*this)(t);
}

bool Atf::is_identity() const {
  return bps_.size() == 2 && bps_[0].t <= -kTimeBound && bps_[0].v == bps_[0].t &&
         bps_[1].v == bps_[1].t;
}

TravelBounds Atf::travel_bounds() const {
  TravelBounds b{kInf, -kInf};
  for (const auto& p : bps_) {
    if (p.t <= -kTimeBound) continue;
    b.lo = std::min(b.lo, p.v - p.t);
    b.hi = std::max(b.hi, p.v - p.t);
  }
  if (b.lo == kInf) b.lo = b.hi = 0.0;
  b.lo = std::max(0.0, b.lo);
  b.hi = std::max(b.lo, b.hi);
  return b;
}

Atf Atf::with_cost(StepCost c) const { return Atf(Unchecked{}, bps_, std::move(c)); }

Atf Atf::restricted(double t) const {
  if (t >= t_max()) return *this;
  if (t < t_min()) return Atf(Unchecked{}, {{t, bps_.front().v}}, cost_);
  std::vector<Breakpoint> out;
  for (const auto& p : bps_) {
    if (p.t >= t) break;
    out.push_back(p);
  }
  out.push_back({t, (*this)(t)});
  return Atf(Unchecked{}, std::move(out), cost_);
}

}  // namespace tdroute::plf
