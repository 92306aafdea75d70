#include "tdroute/plf/step_cost.hpp"

#include <algorithm>
#include <cmath>

namespace tdroute::plf {

StepCost StepCost::constant(double c) { return StepCost({{-kInf, c}}); }

StepCost StepCost::from_pieces(std::vector<CostPiece> pieces) {
  if (pieces.empty()) return StepCost();
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (!(pieces[i].t > pieces[i - 1].t))
      throw InvalidArgument("step cost pieces must have increasing starts");
  }
  for (const auto& p : pieces) {
    if (!std::isfinite(p.c)) throw InvalidArgument("step cost value must be finite");
  }
  pieces[0].t = -kInf;
  StepCost s(std::move(pieces));
  s.normalize();
  return s;
}

std::size_t StepCost::piece_at(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double x, const CostPiece& p) { return x < p.t; });
  return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

double StepCost::operator()(double t) const {
  std::size_t i = piece_at(t);
  if (i > 0 && pieces_[i].t == t) return std::min(pieces_[i - 1].c, pieces_[i].c);
  return pieces_[i].c;
}

double StepCost::right_value(double t) const { return pieces_[piece_at(t)].c; }

double StepCost::left_limit(double t) const {
  std::size_t i = piece_at(t);
  if (i > 0 && pieces_[i].t == t) return pieces_[i - 1].c;
  return pieces_[i].c;
}

double StepCost::min_near(double t, double tol) const {
  double c = kInf;
  for (std::size_t i = piece_at(t - tol), j = piece_at(t + tol); i <= j; ++i) c = std::min(c, pieces_[i].c);
  return c;
}

StepCost StepCost::truncated(double t_max) const {
  std::vector<CostPiece> p;
  for (const auto& q : pieces_) {
    if (q.t > t_max) break;
    p.push_back(q);
  }
  StepCost s(std::move(p));
  return s;
}

StepCost StepCost::operator+(const StepCost& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  std::vector<CostPiece> out;
  out.reserve(pieces_.size() + o.pieces_.size());
  std::size_t i = 0, j = 0;
  double ci = pieces_[0].c, cj = o.pieces_[0].c;
  out.push_back({-kInf, ci + cj});
  i = j = 1;
  while (i < pieces_.size() || j < o.pieces_.size()) {
    double ti = i < pieces_.size() ? pieces_[i].t : kInf;
    double tj = j < o.pieces_.size() ? o.pieces_[j].t : kInf;
    double t = std::min(ti, tj);
    if (ti == t) ci = pieces_[i++].c;
    if (tj == t) cj = o.pieces_[j++].c;
    out.push_back({t, ci + cj});
  }
  StepCost s(std::move(out));
  s.normalize();
  return s;
}

StepCost StepCost::scaled(double k) const {
  StepCost s = *this;
  for (auto& p : s.pieces_) p.c *= k;
  s.normalize();
  return s;
}

void StepCost::normalize() {
  std::size_t w = 1;
  for (std::size_t r = 1; r < pieces_.size(); ++r) {
    const double prev = pieces_[w - 1].c;
    const double tol = 1e-12 * std::max(1.0, std::abs(prev));
    if (std::abs(pieces_[r].c - prev) <= tol) continue;
    pieces_[w++] = pieces_[r];
  }
  pieces_.resize(w);
}

bool operator==(const StepCost& a, const StepCost& b) {
  if (a.pieces_.size() != b.pieces_.size()) return false;
  for (std::size_t i = 0; i < a.pieces_.size(); ++i) {
    if (a.pieces_[i].t != b.pieces_[i].t || a.pieces_[i].c != b.pieces_[i].c) return false;
  }
  return true;
}

}  // namespace tdroute::plf
