#include "tdroute/plf/text.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace tdroute::plf {

std::string format_double(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double read_double(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw InvalidArgument("unexpected end of input");
  if (tok == "-inf") return -kInf;
  if (tok == "inf") return kInf;
  double x = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw InvalidArgument("bad number '" + tok + "'");
  return x;
}

std::size_t read_count(std::istream& is) {
  long long n = 0;
  if (!(is >> n) || n < 0) throw InvalidArgument("bad count");
  return static_cast<std::size_t>(n);
}

}  // namespace

void write_text(std::ostream& os, const StepCost& c) {
  os << c.pieces().size();
  for (const auto& p : c.pieces()) os << ' ' << format_double(p.t) << ' ' << format_double(p.c);
}

void write_text(std::ostream& os, const Atf& a) {
  os << a.size();
  for (const auto& b : a.breakpoints()) os << ' ' << format_double(b.t) << ' ' << format_double(b.v);
  os << " cost ";
  write_text(os, a.cost());
}

StepCost read_step_cost(std::istream& is) {
  const std::size_t m = read_count(is);
  if (m == 0) throw InvalidArgument("step cost needs a piece");
  std::vector<CostPiece> p(m);
  for (auto& x : p) {
    x.t = read_double(is);
    x.c = read_double(is);
  }
  return StepCost::from_pieces(std::move(p));
}

Atf read_atf(std::istream& is) {
  const std::size_t b = read_count(is);
  std::vector<Breakpoint> bps(b);
  for (auto& x : bps) {
    x.t = read_double(is);
    x.v = read_double(is);
  }
  std::string kw;
  if (!(is >> kw) || kw != "cost") throw InvalidArgument("expected 'cost'");
  StepCost c = read_step_cost(is);
  return Atf(std::move(bps), std::move(c));
}

std::string to_text(const Atf& a) {
  std::ostringstream os;
  write_text(os, a);
  return os.str();
}

Atf atf_from_text(const std::string& s) {
  std::istringstream is(s);
  return read_atf(is);
}

}  // namespace tdroute::plf
