#include "tdroute/bench_io/formats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tdroute/plf/text.hpp"

namespace tdroute::bench_io {

using plf::format_double;
using solver::Item;
using solver::Stop;
using solver::Vehicle;

namespace {

// getline with a line counter and whitespace tokenizing
class Lines {
 public:
  explicit Lines(std::istream& is) : is_(is) {}
  bool next(std::vector<std::string>& tok) {
    std::string s;
    while (std::getline(is_, s)) {
      ++line_;
      tok.clear();
      std::istringstream ls(s);
      for (std::string w; ls >> w;) tok.push_back(w);
      if (!tok.empty()) return true;
    }
    return false;
  }
  std::vector<std::string> need(const char* what) {
    std::vector<std::string> tok;
    if (!next(tok)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_ + 1);
    return tok;
  }
  std::size_t line() const { return line_; }

 private:
  std::istream& is_;
  std::size_t line_ = 0;
};

double num(const std::string& s, std::size_t line, std::size_t col) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  double x = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line, col);
  return x;
}

std::size_t count(const std::string& s, std::size_t line, std::size_t col) {
  const double x = num(s, line, col);
  if (x < 0 || x != std::floor(x) || x > 1e9) throw ParseError("bad count '" + s + "'", line, col);
  return static_cast<std::size_t>(x);
}

bool numeric(const std::vector<std::string>& t) {
  for (const auto& s : t) {
    double x;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return false;
  }
  return true;
}

struct Row {
  double x, y, demand, ready, due, service;
  std::size_t p = 0, d = 0;
};

Instance euclidean(const std::string& name, const std::vector<Row>& rows, std::size_t vehicles, double cap) {
  Instance in;
  in.name = name;
  const std::size_t A = rows.size();
  in.addresses = A;
  in.depot = 0;
  in.horizon_start = rows[0].ready;
  in.horizon_end = rows[0].due;
  in.arcs.reserve(A * A);
  for (std::size_t p = 0; p < A; ++p) {
    for (std::size_t q = 0; q < A; ++q) {
      const double d = std::hypot(rows[p].x - rows[q].x, rows[p].y - rows[q].y);
      in.arcs.push_back(Atf::travel(rows[0].ready, rows[0].due, d, plf::StepCost::constant(d)));
    }
  }
  Vehicle v;
  v.start_open = rows[0].ready;
  v.start_close = rows[0].due;
  v.return_by = rows[0].due;
  v.fixed_cost = kVehicleWeight;
  v.capacity = {cap};
  in.vehicles.assign(vehicles, v);
  return in;
}

Stop stop_at(std::size_t addr, const Row& r) {
  Stop s;
  s.addr = addr;
  s.open = r.ready;
  s.close = r.due;
  s.duration = r.service;
  return s;
}

std::string base_name(const std::string& path) {
  auto s = path.substr(path.find_last_of('/') + 1);
  return s.substr(0, s.find('.'));
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0);
  return f;
}

}  // namespace

Instance parse_solomon(std::istream& is, const std::string& name) {
  Lines L(is);
  auto tok = L.need("instance name");
  const std::string nm = name.empty() ? tok[0] : name;
  std::size_t K = 0;
  double Q = 0;
  bool have_fleet = false;
  std::vector<Row> rows;
  while (L.next(tok)) {
    if (!numeric({tok[0]})) continue;  // section titles and column headers
    if (!have_fleet) {
      if (tok.size() != 2) throw ParseError("expected vehicle number and capacity", L.line());
      K = count(tok[0], L.line(), 1);
      Q = num(tok[1], L.line(), 2);
      have_fleet = true;
      continue;
    }
    if (tok.size() != 7) throw ParseError("expected 7 customer columns", L.line(), tok.size() + 1);
    Row r{};
    double* f[] = {&r.x, &r.y, &r.demand, &r.ready, &r.due, &r.service};
    if (count(tok[0], L.line(), 1) != rows.size()) throw ParseError("customer numbers must be consecutive from 0", L.line(), 1);
    for (int c = 0; c < 6; ++c) *f[c] = num(tok[c + 1], L.line(), c + 2);
    if (r.due < r.ready) throw ParseError("due date before ready time", L.line(), 6);
    rows.push_back(r);
  }
  if (!have_fleet) throw ParseError("missing vehicle section", L.line());
  if (rows.size() < 2) throw ParseError("no customers", L.line());
  Instance in = euclidean(nm, rows, K, Q);
  for (std::size_t c = 1; c < rows.size(); ++c) {
    Item it;
    it.name = std::to_string(c);
    it.preloaded = true;
    it.pickup.addr = 0;
    it.delivery = stop_at(c, rows[c]);
    it.demand = {rows[c].demand};
    in.items.push_back(std::move(it));
  }
  in.check();
  solver::compute_friends(in);
  return in;
}

Instance parse_solomon(const std::string& path) {
  auto f = open_in(path);
  return parse_solomon(f, base_name(path));
}

Instance parse_homberger(const std::string& path) { return parse_solomon(path); }

Instance parse_lilim(std::istream& is, const std::string& name) {
  Lines L(is);
  auto tok = L.need("fleet line");
  if (tok.size() < 2 || !numeric(tok)) throw ParseError("expected vehicle number and capacity", L.line());
  const std::size_t K = count(tok[0], L.line(), 1);
  const double Q = num(tok[1], L.line(), 2);
  std::vector<Row> rows;
  while (L.next(tok)) {
    if (tok.size() != 9 || !numeric(tok)) throw ParseError("expected 9 task columns", L.line());
    Row r{};
    if (count(tok[0], L.line(), 1) != rows.size()) throw ParseError("task numbers must be consecutive from 0", L.line(), 1);
    double* f[] = {&r.x, &r.y, &r.demand, &r.ready, &r.due, &r.service};
    for (int c = 0; c < 6; ++c) *f[c] = num(tok[c + 1], L.line(), c + 2);
    r.p = count(tok[7], L.line(), 8);
    r.d = count(tok[8], L.line(), 9);
    rows.push_back(r);
  }
  if (rows.size() < 3) throw ParseError("no tasks", L.line());
  Instance in = euclidean(name.empty() ? "lilim" : name, rows, K, Q);
  for (std::size_t c = 1; c < rows.size(); ++c) {
    if (rows[c].d == 0) continue;  // delivery rows are reached from their pickup
    const std::size_t d = rows[c].d;
    if (d >= rows.size() || rows[d].p != c) throw ParseError("unmatched pickup/delivery pair", 0);
    Item it;
    it.name = std::to_string(c);
    it.pickup = stop_at(c, rows[c]);
    it.delivery = stop_at(d, rows[d]);
    it.demand = {rows[c].demand};
    in.items.push_back(std::move(it));
  }
  if (in.items.empty()) throw ParseError("no pickup/delivery pairs", L.line());
  in.check();
  solver::compute_friends(in);
  return in;
}

Instance parse_lilim(const std::string& path) {
  auto f = open_in(path);
  return parse_lilim(f, base_name(path));
}

namespace {

void write_stop(std::ostream& os, const char* kw, const Stop& s) {
  os << kw << ' ' << s.addr << ' ' << format_double(s.open) << ' ' << format_double(s.close) << ' '
     << format_double(s.duration) << ' ';
  plf::write_text(os, s.penalty);
  os << '\n';
}

void expect(const std::vector<std::string>& t, const char* kw, std::size_t n, std::size_t line) {
  if (t.empty() || t[0] != kw) throw ParseError(std::string("expected '") + kw + "'", line, 1);
  if (t.size() < n) throw ParseError(std::string("too few fields after '") + kw + "'", line);
}

std::string rest(const std::vector<std::string>& t, std::size_t from) {
  std::string s;
  for (std::size_t i = from; i < t.size(); ++i) s += t[i] + ' ';
  return s;
}

template <class F>
auto wrap(std::size_t line, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
}

Stop read_stop(const std::vector<std::string>& t, const char* kw, std::size_t line) {
  expect(t, kw, 6, line);
  Stop s;
  s.addr = count(t[1], line, 2);
  s.open = num(t[2], line, 3);
  s.close = num(t[3], line, 4);
  s.duration = num(t[4], line, 5);
  s.penalty = wrap(line, [&] {
    std::istringstream is(rest(t, 5));
    return plf::read_step_cost(is);
  });
  return s;
}

}  // namespace

void write_native(std::ostream& os, const Instance& in) {
  os << "tdroute-instance\n";
  os << "name " << (in.name.empty() ? "unnamed" : in.name) << '\n';
  os << "addresses " << in.addresses << " depot " << in.depot << '\n';
  os << "horizon " << format_double(in.horizon_start) << ' ' << format_double(in.horizon_end) << '\n';
  os << "overtime " << in.model.overtime.size();
  for (const auto& p : in.model.overtime) os << ' ' << format_double(p.x) << ' ' << format_double(p.y);
  os << '\n' << "work_rate ";
  plf::write_text(os, in.model.work_rate);
  os << '\n' << "units_per_hour " << format_double(in.model.units_per_hour) << '\n';
  os << "arcs\n";
  for (std::size_t p = 0; p < in.addresses; ++p) {
    for (std::size_t q = 0; q < in.addresses; ++q) {
      os << p << ' ' << q << ' ';
      plf::write_text(os, in.arc(p, q));
      os << '\n';
    }
  }
  os << "items " << in.items.size() << '\n';
  for (const auto& it : in.items) {
    os << "item " << (it.name.empty() ? "-" : it.name) << ' ' << (it.preloaded ? 1 : 0) << ' '
       << format_double(it.unserved_penalty) << ' ' << it.demand.size();
    for (double d : it.demand) os << ' ' << format_double(d);
    os << '\n';
    write_stop(os, "pickup", it.pickup);
    write_stop(os, "delivery", it.delivery);
  }
  os << "vehicles " << in.vehicles.size() << '\n';
  for (const auto& v : in.vehicles) {
    os << "vehicle " << v.start_addr << ' ' << v.end_addr << ' ' << format_double(v.fixed_cost) << ' '
       << format_double(v.start_open) << ' ' << format_double(v.start_close) << ' ' << format_double(v.return_by)
       << ' ' << format_double(v.max_duration) << ' ' << v.capacity.size();
    for (double c : v.capacity) os << ' ' << format_double(c);
    os << '\n';
  }
  os << "end\n";
}

Instance read_native(std::istream& is) {
  Lines L(is);
  Instance in;
  auto t = L.need("header");
  expect(t, "tdroute-instance", 1, L.line());
  t = L.need("name");
  expect(t, "name", 2, L.line());
  in.name = t[1];
  t = L.need("addresses");
  expect(t, "addresses", 4, L.line());
  in.addresses = count(t[1], L.line(), 2);
  in.depot = count(t[3], L.line(), 4);
  t = L.need("horizon");
  expect(t, "horizon", 3, L.line());
  in.horizon_start = num(t[1], L.line(), 2);
  in.horizon_end = num(t[2], L.line(), 3);
  t = L.need("overtime");
  expect(t, "overtime", 2, L.line());
  const std::size_t k = count(t[1], L.line(), 2);
  if (t.size() != 2 + 2 * k) throw ParseError("overtime knot count mismatch", L.line());
  for (std::size_t i = 0; i < k; ++i)
    in.model.overtime.push_back({num(t[2 + 2 * i], L.line(), 3 + 2 * i), num(t[3 + 2 * i], L.line(), 4 + 2 * i)});
  t = L.need("work_rate");
  expect(t, "work_rate", 2, L.line());
  in.model.work_rate = wrap(L.line(), [&] {
    std::istringstream s(rest(t, 1));
    return plf::read_step_cost(s);
  });
  t = L.need("units_per_hour");
  expect(t, "units_per_hour", 2, L.line());
  in.model.units_per_hour = num(t[1], L.line(), 2);
  t = L.need("arcs");
  expect(t, "arcs", 1, L.line());
  in.arcs.reserve(in.addresses * in.addresses);
  for (std::size_t p = 0; p < in.addresses; ++p) {
    for (std::size_t q = 0; q < in.addresses; ++q) {
      t = L.need("arc");
      if (t.size() < 3 || count(t[0], L.line(), 1) != p || count(t[1], L.line(), 2) != q)
        throw ParseError("arcs must be listed row by row", L.line());
      in.arcs.push_back(wrap(L.line(), [&] {
        std::istringstream s(rest(t, 2));
        return plf::read_atf(s);
      }));
    }
  }
  t = L.need("items");
  expect(t, "items", 2, L.line());
  const std::size_t n = count(t[1], L.line(), 2);
  for (std::size_t i = 0; i < n; ++i) {
    t = L.need("item");
    expect(t, "item", 5, L.line());
    Item it;
    it.name = t[1];
    it.preloaded = count(t[2], L.line(), 3) != 0;
    it.unserved_penalty = num(t[3], L.line(), 4);
    const std::size_t dims = count(t[4], L.line(), 5);
    if (t.size() != 5 + dims) throw ParseError("demand count mismatch", L.line());
    for (std::size_t d = 0; d < dims; ++d) it.demand.push_back(num(t[5 + d], L.line(), 6 + d));
    t = L.need("pickup");
    it.pickup = read_stop(t, "pickup", L.line());
    t = L.need("delivery");
    it.delivery = read_stop(t, "delivery", L.line());
    in.items.push_back(std::move(it));
  }
  t = L.need("vehicles");
  expect(t, "vehicles", 2, L.line());
  const std::size_t V = count(t[1], L.line(), 2);
  for (std::size_t i = 0; i < V; ++i) {
    t = L.need("vehicle");
    expect(t, "vehicle", 9, L.line());
    Vehicle v;
    v.start_addr = count(t[1], L.line(), 2);
    v.end_addr = count(t[2], L.line(), 3);
    v.fixed_cost = num(t[3], L.line(), 4);
    v.start_open = num(t[4], L.line(), 5);
    v.start_close = num(t[5], L.line(), 6);
    v.return_by = num(t[6], L.line(), 7);
    v.max_duration = num(t[7], L.line(), 8);
    const std::size_t dims = count(t[8], L.line(), 9);
    if (t.size() != 9 + dims) throw ParseError("capacity count mismatch", L.line());
    for (std::size_t d = 0; d < dims; ++d) v.capacity.push_back(num(t[9 + d], L.line(), 10 + d));
    in.vehicles.push_back(std::move(v));
  }
  t = L.need("end");
  expect(t, "end", 1, L.line());
  wrap(L.line(), [&] {
    in.check();
    return 0;
  });
  solver::compute_friends(in);
  return in;
}

void save_native(const std::string& path, const Instance& in) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_native(f, in);
}

Instance load_instance(const std::string& path) {
  auto f = open_in(path);
  std::string first;
  f >> first;
  f.seekg(0);
  if (first == "tdroute-instance") return read_native(f);
  // Li-Lim starts with a numeric fleet line, Solomon with a name
  std::string line;
  std::getline(f, line);
  f.seekg(0);
  std::istringstream ls(line);
  std::vector<std::string> tok;
  for (std::string w; ls >> w;) tok.push_back(w);
  if (!tok.empty() && numeric(tok)) return parse_lilim(f, base_name(path));
  return parse_solomon(f, base_name(path));
}

void write_solution(std::ostream& os, const Solution& s) {
  os << "tdroute-solution\n";
  os << "cost " << format_double(s.cost) << '\n';
  os << "tours " << s.tours.size() << '\n';
  for (const auto& t : s.tours) {
    os << "tour " << t.vehicle << ' ' << format_double(t.start) << ' ' << format_double(t.cost) << ' '
       << t.visits.size();
    for (int c : t.visits) os << ' ' << c;
    os << '\n';
  }
  os << "unserved " << s.unserved.size();
  for (std::size_t u : s.unserved) os << ' ' << u;
  os << "\nend\n";
}

Solution read_solution(std::istream& is) {
  Lines L(is);
  Solution s;
  auto t = L.need("header");
  expect(t, "tdroute-solution", 1, L.line());
  t = L.need("cost");
  expect(t, "cost", 2, L.line());
  s.cost = num(t[1], L.line(), 2);
  t = L.need("tours");
  expect(t, "tours", 2, L.line());
  const std::size_t k = count(t[1], L.line(), 2);
  for (std::size_t i = 0; i < k; ++i) {
    t = L.need("tour");
    expect(t, "tour", 5, L.line());
    solver::TourPlan p;
    p.vehicle = count(t[1], L.line(), 2);
    p.start = num(t[2], L.line(), 3);
    p.cost = num(t[3], L.line(), 4);
    const std::size_t m = count(t[4], L.line(), 5);
    if (t.size() != 5 + m) throw ParseError("visit count mismatch", L.line());
    for (std::size_t x = 0; x < m; ++x) p.visits.push_back(static_cast<int>(count(t[5 + x], L.line(), 6 + x)));
    s.tours.push_back(std::move(p));
  }
  t = L.need("unserved");
  expect(t, "unserved", 2, L.line());
  const std::size_t u = count(t[1], L.line(), 2);
  if (t.size() != 2 + u) throw ParseError("unserved count mismatch", L.line());
  for (std::size_t i = 0; i < u; ++i) s.unserved.push_back(count(t[2 + i], L.line(), 3 + i));
  t = L.need("end");
  expect(t, "end", 1, L.line());
  return s;
}

void save_solution(const std::string& path, const Solution& s) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_solution(f, s);
}

Solution load_solution(const std::string& path) {
  auto f = open_in(path);
  return read_solution(f);
}

}  // namespace tdroute::bench_io
