#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "tdroute/solver/instance.hpp"
#include "tdroute/solver/solution.hpp"

namespace tdroute::bench_io {

using solver::Instance;
using solver::Solution;
using plf::Atf;

// Objective weight per vehicle for the classic benchmarks: vehicles first,
// distance second.
inline constexpr double kVehicleWeight = 1e4;

// Solomon and Gehring-Homberger share one layout. Euclidean distances are
// not rounded. Every customer becomes a depot-loaded delivery. Throws ParseError.
Instance parse_solomon(std::istream& is, const std::string& name = "");
Instance parse_solomon(const std::string& path);
Instance parse_homberger(const std::string& path);
// Li-Lim pickup-and-delivery layout.
Instance parse_lilim(std::istream& is, const std::string& name = "");
Instance parse_lilim(const std::string& path);

// Line-oriented native format with explicit breakpoint lists.
void write_native(std::ostream& os, const Instance& in);
Instance read_native(std::istream& is);
void save_native(const std::string& path, const Instance& in);
// Picks the reader from the file content; friends are computed on load.
Instance load_instance(const std::string& path);

void write_solution(std::ostream& os, const Solution& s);
Solution read_solution(std::istream& is);
void save_solution(const std::string& path, const Solution& s);
Solution load_solution(const std::string& path);

}  // namespace tdroute::bench_io
