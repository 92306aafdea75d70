#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "tdroute/plf/atf.hpp"

namespace tdroute::plf {

// "<m> t0 c0 t1 c1 ..." with the first start written as -inf.
void write_text(std::ostream& os, const StepCost& c);
// "<b> t0 v0 ... cost <stepcost>"
void write_text(std::ostream& os, const Atf& a);

// Throw InvalidArgument on malformed input; invariants are re-checked.
StepCost read_step_cost(std::istream& is);
Atf read_atf(std::istream& is);

std::string to_text(const Atf& a);
Atf atf_from_text(const std::string& s);

// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace tdroute::plf
