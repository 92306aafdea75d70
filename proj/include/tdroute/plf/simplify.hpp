#pragma once

#include "tdroute/plf/atf.hpp"

namespace tdroute::plf {

// Monotone g with f <= g <= f + eps and the fewest breakpoints.
// The attached cost is kept as is. Throws InvalidEpsilon for eps <= 0.
Atf simplify(const Atf& f, double eps);

// 0.5 % of the smallest travel time of f; 0 when f has a zero travel time.
double default_epsilon(const Atf& f);
// simplify(f, default_epsilon(f)), or f itself when the epsilon is 0.
Atf simplify_default(const Atf& f);

// Lowers breakpoints of g inside the corridor of f in one sweep; never
// increases the area between g and f.
Atf polish(const Atf& g, const Atf& f, double eps);

}  // namespace tdroute::plf
