#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "tdroute/plf/atf.hpp"

namespace tdroute::plf {

// g o f restricted to {t : f(t) <= g.t_max}. Throws EmptyDomain.
Atf compose(const Atf& f, const Atf& g);
// Same, returning nullopt instead of throwing.
std::optional<Atf> try_compose(const Atf& f, const Atf& g);

// list[n-1] o ... o list[0], composed as a balanced tree.
Atf compose_chain(std::span<const Atf> list);
std::optional<Atf> try_compose_chain(std::span<const Atf* const> list);

// Pointwise minimum on the common domain.
Atf min2(const Atf& a, const Atf& b);

// Composes performed by this thread so far (instrumentation).
std::uint64_t compose_count();

// Cost of the composition alone: g_cost o f on (-inf, t_end].
StepCost compose_cost(const StepCost& g_cost, std::span<const Breakpoint> f, double t_end);

}  // namespace tdroute::plf
