#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdroute/solver/instance.hpp"

namespace tdroute::solver {

struct TourPlan {
  std::size_t vehicle = 0;
  std::vector<int> visits;  // visit codes, depot start and end implied
  double start = 0;
  double cost = 0;
};

struct Solution {
  std::vector<TourPlan> tours;  // only used vehicles
  std::vector<std::size_t> unserved;
  double cost = 0;
};

struct TourCheck {
  double start = 0;
  double cost = 0;
  double optimal_cost = 0;  // at the best start for this sequence
  std::vector<double> arrivals;  // at each visit, when starting at `start`
};

struct Report {
  bool feasible = true;
  std::vector<std::string> violations;
  double cost = 0;
  std::vector<TourCheck> tours;
};

// Independent re-check: folds the tour actions one by one, checks windows,
// precedence, capacity and availability and recomputes all costs.
Report validate(const Solution& s, const Instance& in);

// Tour ATF by sequential composition; nullopt when no start time works.
std::optional<Atf> fold_tour(const Instance& in, const TourPlan& t);

}  // namespace tdroute::solver
