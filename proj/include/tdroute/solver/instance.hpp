#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tdroute/plf/atf.hpp"
#include "tdroute/scheduler/scheduler.hpp"

namespace tdroute::solver {

using plf::Atf;

// A place where the vehicle must start service inside [open, close].
// `penalty` is an extra cost by arrival time (soft windows).
struct Stop {
  std::size_t addr = 0;
  double open = -kTimeBound;
  double close = kTimeBound;
  double duration = 0;
  plf::StepCost penalty;
};

struct Item {
  std::string name;
  Stop pickup;
  Stop delivery;
  // Picked up at the depot before the tour starts; only the delivery is a
  // tour visit.
  bool preloaded = false;
  std::vector<double> demand;
  double unserved_penalty = 1e5;
  std::vector<std::size_t> friends;
};

struct Vehicle {
  std::size_t start_addr = 0;
  std::size_t end_addr = 0;
  double fixed_cost = 0;
  double start_open = -kTimeBound;  // earliest start
  double start_close = kTimeBound;  // latest start
  double return_by = kTimeBound;    // latest arrival at the end address
  double max_duration = kInf;
  std::vector<double> capacity;  // empty: unlimited
};

struct Instance {
  std::string name;
  std::size_t addresses = 0;
  std::size_t depot = 0;
  double horizon_start = 0;
  double horizon_end = 0;
  std::vector<Atf> arcs;  // row-major addresses x addresses
  std::vector<Item> items;
  std::vector<Vehicle> vehicles;
  scheduler::CostModel model;

  const Atf& arc(std::size_t p, std::size_t q) const { return arcs[p * addresses + q]; }
  Atf& arc(std::size_t p, std::size_t q) { return arcs[p * addresses + q]; }
  // Throws InvalidArgument on structural problems.
  void check() const;
};

// Visit codes inside tours: 2*item for the pickup, 2*item+1 for the delivery.
inline int pickup_code(std::size_t item) { return static_cast<int>(2 * item); }
inline int delivery_code(std::size_t item) { return static_cast<int>(2 * item + 1); }
inline std::size_t item_of(int code) { return static_cast<std::size_t>(code) / 2; }
inline bool is_delivery(int code) { return code % 2 == 1; }
const Stop& stop_of(const Instance& in, int code);

// Serve the stop, then travel to `next`.
Atf stop_action(const Instance& in, const Stop& s, std::size_t next);
Stop start_stop(const Vehicle& v);

// Lower bound on the travel time p -> q.
double lower_travel(const Instance& in, std::size_t p, std::size_t q);

// Friendship from travel lower bounds: serving both in one tour costs at most
// `ratio` times serving them separately. Fills Item::friends.
void compute_friends(Instance& in, double ratio = 0.75);

}  // namespace tdroute::solver
