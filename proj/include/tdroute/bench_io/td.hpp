#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdroute/solver/instance.hpp"
#include "tdroute/solver/solution.hpp"

namespace tdroute::bench_io {

using solver::Instance;
using solver::Solution;
using plf::Atf;

// Fraction of free-flow speed for consecutive hours.
struct SpeedProfile {
  std::vector<double> speed;
};

std::vector<SpeedProfile> default_profiles();
// One profile per non-empty line, whitespace separated speeds.
std::vector<SpeedProfile> read_profiles(const std::string& path);

struct TdOptions {
  // Rebuild the instance in seconds on a 15:00 start with the delivery-day
  // setup ($200 per tour, $20 per hour, 3 min service, random windows).
  // Otherwise only the arcs change and the base clock is kept.
  bool delivery_day = true;
  double seconds_per_unit = 20;
  double hour = 3600;        // length of one profile slot in instance time
  double profile_start = 0;  // only used without delivery_day
};

// Arrival function of one arc with free-flow time `free` under the profile,
// departures in [from, to]. Exact integration of the piecewise-constant speed.
Atf speed_atf(double free, const SpeedProfile& p, double profile_start, double hour, double from, double to);

Instance generate_td(const Instance& base, const std::vector<SpeedProfile>& profiles, std::uint64_t seed,
                     const TdOptions& opt = {});

enum class FlattenMode { worst, average, mixed };
FlattenMode parse_flatten_mode(const std::string& s);
Instance flatten(const Instance& in, FlattenMode mode);

// Brackets (minutes before close, dollars) on every delivery window.
Instance with_soft_windows(const Instance& in, const std::vector<std::pair<double, double>>& brackets);
std::vector<std::pair<double, double>> parse_brackets(const std::string& spec);

struct Evaluation {
  double cost = 0;  // tours + unserved penalties
  std::size_t tours = 0;
  std::size_t visits = 0;
  std::size_t late = 0;
  double max_delay = 0;
  // slack before the window close: [10,15), [5,10), [0,5) minutes
  std::size_t slack[3] = {0, 0, 0};
  std::size_t rescheduled = 0;  // tours that could keep all windows
};

// Re-times the fixed tour sequences under `in`. A tour whose composed
// function is empty is simulated from its planned start with late arrivals
// allowed; so is every tour when keep_start is set.
Evaluation evaluate_under(const Instance& in, const Solution& s, bool keep_start = false);

}  // namespace tdroute::bench_io
