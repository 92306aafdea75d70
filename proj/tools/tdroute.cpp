#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tdroute/bench_io/formats.hpp"
#include "tdroute/bench_io/td.hpp"
#include "tdroute/plf/text.hpp"
#include "tdroute/solver/solver.hpp"

using namespace tdroute;
using plf::format_double;

namespace {

// Fixed costs at the vehicle weight are an ordering device, not money.
double travel_cost(const solver::Instance& in, const solver::Solution& s) {
  double c = s.cost;
  for (const auto& t : s.tours)
    if (in.vehicles[t.vehicle].fixed_cost == bench_io::kVehicleWeight) c -= bench_io::kVehicleWeight;
  return c;
}

struct SolveArgs {
  std::string instance, out, mode = "default", soft = "none";
  std::uint64_t seed = 1;
  int workers = 0;
  double time_limit = 0;
  std::size_t iterations = 0;
};

solver::Config config_of(const SolveArgs& a) {
  solver::Config c;
  c.seed = a.seed;
  c.workers = a.workers > 0 ? a.workers : solver::default_workers();
  c.high_effort = a.mode == "high-effort";
  c.time_limit = a.time_limit;
  c.iterations = a.iterations;
  return c;
}

int run_solve(const SolveArgs& a) {
  auto in = bench_io::with_soft_windows(bench_io::load_instance(a.instance), bench_io::parse_brackets(a.soft));
  const auto t0 = std::chrono::steady_clock::now();
  auto sol = solver::solve(in, config_of(a));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (a.out.empty() || a.out == "-") bench_io::write_solution(std::cout, sol);
  else bench_io::save_solution(a.out, sol);
  auto rep = solver::validate(sol, in);
  std::cerr << in.name << ": tours " << sol.tours.size() << " cost " << format_double(sol.cost) << " travel "
            << format_double(travel_cost(in, sol)) << " unserved " << sol.unserved.size() << " time "
            << format_double(secs) << "s\n";
  for (const auto& v : rep.violations) std::cerr << "violation: " << v << '\n';
  return rep.feasible ? 0 : 1;
}

int run_validate(const std::string& inst, const std::string& sol_path) {
  auto in = bench_io::load_instance(inst);
  auto sol = bench_io::load_solution(sol_path);
  auto rep = solver::validate(sol, in);
  for (const auto& v : rep.violations) std::cout << "violation: " << v << '\n';
  std::cout << (rep.feasible ? "feasible" : "infeasible") << " cost " << format_double(rep.cost) << '\n';
  return rep.feasible ? 0 : 1;
}

int run_evaluate(const std::string& inst, const std::string& sol_path, bool keep_start) {
  auto in = bench_io::load_instance(inst);
  auto e = bench_io::evaluate_under(in, bench_io::load_solution(sol_path), keep_start);
  std::cout << "tours,cost,visits,late,max_delay_min,slack_10_15,slack_5_10,slack_0_5\n"
            << e.tours << ',' << format_double(e.cost) << ',' << e.visits << ',' << e.late << ','
            << format_double(e.max_delay * 60.0 / in.model.units_per_hour) << ',' << e.slack[0] << ',' << e.slack[1]
            << ',' << e.slack[2] << '\n';
  return 0;
}

int run_bench(const std::string& dir, const std::string& report, const std::string& out, const SolveArgs& a) {
  if (report != "csv") throw InvalidArgument("only --report csv is supported");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::ofstream file;
  if (!out.empty()) file.open(out);
  std::ostream& os = out.empty() ? std::cout : file;
  os << "instance,tours,cost,time_s\n";
  int rc = 0;
  for (const auto& f : files) {
    auto in = bench_io::load_instance(f.string());
    const auto t0 = std::chrono::steady_clock::now();
    auto sol = solver::solve(in, config_of(a));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!solver::validate(sol, in).feasible) rc = 1;
    os << in.name << ',' << sol.tours.size() << ',' << format_double(travel_cost(in, sol)) << ','
       << format_double(secs) << std::endl;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-dependent vehicle routing toolkit"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve an instance");
  solve->add_option("instance", sa.instance)->required()->check(CLI::ExistingFile);
  solve->add_option("-o,--output", sa.out, "solution file, - for stdout");
  solve->add_option("--mode", sa.mode)->check(CLI::IsMember({"default", "high-effort"}));
  solve->add_option("--seed", sa.seed);
  solve->add_option("--workers", sa.workers, "default: TDROUTE_THREADS or 1");
  solve->add_option("--time-limit", sa.time_limit, "seconds");
  solve->add_option("--iterations", sa.iterations, "random-walk iterations per worker");
  solve->add_option("--soft-windows", sa.soft, "none, default, aggressive or min:$,min:$,...");

  std::string v_inst, v_sol;
  auto* validate = app.add_subcommand("validate", "check a solution");
  validate->add_option("instance", v_inst)->required()->check(CLI::ExistingFile);
  validate->add_option("solution", v_sol)->required()->check(CLI::ExistingFile);

  std::string g_base, g_prof, g_out;
  std::uint64_t g_seed = 1;
  double g_spu = 20;
  auto* gen = app.add_subcommand("generate-td", "time-dependent instance from a constant one");
  gen->add_option("base", g_base)->required()->check(CLI::ExistingFile);
  gen->add_option("--profiles", g_prof, "speed profile file; built-in set when omitted");
  gen->add_option("--seed", g_seed);
  gen->add_option("--seconds-per-unit", g_spu);
  gen->add_option("-o,--output", g_out)->required();

  std::string f_inst, f_mode = "worst", f_out;
  auto* fl = app.add_subcommand("flatten", "constant travel times from a time-dependent instance");
  fl->add_option("instance", f_inst)->required()->check(CLI::ExistingFile);
  fl->add_option("--mode", f_mode)->check(CLI::IsMember({"worst", "average", "mixed"}));
  fl->add_option("-o,--output", f_out)->required();

  std::string e_inst, e_sol;
  bool e_keep = false;
  auto* ev = app.add_subcommand("evaluate", "re-time a solution on another instance");
  ev->add_option("instance", e_inst)->required()->check(CLI::ExistingFile);
  ev->add_option("solution", e_sol)->required()->check(CLI::ExistingFile);
  ev->add_flag("--keep-start", e_keep, "keep the planned tour starts");

  std::string b_dir, b_report = "csv", b_out;
  SolveArgs ba;
  auto* bench = app.add_subcommand("bench", "solve every instance in a directory");
  bench->add_option("dir", b_dir)->required()->check(CLI::ExistingDirectory);
  bench->add_option("--report", b_report);
  bench->add_option("-o,--output", b_out);
  bench->add_option("--seed", ba.seed);
  bench->add_option("--workers", ba.workers);
  bench->add_option("--time-limit", ba.time_limit);
  bench->add_option("--iterations", ba.iterations);
  bench->add_option("--mode", ba.mode)->check(CLI::IsMember({"default", "high-effort"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*validate) return run_validate(v_inst, v_sol);
    if (*gen) {
      auto base = bench_io::load_instance(g_base);
      auto prof = g_prof.empty() ? bench_io::default_profiles() : bench_io::read_profiles(g_prof);
      bench_io::TdOptions opt;
      opt.seconds_per_unit = g_spu;
      bench_io::save_native(g_out, bench_io::generate_td(base, prof, g_seed, opt));
      return 0;
    }
    if (*fl) {
      bench_io::save_native(f_out, bench_io::flatten(bench_io::load_instance(f_inst), bench_io::parse_flatten_mode(f_mode)));
      return 0;
    }
    if (*ev) return run_evaluate(e_inst, e_sol, e_keep);
    if (*bench) return run_bench(b_dir, b_report, b_out, ba);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
