// bellsched: generate, solve, sweep, export, validate and assign-buses.
//
// Exit codes: 0 optimal, 1 error, 2 time-limited incumbent, 3 infeasible.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bellsched/engine.hpp"
#include "bellsched/equity.hpp"
#include "bellsched/fleet.hpp"
#include "bellsched/instance.hpp"
#include "bellsched/milp.hpp"
#include "bellsched/report.hpp"

namespace fs = std::filesystem;
using namespace bellsched;
using engine::SolveReport;
using engine::SolveStatus;

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeLimit = 2;
constexpr int kExitInfeasible = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  std::optional<double> time_limit;
  std::string out_dir = ".";
  std::vector<std::string> formats{"json", "csv"};

  engine::SearchLimits limits() const { return {time_limit}; }
  bool wants(const std::string& f) const { return std::find(formats.begin(), formats.end(), f) != formats.end(); }
};

struct Source {
  std::string path;
  std::string scenario;
  std::optional<int> schools, am_routes;
};

struct Params {
  std::string objective = "base";
  std::string buses = "auto";
  std::optional<double> phi;
  std::string tau_text;
  std::vector<double> tau;
  std::optional<int> distinct;
  std::string disutility = "abs";
  double epsilon = 0.1;
  std::optional<int> j;
  std::optional<double> pimax;
  std::vector<double> psi;
  std::vector<int> bus_offsets;
};

void add_source(CLI::App* cmd, Source& src) {
  cmd->add_option("instance", src.path, "Instance JSON file");
  cmd->add_option("--scenario", src.scenario, "Generate the instance instead (I, II, III, IV)");
  cmd->add_option("--schools", src.schools, "Generator override: number of schools");
  cmd->add_option("--am-routes", src.am_routes, "Generator override: AM routes (PM count equal)");
}

GeneratorSpec generator_spec(const Source& src) {
  GeneratorSpec spec = scenario_defaults(parse_scenario(src.scenario));
  if (src.schools) spec.num_schools = src.schools;
  if (src.am_routes) spec.num_am_routes = src.am_routes;
  return spec;
}

Instance load_source(const Source& src, const Globals& g) {
  if (src.path.empty() == src.scenario.empty())
    throw UsageError("give exactly one of an instance file or --scenario");
  if (!src.scenario.empty()) return generate_instance(generator_spec(src), g.seed);
  if (src.schools || src.am_routes) throw UsageError("--schools/--am-routes need --scenario");
  return load_instance(src.path);
}

DisutilityMatrix disutility(const Instance& inst, const std::string& choice) {
  if (choice == "abs") return abs_deviation_matrix(inst, DisutilityUnit::Minutes);
  if (choice == "abs-slots") return abs_deviation_matrix(inst, DisutilityUnit::Slots);
  if (choice == "scenario4") return scenario4_matrix(inst);
  if (!fs::exists(choice)) throw UsageError("unknown disutility '" + choice + "' (no such file)");
  return custom_matrix(inst, read_disutility_csv(choice));
}

// "N", "auto" or "auto+k".
int resolve_buses(const Instance& inst, const std::string& spec, const Globals& g, int* z_star_out = nullptr) {
  int offset = 0;
  if (spec.rfind("auto", 0) == 0) {
    if (spec.size() > 4) {
      if (spec[4] != '+') throw UsageError("bad --buses value " + spec);
      offset = std::stoi(spec.substr(5));
      if (offset < 0) throw UsageError("bad --buses value " + spec);
    }
    engine::BaseOptions opt;
    opt.limits = g.limits();
    const SolveReport base = engine::solve_base(inst, opt);
    if (!base.schedule) throw std::runtime_error("base solve found no schedule: " + base.message);
    if (z_star_out) *z_star_out = base.schedule->buses;
    return base.schedule->buses + offset;
  }
  std::size_t used = 0;
  const int z = std::stoi(spec, &used);
  if (used != spec.size()) throw UsageError("bad --buses value " + spec);
  return z;
}

int exit_code(const SolveReport& r) {
  switch (r.status) {
    case SolveStatus::Optimal: return kExitOptimal;
    case SolveStatus::TimeLimit: return kExitTimeLimit;
    case SolveStatus::Infeasible: return kExitInfeasible;
  }
  return kExitError;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("bad " + flag + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty " + flag + " list");
  return out;
}

void check_consistency(const Params& p, CLI::App* cmd) {
  static const std::vector<std::string> objectives{"base", "minimax", "minimax-weighted", "lexmin", "minsum",
                                                   "fair-tau"};
  if (std::find(objectives.begin(), objectives.end(), p.objective) == objectives.end())
    throw UsageError("unknown objective " + p.objective);
  const bool capped = p.objective == "minimax" || p.objective == "lexmin" || p.objective == "minsum";
  if (p.phi && p.objective != "minimax-weighted") throw UsageError("--phi only applies to minimax-weighted");
  if (p.objective == "minimax-weighted" && !p.phi) throw UsageError("minimax-weighted needs --phi");
  if (cmd->count("--buses") && !capped) throw UsageError("--buses only applies to minimax, lexmin and minsum");
  if (p.distinct && p.objective != "base" && p.objective != "fair-tau")
    throw UsageError("--distinct-starts only applies to base and fair-tau");
}

// Model the solve result is checked against, mirroring `export`.
milp::MilpModel model_for(const Instance& inst, const std::string& tag, const DisutilityMatrix& c, int z_bar,
                          const Params& p) {
  milp::BaseOptions opt;
  opt.distinct_start_limit = p.distinct;
  if (tag == "base" || tag == "fair-tau") return milp::build_base(inst, opt);
  if (tag == "minimax-weighted") return milp::build_minimax_weighted(inst, c, p.phi.value_or(0.0), opt);
  if (tag == "minimax" || tag == "minsum") return milp::build_minimax_eps(inst, c, z_bar, opt);
  if (tag == "lexmin") {
    if (!p.pimax) throw UsageError("lexmin model needs --pimax");
    return milp::build_lexmin_full(inst, c, z_bar, *p.pimax, p.epsilon, opt);
  }
  if (tag == "lexmin-step") {
    if (!p.pimax || !p.j) throw UsageError("lexmin-step model needs --pimax and --j");
    return milp::build_lexmin_step(inst, c, z_bar, *p.pimax, *p.j, p.psi, opt);
  }
  throw UsageError("unknown model " + tag);
}

bool needs_cap(const std::string& tag) {
  return tag == "minimax" || tag == "minsum" || tag == "lexmin" || tag == "lexmin-step";
}

SolveReport run_objective(const Instance& inst, const Params& p, const DisutilityMatrix& c, int z_bar,
                          double tau, const Globals& g) {
  engine::BaseOptions base;
  base.distinct_start_limit = p.distinct;
  base.limits = g.limits();
  if (p.objective == "base") return engine::solve_base(inst, base);
  if (p.objective == "fair-tau") return engine::solve_fair_tau(inst, tau, base);
  if (p.objective == "minimax-weighted") return engine::solve_minimax_weighted(inst, c, *p.phi, g.limits());
  if (p.objective == "minimax") return engine::solve_minimax(inst, c, z_bar, g.limits());
  if (p.objective == "lexmin") return engine::solve_lexmin(inst, c, z_bar, g.limits());
  return engine::solve_minsum(inst, c, z_bar, g.limits());
}

std::string summary(const SolveReport& r) {
  std::ostringstream s;
  s << "status=" << engine::to_string(r.status);
  if (r.schedule) {
    s << " buses=" << r.schedule->buses << " objective=" << format_number(r.objective.value);
    if (r.equity) s << " pi_max=" << format_number(r.equity->pi_max);
  }
  if (!r.message.empty()) s << " (" << r.message << ")";
  return s.str();
}

int cmd_generate(const Source& src, const std::string& out, const Globals& g) {
  if (src.scenario.empty()) throw UsageError("generate needs --scenario");
  const Instance inst = generate_instance(generator_spec(src), g.seed);
  const fs::path path = out.empty() ? fs::path(g.out_dir) / "instance.json" : fs::path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_instance(inst, path);
  std::cout << "N=" << inst.num_schools() << " am_routes=" << inst.count_routes(Period::AM)
            << " pm_routes=" << inst.count_routes(Period::PM) << " am_window=1.." << inst.grid.am_slots
            << " pm_window=" << inst.grid.pm_min << ".." << inst.grid.pm_max << " -> " << path.string() << "\n";
  return kExitOptimal;
}

int cmd_solve(const Source& src, Params p, CLI::App* cmd, const Globals& g) {
  if (cmd->count("--tau")) p.tau = parse_list(p.tau_text, "--tau");
  check_consistency(p, cmd);
  if (!p.tau.empty() && p.objective != "fair-tau") throw UsageError("--tau only applies to fair-tau");
  if (p.objective == "fair-tau" && p.tau.size() != 1) throw UsageError("fair-tau solve needs one --tau value");
  const Instance inst = load_source(src, g);
  const DisutilityMatrix c = disutility(inst, p.disutility);
  const bool capped = p.objective == "minimax" || p.objective == "lexmin" || p.objective == "minsum";
  const int z_bar = capped ? resolve_buses(inst, p.buses, g) : 0;

  SolveReport r = run_objective(inst, p, c, z_bar, p.tau.empty() ? 0.0 : p.tau[0], g);
  if (r.schedule && !r.equity) r.equity = evaluate(*r.schedule, c, inst);

  const fs::path dir(g.out_dir);
  fs::create_directories(dir);
  if (g.wants("json")) {
    write_file(dir / "report.json", report_to_json(inst, r));
    if (r.schedule) {
      Params mp = p;
      if (p.objective == "lexmin") mp.pimax = r.objective.psi.empty() ? 0.0 : r.objective.psi[0];
      const milp::MilpModel model = model_for(inst, p.objective, c, z_bar, mp);
      write_file(dir / "solution.txt",
                 milp::format_solution(model, milp::solution_from_schedule(model, inst, *r.schedule, &c)));
    }
  }
  if (g.wants("csv") && r.schedule) {
    write_file(dir / "equity.csv", equity_csv(inst, *r.schedule, *r.equity));
    write_file(dir / "buses.csv", bus_assignment_csv(inst, *r.schedule, assign_buses(inst, *r.schedule)));
  }
  std::cout << summary(r) << "\n";
  return exit_code(r);
}

int cmd_sweep(const Source& src, Params p, CLI::App* cmd, const Globals& g) {
  const bool tau_axis = cmd->count("--tau") > 0;
  const bool bus_axis = cmd->count("--bus-offsets") > 0;
  if (tau_axis == bus_axis) throw UsageError("sweep needs exactly one of --tau or --bus-offsets");
  if (tau_axis) {
    p.tau = parse_list(p.tau_text, "--tau");
    if (!cmd->count("--objective")) p.objective = "fair-tau";
    if (p.objective != "fair-tau") throw UsageError("a tau sweep uses objective fair-tau");
  } else {
    if (p.bus_offsets.empty()) throw UsageError("empty --bus-offsets list");
    if (p.objective != "minimax" && p.objective != "lexmin" && p.objective != "minsum")
      throw UsageError("a bus sweep needs objective minimax, lexmin or minsum");
    for (int k : p.bus_offsets)
      if (k < 0) throw UsageError("bus offsets must be nonnegative");
  }
  check_consistency(p, cmd);

  const Instance inst = load_source(src, g);
  const DisutilityMatrix c = disutility(inst, p.disutility);
  engine::BaseOptions base;
  base.distinct_start_limit = p.distinct;
  base.limits = g.limits();
  const SolveReport opt = engine::solve_base(inst, base);
  if (!opt.schedule) {
    std::cout << summary(opt) << "\n";
    return exit_code(opt);
  }
  const int z_star = opt.schedule->buses;

  struct Point {
    std::string param;
    SolveReport report;
  };
  std::vector<std::future<Point>> jobs;
  const std::size_t count = tau_axis ? p.tau.size() : p.bus_offsets.size();
  for (std::size_t k = 0; k < count; ++k) {
    jobs.push_back(std::async(std::launch::async, [&, k] {
      if (tau_axis) return Point{format_number(p.tau[k]), run_objective(inst, p, c, 0, p.tau[k], g)};
      const int offset = p.bus_offsets[k];
      return Point{std::to_string(offset), run_objective(inst, p, c, z_star + offset, 0.0, g)};
    }));
  }

  std::ostringstream csv;
  csv << "param,buses,objective,pi_max,avg_change_min,std_change_min,pof\n";
  int code = opt.optimal ? kExitOptimal : kExitTimeLimit;
  for (auto& job : jobs) {
    Point pt = job.get();
    const SolveReport& r = pt.report;
    code = std::max(code, exit_code(r));
    if (!r.schedule) {
      csv << pt.param << ",,,,,,\n";
      continue;
    }
    const EquityReport e = evaluate(*r.schedule, c, inst);
    csv << pt.param << "," << r.schedule->buses << "," << format_number(r.objective.value) << ","
        << format_number(e.pi_max) << "," << format_number(e.avg_abs_change_minutes) << ","
        << format_number(e.std_abs_change_minutes) << ","
        << format_number(price_of_fairness(z_star, r.schedule->buses)) << "\n";
  }
  if (g.wants("csv")) write_file(fs::path(g.out_dir) / "sweep.csv", csv.str());
  std::cout << csv.str();
  return code;
}

int cmd_export(const Source& src, const Params& p, const std::string& tag, const std::string& out,
               const Globals& g) {
  const Instance inst = load_source(src, g);
  const DisutilityMatrix c = disutility(inst, p.disutility);
  const int z_bar = needs_cap(tag) ? resolve_buses(inst, p.buses, g) : 0;
  if (tag == "minimax-weighted" && !p.phi) throw UsageError("minimax-weighted model needs --phi");
  const milp::MilpModel model = model_for(inst, tag, c, z_bar, p);
  const fs::path path = out.empty() ? fs::path(g.out_dir) / (tag + ".mps") : fs::path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  milp::export_mps(model, path);
  std::cout << model.variables().size() << " columns, " << model.constraints().size() << " rows -> "
            << path.string();
  if (model.metadata.numerically_hazardous)
    std::cout << " (warning: objective coefficient ratio " << format_number(model.metadata.objective_coefficient_ratio)
              << ")";
  std::cout << "\n";
  return kExitOptimal;
}

int cmd_validate(const Source& src, const Params& p, const std::string& tag, const std::string& solution,
                 const Globals& g) {
  const Instance inst = load_source(src, g);
  const DisutilityMatrix c = disutility(inst, p.disutility);
  const int z_bar = needs_cap(tag) ? resolve_buses(inst, p.buses, g) : 0;
  const milp::MilpModel model = model_for(inst, tag, c, z_bar, p);
  std::vector<std::string> violations;
  try {
    violations = milp::validate_solution(model, milp::read_solution(solution));
  } catch (const std::invalid_argument& e) {
    violations.push_back(e.what());
  }
  for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  if (violations.empty()) std::cout << "feasible, objective matches\n";
  return violations.empty() ? kExitOptimal : kExitError;
}

int cmd_assign(const Source& src, const std::string& report_path, const Globals& g) {
  const Instance inst = load_source(src, g);
  std::ifstream in(report_path);
  if (!in) throw std::runtime_error("cannot read " + report_path);
  std::stringstream text;
  text << in.rdbuf();
  const Schedule s = schedule_from_json(text.str(), inst);
  const BusAssignment a = assign_buses(inst, s);
  const std::string csv = bus_assignment_csv(inst, s, a);
  if (g.wants("csv")) write_file(fs::path(g.out_dir) / "buses.csv", csv);
  std::cout << csv;
  return kExitOptimal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"School bell-time and bus scheduling"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Generator seed");
  app.add_option("--time-limit", g.time_limit, "Seconds per solve call")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--format", g.formats, "Outputs to write: json, csv")
      ->delimiter(',')
      ->check(CLI::IsMember({"json", "csv"}));

  Source src;
  Params p;
  std::string out_file, tag, solution_file, report_file;

  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--objective", p.objective, "base|minimax|minimax-weighted|lexmin|minsum|fair-tau");
    cmd->add_option("--buses", p.buses, "Bus cap: N, auto, or auto+k");
    cmd->add_option("--phi", p.phi, "Weight on pi_max")->check(CLI::NonNegativeNumber);
    cmd->add_option("--tau", p.tau_text, "Maximum start change in minutes (comma list for sweeps)");
    cmd->add_option("--distinct-starts", p.distinct, "At most K distinct start slots")->check(CLI::PositiveNumber);
    cmd->add_option("--disutility", p.disutility, "abs|abs-slots|scenario4|CSV path");
  };

  CLI::App* gen = app.add_subcommand("generate", "Generate an instance file");
  gen->add_option("--scenario", src.scenario, "I, II, III or IV")->required();
  gen->add_option("--schools", src.schools);
  gen->add_option("--am-routes", src.am_routes);
  gen->add_option("-o,--output", out_file, "Instance file (default OUT/instance.json)");

  CLI::App* solve = app.add_subcommand("solve", "Solve and write report files");
  add_source(solve, src);
  add_params(solve);

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep tau or bus offsets and write a CSV");
  add_source(sweep, src);
  add_params(sweep);
  sweep->add_option("--bus-offsets", p.bus_offsets, "Offsets k for caps z*+k")->delimiter(',');

  auto add_model_params = [&](CLI::App* cmd) {
    cmd->add_option("--buses", p.buses, "Bus cap for capped models");
    cmd->add_option("--phi", p.phi)->check(CLI::NonNegativeNumber);
    cmd->add_option("--distinct-starts", p.distinct)->check(CLI::PositiveNumber);
    cmd->add_option("--disutility", p.disutility);
    cmd->add_option("--epsilon", p.epsilon, "Lexmin scalarization base")->check(CLI::PositiveNumber);
    cmd->add_option("--pimax", p.pimax, "Optimal pi_max for lexmin models");
    cmd->add_option("--j", p.j, "Rank for lexmin-step")->check(CLI::PositiveNumber);
    cmd->add_option("--psi", p.psi, "Fixed psi values for ranks 2..j-1")->delimiter(',');
  };

  CLI::App* exp = app.add_subcommand("export", "Write an MPS model");
  add_source(exp, src);
  exp->add_option("--objective", tag, "base|minimax-weighted|minimax|lexmin|lexmin-step")->required();
  add_model_params(exp);
  exp->add_option("-o,--output", out_file, "MPS file (default OUT/<objective>.mps)");

  CLI::App* val = app.add_subcommand("validate", "Check a solution file against a model");
  val->add_option("instance", src.path)->required();
  val->add_option("model", tag, "base|minimax-weighted|minimax|lexmin|lexmin-step")->required();
  val->add_option("solution", solution_file)->required();
  add_model_params(val);

  CLI::App* assign = app.add_subcommand("assign-buses", "Assign buses to the routes of a report");
  assign->add_option("instance", src.path)->required();
  assign->add_option("report", report_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*gen) return cmd_generate(src, out_file, g);
    if (*solve) return cmd_solve(src, p, solve, g);
    if (*sweep) return cmd_sweep(src, p, sweep, g);
    if (*exp) return cmd_export(src, p, tag, out_file, g);
    if (*val) return cmd_validate(src, p, tag, solution_file, g);
    if (*assign) return cmd_assign(src, report_file, g);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitError;
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
