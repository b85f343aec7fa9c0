// Acceptance suite. Prints one PASS/FAIL line per criterion; the exit status
// is nonzero iff a selected criterion fails.
//
//   acceptance            run everything
//   acceptance NAME...    run the named criteria only
//   acceptance --list     print the names

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bellsched/engine.hpp"
#include "bellsched/equity.hpp"
#include "bellsched/fleet.hpp"
#include "bellsched/milp.hpp"
#include "support/fixtures.hpp"

using namespace bellsched;
using namespace bellsched::engine;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

bool same_psi(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!near(a[k], b[k])) return false;
  return true;
}

// Reduced instances shared by the trend and sweep criteria.
Instance reduced(Scenario scenario, int seed) {
  GeneratorSpec spec = scenario_defaults(scenario);
  spec.num_schools = 6;
  spec.num_am_routes = 20;
  return generate_instance(spec, seed);
}

Verdict oracle_equivalence() {
  const int instances = 250;
  int mismatches = 0, comparisons = 0;
  std::string first;
  for (int seed = 0; seed < instances; ++seed) {
    const Instance inst = fixtures::make_tiny(10'000 + seed, {1, 3, 8, 2, 3, 2, 6});
    const DisutilityMatrix c = seed % 2 == 0 ? fixtures::random_matrix(inst, seed, 6)
                                             : abs_deviation_matrix(inst, DisutilityUnit::Minutes);
    auto miss = [&](const std::string& what) {
      ++mismatches;
      if (first.empty()) first = what + " on seed " + std::to_string(10'000 + seed);
    };
    const auto ob = brute_force_oracle(inst, nullptr, OracleObjective::Buses);
    const SolveReport base = solve_base(inst);
    ++comparisons;
    if (!base.optimal || !near(base.objective.value, ob.value)) miss("solve_base");
    const int z_star = static_cast<int>(ob.value);
    for (int z = z_star; z <= z_star + 1; ++z) {
      const auto opi = brute_force_oracle(inst, &c, OracleObjective::PiMax, z);
      const auto osum = brute_force_oracle(inst, &c, OracleObjective::Sum, z);
      const auto olex = brute_force_oracle(inst, &c, OracleObjective::Lexmin, z);
      const SolveReport mm = solve_minimax(inst, c, z);
      const SolveReport ms = solve_minsum(inst, c, z);
      const SolveReport lx = solve_lexmin(inst, c, z);
      comparisons += 3;
      if (!mm.optimal || !near(mm.objective.value, opi.value)) miss("solve_minimax");
      if (!ms.optimal || !near(ms.objective.value, osum.value)) miss("solve_minsum");
      if (!lx.optimal || !same_psi(lx.objective.psi, olex.psi)) miss("solve_lexmin");
    }
  }
  Verdict v;
  v.pass = mismatches == 0;
  v.detail = std::to_string(instances) + " instances, " + std::to_string(comparisons) + " comparisons, " +
             std::to_string(mismatches) + " mismatches" + (first.empty() ? "" : " (first: " + first + ")");
  return v;
}

Verdict spread_pair() {
  const int same = solve_base(fixtures::make_spread_pair(false)).schedule->buses;
  const int wide = solve_base(fixtures::make_spread_pair(true)).schedule->buses;
  return {same == 4 && wide == 2,
          "common start z=" + std::to_string(same) + ", one school 45 min earlier z=" + std::to_string(wide)};
}

Verdict interval_colouring() {
  PortableRng rng(4242);
  int bad_size = 0, overlaps = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Instance inst = trial % 4 == 0 ? generate_instance(scenario_defaults(Scenario::III), trial)
                                         : fixtures::make_tiny(20'000 + trial, {1, 5, 10, 4, 6, 3, 8});
    const Schedule s = fixtures::random_schedule(inst, rng);
    const BusAssignment a = assign_buses(inst, s);
    const OccupancyProfile p = occupancy(inst, s);
    if (a.fleet_size != std::max(p.am_peak, p.pm_peak)) ++bad_size;
    const auto ivs = operating_intervals(inst, s);
    for (std::size_t i = 0; i < ivs.size(); ++i)
      for (std::size_t j = i + 1; j < ivs.size(); ++j)
        if (ivs[i].period == ivs[j].period && a.bus_of_route.at(ivs[i].route) == a.bus_of_route.at(ivs[j].route) &&
            !(ivs[i].last < ivs[j].first || ivs[j].last < ivs[i].first))
          ++overlaps;
  }
  return {bad_size == 0 && overlaps == 0, "1000 schedules, " + std::to_string(bad_size) + " size mismatches, " +
                                              std::to_string(overlaps) + " same-bus overlaps"};
}

Verdict minimax_lexmin() {
  int monotone_breaks = 0, dominance_breaks = 0, first_breaks = 0, unproven = 0, comparisons = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const Instance inst = fixtures::make_tiny(30'000 + seed, {4, 6, 12, 3, 4, 2, 12});
    const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
    const SolveReport base = solve_base(inst);
    if (!base.optimal) ++unproven;
    const int z_star = base.schedule->buses;
    double prev = std::numeric_limits<double>::infinity();
    for (int z = z_star; z <= z_star + 3; ++z) {
      const SolveReport mm = solve_minimax(inst, c, z);
      const SolveReport lx = solve_lexmin(inst, c, z);
      if (!mm.optimal || !lx.optimal) ++unproven;
      if (mm.objective.value > prev + 1e-9) ++monotone_breaks;
      prev = mm.objective.value;
      const auto pi = evaluate(*mm.schedule, c, inst).sorted_desc;
      ++comparisons;
      if (!near(lx.objective.psi[0], pi[0])) ++first_breaks;
      for (std::size_t k = 0; k < pi.size(); ++k)
        if (lx.objective.psi[k] > pi[k] + 1e-9) {
          ++dominance_breaks;
          break;
        }
    }
  }
  Verdict v;
  v.pass = monotone_breaks == 0 && dominance_breaks == 0 && first_breaks == 0 && unproven == 0;
  v.detail = "50 instances, " + std::to_string(comparisons) + " (z, lexmin, minimax) triples; monotonicity breaks " +
             std::to_string(monotone_breaks) + ", dominance breaks " + std::to_string(dominance_breaks) +
             ", psi_1 mismatches " + std::to_string(first_breaks) + ", unproven solves " + std::to_string(unproven);
  return v;
}

Verdict table_two_trend() {
  SearchLimits limit;
  limit.time_limit_seconds = 60.0;
  BaseOptions base_opt;
  base_opt.limits = limit;
  double avg_mm = 0, avg_lx = 0, avg_ms = 0, std_mm = 0, std_lx = 0, std_ms = 0;
  int unproven = 0;
  const int count = 10;
  for (int seed = 1; seed <= count; ++seed) {
    const Instance inst = reduced(Scenario::III, seed);
    const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
    const SolveReport base = solve_base(inst, base_opt);
    const int z = base.schedule->buses;
    const SolveReport mm = solve_minimax(inst, c, z, limit);
    const SolveReport lx = solve_lexmin(inst, c, z, limit);
    const SolveReport ms = solve_minsum(inst, c, z, limit);
    unproven += !base.optimal + !mm.optimal + !lx.optimal + !ms.optimal;
    const auto e_mm = evaluate(*mm.schedule, c, inst), e_lx = evaluate(*lx.schedule, c, inst),
               e_ms = evaluate(*ms.schedule, c, inst);
    avg_mm += e_mm.avg_abs_change_minutes / count;
    avg_lx += e_lx.avg_abs_change_minutes / count;
    avg_ms += e_ms.avg_abs_change_minutes / count;
    std_mm += e_mm.std_abs_change_minutes / count;
    std_lx += e_lx.std_abs_change_minutes / count;
    std_ms += e_ms.std_abs_change_minutes / count;
  }
  const bool avg_order = avg_ms <= avg_lx && avg_lx <= avg_mm;
  const bool std_order = std_lx <= std_mm;
  Verdict v;
  v.pass = avg_order && std_order;
  v.detail = fmt("mean avg change minsum %.2f, lexmin %.2f, minimax %.2f; ", avg_ms, avg_lx, avg_mm) +
             fmt("mean std minsum %.2f, lexmin %.2f, minimax %.2f; ", std_ms, std_lx, std_mm) +
             "avg order " + (avg_order ? "holds" : "fails") + ", std order " + (std_order ? "holds" : "fails") +
             ", unproven solves " + std::to_string(unproven);
  return v;
}

Verdict fair_tau_shape() {
  BaseOptions opt;
  opt.limits.time_limit_seconds = 60.0;
  int breaks = 0, not_reached = 0, pof_breaks = 0, unproven = 0;
  std::ostringstream curves;
  for (int seed = 1; seed <= 10; ++seed) {
    const Instance inst = reduced(Scenario::I, seed);
    const SolveReport base = solve_base(inst, opt);
    if (!base.optimal) ++unproven;
    const int z_star = base.schedule->buses;
    const int tau_max = (inst.grid.am_slots - inst.first_start_slot()) * inst.grid.slot_minutes;
    std::vector<int> f;
    for (int tau = 0; tau <= tau_max; tau += inst.grid.slot_minutes) {
      const SolveReport r = solve_fair_tau(inst, tau, opt);
      if (!r.optimal) ++unproven;
      f.push_back(r.schedule ? r.schedule->buses : std::numeric_limits<int>::max());
    }
    for (std::size_t k = 1; k < f.size(); ++k)
      if (f[k] > f[k - 1]) ++breaks;
    if (f.back() != z_star) ++not_reached;
    if (price_of_fairness(z_star, f.front()) < price_of_fairness(z_star, f.back())) ++pof_breaks;
    if (seed <= 3) curves << (seed > 1 ? "; " : "") << "seed " << seed << ": " << f.front() << "->" << f.back();
  }
  return {breaks == 0 && not_reached == 0 && pof_breaks == 0 && unproven == 0,
          "10 instances; monotonicity breaks " + std::to_string(breaks) + ", not reaching z* " +
              std::to_string(not_reached) + ", PoF order breaks " + std::to_string(pof_breaks) +
              ", unproven solves " + std::to_string(unproven) + " (" + curves.str() + ")"};
}

Verdict scenario_four() {
  Instance inst;
  inst.grid.am_slots = 18;
  inst.alpha = 4;
  inst.beta = 2;
  inst.lambda = 1;
  inst.mu = 4;
  School s;
  s.id = 1;
  s.current_start = 11;
  s.day_length = 78;
  for (int m = 3; m <= 18; ++m) s.allowed_starts.push_back(m);
  inst.schools.push_back(s);
  fit_pm_window(inst);
  const auto c = scenario4_matrix(inst);
  const double a = c(1, 10), b = c(1, 9), d = c(1, 7);
  return {near(a, 1.0) && near(b, 2.378414230005442) && near(d, 5.656854249492381),
          fmt("gaps 1, 2, 4 give %.12f, %.12f, %.12f", a, b, d)};
}

Verdict epsilon_hazard() {
  GeneratorSpec spec = scenario_defaults(Scenario::I);
  spec.num_schools = 10;
  spec.num_am_routes = 10;
  const Instance inst = generate_instance(spec, 3);
  const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
  const Schedule g = greedy_schedule(inst);
  const double pimax = evaluate(g, c, inst).pi_max;
  const milp::MilpModel m = milp::build_lexmin_full(inst, c, g.buses, pimax, 0.1);
  const double ratio = m.metadata.objective_coefficient_ratio;
  return {ratio >= 1e9 && m.metadata.numerically_hazardous,
          fmt("N=10, epsilon=0.1: coefficient ratio %.3g, ", ratio) +
              (m.metadata.numerically_hazardous ? "flagged hazardous" : "not flagged")};
}

Verdict round_trip() {
  std::vector<Instance> instances{fixtures::make_t1(), reduced(Scenario::III, 1)};
  for (int seed = 0; seed < 6; ++seed) instances.push_back(fixtures::make_tiny(40'000 + seed, {2, 4, 10, 2, 3, 2, 8}));
  int rejected = 0, mismatched = 0, nondeterministic = 0, checked = 0;
  std::string first;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const Instance& inst = instances[k];
    const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
    const SolveReport base = solve_base(inst);
    const int z = base.schedule->buses;
    const double phi = 0.5;
    const SolveReport weighted = solve_minimax_weighted(inst, c, phi);
    const SolveReport mm = solve_minimax(inst, c, z);
    const SolveReport lx = solve_lexmin(inst, c, z);
    double lex_value = 0;
    for (std::size_t j = 0; j < lx.objective.psi.size(); ++j)
      lex_value += std::pow(0.1, static_cast<double>(j + 1)) * lx.objective.psi[j];

    struct Case {
      std::string name;
      std::function<milp::MilpModel()> build;
      const Schedule* schedule;
      double expected;
    };
    const std::vector<Case> cases{
        {"base", [&] { return milp::build_base(inst); }, &*base.schedule, static_cast<double>(z)},
        {"minimax-weighted", [&] { return milp::build_minimax_weighted(inst, c, phi); }, &*weighted.schedule,
         weighted.objective.value},
        {"minimax", [&] { return milp::build_minimax_eps(inst, c, z); }, &*mm.schedule, mm.objective.value},
        {"lexmin", [&] { return milp::build_lexmin_full(inst, c, z, lx.objective.psi[0], 0.1); }, &*lx.schedule,
         lex_value},
    };
    for (const Case& cs : cases) {
      ++checked;
      const milp::MilpModel model = cs.build();
      const milp::MilpSolution sol = milp::solution_from_schedule(model, inst, *cs.schedule, &c);
      const auto violations = milp::validate_solution(model, sol);
      if (!violations.empty()) {
        ++rejected;
        if (first.empty()) first = cs.name + " instance " + std::to_string(k) + ": " + violations.front();
      }
      if (std::abs(milp::objective_value(model, sol) - cs.expected) > 1e-6) {
        ++mismatched;
        if (first.empty()) first = cs.name + " objective on instance " + std::to_string(k);
      }
      if (milp::to_mps(model) != milp::to_mps(cs.build())) ++nondeterministic;
    }
  }
  return {rejected == 0 && mismatched == 0 && nondeterministic == 0,
          std::to_string(checked) + " schedule/model pairs; rejected " + std::to_string(rejected) +
              ", objective mismatches " + std::to_string(mismatched) + ", MPS differences " +
              std::to_string(nondeterministic) + (first.empty() ? "" : " (first: " + first + ")")};
}

Verdict district_scale_smoke() {
  const Instance inst = generate_instance(scenario_defaults(Scenario::I), 7);
  const bool shape = inst.num_schools() == 15 && inst.count_routes(Period::AM) == 59 &&
                     inst.count_routes(Period::PM) == 59;
  const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
  BaseOptions opt;
  opt.limits.time_limit_seconds = 120.0;
  const SolveReport r = solve_base(inst, opt);
  const bool feasible = r.schedule && check_schedule(inst, *r.schedule).empty();
  std::size_t columns = 0;
  if (r.schedule) {
    const int z = r.schedule->buses;
    const double pimax = evaluate(*r.schedule, c, inst).pi_max;
    columns += milp::build_base(inst).variables().size();
    columns += milp::build_minimax_weighted(inst, c, 1.0).variables().size();
    columns += milp::build_minimax_eps(inst, c, z).variables().size();
    columns += milp::build_lexmin_full(inst, c, z, pimax, 0.1).variables().size();
    columns += milp::build_lexmin_step(inst, c, z, pimax, 2, {}).variables().size();
  }
  const int lb = r.stats.lower_bound;
  return {shape && feasible && lb > 0 && lb <= (r.schedule ? r.schedule->buses : 0) && columns > 0,
          "N=" + std::to_string(inst.num_schools()) + ", " + std::to_string(inst.count_routes(Period::AM)) + "+" +
              std::to_string(inst.count_routes(Period::PM)) + " routes; incumbent " +
              (r.schedule ? std::to_string(r.schedule->buses) : "none") + " buses, lower bound " +
              std::to_string(lb) + (r.optimal ? " (proven optimal)" : " (not proven)") + "; five models, " +
              std::to_string(columns) + " columns in total"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"oracle_equivalence", 300, oracle_equivalence},
      {"fleet_spread_example", 1, spread_pair},
      {"interval_colouring", 60, interval_colouring},
      {"minimax_monotone_lexmin_dominance", 600, minimax_lexmin},
      {"equity_trend", 0, table_two_trend},
      {"fair_tau_shape", 600, fair_tau_shape},
      {"scenario4_values", 1, scenario_four},
      {"epsilon_hazard", 10, epsilon_hazard},
      {"round_trip", 60, round_trip},
      {"district_scale_smoke", 600, district_scale_smoke},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  if (selected.size() == 1 && selected[0] == "--list") {
    for (const auto& c : all) std::cout << c.name << "\n";
    return 0;
  }
  for (const auto& s : selected)
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.name == s; })) {
      std::cerr << "unknown criterion " << s << "\n";
      return 2;
    }

  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0 || secs <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    ++ran;
    failed += !pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.name << fmt(" (%.2f s", secs)
              << (c.budget_seconds > 0 ? fmt(", budget %.0f s", c.budget_seconds) : "") << (in_time ? "" : ", over budget") << ") "
              << v.detail << std::endl;
  }
  std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
