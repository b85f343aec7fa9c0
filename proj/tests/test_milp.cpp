#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "bellsched/engine.hpp"
#include "bellsched/milp.hpp"
#include "support/fixtures.hpp"
#include "support/mps_reader.hpp"

using namespace bellsched;
using namespace bellsched::milp;

namespace {

const DisutilityMatrix& t1_minutes() {
  static const DisutilityMatrix c = abs_deviation_matrix(fixtures::make_t1(), DisutilityUnit::Minutes);
  return c;
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

bool has_prefix(const std::vector<std::string>& v, const std::string& p) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.rfind(p, 0) == 0; });
}

Instance ten_schools() {
  auto spec = scenario_defaults(Scenario::I);
  spec.num_schools = 10;
  spec.num_am_routes = 10;
  return generate_instance(spec, 3);
}

// Fewest-bus schedule with the given starts.
Schedule t1_schedule(std::vector<int> starts) {
  const Instance t1 = fixtures::make_t1();
  std::vector<std::vector<int>> domains;
  for (int s : starts) domains.push_back({s});
  auto f = engine::feasible_with(t1, 1, domains);
  if (!f.schedule) f = engine::feasible_with(t1, 2, domains);
  return *f.schedule;
}

std::map<std::string, double> row_map(const MilpModel& m, const Constraint& c) {
  std::map<std::string, double> out;
  for (const Term& t : c.terms)
    if (t.coef != 0.0) out[m.variables()[t.var].name] += t.coef;
  return out;
}

void expect_same_model(const MilpModel& a, const MilpModel& b) {
  ASSERT_EQ(a.variables().size(), b.variables().size());
  for (std::size_t k = 0; k < a.variables().size(); ++k) {
    const Variable &x = a.variables()[k], &y = b.variables()[k];
    EXPECT_EQ(x.name, y.name);
    EXPECT_EQ(x.kind, y.kind) << x.name;
    EXPECT_EQ(x.lower, y.lower) << x.name;
    EXPECT_EQ(x.upper, y.upper) << x.name;
  }
  ASSERT_EQ(a.constraints().size(), b.constraints().size());
  for (std::size_t k = 0; k < a.constraints().size(); ++k) {
    const Constraint &x = a.constraints()[k], &y = b.constraints()[k];
    EXPECT_EQ(x.name, y.name);
    EXPECT_EQ(x.sense, y.sense) << x.name;
    EXPECT_DOUBLE_EQ(x.rhs, y.rhs) << x.name;
    EXPECT_EQ(row_map(a, x), row_map(b, y)) << x.name;
  }
  std::map<std::string, double> oa, ob;
  for (const Term& t : a.objective()) oa[a.variables()[t.var].name] += t.coef;
  for (const Term& t : b.objective()) ob[b.variables()[t.var].name] += t.coef;
  // Coefficients are written with 12 significant digits.
  ASSERT_EQ(oa.size(), ob.size());
  for (const auto& [name, coef] : oa) {
    ASSERT_TRUE(ob.count(name)) << name;
    EXPECT_NEAR(ob[name], coef, 1e-11 * std::max(1.0, std::abs(coef))) << name;
  }
}

}  // namespace

TEST(BuildBase, T1Counts) {
  const MilpModel m = build_base(fixtures::make_t1());
  EXPECT_EQ(m.count_vars("x"), 12);
  EXPECT_EQ(m.count_vars("u"), 10);
  EXPECT_EQ(m.count_vars("z"), 1);
  EXPECT_EQ(m.count_vars("y"), 0);
  EXPECT_EQ(m.count_rows("start_once"), 2);
  EXPECT_EQ(m.count_rows("am_window"), 10);
  EXPECT_EQ(m.count_rows("am_cap"), 6);
  EXPECT_EQ(m.count_rows("pm_cap"), 0);
  ASSERT_EQ(m.objective().size(), 1u);
  EXPECT_EQ(m.variables()[m.objective()[0].var].name, "z");
}

TEST(BuildBase, UniqueAssignmentRows) {
  const Instance inst = generate_instance(scenario_defaults(Scenario::I), 2);
  BaseOptions off;
  off.require_unique_assignment = false;
  const MilpModel with = build_base(inst), without = build_base(inst, off);
  EXPECT_EQ(with.count_rows("am_once"), inst.count_routes(Period::AM));
  EXPECT_EQ(with.count_rows("pm_once"), inst.count_routes(Period::PM));
  EXPECT_EQ(without.count_rows("am_once") + without.count_rows("pm_once"), 0);
  EXPECT_EQ(with.constraints().size() - without.constraints().size(), inst.routes.size());
}

TEST(BuildBase, DistinctStartLimit) {
  const Instance t1 = fixtures::make_t1();
  BaseOptions opt;
  opt.distinct_start_limit = 3;
  const MilpModel m = build_base(t1, opt);
  const int slots = t1.grid.am_slots - t1.beta;
  EXPECT_EQ(m.count_vars("k"), slots);
  ASSERT_EQ(m.count_rows("distinct_limit"), 1);
  for (const Constraint& c : m.constraints())
    if (c.name == "distinct_limit") EXPECT_DOUBLE_EQ(c.rhs, 3.0);
  EXPECT_EQ(m.count_rows("start_uses_k"), t1.num_schools() * slots);
}

TEST(BuildBase, DisallowedStartsFixedToZero) {
  Instance t1 = fixtures::make_t1();
  t1.schools[0].allowed_starts = {3, 4};
  const MilpModel m = build_base(t1);
  EXPECT_EQ(m.variables()[m.index("u[1,2]")].upper, 0.0);
  EXPECT_EQ(m.variables()[m.index("u[1,3]")].upper, 1.0);
  EXPECT_EQ(m.variables()[m.index("u[1,5]")].upper, 0.0);
}

TEST(BuildBase, EveryRowUsesDeclaredVariables) {
  const MilpModel m = build_base(generate_instance(scenario_defaults(Scenario::III), 4));
  for (const Constraint& c : m.constraints())
    for (const Term& t : c.terms) ASSERT_LT(t.var, static_cast<int>(m.variables().size()));
  MilpModel copy;
  copy.add_variable("a", VarKind::Binary, 0, 1);
  EXPECT_THROW(copy.add_variable("a", VarKind::Binary, 0, 1), std::logic_error);
  EXPECT_THROW(copy.add_constraint("r", {{5, 1.0}}, Sense::Equal, 0), std::logic_error);
}

TEST(Minimax, WeightedCountsAndErrors) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_minimax_weighted(t1, t1_minutes(), 1.0);
  EXPECT_EQ(m.count_rows("pi_def"), 2);
  EXPECT_EQ(m.count_rows("pimax_ge"), 2);
  EXPECT_EQ(m.count_vars("pi"), 2);
  EXPECT_THROW(build_minimax_weighted(t1, t1_minutes(), -0.5), std::invalid_argument);
}

TEST(Minimax, WeightedPhiZeroMatchesBase) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel w = build_minimax_weighted(t1, t1_minutes(), 0.0);
  const MilpModel b = build_base(t1);
  const auto sched = engine::solve_base(t1).schedule;
  const auto sw = solution_from_schedule(w, t1, *sched, &t1_minutes());
  const auto sb = solution_from_schedule(b, t1, *sched);
  EXPECT_TRUE(validate_solution(w, sw).empty());
  EXPECT_DOUBLE_EQ(*sw.objective, *sb.objective);
  EXPECT_DOUBLE_EQ(*sb.objective, 1.0);
}

// With phi = 1 on T1 both (z=1, pi_max=5) and (z=2, pi_max=0) are feasible;
// the model optimum is therefore at most 2.
TEST(Minimax, WeightedT1Points) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_minimax_weighted(t1, t1_minutes(), 1.0);
  Schedule one = t1_schedule({4, 5});
  ASSERT_EQ(one.buses, 1);
  auto s1 = solution_from_schedule(m, t1, one, &t1_minutes());
  EXPECT_TRUE(validate_solution(m, s1).empty());
  EXPECT_DOUBLE_EQ(*s1.objective, 6.0);
  Schedule two = t1_schedule({4, 4});
  ASSERT_EQ(two.buses, 2);
  auto s2 = solution_from_schedule(m, t1, two, &t1_minutes());
  EXPECT_TRUE(validate_solution(m, s2).empty());
  EXPECT_DOUBLE_EQ(*s2.objective, 2.0);
}

TEST(Minimax, EpsFixesZ) {
  const Instance t1 = fixtures::make_t1();
  for (int z_bar : {1, 2}) {
    const MilpModel m = build_minimax_eps(t1, t1_minutes(), z_bar);
    EXPECT_EQ(m.count_rows("z_fix"), 1);
    const auto r = engine::solve_minimax(t1, t1_minutes(), z_bar);
    const auto sol = solution_from_schedule(m, t1, *r.schedule, &t1_minutes());
    EXPECT_TRUE(validate_solution(m, sol).empty());
    EXPECT_DOUBLE_EQ(*sol.objective, z_bar == 1 ? 5.0 : 0.0);
  }
}

TEST(Minimax, EpsZeroBusesInfeasible) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_minimax_eps(t1, t1_minutes(), 0);
  const auto sol = solution_from_schedule(m, t1, t1_schedule({4, 5}), &t1_minutes());
  EXPECT_TRUE(has_prefix(validate_solution(m, sol), "am_cap["));
}

TEST(LexminFull, CoefficientHazard) {
  const Instance inst = ten_schools();
  const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
  const MilpModel m = build_lexmin_full(inst, c, 5, 20.0, 0.1);
  EXPECT_GE(m.metadata.objective_coefficient_ratio, 1e9);
  EXPECT_TRUE(m.metadata.numerically_hazardous);
  EXPECT_EQ(m.count_vars("h"), 100);
  EXPECT_EQ(m.count_rows("rank_bigm"), 100);
  EXPECT_EQ(m.count_rows("rank_order"), 9);
  EXPECT_EQ(m.count_vars("psi"), 10);
}

TEST(LexminFull, EpsilonRange) {
  const Instance t1 = fixtures::make_t1();
  EXPECT_THROW(build_lexmin_full(t1, t1_minutes(), 1, 5.0, 0.0), std::invalid_argument);
  EXPECT_THROW(build_lexmin_full(t1, t1_minutes(), 1, 5.0, 1.0), std::invalid_argument);
  EXPECT_FALSE(build_lexmin_full(t1, t1_minutes(), 1, 5.0, 0.5).metadata.numerically_hazardous);
}

TEST(LexminStep, T1SecondRank) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_lexmin_step(t1, t1_minutes(), 1, 5.0, 2, {});
  EXPECT_EQ(m.count_vars("h"), 4);
  EXPECT_EQ(m.count_rows("rank_bigm"), 4);
  const auto sol = solution_from_schedule(m, t1, t1_schedule({4, 5}), &t1_minutes());
  EXPECT_TRUE(validate_solution(m, sol).empty());
  EXPECT_DOUBLE_EQ(*sol.objective, 0.0);
}

TEST(LexminStep, RejectsBadFixedPsi) {
  const Instance inst = ten_schools();
  const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
  EXPECT_THROW(build_lexmin_step(inst, c, 5, 20.0, 4, {3.0, 4.0}), std::invalid_argument);
  EXPECT_THROW(build_lexmin_step(inst, c, 5, 20.0, 1, {}), std::invalid_argument);
  EXPECT_THROW(build_lexmin_step(inst, c, 5, 20.0, 3, {25.0}), std::invalid_argument);
  EXPECT_NO_THROW(build_lexmin_step(inst, c, 5, 20.0, 4, {10.0, 5.0}));
}

// With h = 1 the big-M row is slack exactly when pi_n <= psi_j; with h = 0 it
// never binds for values drawn from the matrix.
TEST(BigM, SampledEntriesIncludingNegatives) {
  PortableRng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = fixtures::make_tiny(trial, {2, 3, 8, 2, 3, 2, 6});
    Eigen::MatrixXd v(inst.num_schools(), inst.start_slot_count());
    for (int k = 0; k < v.size(); ++k) v(k) = static_cast<double>(rng.uniform_int(-40, 40)) / 3.0;
    const DisutilityMatrix c(v, inst.first_start_slot(), DisutilityUnit::Custom);
    for (int a = 0; a < v.size(); ++a)
      for (int b = 0; b < v.size(); ++b) {
        const double pi = v(a), psi = v(b), ct = c.c_tilde();
        EXPECT_LE(pi - psi, ct + 1e-9);  // h = 0
        if (pi <= psi) EXPECT_LE(pi - psi + ct, ct + 1e-9);  // h = 1
      }
  }
}

TEST(Mps, Skeleton) {
  MilpModel m;
  m.name = "toy";
  const int z = m.add_variable("z", VarKind::Integer, 0, kInf);
  m.set_objective({{z, 1.0}});
  const std::string text = to_mps(m);
  EXPECT_NE(text.find("ROWS\n N obj\n"), std::string::npos);
  EXPECT_NE(text.find("'INTORG'"), std::string::npos);
  EXPECT_NE(text.find("'INTEND'"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 7), "ENDATA\n");
}

TEST(Mps, DeterministicAndFileMatches) {
  const Instance inst = generate_instance(scenario_defaults(Scenario::III), 6);
  const auto c = abs_deviation_matrix(inst, DisutilityUnit::Minutes);
  const auto path = std::filesystem::temp_directory_path() / "bellsched_model.mps";
  const MilpModel a = build_lexmin_step(inst, c, 24, 30.0, 3, {25.0});
  export_mps(a, path);
  std::ifstream in(path, std::ios::binary);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, to_mps(build_lexmin_step(inst, c, 24, 30.0, 3, {25.0})));
  EXPECT_EQ(to_mps(build_base(inst)), to_mps(build_base(inst)));
}

TEST(Mps, ParseBackFidelity) {
  const Instance t1 = fixtures::make_t1();
  const auto& c = t1_minutes();
  BaseOptions k3;
  k3.distinct_start_limit = 3;
  const std::vector<MilpModel> models = {
      build_base(t1), build_base(t1, k3), build_minimax_weighted(t1, c, 0.25), build_minimax_eps(t1, c, 1),
      build_lexmin_full(t1, c, 1, 5.0, 0.1), build_lexmin_step(t1, c, 1, 5.0, 2, {}),
      build_base(fixtures::make_tiny(5)), build_base(generate_instance(scenario_defaults(Scenario::II), 1))};
  for (const MilpModel& m : models) expect_same_model(m, fixtures::read_mps(to_mps(m)));
}

TEST(Mps, TwelveSignificantDigits) {
  MilpModel m;
  const int x = m.add_variable("x", VarKind::Continuous, 0, kInf);
  m.add_constraint("r", {{x, 1.0 / 3.0}}, Sense::LessEqual, 2.0 / 3.0);
  m.set_objective({{x, 1.0}});
  const std::string text = to_mps(m);
  EXPECT_NE(text.find(" x r 0.333333333333\n"), std::string::npos);
  EXPECT_NE(text.find(" RHS r 0.666666666667\n"), std::string::npos);
}

TEST(Solution, ParseFormat) {
  const MilpSolution s = parse_solution("# comment\n=obj= 3.5\nz 3\n\nx[1,1,2] 1  # trailing\n");
  ASSERT_TRUE(s.objective);
  EXPECT_DOUBLE_EQ(*s.objective, 3.5);
  EXPECT_DOUBLE_EQ(s.values.at("z"), 3.0);
  EXPECT_DOUBLE_EQ(s.values.at("x[1,1,2]"), 1.0);
}

TEST(Solution, FormatRoundTrip) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_base(t1);
  const auto sol = solution_from_schedule(m, t1, *engine::solve_base(t1).schedule);
  const auto back = parse_solution(format_solution(m, sol));
  EXPECT_EQ(back.values, sol.values);
  EXPECT_TRUE(validate_solution(m, back).empty());
}

TEST(Validate, EngineT1Clean) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_base(t1);
  EXPECT_TRUE(validate_solution(m, solution_from_schedule(m, t1, *engine::solve_base(t1).schedule)).empty());
}

TEST(Validate, Breaches) {
  const Instance t1 = fixtures::make_t1();
  const MilpModel m = build_base(t1);
  const Schedule s = *engine::solve_base(t1).schedule;
  auto two_u = solution_from_schedule(m, t1, s);
  two_u.values[s.start[0] == 6 ? "u[1,5]" : "u[1,6]"] = 1.0;
  EXPECT_TRUE(has(validate_solution(m, two_u), "start_once[1]"));

  auto zero_z = solution_from_schedule(m, t1, s);
  zero_z.values["z"] = 0.0;
  zero_z.objective = 0.0;
  EXPECT_TRUE(has_prefix(validate_solution(m, zero_z), "am_cap["));

  auto bad_obj = solution_from_schedule(m, t1, s);
  bad_obj.objective = 7.0;
  EXPECT_TRUE(has_prefix(validate_solution(m, bad_obj), "objective"));

  auto frac = solution_from_schedule(m, t1, s);
  frac.values["x[1,1,3]"] = 0.5;
  EXPECT_TRUE(has(validate_solution(m, frac), "integrality x[1,1,3]"));

  auto missing = solution_from_schedule(m, t1, s);
  missing.values.erase("u[2,3]");
  try {
    validate_solution(m, missing);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("u[2,3]"), std::string::npos);
  }
}

// Engine schedules induce model solutions that validate with the stated
// objective, and fixing z to z* keeps every formulation feasible.
TEST(Consistency, EngineSchedulesValidate) {
  for (int seed = 0; seed < 40; ++seed) {
    const Instance inst = fixtures::make_tiny(300 + seed, {2, 3, 8, 2, 3, 2, 6});
    const auto c = fixtures::random_matrix(inst, seed, 5);
    const auto base = engine::solve_base(inst);
    const int z = base.schedule->buses;
    const auto mm = engine::solve_minimax(inst, c, z);
    const auto lx = engine::solve_lexmin(inst, c, z);

    const MilpModel mb = build_base(inst);
    auto sb = solution_from_schedule(mb, inst, *base.schedule);
    EXPECT_TRUE(validate_solution(mb, sb).empty());
    EXPECT_DOUBLE_EQ(*sb.objective, z);

    const MilpModel me = build_minimax_eps(inst, c, z);
    auto se = solution_from_schedule(me, inst, *mm.schedule, &c);
    EXPECT_TRUE(validate_solution(me, se).empty());
    EXPECT_NEAR(*se.objective, mm.objective.value, 1e-9);

    const MilpModel mf = build_lexmin_full(inst, c, z, mm.objective.value, 0.5);
    EXPECT_TRUE(validate_solution(mf, solution_from_schedule(mf, inst, *lx.schedule, &c)).empty());

    for (int j = 2; j <= inst.num_schools(); ++j) {
      std::vector<double> fixed(lx.objective.psi.begin() + 1, lx.objective.psi.begin() + j - 1);
      const MilpModel ms = build_lexmin_step(inst, c, z, lx.objective.psi[0], j, fixed);
      auto ss = solution_from_schedule(ms, inst, *lx.schedule, &c);
      EXPECT_TRUE(validate_solution(ms, ss).empty());
      EXPECT_NEAR(*ss.objective, lx.objective.psi[j - 1], 1e-9);
    }
  }
}
