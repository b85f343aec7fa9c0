#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bellsched/equity.hpp"
#include "bellsched/instance.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kFeasibilityTol = 1e-6;

enum class VarKind { Binary, Integer, Continuous };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

enum class Formulation { Base, MinimaxWeighted, MinimaxEps, LexminFull, LexminStep };

std::string to_string(Formulation f);

struct ModelMetadata {
  Formulation formulation = Formulation::Base;
  std::map<std::string, double> params;  // phi, z_bar, z_star, pimax_star, j_star, epsilon, K
  std::vector<double> fixed_psi;
  // max |c| / min |c| over nonzero objective coefficients
  double objective_coefficient_ratio = 1.0;
  bool numerically_hazardous = false;
};

// Backend-neutral linear model, always a minimization. Variable and row
// order is insertion order and is preserved by every exporter.
class MilpModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);
  void set_objective(std::vector<Term> terms) { objective_ = std::move(terms); }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  std::optional<int> find(const std::string& name) const;
  int index(const std::string& name) const;  // throws if absent
  Variable& variable(int k) { return variables_.at(k); }

  // Rows whose name starts with `family` followed by '[' or end of name.
  int count_rows(const std::string& family) const;
  int count_vars(const std::string& family) const;

  ModelMetadata metadata;
  std::string name = "bellsched";

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  std::unordered_map<std::string, int> by_name_;
};

struct BaseOptions {
  bool require_unique_assignment = true;
  std::optional<int> distinct_start_limit;
};

// Minimum-fleet timetabling model over the morning and afternoon horizons.
MilpModel build_base(const Instance& inst, const BaseOptions& options = {});

// min z + phi * pimax.
MilpModel build_minimax_weighted(const Instance& inst, const DisutilityMatrix& c, double phi,
                                 const BaseOptions& options = {});

// min pimax with z fixed to z_bar.
MilpModel build_minimax_eps(const Instance& inst, const DisutilityMatrix& c, int z_bar,
                            const BaseOptions& options = {});

// Single-model lexicographic formulation scalarized as sum_j epsilon^j psi_j.
// Known to be numerically fragile; the metadata records the coefficient
// ratio and flags the hazard.
MilpModel build_lexmin_full(const Instance& inst, const DisutilityMatrix& c, int z_star,
                            double pimax_star, double epsilon, const BaseOptions& options = {});

// One step of the iterative lexicographic scheme: min psi[j_star] with
// psi[1] = pimax_star and psi[j] = fixed_psi[j-2] for 2 <= j < j_star.
MilpModel build_lexmin_step(const Instance& inst, const DisutilityMatrix& c, int z_star,
                            double pimax_star, int j_star, const std::vector<double>& fixed_psi,
                            const BaseOptions& options = {});

// Free-format MPS. Identical models give byte-identical text.
std::string to_mps(const MilpModel& model);
void export_mps(const MilpModel& model, const std::filesystem::path& path);

enum class SolutionStatus { Optimal, Feasible, Infeasible, Unknown };

struct MilpSolution {
  std::map<std::string, double> values;
  std::optional<double> objective;
  SolutionStatus status = SolutionStatus::Unknown;
};

// "name value" per line, '#' comments, and "=obj= value".
MilpSolution parse_solution(const std::string& text);
MilpSolution read_solution(const std::filesystem::path& path);
std::string format_solution(const MilpModel& model, const MilpSolution& sol);

double objective_value(const MilpModel& model, const MilpSolution& sol);

// Names of violated rows, bounds, integrality, or "objective" when the
// stated objective disagrees with the recomputed one. Throws
// std::invalid_argument naming the first variable without a value.
std::vector<std::string> validate_solution(const MilpModel& model, const MilpSolution& sol);

// Variable assignment induced by a schedule. `c` is required for every
// formulation except Base. Objective is filled with the recomputed value.
MilpSolution solution_from_schedule(const MilpModel& model, const Instance& inst,
                                    const Schedule& s, const DisutilityMatrix* c = nullptr);

}  // namespace bellsched::milp
