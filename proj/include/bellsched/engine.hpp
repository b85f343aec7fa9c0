#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellsched/equity.hpp"
#include "bellsched/instance.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched::engine {

enum class SolveStatus { Optimal, TimeLimit, Infeasible };

std::string to_string(SolveStatus s);

enum class ObjectiveKind { Buses, PiMax, Weighted, PsiVector, Sum };

std::string to_string(ObjectiveKind k);

struct ObjectiveValue {
  ObjectiveKind kind = ObjectiveKind::Buses;
  double value = 0.0;       // z, pi_max, z + phi*pi_max, psi_1, or sum
  std::vector<double> psi;  // lexmin only
};

struct SolveStats {
  std::int64_t nodes = 0;
  double elapsed_seconds = 0.0;
  int lower_bound = 0;        // proven bound on buses (solve_base / fair_tau)
  int z_bar = 0;              // bus cap used, when the objective has one
  int timed_out_step = 0;     // lexmin step that hit its limit, 0 if none
  int feasibility_calls = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  bool optimal = false;
  std::optional<Schedule> schedule;
  ObjectiveValue objective;
  SolveStats stats;
  std::optional<EquityReport> equity;
  std::string message;  // infeasibility or time-limit detail
};

struct SearchLimits {
  std::optional<double> time_limit_seconds;
};

struct BaseOptions {
  std::optional<int> distinct_start_limit;
  SearchLimits limits;
};

// At most `max_schools` schools may have disutility above `threshold`.
struct CountingCap {
  double threshold = 0.0;
  int max_schools = 0;
};

struct FeasibilityResult {
  enum class Kind { Feasible, Infeasible, TimeLimit } kind = Kind::Infeasible;
  std::optional<Schedule> schedule;
  std::int64_t nodes = 0;
};

// Bus lower bound from route volume and per-school clique size.
int bus_lower_bound(const Instance& inst);

// Greedy spread heuristic: schools in order of total route duration, each
// given the start and route times that keep the running peak lowest.
Schedule greedy_schedule(const Instance& inst, std::optional<int> distinct_start_limit = {});

// Minimum fleet size.
SolveReport solve_base(const Instance& inst, const BaseOptions& options = {});

// Decision primitive: any schedule with at most z_bar buses, starts within
// `domains` (per school, ascending), and every counting cap honoured.
// `hint` (one start per school) is tried first at each level.
FeasibilityResult feasible_with(const Instance& inst, int z_bar,
                                const std::vector<std::vector<int>>& domains,
                                const std::vector<CountingCap>& caps = {},
                                const DisutilityMatrix* c = nullptr,
                                const SearchLimits& limits = {},
                                const std::vector<int>* hint = nullptr,
                                std::optional<int> distinct_start_limit = {});

// Minimum pi_max with at most z_bar buses.
SolveReport solve_minimax(const Instance& inst, const DisutilityMatrix& c, int z_bar,
                          const SearchLimits& limits = {});

// Minimum z + phi * pi_max.
SolveReport solve_minimax_weighted(const Instance& inst, const DisutilityMatrix& c, double phi,
                                   const SearchLimits& limits = {});

// Lexicographically minimal sorted-descending disutility vector with at
// most z_bar buses, computed one rank at a time.
SolveReport solve_lexmin(const Instance& inst, const DisutilityMatrix& c, int z_bar,
                         const SearchLimits& per_step_limits = {});

// Minimum total disutility with at most z_bar buses.
SolveReport solve_minsum(const Instance& inst, const DisutilityMatrix& c, int z_bar,
                         const SearchLimits& limits = {});

// Minimum fleet with every start within tau minutes of the current start.
SolveReport solve_fair_tau(const Instance& inst, double tau_minutes, const BaseOptions& options = {});

// Exhaustive enumeration, independent of the search above.
enum class OracleObjective { Buses, PiMax, Lexmin, Sum };

struct OracleResult {
  bool feasible = false;
  double value = 0.0;       // z, pi_max or sum
  std::vector<double> psi;  // lexmin vector
  std::vector<int> starts;  // one optimal start vector
};

inline constexpr double kOracleSpaceLimit = 1e7;

// Throws std::length_error when the search space exceeds kOracleSpaceLimit.
// z_bar is ignored for the Buses objective. `domains` overrides allowed
// starts when given.
OracleResult brute_force_oracle(const Instance& inst, const DisutilityMatrix* c, OracleObjective obj,
                                int z_bar = 0, const std::vector<std::vector<int>>* domains = nullptr,
                                std::optional<int> distinct_start_limit = {});

double oracle_space_size(const Instance& inst);

}  // namespace bellsched::engine
