#pragma once

// Depth-first schedule search shared by every engine objective.
//
// Schools are branched on start slot. After each choice the routes of the
// fixed schools must admit a placement under the bus cap; placements are
// extended incrementally and rebuilt from scratch only when an extension
// fails. Compulsory parts (slots a route covers for every time in its
// window) give a placement-independent profile used for forward checking.

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "bellsched/engine.hpp"
#include "bellsched/equity.hpp"
#include "bellsched/instance.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched::engine::detail {

using Clock = std::chrono::steady_clock;

struct Deadline {
  std::optional<Clock::time_point> at;
  static Deadline after(const SearchLimits& limits);
  bool passed() const { return at && Clock::now() >= *at; }
  SearchLimits remaining() const;
};

enum class Mode { Feasibility, MinSum };

struct SearchConfig {
  int cap = 0;
  std::vector<std::vector<int>> domains;  // per school position, ascending
  std::vector<CountingCap> caps;
  const DisutilityMatrix* c = nullptr;
  std::optional<int> distinct_start_limit;
  Mode mode = Mode::Feasibility;
  const std::vector<int>* hint = nullptr;
  Deadline deadline;
};

struct SearchOutcome {
  enum class Kind { Found, Exhausted, TimeLimit } kind = Kind::Exhausted;
  std::optional<Schedule> best;  // Feasibility: first found; MinSum: best found
  double best_sum = 0.0;
  std::int64_t nodes = 0;
};

SearchOutcome run_search(const Instance& inst, const SearchConfig& config);

// Lower bound on buses over the given start domains.
int lower_bound(const Instance& inst, const std::vector<std::vector<int>>& domains);

std::optional<Schedule> greedy(const Instance& inst, const std::vector<std::vector<int>>& domains,
                               std::optional<int> distinct_start_limit);

std::vector<std::vector<int>> allowed_domains(const Instance& inst);

}  // namespace bellsched::engine::detail
