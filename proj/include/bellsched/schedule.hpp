#pragma once

#include <map>
#include <string>
#include <vector>

#include "bellsched/instance.hpp"

namespace bellsched {

// Decided bell times and route times. Vectors are indexed by school
// position (id - 1); route maps are keyed by route id.
struct Schedule {
  std::vector<int> start;
  std::vector<int> end;
  std::map<int, int> am_arrival;
  std::map<int, int> pm_departure;
  int buses = 0;

  bool operator==(const Schedule&) const = default;
};

// Checks the linkage, window and fleet-size invariants of a schedule
// against an instance. Empty result means the schedule is consistent.
std::vector<std::string> check_schedule(const Instance& inst, const Schedule& s);

// Inclusive AM arrival window for a school starting at `start`.
struct SlotRange {
  int first = 0;
  int last = -1;
  bool empty() const { return last < first; }
  int size() const { return empty() ? 0 : last - first + 1; }
};

SlotRange am_arrival_window(const Instance& inst, int start);
SlotRange pm_departure_window(const Instance& inst, int end);

}  // namespace bellsched
