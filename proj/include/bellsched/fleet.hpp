#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "bellsched/instance.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched {

// Per-slot count of routes in operation. am(k) is slot k+1; pm(k) is slot
// pm_min + k.
struct OccupancyProfile {
  Eigen::VectorXi am;
  Eigen::VectorXi pm;
  int am_peak = 0;
  int pm_peak = 0;
};

// Operating interval of a route on the unclipped timeline (may start before
// slot 1 or end after pm_max).
struct OperatingInterval {
  int route = 0;
  int school = 0;
  Period period = Period::AM;
  int first = 0;
  int last = 0;
};

OperatingInterval operating_interval(const Route& r, int time);
std::vector<OperatingInterval> operating_intervals(const Instance& inst, const Schedule& s);

// Throws std::invalid_argument when the schedule does not cover the instance.
OccupancyProfile occupancy(const Instance& inst, const Schedule& s);

// Fewest buses able to run the schedule: the peak number of routes in
// operation in either half-day.
int min_buses(const Instance& inst, const Schedule& s);

struct BusAssignment {
  std::map<int, int> bus_of_route;  // route id -> bus id (1-based)
  int fleet_size = 0;
};

// Greedy interval colouring: intervals in order of start (ties: longer
// first, then route id), each to the lowest-numbered bus that is free.
// Returns one bus id per input interval.
std::vector<int> colour_intervals(const std::vector<OperatingInterval>& intervals);

// AM and PM are coloured independently; bus ids are shared across them.
BusAssignment assign_buses(const Instance& inst, const Schedule& s);

std::string bus_assignment_csv(const Instance& inst, const Schedule& s, const BusAssignment& a);

}  // namespace bellsched
