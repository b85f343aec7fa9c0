#pragma once

// Shared desk instances and a tiny random instance generator for tests.

#include <algorithm>
#include <cstdint>
#include <string>
#include <numeric>
#include <vector>

#include "bellsched/equity.hpp"
#include "bellsched/instance.hpp"
#include "bellsched/fleet.hpp"
#include "bellsched/rng.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched::fixtures {

// Two schools, one 2-slot AM route each, starts 2..6, current start 4.
inline Instance make_t1() {
  Instance inst;
  inst.grid.slot_minutes = 5;
  inst.grid.am_slots = 6;
  inst.alpha = 2;
  inst.beta = 1;
  inst.lambda = 1;
  inst.mu = 2;
  for (int id = 1; id <= 2; ++id) {
    School s;
    s.id = id;
    s.label = id == 1 ? "A" : "B";
    s.current_start = 4;
    s.day_length = 10;
    s.allowed_starts = {2, 3, 4, 5, 6};
    inst.schools.push_back(s);
    inst.routes.push_back({id, id, Period::AM, 2});
  }
  fit_pm_window(inst);
  return inst;
}

// Two schools with two 9-slot AM routes each. School A may only start at
// slot 25; school B at 25 only, or anywhere in 16..25 when widened.
inline Instance make_spread_pair(bool widened) {
  Instance inst;
  inst.grid.slot_minutes = 5;
  inst.grid.am_slots = 30;
  inst.alpha = 4;
  inst.beta = 2;
  inst.lambda = 1;
  inst.mu = 4;
  int route = 1;
  for (int id = 1; id <= 2; ++id) {
    School s;
    s.id = id;
    s.label = id == 1 ? "A" : "B";
    s.current_start = 25;
    s.day_length = 78;
    s.allowed_starts = {25};
    if (id == 2 && widened) {
      s.allowed_starts.clear();
      for (int m = 16; m <= 25; ++m) s.allowed_starts.push_back(m);
    }
    inst.schools.push_back(s);
    for (int k = 0; k < 2; ++k) inst.routes.push_back({route++, id, Period::AM, 9});
  }
  fit_pm_window(inst);
  return inst;
}

struct TinyShape {
  int min_schools = 1;
  int max_schools = 3;
  int max_slots = 8;
  int max_routes_per_school = 2;
  int max_route_len = 3;
  int max_window_slack = 2;  // alpha - beta and mu - lambda
  int max_domain = 6;
};

// Random valid instance within the given shape.
inline Instance make_tiny(std::uint64_t seed, const TinyShape& shape = {}) {
  PortableRng rng(seed);
  Instance inst;
  inst.grid.slot_minutes = 5;
  inst.beta = static_cast<int>(rng.uniform_int(0, 2));
  inst.alpha = inst.beta + static_cast<int>(rng.uniform_int(0, shape.max_window_slack));
  inst.grid.am_slots = static_cast<int>(rng.uniform_int(std::min(inst.beta + 4, shape.max_slots), shape.max_slots));
  inst.lambda = static_cast<int>(rng.uniform_int(0, 1));
  inst.mu = inst.lambda + static_cast<int>(rng.uniform_int(0, shape.max_window_slack));
  const int N = static_cast<int>(rng.uniform_int(shape.min_schools, shape.max_schools));
  std::vector<int> all;
  for (int m = inst.beta + 1; m <= inst.grid.am_slots; ++m) all.push_back(m);
  int route = 1;
  for (int id = 1; id <= N; ++id) {
    School s;
    s.id = id;
    s.label = "S" + std::to_string(id);
    s.day_length = static_cast<int>(rng.uniform_int(3, 6));
    auto pool = all;
    const int want = static_cast<int>(rng.uniform_int(1, std::min<int>(shape.max_domain, pool.size())));
    for (int k = 0; k < want; ++k) {
      const std::size_t pick = k + rng.index(pool.size() - k);
      std::swap(pool[k], pool[pick]);
    }
    s.allowed_starts.assign(pool.begin(), pool.begin() + want);
    std::sort(s.allowed_starts.begin(), s.allowed_starts.end());
    s.current_start = s.allowed_starts[rng.index(s.allowed_starts.size())];
    inst.schools.push_back(s);
    const int routes = static_cast<int>(rng.uniform_int(1, shape.max_routes_per_school));
    for (int k = 0; k < routes; ++k) {
      const Period p = rng.uniform_int(0, 1) ? Period::PM : Period::AM;
      inst.routes.push_back({route++, id, p, static_cast<int>(rng.uniform_int(1, shape.max_route_len))});
    }
  }
  fit_pm_window(inst);
  return inst;
}

// Integer disutilities in [0, hi], so ties are common.
inline DisutilityMatrix random_matrix(const Instance& inst, std::uint64_t seed, int hi = 4) {
  PortableRng rng(seed);
  Eigen::MatrixXd v(inst.num_schools(), inst.start_slot_count());
  for (int n = 0; n < v.rows(); ++n)
    for (int k = 0; k < v.cols(); ++k) v(n, k) = static_cast<double>(rng.uniform_int(0, hi));
  return DisutilityMatrix(v, inst.first_start_slot(), DisutilityUnit::Custom);
}

// Uniformly random starts and route times within every window.
inline Schedule random_schedule(const Instance& inst, PortableRng& rng) {
  Schedule s;
  for (const School& sc : inst.schools) {
    const int start = sc.allowed_starts[rng.index(sc.allowed_starts.size())];
    s.start.push_back(start);
    s.end.push_back(start + sc.day_length);
  }
  for (const Route& r : inst.routes) {
    const int n = r.school - 1;
    const SlotRange w = r.period == Period::AM ? am_arrival_window(inst, s.start[n])
                                               : pm_departure_window(inst, s.end[n]);
    const int t = w.first + static_cast<int>(rng.index(w.size()));
    (r.period == Period::AM ? s.am_arrival : s.pm_departure)[r.id] = t;
  }
  s.buses = min_buses(inst, s);
  return s;
}

}  // namespace bellsched::fixtures
