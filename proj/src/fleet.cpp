#include "bellsched/fleet.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bellsched {

SlotRange am_arrival_window(const Instance& inst, int start) {
  return {std::max(start - inst.alpha, 1), start - inst.beta};
}

SlotRange pm_departure_window(const Instance& inst, int end) {
  return {end + inst.lambda, std::min(end + inst.mu, inst.grid.pm_max)};
}

OperatingInterval operating_interval(const Route& r, int time) {
  OperatingInterval iv;
  iv.route = r.id;
  iv.school = r.school;
  iv.period = r.period;
  if (r.period == Period::AM) {
    iv.first = time - r.duration_slots + 1;
    iv.last = time;
  } else {
    iv.first = time;
    iv.last = time + r.duration_slots - 1;
  }
  return iv;
}

namespace {

int route_time(const Schedule& s, const Route& r) {
  const auto& times = r.period == Period::AM ? s.am_arrival : s.pm_departure;
  auto it = times.find(r.id);
  if (it == times.end())
    throw std::invalid_argument("schedule has no " +
                                std::string(r.period == Period::AM ? "arrival" : "departure") +
                                " for route " + std::to_string(r.id));
  return it->second;
}

void check_shape(const Instance& inst, const Schedule& s) {
  if (static_cast<int>(s.start.size()) != inst.num_schools() ||
      static_cast<int>(s.end.size()) != inst.num_schools())
    throw std::invalid_argument("schedule covers " + std::to_string(s.start.size()) +
                                " schools, instance has " + std::to_string(inst.num_schools()));
  const auto am = static_cast<std::size_t>(inst.count_routes(Period::AM));
  const auto pm = static_cast<std::size_t>(inst.count_routes(Period::PM));
  if (s.am_arrival.size() != am || s.pm_departure.size() != pm)
    throw std::invalid_argument("schedule route times do not match the instance's routes");
}

}  // namespace

std::vector<OperatingInterval> operating_intervals(const Instance& inst, const Schedule& s) {
  check_shape(inst, s);
  std::vector<OperatingInterval> out;
  out.reserve(inst.routes.size());
  for (const Route& r : inst.routes) out.push_back(operating_interval(r, route_time(s, r)));
  return out;
}

OccupancyProfile occupancy(const Instance& inst, const Schedule& s) {
  const TimeGrid& g = inst.grid;
  OccupancyProfile p;
  p.am = Eigen::VectorXi::Zero(g.am_slots);
  p.pm = Eigen::VectorXi::Zero(std::max(g.pm_max - g.pm_min + 1, 0));
  for (const OperatingInterval& iv : operating_intervals(inst, s)) {
    if (iv.period == Period::AM) {
      const int a = std::max(iv.first, 1), b = std::min(iv.last, g.am_slots);
      if (a <= b) p.am.segment(a - 1, b - a + 1).array() += 1;
    } else {
      const int a = std::max(iv.first, g.pm_min), b = std::min(iv.last, g.pm_max);
      if (a <= b) p.pm.segment(a - g.pm_min, b - a + 1).array() += 1;
    }
  }
  p.am_peak = p.am.size() ? p.am.maxCoeff() : 0;
  p.pm_peak = p.pm.size() ? p.pm.maxCoeff() : 0;
  return p;
}

int min_buses(const Instance& inst, const Schedule& s) {
  const OccupancyProfile p = occupancy(inst, s);
  return std::max(p.am_peak, p.pm_peak);
}

std::vector<int> colour_intervals(const std::vector<OperatingInterval>& intervals) {
  std::vector<std::size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = intervals[a];
    const auto& y = intervals[b];
    if (x.first != y.first) return x.first < y.first;
    const int lx = x.last - x.first, ly = y.last - y.first;
    if (lx != ly) return lx > ly;
    return x.route < y.route;
  });

  std::vector<int> bus(intervals.size(), 0);
  std::vector<int> busy_until;  // last occupied slot per bus
  for (std::size_t k : order) {
    const auto& iv = intervals[k];
    std::size_t b = 0;
    while (b < busy_until.size() && busy_until[b] >= iv.first) ++b;
    if (b == busy_until.size()) busy_until.push_back(iv.last);
    else busy_until[b] = iv.last;
    bus[k] = static_cast<int>(b) + 1;
  }
  return bus;
}

BusAssignment assign_buses(const Instance& inst, const Schedule& s) {
  const auto all = operating_intervals(inst, s);
  BusAssignment out;
  for (Period p : {Period::AM, Period::PM}) {
    std::vector<OperatingInterval> half;
    std::copy_if(all.begin(), all.end(), std::back_inserter(half),
                 [&](const OperatingInterval& iv) { return iv.period == p; });
    const auto bus = colour_intervals(half);
    for (std::size_t k = 0; k < half.size(); ++k) {
      out.bus_of_route[half[k].route] = bus[k];
      out.fleet_size = std::max(out.fleet_size, bus[k]);
    }
  }
  return out;
}

std::string bus_assignment_csv(const Instance& inst, const Schedule& s, const BusAssignment& a) {
  std::ostringstream out;
  out << "route_id,school_id,period,start_slot,end_slot,bus_id\n";
  for (const OperatingInterval& iv : operating_intervals(inst, s)) {
    out << iv.route << ',' << iv.school << ',' << (iv.period == Period::AM ? "AM" : "PM") << ','
        << iv.first << ',' << iv.last << ',' << a.bus_of_route.at(iv.route) << '\n';
  }
  return out.str();
}

std::vector<std::string> check_schedule(const Instance& inst, const Schedule& s) {
  std::vector<std::string> out;
  try {
    check_shape(inst, s);
  } catch (const std::invalid_argument& e) {
    out.emplace_back(e.what());
    return out;
  }
  for (const School& school : inst.schools) {
    const int n = school.id - 1;
    const std::string who = "school " + std::to_string(school.id);
    if (!std::binary_search(school.allowed_starts.begin(), school.allowed_starts.end(), s.start[n]))
      out.push_back(who + ": start " + std::to_string(s.start[n]) + " not allowed");
    if (s.end[n] != s.start[n] + school.day_length)
      out.push_back(who + ": end is not start + day_length");
  }
  for (const Route& r : inst.routes) {
    const int n = r.school - 1;
    const int t = route_time(s, r);
    const SlotRange w = r.period == Period::AM ? am_arrival_window(inst, s.start[n])
                                               : pm_departure_window(inst, s.end[n]);
    if (t < w.first || t > w.last)
      out.push_back("route " + std::to_string(r.id) + ": time " + std::to_string(t) +
                    " outside its window");
  }
  if (s.buses != min_buses(inst, s))
    out.push_back("buses " + std::to_string(s.buses) + " differs from peak occupancy " +
                  std::to_string(min_buses(inst, s)));
  return out;
}

}  // namespace bellsched
