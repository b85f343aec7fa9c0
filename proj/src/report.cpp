#include "bellsched/report.hpp"

#include <json.hpp>
#include <stdexcept>

namespace bellsched {

using nlohmann::ordered_json;

namespace {

ordered_json by_school(const std::vector<int>& v) {
  ordered_json j = ordered_json::object();
  for (std::size_t n = 0; n < v.size(); ++n) j[std::to_string(n + 1)] = v[n];
  return j;
}

ordered_json by_route(const std::map<int, int>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, t] : m) j[std::to_string(id)] = t;
  return j;
}

}  // namespace

std::string report_to_json(const Instance& inst, const engine::SolveReport& r) {
  ordered_json j;
  j["status"] = engine::to_string(r.status);
  j["optimal"] = r.optimal;
  if (!r.message.empty()) j["message"] = r.message;

  ordered_json obj;
  obj["kind"] = engine::to_string(r.objective.kind);
  obj["value"] = r.objective.value;
  if (r.objective.kind == engine::ObjectiveKind::PsiVector) obj["psi"] = r.objective.psi;
  j["objective"] = obj;

  if (r.schedule) {
    const Schedule& s = *r.schedule;
    j["buses"] = s.buses;
    j["start"] = by_school(s.start);
    j["end"] = by_school(s.end);
    j["am_arrival"] = by_route(s.am_arrival);
    j["pm_departure"] = by_route(s.pm_departure);
    ordered_json clock;
    ordered_json st = ordered_json::object(), en = ordered_json::object();
    for (std::size_t n = 0; n < s.start.size(); ++n) {
      st[std::to_string(n + 1)] = clock_label(inst.grid, s.start[n]);
      en[std::to_string(n + 1)] = clock_label(inst.grid, s.end[n]);
    }
    clock["start"] = st;
    clock["end"] = en;
    j["clock"] = clock;
  }

  ordered_json stats;
  stats["nodes"] = r.stats.nodes;
  stats["elapsed_seconds"] = r.stats.elapsed_seconds;
  stats["lower_bound"] = r.stats.lower_bound;
  stats["z_bar"] = r.stats.z_bar;
  stats["timed_out_step"] = r.stats.timed_out_step;
  stats["feasibility_calls"] = r.stats.feasibility_calls;
  j["stats"] = stats;

  if (r.equity) {
    const EquityReport& e = *r.equity;
    ordered_json eq;
    eq["pi_max"] = e.pi_max;
    eq["avg_change_min"] = e.avg_abs_change_minutes;
    eq["std_change_min"] = e.std_abs_change_minutes;
    eq["per_school"] = e.per_school_disutility;
    eq["sorted_desc"] = e.sorted_desc;
    ordered_json h = ordered_json::object();
    for (const auto& [edge, count] : e.histogram) h[std::to_string(edge)] = count;
    eq["histogram"] = h;
    j["equity"] = eq;
  }
  return j.dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& text, const Instance& inst) {
  const ordered_json j = ordered_json::parse(text);
  if (!j.contains("start")) throw std::runtime_error("report has no schedule");
  Schedule s;
  const int N = inst.num_schools();
  s.start.assign(N, 0);
  s.end.assign(N, 0);
  for (const auto& [key, val] : j.at("start").items()) {
    const int id = std::stoi(key);
    if (id < 1 || id > N) throw std::runtime_error("report: unknown school " + key);
    s.start[id - 1] = val.get<int>();
  }
  for (const auto& [key, val] : j.at("end").items()) {
    const int id = std::stoi(key);
    if (id < 1 || id > N) throw std::runtime_error("report: unknown school " + key);
    s.end[id - 1] = val.get<int>();
  }
  for (const auto& [key, val] : j.at("am_arrival").items()) s.am_arrival[std::stoi(key)] = val.get<int>();
  for (const auto& [key, val] : j.at("pm_departure").items()) s.pm_departure[std::stoi(key)] = val.get<int>();
  s.buses = j.at("buses").get<int>();
  return s;
}

}  // namespace bellsched
