#include "bellsched/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "bellsched/rng.hpp"
#include "json.hpp"

namespace bellsched {

using ordered_json = nlohmann::ordered_json;

std::vector<int> Instance::routes_of(int school_id, Period period) const {
  std::vector<int> ids;
  for (const Route& r : routes)
    if (r.school == school_id && r.period == period) ids.push_back(r.id);
  return ids;
}

int Instance::count_routes(Period period) const {
  return static_cast<int>(std::count_if(routes.begin(), routes.end(), [&](const Route& r) {
    return r.period == period;
  }));
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  auto fail = [&](std::string s) { out.push_back(std::move(s)); };
  const TimeGrid& g = inst.grid;
  const int M = g.am_slots;

  if (g.slot_minutes <= 0) fail("grid: slot_minutes must be positive");
  if (M < 1) fail("grid: am_slots must be at least 1");
  if (inst.beta < 0) fail("beta < 0");
  if (inst.alpha < inst.beta) fail("alpha < beta");
  if (inst.lambda < 0) fail("lambda < 0");
  if (inst.mu < inst.lambda) fail("mu < lambda");
  if (inst.schools.empty()) fail("instance has no schools");

  for (std::size_t k = 0; k < inst.schools.size(); ++k) {
    const School& s = inst.schools[k];
    const std::string who = "school " + std::to_string(s.id);
    if (s.id != static_cast<int>(k) + 1)
      fail(who + ": id must equal its position " + std::to_string(k + 1));
    if (s.current_start < inst.beta + 1 || s.current_start > M)
      fail(who + ": current_start outside {beta+1..M}");
    if (s.day_length < 1) fail(who + ": day_length must be at least 1");
    if (s.allowed_starts.empty()) fail(who + ": allowed_starts is empty");
    if (!std::is_sorted(s.allowed_starts.begin(), s.allowed_starts.end()) ||
        std::adjacent_find(s.allowed_starts.begin(), s.allowed_starts.end()) !=
            s.allowed_starts.end())
      fail(who + ": allowed_starts must be strictly ascending");
    for (int m : s.allowed_starts) {
      if (m < inst.beta + 1 || m > M) {
        fail(who + ": allowed start " + std::to_string(m) + " outside {beta+1..M}");
        break;
      }
    }
  }

  const int N = inst.num_schools();
  for (std::size_t k = 0; k < inst.routes.size(); ++k) {
    const Route& r = inst.routes[k];
    const std::string who = "route " + std::to_string(r.id);
    if (r.id != static_cast<int>(k) + 1)
      fail(who + ": id must equal its position " + std::to_string(k + 1));
    if (r.school < 1 || r.school > N) fail(who + ": unknown school " + std::to_string(r.school));
    if (r.duration_slots < 1) fail(who + ": duration_slots must be at least 1");
  }

  if (g.pm_max < g.pm_min) {
    // The horizon bounds below are meaningless without an ordered window.
    fail("grid: pm_max < pm_min (P-window ordering)");
    return out;
  }
  if (!inst.schools.empty()) {
    auto [lo, hi] = std::minmax_element(
        inst.schools.begin(), inst.schools.end(),
        [](const School& a, const School& b) { return a.day_length < b.day_length; });
    if (g.pm_min > M + lo->day_length)
      fail("grid: pm_min exceeds M + min day_length (afternoon horizon bound)");
    if (g.pm_max < M + inst.lambda + hi->day_length)
      fail("grid: pm_max below M + lambda + max day_length (afternoon horizon bound)");
  }
  if (g.pm_max < g.pm_min + inst.lambda)
    fail("grid: pm_max below pm_min + lambda (afternoon horizon bound)");

  for (const School& s : inst.schools) {
    for (int m : s.allowed_starts) {
      const int end = m + s.day_length;
      if (end < g.pm_min || end > g.pm_max - inst.lambda) {
        fail("school " + std::to_string(s.id) + ": start " + std::to_string(m) +
             " gives end slot " + std::to_string(end) + " outside {pm_min..pm_max-lambda}");
        break;
      }
    }
  }
  return out;
}

void fit_pm_window(Instance& inst) {
  if (inst.schools.empty()) return;
  int pm_min = std::numeric_limits<int>::max();
  int max_len = 0;
  for (const School& s : inst.schools) {
    const int first = s.allowed_starts.empty() ? inst.beta + 1 : s.allowed_starts.front();
    pm_min = std::min(pm_min, first + s.day_length);
    max_len = std::max(max_len, s.day_length);
  }
  inst.grid.pm_min = pm_min;
  inst.grid.pm_max = std::max(inst.grid.am_slots + inst.lambda + max_len, pm_min + inst.lambda);
}

std::string clock_label(const TimeGrid& grid, int slot) {
  int minutes = grid.clock_origin + (slot - 1) * grid.slot_minutes;
  minutes = ((minutes % 1440) + 1440) % 1440;
  const int h24 = minutes / 60;
  const int mm = minutes % 60;
  int h12 = h24 % 12;
  if (h12 == 0) h12 = 12;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d:%02d %s", h12, mm, h24 < 12 ? "AM" : "PM");
  return buf;
}

Scenario parse_scenario(const std::string& name) {
  if (name == "I" || name == "1") return Scenario::I;
  if (name == "II" || name == "2") return Scenario::II;
  if (name == "III" || name == "3") return Scenario::III;
  if (name == "IV" || name == "4") return Scenario::IV;
  if (name == "custom") return Scenario::Custom;
  throw std::invalid_argument("unknown scenario '" + name + "' (expected I, II, III, IV, custom)");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::III: return "III";
    case Scenario::IV: return "IV";
    case Scenario::Custom: return "custom";
  }
  return "?";
}

GeneratorSpec scenario_defaults(Scenario s) {
  GeneratorSpec spec;
  spec.scenario = s;
  return spec;
}

namespace {

int slot_at(const GeneratorSpec& spec, int hour, int minute) {
  return (hour * 60 + minute - spec.clock_origin) / spec.slot_minutes + 1;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

Instance generate_instance(const GeneratorSpec& spec, std::uint64_t seed) {
  const bool large = spec.scenario == Scenario::IV;
  const int N = spec.num_schools.value_or(large ? 30 : 15);
  const int R = spec.num_am_routes.value_or(large ? 100 : 59);

  std::vector<std::string> problems;
  if (N < 1) problems.push_back("num_schools must be at least 1");
  if (R < N) problems.push_back("num_am_routes must be at least num_schools (one route per school)");
  if (spec.route_min_minutes < 0 || spec.route_max_minutes < spec.route_min_minutes)
    problems.push_back("route length range is empty");
  if (spec.day_length_minutes.empty()) problems.push_back("day_length_minutes is empty");
  if (spec.slot_minutes <= 0) problems.push_back("slot_minutes must be positive");
  if (spec.alpha < spec.beta || spec.beta < 0) problems.push_back("alpha < beta");
  if (spec.mu < spec.lambda || spec.lambda < 0) problems.push_back("mu < lambda");
  if (spec.earliest_start_slot < spec.beta + 1 || spec.earliest_start_slot > spec.am_slots)
    problems.push_back("earliest_start_slot outside {beta+1..am_slots}");
  if (!problems.empty()) throw InstanceError("invalid generator spec", problems);

  PortableRng rng(seed);
  Instance inst;
  inst.grid.slot_minutes = spec.slot_minutes;
  inst.grid.am_slots = spec.am_slots;
  inst.grid.clock_origin = spec.clock_origin;
  inst.alpha = spec.alpha;
  inst.beta = spec.beta;
  inst.lambda = spec.lambda;
  inst.mu = spec.mu;

  std::vector<int> pattern = spec.current_start_pattern;
  if (pattern.empty()) {
    switch (spec.scenario) {
      case Scenario::II: pattern = {slot_at(spec, 9, 20)}; break;
      case Scenario::III:
        pattern = {slot_at(spec, 8, 15), slot_at(spec, 8, 45), slot_at(spec, 9, 20)};
        break;
      default: pattern = {slot_at(spec, 8, 45)}; break;
    }
  }

  std::vector<int> allowed(spec.am_slots - spec.earliest_start_slot + 1);
  std::iota(allowed.begin(), allowed.end(), spec.earliest_start_slot);

  // Draw order is part of the reproducibility contract: day lengths, route
  // counts, AM durations, PM durations.
  for (int n = 0; n < N; ++n) {
    School s;
    s.id = n + 1;
    s.label = "School " + std::to_string(n + 1);
    const int minutes = spec.day_length_minutes[rng.index(spec.day_length_minutes.size())];
    s.day_length = ceil_div(minutes, spec.slot_minutes);
    // Scenario patterns split schools into equal contiguous blocks; an
    // explicit pattern is applied cyclically.
    if (spec.current_start_pattern.empty())
      s.current_start = pattern[static_cast<std::size_t>(n) * pattern.size() / N];
    else
      s.current_start = pattern[static_cast<std::size_t>(n) % pattern.size()];
    s.allowed_starts = allowed;
    inst.schools.push_back(std::move(s));
  }

  std::vector<int> per_school(N, 1);
  for (int k = N; k < R; ++k) ++per_school[rng.index(N)];

  auto draw_duration = [&] {
    const int raw = static_cast<int>(rng.uniform_int(spec.route_min_minutes, spec.route_max_minutes));
    return ceil_div(raw + spec.transition_minutes, spec.slot_minutes);
  };
  for (Period p : {Period::AM, Period::PM}) {
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < per_school[n]; ++k) {
        Route r;
        r.id = static_cast<int>(inst.routes.size()) + 1;
        r.school = n + 1;
        r.period = p;
        r.duration_slots = draw_duration();
        inst.routes.push_back(r);
      }
    }
  }

  fit_pm_window(inst);
  if (auto v = validate_instance(inst); !v.empty())
    throw InstanceError("generator spec produces an invalid instance", v);
  return inst;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

constexpr int kSchemaVersion = 1;

void check_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw InstanceError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return it.key() == k; });
    if (!known) throw InstanceError(where + ": unknown field '" + it.key() + "'");
  }
}

int get_int(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceError(where + ": missing field '" + key + "'");
  if (!it->is_number_integer())
    throw InstanceError(where + ": field '" + key + "' must be an integer");
  return it->get<int>();
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  ordered_json j;
  j["version"] = kSchemaVersion;
  j["grid"] = {{"slot_minutes", inst.grid.slot_minutes},
               {"am_slots", inst.grid.am_slots},
               {"pm_min", inst.grid.pm_min},
               {"pm_max", inst.grid.pm_max},
               {"clock_origin", inst.grid.clock_origin}};
  j["alpha"] = inst.alpha;
  j["beta"] = inst.beta;
  j["lambda"] = inst.lambda;
  j["mu"] = inst.mu;
  j["schools"] = ordered_json::array();
  for (const School& s : inst.schools) {
    j["schools"].push_back({{"id", s.id},
                            {"label", s.label},
                            {"current_start", s.current_start},
                            {"day_length", s.day_length},
                            {"allowed_starts", s.allowed_starts}});
  }
  j["routes"] = ordered_json::array();
  for (const Route& r : inst.routes) {
    j["routes"].push_back({{"id", r.id},
                           {"school", r.school},
                           {"period", r.period == Period::AM ? "AM" : "PM"},
                           {"duration_slots", r.duration_slots}});
  }
  return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("instance JSON parse error: ") + e.what());
  }
  check_keys(j, {"version", "grid", "alpha", "beta", "lambda", "mu", "schools", "routes"}, "instance");
  const int version = get_int(j, "version", "instance");
  if (version != kSchemaVersion)
    throw InstanceError("instance schema version " + std::to_string(version) +
                        " is not supported (expected " + std::to_string(kSchemaVersion) + ")");

  Instance inst;
  if (!j.contains("grid")) throw InstanceError("instance: missing field 'grid'");
  const auto& g = j["grid"];
  check_keys(g, {"slot_minutes", "am_slots", "pm_min", "pm_max", "clock_origin"}, "grid");
  inst.grid.slot_minutes = get_int(g, "slot_minutes", "grid");
  inst.grid.am_slots = get_int(g, "am_slots", "grid");
  inst.grid.pm_min = get_int(g, "pm_min", "grid");
  inst.grid.pm_max = get_int(g, "pm_max", "grid");
  inst.grid.clock_origin = get_int(g, "clock_origin", "grid");
  inst.alpha = get_int(j, "alpha", "instance");
  inst.beta = get_int(j, "beta", "instance");
  inst.lambda = get_int(j, "lambda", "instance");
  inst.mu = get_int(j, "mu", "instance");

  if (!j.contains("schools") || !j["schools"].is_array())
    throw InstanceError("instance: 'schools' must be an array");
  for (const auto& s : j["schools"]) {
    const std::string where = "schools[" + std::to_string(inst.schools.size()) + "]";
    check_keys(s, {"id", "label", "current_start", "day_length", "allowed_starts"}, where);
    School school;
    school.id = get_int(s, "id", where);
    if (s.contains("label")) {
      if (!s["label"].is_string()) throw InstanceError(where + ": field 'label' must be a string");
      school.label = s["label"].get<std::string>();
    }
    school.current_start = get_int(s, "current_start", where);
    school.day_length = get_int(s, "day_length", where);
    if (s.contains("allowed_starts")) {
      for (const auto& m : s["allowed_starts"]) {
        if (!m.is_number_integer())
          throw InstanceError(where + ": allowed_starts must hold integers");
        school.allowed_starts.push_back(m.get<int>());
      }
    } else {
      for (int m = inst.beta + 1; m <= inst.grid.am_slots; ++m) school.allowed_starts.push_back(m);
    }
    inst.schools.push_back(std::move(school));
  }

  if (!j.contains("routes") || !j["routes"].is_array())
    throw InstanceError("instance: 'routes' must be an array");
  for (const auto& r : j["routes"]) {
    const std::string where = "routes[" + std::to_string(inst.routes.size()) + "]";
    check_keys(r, {"id", "school", "period", "duration_slots"}, where);
    Route route;
    route.id = get_int(r, "id", where);
    route.school = get_int(r, "school", where);
    route.duration_slots = get_int(r, "duration_slots", where);
    if (!r.contains("period") || !r["period"].is_string())
      throw InstanceError(where + ": field 'period' must be \"AM\" or \"PM\"");
    const std::string p = r["period"].get<std::string>();
    if (p == "AM") route.period = Period::AM;
    else if (p == "PM") route.period = Period::PM;
    else throw InstanceError(where + ": field 'period' must be \"AM\" or \"PM\"");
    inst.routes.push_back(route);
  }

  if (auto v = validate_instance(inst); !v.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& s : v) msg += "\n  " + s;
    throw InstanceError(msg, v);
  }
  return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << instance_to_json(inst);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace bellsched
