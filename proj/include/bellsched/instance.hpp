#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellsched {

// Discretized planning horizon. Morning slots are 1..am_slots; afternoon
// departure slots are pm_min..pm_max. Slot m covers wall-clock
// [clock_origin + (m-1)*slot_minutes, clock_origin + m*slot_minutes).
struct TimeGrid {
  int slot_minutes = 5;
  int am_slots = 18;
  int pm_min = 0;
  int pm_max = 0;
  int clock_origin = 7 * 60 + 55;  // minutes after midnight for slot 1

  bool operator==(const TimeGrid&) const = default;
};

struct School {
  int id = 0;  // 1-based, equal to position + 1
  std::string label;
  int current_start = 0;
  int day_length = 0;  // slots between start and end
  std::vector<int> allowed_starts;  // ascending, subset of {beta+1..M}

  bool operator==(const School&) const = default;
};

enum class Period { AM, PM };

struct Route {
  int id = 0;      // 1-based, equal to position + 1
  int school = 0;  // school id
  Period period = Period::AM;
  int duration_slots = 1;  // transition time already folded in

  bool operator==(const Route&) const = default;
};

struct Instance {
  TimeGrid grid;
  int alpha = 0;  // earliest arrival, slots before start
  int beta = 0;   // latest arrival, slots before start
  int lambda = 0; // earliest departure, slots after end
  int mu = 0;     // latest departure, slots after end
  std::vector<School> schools;
  std::vector<Route> routes;

  bool operator==(const Instance&) const = default;

  int num_schools() const { return static_cast<int>(schools.size()); }
  int first_start_slot() const { return beta + 1; }
  int last_start_slot() const { return grid.am_slots; }
  // Size of the start-slot index set {beta+1..M}.
  int start_slot_count() const { return grid.am_slots - beta; }

  const School& school(int id) const { return schools.at(id - 1); }
  const Route& route(int id) const { return routes.at(id - 1); }

  std::vector<int> routes_of(int school_id, Period period) const;
  int count_routes(Period period) const;
};

// Raised by load_instance and the generator when input cannot form a valid
// instance. violations() lists every offending invariant.
class InstanceError : public std::runtime_error {
 public:
  explicit InstanceError(const std::string& what,
                         std::vector<std::string> violations = {})
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Every violated invariant with the offending entity; empty iff valid.
std::vector<std::string> validate_instance(const Instance& inst);

// Sets pm_min/pm_max to the tightest window that gives every allowed start
// an end slot and satisfies the afternoon horizon bounds.
void fit_pm_window(Instance& inst);

// Wall-clock rendering of a slot, e.g. "8:45 AM".
std::string clock_label(const TimeGrid& grid, int slot);

enum class Scenario { I, II, III, IV, Custom };

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario s);

// Randomized instance recipe. Defaults follow the district-sized recipe;
// any field may be overridden.
struct GeneratorSpec {
  Scenario scenario = Scenario::I;
  std::optional<int> num_schools;     // default 15 (IV: 30)
  std::optional<int> num_am_routes;   // default 59 (IV: 100); PM count equal
  int route_min_minutes = 10;
  int route_max_minutes = 50;
  int transition_minutes = 15;
  std::vector<int> day_length_minutes = {390, 405, 450};
  int slot_minutes = 5;
  int clock_origin = 7 * 60 + 55;
  int am_slots = 18;            // 9:20 AM
  int earliest_start_slot = 5;  // 8:15 AM
  int alpha = 4;
  int beta = 2;
  int lambda = 1;
  int mu = 4;
  // Current start per school; empty means the scenario default. Scenario
  // Custom without this list behaves like Scenario I.
  std::vector<int> current_start_pattern;
};

GeneratorSpec scenario_defaults(Scenario s);

// Deterministic for a given (spec, seed) on every platform.
Instance generate_instance(const GeneratorSpec& spec, std::uint64_t seed);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

}  // namespace bellsched
