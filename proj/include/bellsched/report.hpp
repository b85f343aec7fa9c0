#pragma once

#include <string>

#include "bellsched/engine.hpp"
#include "bellsched/instance.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched {

// SolveReport as JSON. Machine fields are slot-valued and keyed by id;
// "clock" carries the wall-clock renderings.
std::string report_to_json(const Instance& inst, const engine::SolveReport& r);

// Reads the schedule part of a report written by report_to_json.
Schedule schedule_from_json(const std::string& text, const Instance& inst);

}  // namespace bellsched
