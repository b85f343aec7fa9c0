#include "bellsched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "bellsched/fleet.hpp"
#include "search.hpp"

namespace bellsched::engine {

using detail::Deadline;
using detail::Mode;
using detail::SearchConfig;
using detail::SearchOutcome;

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Buses: return "buses";
    case ObjectiveKind::PiMax: return "pi_max";
    case ObjectiveKind::Weighted: return "weighted";
    case ObjectiveKind::PsiVector: return "psi";
    case ObjectiveKind::Sum: return "sum";
  }
  return "?";
}

namespace {

using Clock = detail::Clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> disutilities(const Schedule& s, const DisutilityMatrix& c) {
  std::vector<double> pi(s.start.size());
  for (std::size_t n = 0; n < s.start.size(); ++n) pi[n] = c(static_cast<int>(n) + 1, s.start[n]);
  return pi;
}

double pi_max_of(const Schedule& s, const DisutilityMatrix& c) {
  const auto pi = disutilities(s, c);
  return pi.empty() ? 0.0 : *std::max_element(pi.begin(), pi.end());
}

std::vector<double> sorted_desc(const Schedule& s, const DisutilityMatrix& c) {
  auto pi = disutilities(s, c);
  std::sort(pi.begin(), pi.end(), std::greater<>());
  return pi;
}

// Empty domain -> message naming the school.
std::optional<std::string> empty_domain(const Instance& inst, const std::vector<std::vector<int>>& domains) {
  for (int n = 0; n < inst.num_schools(); ++n)
    if (domains[n].empty())
      return "school " + std::to_string(inst.schools[n].id) + " (" + inst.schools[n].label +
             ") has no admissible start";
  return std::nullopt;
}

std::vector<std::vector<int>> threshold_domains(const Instance& inst, const DisutilityMatrix& c,
                                                const std::vector<std::vector<int>>& base, double pi) {
  std::vector<std::vector<int>> d(base.size());
  for (int n = 0; n < inst.num_schools(); ++n)
    for (int s : base[n])
      if (c(n + 1, s) <= pi + kDisutilityTol) d[n].push_back(s);
  return d;
}

// Smallest pi_max any schedule can have: every school pays at least its
// cheapest admissible start.
double pi_floor(const Instance& inst, const DisutilityMatrix& c, const std::vector<std::vector<int>>& domains) {
  double f = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < inst.num_schools(); ++n) {
    double lo = std::numeric_limits<double>::infinity();
    for (int s : domains[n]) lo = std::min(lo, c(n + 1, s));
    f = std::max(f, lo);
  }
  return inst.num_schools() ? f : 0.0;
}

SolveReport infeasible(std::string msg) {
  SolveReport r;
  r.status = SolveStatus::Infeasible;
  r.message = std::move(msg);
  return r;
}

void finish(SolveReport& r, bool proven, const DisutilityMatrix* c, const Instance& inst,
            Clock::time_point t0) {
  r.stats.elapsed_seconds = seconds_since(t0);
  if (!r.schedule) {
    if (r.status != SolveStatus::Infeasible) r.status = SolveStatus::TimeLimit;
    r.optimal = false;
    return;
  }
  r.optimal = proven;
  r.status = proven ? SolveStatus::Optimal : SolveStatus::TimeLimit;
  if (c) r.equity = evaluate(*r.schedule, *c, inst);
}

// Minimum buses over the given domains; the shared core of solve_base and
// solve_fair_tau.
SolveReport minimize_buses(const Instance& inst, const std::vector<std::vector<int>>& domains,
                           std::optional<int> distinct_limit, const Deadline& deadline) {
  const auto t0 = Clock::now();
  if (auto msg = empty_domain(inst, domains)) return infeasible(*msg);

  SolveReport r;
  r.objective.kind = ObjectiveKind::Buses;
  int lb = detail::lower_bound(inst, domains);
  std::optional<Schedule> best = detail::greedy(inst, domains, distinct_limit);
  bool proven = false;

  SearchConfig cfg;
  cfg.domains = domains;
  cfg.distinct_start_limit = distinct_limit;
  cfg.deadline = deadline;
  if (!best) {
    // No greedy incumbent (distinct-start limit): look for any schedule.
    cfg.cap = static_cast<int>(inst.routes.size());
    const SearchOutcome o = detail::run_search(inst, cfg);
    r.stats.nodes += o.nodes;
    ++r.stats.feasibility_calls;
    if (o.kind == SearchOutcome::Kind::Exhausted)
      return infeasible("no schedule satisfies the distinct-start limit");
    if (o.kind == SearchOutcome::Kind::TimeLimit) {
      r.stats.lower_bound = lb;
      r.message = "time limit reached before any schedule was found";
      finish(r, false, nullptr, inst, t0);
      return r;
    }
    best = o.best;
  }

  while (true) {
    if (best->buses <= lb) {
      proven = true;
      break;
    }
    cfg.cap = best->buses - 1;
    cfg.hint = &best->start;
    const SearchOutcome o = detail::run_search(inst, cfg);
    r.stats.nodes += o.nodes;
    ++r.stats.feasibility_calls;
    if (o.kind == SearchOutcome::Kind::Found) {
      best = o.best;
    } else if (o.kind == SearchOutcome::Kind::Exhausted) {
      lb = best->buses;
    } else {
      r.message = "time limit reached; bus count not proven optimal";
      break;
    }
  }
  r.stats.lower_bound = lb;
  r.schedule = best;
  r.objective.value = best->buses;
  r.stats.z_bar = best->buses;
  finish(r, proven, nullptr, inst, t0);
  return r;
}

FeasibilityResult feasible_impl(const Instance& inst, int z_bar, const std::vector<std::vector<int>>& domains,
                                const std::vector<CountingCap>& caps, const DisutilityMatrix* c,
                                const Deadline& deadline, const std::vector<int>* hint,
                                std::optional<int> distinct_limit) {
  FeasibilityResult res;
  if (!caps.empty() && !c) throw std::invalid_argument("counting caps need a disutility matrix");
  SearchConfig cfg;
  cfg.cap = z_bar;
  cfg.domains = domains;
  cfg.caps = caps;
  cfg.c = c;
  cfg.hint = hint;
  cfg.distinct_start_limit = distinct_limit;
  cfg.deadline = deadline;
  const SearchOutcome o = detail::run_search(inst, cfg);
  res.nodes = o.nodes;
  switch (o.kind) {
    case SearchOutcome::Kind::Found:
      res.kind = FeasibilityResult::Kind::Feasible;
      res.schedule = o.best;
      break;
    case SearchOutcome::Kind::Exhausted: res.kind = FeasibilityResult::Kind::Infeasible; break;
    case SearchOutcome::Kind::TimeLimit: res.kind = FeasibilityResult::Kind::TimeLimit; break;
  }
  return res;
}

// Binary search for the smallest value v in `values` (ascending) such that
// probe(v) yields a schedule; `known` is a schedule feasible at values.back().
// `measure` maps a witness to the value it actually attains, letting the
// search jump below the probed threshold.
struct ThresholdResult {
  Schedule best;
  bool proven = true;
};

ThresholdResult threshold_search(const std::vector<double>& values, Schedule known,
                                 const std::function<FeasibilityResult(double, const Schedule&)>& probe,
                                 const std::function<double(const Schedule&)>& measure, SolveStats& stats) {
  ThresholdResult out{std::move(known), true};
  auto index_of = [&](double v) {
    // Last index with values[i] <= v + tol.
    auto it = std::upper_bound(values.begin(), values.end(), v + kDisutilityTol);
    return static_cast<int>(it - values.begin()) - 1;
  };
  int lo = 0, hi = std::max(index_of(measure(out.best)), 0);
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    const FeasibilityResult f = probe(values[mid], out.best);
    stats.nodes += f.nodes;
    ++stats.feasibility_calls;
    if (f.kind == FeasibilityResult::Kind::Feasible) {
      out.best = *f.schedule;
      hi = std::min(mid, std::max(index_of(measure(out.best)), 0));
    } else if (f.kind == FeasibilityResult::Kind::Infeasible) {
      lo = mid + 1;
    } else {
      out.proven = false;
      break;
    }
  }
  return out;
}

std::vector<double> values_between(const DisutilityMatrix& c, double lo, double hi) {
  std::vector<double> v;
  for (double x : c.distinct_values())
    if (x >= lo - kDisutilityTol && x <= hi + kDisutilityTol) v.push_back(x);
  return v;
}

SolveReport minimax_impl(const Instance& inst, const DisutilityMatrix& c, int z_bar, const Deadline& deadline) {
  const auto t0 = Clock::now();
  const auto allowed = detail::allowed_domains(inst);
  if (auto msg = empty_domain(inst, allowed)) return infeasible(*msg);

  SolveReport r;
  r.objective.kind = ObjectiveKind::PiMax;
  r.stats.z_bar = z_bar;
  // The greedy schedule answers the opening feasibility question whenever it fits the cap.
  const auto greedy = detail::greedy(inst, allowed, {});
  FeasibilityResult top;
  if (greedy && greedy->buses <= z_bar) {
    top.kind = FeasibilityResult::Kind::Feasible;
    top.schedule = greedy;
  } else {
    top = feasible_impl(inst, z_bar, allowed, {}, nullptr, deadline, greedy ? &greedy->start : nullptr, {});
    r.stats.nodes += top.nodes;
    ++r.stats.feasibility_calls;
  }
  if (top.kind == FeasibilityResult::Kind::Infeasible)
    return infeasible("no schedule with at most " + std::to_string(z_bar) + " buses");
  if (top.kind == FeasibilityResult::Kind::TimeLimit) {
    r.message = "time limit reached before any schedule was found";
    finish(r, false, &c, inst, t0);
    return r;
  }

  const double floor = pi_floor(inst, c, allowed);
  const auto values = values_between(c, floor, pi_max_of(*top.schedule, c));
  auto probe = [&](double v, const Schedule& hint) {
    return feasible_impl(inst, z_bar, threshold_domains(inst, c, allowed, v), {}, nullptr, deadline,
                         &hint.start, {});
  };
  auto measure = [&](const Schedule& s) { return pi_max_of(s, c); };
  ThresholdResult t = threshold_search(values, *top.schedule, probe, measure, r.stats);
  r.schedule = t.best;
  r.objective.value = pi_max_of(t.best, c);
  if (!t.proven) r.message = "time limit reached; pi_max not proven optimal";
  finish(r, t.proven, &c, inst, t0);
  return r;
}

}  // namespace

int bus_lower_bound(const Instance& inst) { return detail::lower_bound(inst, detail::allowed_domains(inst)); }

Schedule greedy_schedule(const Instance& inst, std::optional<int> distinct_start_limit) {
  auto s = detail::greedy(inst, detail::allowed_domains(inst), distinct_start_limit);
  if (!s) throw std::runtime_error("greedy heuristic found no schedule");
  return *s;
}

SolveReport solve_base(const Instance& inst, const BaseOptions& options) {
  return minimize_buses(inst, detail::allowed_domains(inst), options.distinct_start_limit,
                        Deadline::after(options.limits));
}

FeasibilityResult feasible_with(const Instance& inst, int z_bar, const std::vector<std::vector<int>>& domains,
                                const std::vector<CountingCap>& caps, const DisutilityMatrix* c,
                                const SearchLimits& limits, const std::vector<int>* hint,
                                std::optional<int> distinct_start_limit) {
  if (static_cast<int>(domains.size()) != inst.num_schools())
    throw std::invalid_argument("feasible_with: one domain per school required");
  return feasible_impl(inst, z_bar, domains, caps, c, Deadline::after(limits), hint, distinct_start_limit);
}

SolveReport solve_minimax(const Instance& inst, const DisutilityMatrix& c, int z_bar, const SearchLimits& limits) {
  return minimax_impl(inst, c, z_bar, Deadline::after(limits));
}

SolveReport solve_minimax_weighted(const Instance& inst, const DisutilityMatrix& c, double phi,
                                   const SearchLimits& limits) {
  if (phi < 0) throw std::invalid_argument("phi must be nonnegative");
  const auto t0 = Clock::now();
  const Deadline deadline = Deadline::after(limits);
  SolveReport base = minimize_buses(inst, detail::allowed_domains(inst), {}, deadline);
  if (base.status == SolveStatus::Infeasible) return base;

  SolveReport r;
  r.objective.kind = ObjectiveKind::Weighted;
  r.stats = base.stats;
  if (!base.schedule) {
    r.message = base.message;
    finish(r, false, &c, inst, t0);
    return r;
  }
  bool proven = base.optimal;
  const double floor = pi_floor(inst, c, detail::allowed_domains(inst));
  const int z_star = base.schedule->buses;
  const int z_limit = std::max(z_star, static_cast<int>(inst.routes.size()));

  double best_value = std::numeric_limits<double>::infinity();
  for (int zb = z_star; zb <= z_limit; ++zb) {
    // Any larger cap costs at least zb and pi_max is never below the floor.
    if (zb + phi * floor >= best_value - kDisutilityTol) break;
    SolveReport m = minimax_impl(inst, c, zb, deadline);
    r.stats.nodes += m.stats.nodes;
    r.stats.feasibility_calls += m.stats.feasibility_calls;
    if (!m.schedule) {
      proven = false;
      break;
    }
    proven = proven && m.optimal;
    const double value = m.schedule->buses + phi * m.objective.value;
    if (value < best_value - kDisutilityTol) {
      best_value = value;
      r.schedule = m.schedule;
      r.stats.z_bar = zb;
    }
    if (m.objective.value <= floor + kDisutilityTol || !m.optimal) break;
  }
  r.objective.value = best_value;
  if (!proven) r.message = "time limit reached; weighted objective not proven optimal";
  finish(r, proven, &c, inst, t0);
  return r;
}

SolveReport solve_lexmin(const Instance& inst, const DisutilityMatrix& c, int z_bar,
                         const SearchLimits& per_step_limits) {
  const auto t0 = Clock::now();
  SolveReport first = solve_minimax(inst, c, z_bar, per_step_limits);
  if (!first.schedule) {
    if (first.status == SolveStatus::TimeLimit) first.stats.timed_out_step = 1;
    first.objective.kind = ObjectiveKind::PsiVector;
    return first;
  }

  SolveReport r;
  r.objective.kind = ObjectiveKind::PsiVector;
  r.stats = first.stats;
  r.stats.z_bar = z_bar;
  bool proven = first.optimal;
  if (!first.optimal) r.stats.timed_out_step = 1;

  const int N = inst.num_schools();
  const double psi1 = first.objective.value;
  const auto domains = threshold_domains(inst, c, detail::allowed_domains(inst), psi1);
  Schedule incumbent = *first.schedule;
  std::vector<double> psi = sorted_desc(incumbent, c);

  // The j-th largest per-school minimum bounds psi_j from below.
  std::vector<double> minima(N);
  for (int n = 0; n < N; ++n) {
    double lo = std::numeric_limits<double>::infinity();
    for (int s : domains[n]) lo = std::min(lo, c(n + 1, s));
    minima[n] = lo;
  }
  std::sort(minima.begin(), minima.end(), std::greater<>());

  for (int j = 2; j <= N; ++j) {
    if (psi[j - 1] <= minima[j - 1] + kDisutilityTol) continue;
    const Deadline deadline = Deadline::after(per_step_limits);
    std::vector<CountingCap> caps;
    for (int k = 2; k < j; ++k) caps.push_back({psi[k - 1], k - 1});
    const auto values = values_between(c, minima[j - 1], psi[j - 1]);
    auto probe = [&](double v, const Schedule& hint) {
      auto step_caps = caps;
      step_caps.push_back({v, j - 1});
      return feasible_impl(inst, z_bar, domains, step_caps, &c, deadline, &hint.start, {});
    };
    auto measure = [&](const Schedule& s) { return sorted_desc(s, c)[j - 1]; };
    ThresholdResult t = threshold_search(values, incumbent, probe, measure, r.stats);
    if (!t.proven) {
      proven = false;
      if (r.stats.timed_out_step == 0) r.stats.timed_out_step = j;
    }
    incumbent = t.best;
    psi = sorted_desc(incumbent, c);
  }

  r.schedule = incumbent;
  r.objective.psi = sorted_desc(incumbent, c);
  r.objective.value = r.objective.psi.empty() ? 0.0 : r.objective.psi.front();
  if (!proven)
    r.message = "time limit reached at lexmin step " + std::to_string(r.stats.timed_out_step) +
                "; vector not proven optimal";
  finish(r, proven, &c, inst, t0);
  return r;
}

SolveReport solve_minsum(const Instance& inst, const DisutilityMatrix& c, int z_bar, const SearchLimits& limits) {
  const auto t0 = Clock::now();
  const auto allowed = detail::allowed_domains(inst);
  if (auto msg = empty_domain(inst, allowed)) return infeasible(*msg);
  SearchConfig cfg;
  cfg.cap = z_bar;
  cfg.domains = allowed;
  cfg.c = &c;
  cfg.mode = Mode::MinSum;
  cfg.deadline = Deadline::after(limits);
  const SearchOutcome o = detail::run_search(inst, cfg);

  SolveReport r;
  r.objective.kind = ObjectiveKind::Sum;
  r.stats.z_bar = z_bar;
  r.stats.nodes = o.nodes;
  r.stats.feasibility_calls = 1;
  if (!o.best) {
    if (o.kind == SearchOutcome::Kind::Exhausted)
      return infeasible("no schedule with at most " + std::to_string(z_bar) + " buses");
    r.message = "time limit reached before any schedule was found";
    finish(r, false, &c, inst, t0);
    return r;
  }
  r.schedule = o.best;
  const auto pi = disutilities(*o.best, c);
  r.objective.value = 0.0;
  for (double p : pi) r.objective.value += p;
  const bool proven = o.kind != SearchOutcome::Kind::TimeLimit;
  if (!proven) r.message = "time limit reached; total disutility not proven optimal";
  finish(r, proven, &c, inst, t0);
  return r;
}

SolveReport solve_fair_tau(const Instance& inst, double tau_minutes, const BaseOptions& options) {
  if (tau_minutes < 0) throw std::invalid_argument("tau must be nonnegative");
  std::vector<std::vector<int>> domains(inst.num_schools());
  for (int n = 0; n < inst.num_schools(); ++n) {
    const School& s = inst.schools[n];
    for (int m : s.allowed_starts)
      if (std::abs(m - s.current_start) * inst.grid.slot_minutes <= tau_minutes + kDisutilityTol)
        domains[n].push_back(m);
  }
  return minimize_buses(inst, domains, options.distinct_start_limit, Deadline::after(options.limits));
}

}  // namespace bellsched::engine
