// Exhaustive enumeration over start vectors and route times. Deliberately
// shares nothing with the search code: occupancy is counted on the
// unclipped timeline straight from the window definitions.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "bellsched/engine.hpp"

namespace bellsched::engine {

namespace {

struct Job {
  int len = 0;
  int lo = 0, hi = -1;  // time window
};

// Peak number of simultaneously operating routes, minimized over every
// combination of route times. AM routes run [t-r+1, t]; PM routes [t, t+r-1].
int min_peak(const std::vector<Job>& jobs, bool am) {
  if (jobs.empty()) return 0;
  for (const Job& j : jobs)
    if (j.hi < j.lo) return std::numeric_limits<int>::max();
  std::vector<int> t(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) t[k] = jobs[k].lo;
  int best = std::numeric_limits<int>::max();
  while (true) {
    std::map<int, int> count;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const int first = am ? t[k] - jobs[k].len + 1 : t[k];
      for (int s = first; s < first + jobs[k].len; ++s) ++count[s];
    }
    int peak = 0;
    for (const auto& [slot, c] : count) peak = std::max(peak, c);
    best = std::min(best, peak);
    std::size_t k = 0;
    while (k < jobs.size() && ++t[k] > jobs[k].hi) {
      t[k] = jobs[k].lo;
      ++k;
    }
    if (k == jobs.size()) break;
  }
  return best;
}

int buses_for(const Instance& inst, const std::vector<int>& starts) {
  std::vector<Job> am, pm;
  for (const Route& r : inst.routes) {
    const School& s = inst.school(r.school);
    const int start = starts[r.school - 1];
    if (r.period == Period::AM) {
      am.push_back({r.duration_slots, std::max(start - inst.alpha, 1), start - inst.beta});
    } else {
      const int end = start + s.day_length;
      pm.push_back({r.duration_slots, end + inst.lambda, std::min(end + inst.mu, inst.grid.pm_max)});
    }
  }
  const int a = min_peak(am, true), p = min_peak(pm, false);
  return std::max(a, p);
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k] - kDisutilityTol) return true;
    if (a[k] > b[k] + kDisutilityTol) return false;
  }
  return false;
}

}  // namespace

double oracle_space_size(const Instance& inst) {
  double size = 1.0;
  for (const School& s : inst.schools) size *= static_cast<double>(s.allowed_starts.size());
  for (const Route& r : inst.routes) {
    const School& s = inst.school(r.school);
    int widest = 1;
    for (int m : s.allowed_starts) {
      const int w = r.period == Period::AM
                        ? (m - inst.beta) - std::max(m - inst.alpha, 1) + 1
                        : std::min(m + s.day_length + inst.mu, inst.grid.pm_max) - (m + s.day_length + inst.lambda) + 1;
      widest = std::max(widest, w);
    }
    size *= widest;
  }
  return size;
}

OracleResult brute_force_oracle(const Instance& inst, const DisutilityMatrix* c, OracleObjective obj, int z_bar,
                                const std::vector<std::vector<int>>* domains,
                                std::optional<int> distinct_start_limit) {
  const double size = oracle_space_size(inst);
  if (size > kOracleSpaceLimit)
    throw std::length_error("oracle search space " + std::to_string(static_cast<long long>(size)) +
                            " exceeds limit");
  if (obj != OracleObjective::Buses && !c) throw std::invalid_argument("oracle objective needs a matrix");

  const int N = inst.num_schools();
  std::vector<std::vector<int>> dom(N);
  for (int n = 0; n < N; ++n) dom[n] = domains ? (*domains)[n] : inst.schools[n].allowed_starts;

  OracleResult best;
  std::vector<int> starts(N);
  std::function<void(int)> rec = [&](int n) {
    if (n == N) {
      if (distinct_start_limit) {
        auto u = starts;
        std::sort(u.begin(), u.end());
        if (std::unique(u.begin(), u.end()) - u.begin() > *distinct_start_limit) return;
      }
      const int z = buses_for(inst, starts);
      if (z == std::numeric_limits<int>::max()) return;
      OracleResult cand;
      cand.feasible = true;
      cand.starts = starts;
      if (obj == OracleObjective::Buses) {
        cand.value = z;
      } else {
        if (z > z_bar) return;
        std::vector<double> pi(N);
        for (int k = 0; k < N; ++k) pi[k] = (*c)(k + 1, starts[k]);
        std::sort(pi.begin(), pi.end(), std::greater<>());
        cand.psi = pi;
        if (obj == OracleObjective::PiMax) cand.value = pi.empty() ? 0.0 : pi.front();
        if (obj == OracleObjective::Lexmin) cand.value = pi.empty() ? 0.0 : pi.front();
        if (obj == OracleObjective::Sum)
          for (double p : pi) cand.value += p;
      }
      bool better = !best.feasible;
      if (!better) {
        if (obj == OracleObjective::Lexmin) better = lex_less(cand.psi, best.psi);
        else better = cand.value < best.value - kDisutilityTol;
      }
      if (better) best = std::move(cand);
      return;
    }
    for (int s : dom[n]) {
      starts[n] = s;
      rec(n + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace bellsched::engine
