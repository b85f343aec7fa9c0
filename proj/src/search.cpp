#include "search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bellsched/fleet.hpp"

namespace bellsched::engine::detail {

Deadline Deadline::after(const SearchLimits& limits) {
  Deadline d;
  if (limits.time_limit_seconds)
    d.at = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(*limits.time_limit_seconds));
  return d;
}

SearchLimits Deadline::remaining() const {
  SearchLimits l;
  if (at) l.time_limit_seconds = std::max(0.0, std::chrono::duration<double>(*at - Clock::now()).count());
  return l;
}

std::vector<std::vector<int>> allowed_domains(const Instance& inst) {
  std::vector<std::vector<int>> d;
  for (const School& s : inst.schools) d.push_back(s.allowed_starts);
  return d;
}

namespace {

struct RouteRef {
  int id = 0;
  int len = 0;
};

// Index geometry of one half-day: AM slots 1..M map to 0..M-1, PM slots
// pm_min..pm_max map to 0..P-1. Coverage is clipped to the horizon.
struct Half {
  bool am = true;
  int size = 0;
  int pmin = 0;
  int pmax = 0;

  std::pair<int, int> cover(int len, int t) const {
    if (am) return {std::max(t - len + 1, 1) - 1, t - 1};
    return {t - pmin, std::min(t + len - 1, pmax) - pmin};
  }
  // Slots covered for every time in [w1, w2]; first > second when empty.
  std::pair<int, int> compulsory(int len, int w1, int w2) const {
    return {cover(len, w2).first, cover(len, w1).second};
  }
};

struct Item {
  int route = 0;  // route id
  int school = 0;
  int len = 0;
  int w1 = 0, w2 = 0;
  int ca = 0, cb = -1;  // compulsory part
  int sym_prev = -1;    // previous interchangeable item
};

struct Problem {
  const Instance& inst;
  Half am, pm;
  std::vector<int> delta;
  std::vector<std::vector<RouteRef>> am_routes, pm_routes;  // per school, longest first

  explicit Problem(const Instance& i) : inst(i) {
    am = {true, i.grid.am_slots, 0, 0};
    pm = {false, std::max(i.grid.pm_max - i.grid.pm_min + 1, 0), i.grid.pm_min, i.grid.pm_max};
    const int N = i.num_schools();
    delta.resize(N);
    am_routes.resize(N);
    pm_routes.resize(N);
    for (const School& s : i.schools) delta[s.id - 1] = s.day_length;
    for (const Route& r : i.routes)
      (r.period == Period::AM ? am_routes : pm_routes)[r.school - 1].push_back({r.id, r.duration_slots});
    auto by_len = [](const RouteRef& a, const RouteRef& b) {
      return a.len != b.len ? a.len > b.len : a.id < b.id;
    };
    for (auto& v : am_routes) std::sort(v.begin(), v.end(), by_len);
    for (auto& v : pm_routes) std::sort(v.begin(), v.end(), by_len);
  }

  SlotRange am_window(int start) const { return am_arrival_window(inst, start); }
  SlotRange pm_window(int n, int start) const { return pm_departure_window(inst, start + delta[n]); }
  bool start_usable(int n, int start) const {
    return !am_window(start).empty() && !pm_window(n, start).empty();
  }

  void append_items(std::vector<Item>& out, int n, int start, bool am_half) const {
    const Half& h = am_half ? am : pm;
    const SlotRange w = am_half ? am_window(start) : pm_window(n, start);
    const auto& routes = am_half ? am_routes[n] : pm_routes[n];
    for (const RouteRef& r : routes) {
      Item it;
      it.route = r.id;
      it.school = n;
      it.len = r.len;
      it.w1 = w.first;
      it.w2 = w.last;
      std::tie(it.ca, it.cb) = h.compulsory(r.len, w.first, w.last);
      out.push_back(it);
    }
  }
};

void link_symmetry(std::vector<Item>& items) {
  for (std::size_t k = 0; k < items.size(); ++k) {
    items[k].sym_prev = -1;
    if (k > 0 && items[k - 1].school == items[k].school && items[k - 1].len == items[k].len &&
        items[k - 1].w1 == items[k].w1 && items[k - 1].w2 == items[k].w2)
      items[k].sym_prev = static_cast<int>(k) - 1;
  }
}

// Timetabling placement of a batch of routes onto a profile under a cap.
class Placer {
 public:
  Placer(const Half& half, std::int64_t& nodes, const Deadline& deadline, bool& timed_out)
      : half_(half), nodes_(nodes), deadline_(deadline), timed_out_(timed_out) {}

  // On success `prof` holds the full coverage and `times` the chosen times.
  bool place(const std::vector<Item>& items, std::vector<int>& prof, int cap, std::vector<int>& times) {
    items_ = &items;
    prof_ = &prof;
    cap_ = cap;
    times_ = &times;
    bool ok = true;
    for (const Item& it : items)
      for (int k = it.ca; k <= it.cb; ++k)
        if (++prof[k] > cap) ok = false;
    if (ok && rec(0)) return true;
    for (const Item& it : items)
      for (int k = it.ca; k <= it.cb; ++k) --prof[k];
    return false;
  }

 private:
  bool rec(std::size_t k) {
    const auto& items = *items_;
    if (k == items.size()) return true;
    const Item& it = items[k];
    int lo = it.w1;
    if (it.sym_prev >= 0) lo = std::max(lo, (*times_)[items[it.sym_prev].route]);
    auto& prof = *prof_;
    for (int t = lo; t <= it.w2; ++t) {
      if ((++nodes_ & 1023) == 0 && deadline_.passed()) timed_out_ = true;
      if (timed_out_) return false;
      const auto [a, b] = half_.cover(it.len, t);
      // Only the part outside the compulsory slots is new.
      const int ca = it.ca <= it.cb ? it.ca : b + 1;
      const int cb = it.ca <= it.cb ? it.cb : b;
      bool ok = true;
      for (int s = a; s < ca; ++s) ok &= ++prof[s] <= cap_;
      for (int s = cb + 1; s <= b; ++s) ok &= ++prof[s] <= cap_;
      if (ok) {
        (*times_)[it.route] = t;
        if (rec(k + 1)) return true;
      }
      for (int s = a; s < ca; ++s) --prof[s];
      for (int s = cb + 1; s <= b; ++s) --prof[s];
      if (timed_out_) return false;
    }
    return false;
  }

  const Half& half_;
  std::int64_t& nodes_;
  const Deadline& deadline_;
  bool& timed_out_;
  const std::vector<Item>* items_ = nullptr;
  std::vector<int>* prof_ = nullptr;
  int cap_ = 0;
  std::vector<int>* times_ = nullptr;
};

// Per (school, start) compulsory load as sparse (slot index, count) lists.
struct CompLoad {
  bool usable = false;
  std::vector<std::pair<int, int>> am, pm;
};

std::vector<std::pair<int, int>> sparse_load(const std::vector<Item>& items, int size) {
  std::vector<int> dense(size, 0);
  for (const Item& it : items)
    for (int k = it.ca; k <= it.cb; ++k) ++dense[k];
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < size; ++k)
    if (dense[k]) out.push_back({k, dense[k]});
  return out;
}

class Search {
 public:
  Search(const Instance& inst, const SearchConfig& cfg) : p_(inst), cfg_(cfg), inst_(inst) {
    const int N = inst.num_schools();
    order_.resize(N);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<int> volume(N, 0);
    for (const Route& r : inst.routes) volume[r.school - 1] += r.duration_slots;
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return volume[a] > volume[b]; });

    const int first = inst.first_start_slot();
    loads_.assign(N, std::vector<CompLoad>(inst.start_slot_count()));
    candidates_.resize(N);
    std::vector<Item> tmp;
    for (int n = 0; n < N; ++n) {
      for (int s : cfg.domains[n]) {
        if (s < first || s > inst.last_start_slot() || !p_.start_usable(n, s)) continue;
        CompLoad& L = loads_[n][s - first];
        L.usable = true;
        tmp.clear();
        p_.append_items(tmp, n, s, true);
        L.am = sparse_load(tmp, p_.am.size);
        tmp.clear();
        p_.append_items(tmp, n, s, false);
        L.pm = sparse_load(tmp, p_.pm.size);
        candidates_[n].push_back(s);
      }
      order_candidates(n);
    }

    const int K = static_cast<int>(cfg.caps.size());
    forced_suffix_.assign(N + 1, std::vector<int>(K, 0));
    min_rest_.assign(N + 1, 0.0);
    for (int d = N - 1; d >= 0; --d) {
      const int n = order_[d];
      forced_suffix_[d] = forced_suffix_[d + 1];
      for (int k = 0; k < K; ++k) {
        const bool all_above = !candidates_[n].empty() &&
                               std::all_of(candidates_[n].begin(), candidates_[n].end(), [&](int s) {
                                 return cost(n, s) > cfg.caps[k].threshold + kDisutilityTol;
                               });
        forced_suffix_[d][k] += all_above ? 1 : 0;
      }
      double lo = 0;
      if (cfg.c && !candidates_[n].empty()) {
        lo = std::numeric_limits<double>::infinity();
        for (int s : candidates_[n]) lo = std::min(lo, cost(n, s));
      }
      min_rest_[d] = min_rest_[d + 1] + lo;
    }

    am_prof_.assign(p_.am.size, 0);
    pm_prof_.assign(p_.pm.size, 0);
    am_comp_ = am_prof_;
    pm_comp_ = pm_prof_;
    am_time_.assign(inst.routes.size() + 1, 0);
    pm_time_ = am_time_;
    start_.assign(N, 0);
    used_.assign(inst.last_start_slot() + 1, 0);
    cap_count_.assign(K, 0);
    snaps_.resize(N);
    items_.resize(N);
  }

  SearchOutcome run() {
    SearchOutcome out;
    for (int n = 0; n < inst_.num_schools(); ++n)
      if (candidates_[n].empty()) {
        out.kind = SearchOutcome::Kind::Exhausted;
        return out;
      }
    dfs(0);
    out.nodes = nodes_;
    out.best = best_;
    out.best_sum = best_sum_;
    if (timed_out_) out.kind = SearchOutcome::Kind::TimeLimit;
    else if (cfg_.mode == Mode::Feasibility) out.kind = best_ ? SearchOutcome::Kind::Found : SearchOutcome::Kind::Exhausted;
    else out.kind = best_ ? SearchOutcome::Kind::Found : SearchOutcome::Kind::Exhausted;
    return out;
  }

 private:
  struct Snapshot {
    std::vector<int> am_prof, pm_prof, am_time, pm_time;
  };

  double cost(int n, int s) const { return cfg_.c ? (*cfg_.c)(n + 1, s) : 0.0; }

  void order_candidates(int n) {
    auto& cand = candidates_[n];
    if (cfg_.mode == Mode::MinSum && cfg_.c) {
      std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return cost(n, a) < cost(n, b) - kDisutilityTol; });
    }
    if (cfg_.hint && static_cast<int>(cfg_.hint->size()) > n) {
      auto it = std::find(cand.begin(), cand.end(), (*cfg_.hint)[n]);
      if (it != cand.end()) std::rotate(cand.begin(), it, it + 1);
    }
  }

  const CompLoad& load(int n, int s) const { return loads_[n][s - inst_.first_start_slot()]; }

  bool comp_fits(int n, int s) const {
    const CompLoad& L = load(n, s);
    for (auto [k, c] : L.am)
      if (am_comp_[k] + c > cfg_.cap) return false;
    for (auto [k, c] : L.pm)
      if (pm_comp_[k] + c > cfg_.cap) return false;
    return true;
  }

  void apply_comp(int n, int s, int sign) {
    const CompLoad& L = load(n, s);
    for (auto [k, c] : L.am) am_comp_[k] += sign * c;
    for (auto [k, c] : L.pm) pm_comp_[k] += sign * c;
  }

  bool start_admissible(int n, int s, double pi) const {
    if (cfg_.distinct_start_limit && used_[s] == 0 && distinct_ >= *cfg_.distinct_start_limit) return false;
    for (std::size_t k = 0; k < cfg_.caps.size(); ++k)
      if (cap_count_[k] + (pi > cfg_.caps[k].threshold + kDisutilityTol ? 1 : 0) > cfg_.caps[k].max_schools)
        return false;
    return comp_fits(n, s);
  }

  bool forward_ok(int d) const {
    for (std::size_t k = 0; k < cfg_.caps.size(); ++k)
      if (cap_count_[k] + forced_suffix_[d][k] > cfg_.caps[k].max_schools) return false;
    for (int e = d; e < static_cast<int>(order_.size()); ++e) {
      const int n = order_[e];
      bool any = false;
      for (int s : candidates_[n])
        if (start_admissible(n, s, cost(n, s))) {
          any = true;
          break;
        }
      if (!any) return false;
    }
    return true;
  }

  // Place the routes of school n (just fixed) in one half-day, rebuilding
  // the whole half-day when a plain extension does not fit.
  bool place_half(int d, bool am_half) {
    const Half& h = am_half ? p_.am : p_.pm;
    auto& prof = am_half ? am_prof_ : pm_prof_;
    auto& times = am_half ? am_time_ : pm_time_;
    Placer placer(h, nodes_, cfg_.deadline, timed_out_);
    auto& items = items_[d];
    const int n = order_[d];

    items.clear();
    p_.append_items(items, n, start_[n], am_half);
    if (items.empty()) return true;
    link_symmetry(items);
    if (*std::max_element(prof.begin(), prof.end()) <= cfg_.cap && placer.place(items, prof, cfg_.cap, times))
      return true;
    if (timed_out_) return false;

    items.clear();
    for (int e = 0; e <= d; ++e) p_.append_items(items, order_[e], start_[order_[e]], am_half);
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      if (a.len != b.len) return a.len > b.len;
      if (a.school != b.school) return a.school < b.school;
      return a.route < b.route;
    });
    link_symmetry(items);
    std::fill(prof.begin(), prof.end(), 0);
    return placer.place(items, prof, cfg_.cap, times);
  }

  void record_leaf() {
    Schedule s;
    const int N = inst_.num_schools();
    s.start = start_;
    s.end.resize(N);
    for (int n = 0; n < N; ++n) s.end[n] = start_[n] + p_.delta[n];
    for (const Route& r : inst_.routes) {
      if (r.period == Period::AM) s.am_arrival[r.id] = am_time_[r.id];
      else s.pm_departure[r.id] = pm_time_[r.id];
    }
    s.buses = min_buses(inst_, s);
    if (cfg_.mode == Mode::Feasibility) {
      best_ = std::move(s);
      stop_ = true;
    } else if (!best_ || sum_ < best_sum_ - kDisutilityTol) {
      best_ = std::move(s);
      best_sum_ = sum_;
    }
  }

  void dfs(int d) {
    if (d == static_cast<int>(order_.size())) {
      record_leaf();
      return;
    }
    const int n = order_[d];
    for (int s : candidates_[n]) {
      if ((++nodes_ & 255) == 0 && cfg_.deadline.passed()) timed_out_ = true;
      if (timed_out_) {
        stop_ = true;
        return;
      }
      const double pi = cost(n, s);
      if (cfg_.mode == Mode::MinSum && best_ && sum_ + pi + min_rest_[d + 1] >= best_sum_ - kDisutilityTol) {
        if (cfg_.c) break;  // candidates are sorted by cost
        continue;
      }
      if (!start_admissible(n, s, pi)) continue;

      apply_comp(n, s, +1);
      start_[n] = s;
      if (used_[s]++ == 0) ++distinct_;
      for (std::size_t k = 0; k < cfg_.caps.size(); ++k)
        if (pi > cfg_.caps[k].threshold + kDisutilityTol) ++cap_count_[k];
      sum_ += pi;

      if (forward_ok(d + 1)) {
        Snapshot& snap = snaps_[d];
        snap.am_prof = am_prof_;
        snap.pm_prof = pm_prof_;
        snap.am_time = am_time_;
        snap.pm_time = pm_time_;
        if (place_half(d, true) && place_half(d, false)) dfs(d + 1);
        am_prof_ = snap.am_prof;
        pm_prof_ = snap.pm_prof;
        am_time_ = snap.am_time;
        pm_time_ = snap.pm_time;
      }

      sum_ -= pi;
      for (std::size_t k = 0; k < cfg_.caps.size(); ++k)
        if (pi > cfg_.caps[k].threshold + kDisutilityTol) --cap_count_[k];
      if (--used_[s] == 0) --distinct_;
      apply_comp(n, s, -1);
      if (stop_ || timed_out_) {
        stop_ = true;
        return;
      }
    }
  }

  Problem p_;
  const SearchConfig& cfg_;
  const Instance& inst_;
  std::vector<int> order_;
  std::vector<std::vector<CompLoad>> loads_;
  std::vector<std::vector<int>> candidates_;
  std::vector<std::vector<int>> forced_suffix_;
  std::vector<double> min_rest_;

  std::vector<int> am_prof_, pm_prof_, am_comp_, pm_comp_;
  std::vector<int> am_time_, pm_time_;
  std::vector<int> start_;
  std::vector<int> used_;
  int distinct_ = 0;
  std::vector<int> cap_count_;
  double sum_ = 0.0;
  std::vector<Snapshot> snaps_;
  std::vector<std::vector<Item>> items_;

  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
  bool stop_ = false;
  std::optional<Schedule> best_;
  double best_sum_ = std::numeric_limits<double>::infinity();
};

}  // namespace

SearchOutcome run_search(const Instance& inst, const SearchConfig& config) {
  Search search(inst, config);
  return search.run();
}

int lower_bound(const Instance& inst, const std::vector<std::vector<int>>& domains) {
  const Problem p(inst);
  int bound = 0;
  for (Period period : {Period::AM, Period::PM}) {
    long volume = 0;
    int longest = 0;
    for (const Route& r : inst.routes) {
      if (r.period != period) continue;
      volume += r.duration_slots;
      longest = std::max(longest, r.duration_slots);
    }
    if (volume == 0) continue;
    // Unclipped operating intervals of this half-day span at most `span` slots.
    const long span = period == Period::AM ? inst.grid.am_slots - inst.beta + longest - 1
                                           : inst.grid.pm_max - inst.grid.pm_min + longest;
    bound = std::max<int>(bound, static_cast<int>((volume + span - 1) / span));
  }
  // Routes of one school whose length is at least its window size all cover
  // the window's first slot.
  for (int n = 0; n < inst.num_schools(); ++n) {
    int best_am = std::numeric_limits<int>::max(), best_pm = best_am;
    for (int s : domains[n]) {
      if (!p.start_usable(n, s)) continue;
      const int wa = p.am_window(s).size(), wp = p.pm_window(n, s).size();
      int ca = 0, cp = 0;
      for (const auto& r : p.am_routes[n]) ca += r.len >= wa;
      for (const auto& r : p.pm_routes[n]) cp += r.len >= wp;
      best_am = std::min(best_am, ca);
      best_pm = std::min(best_pm, cp);
    }
    if (best_am != std::numeric_limits<int>::max()) bound = std::max({bound, best_am, best_pm});
  }
  if (!inst.routes.empty()) bound = std::max(bound, 1);
  return bound;
}

std::optional<Schedule> greedy(const Instance& inst, const std::vector<std::vector<int>>& domains,
                               std::optional<int> distinct_start_limit) {
  const Problem p(inst);
  const int N = inst.num_schools();
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> volume(N, 0);
  for (const Route& r : inst.routes) volume[r.school - 1] += r.duration_slots;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return volume[a] > volume[b]; });

  std::vector<int> am(p.am.size, 0), pm(p.pm.size, 0);
  std::vector<int> am_time(inst.routes.size() + 1, 0), pm_time(am_time);
  std::vector<int> start(N, 0);
  std::vector<int> used;

  // Each route takes the time whose coverage has the lowest current peak.
  auto place_greedy = [](const Half& h, const std::vector<Item>& items, std::vector<int>& prof,
                         std::vector<int>& times) {
    for (const Item& it : items) {
      int best_t = it.w1, best_peak = std::numeric_limits<int>::max();
      for (int t = it.w1; t <= it.w2; ++t) {
        const auto [a, b] = h.cover(it.len, t);
        int peak = 0;
        for (int k = a; k <= b; ++k) peak = std::max(peak, prof[k] + 1);
        if (peak < best_peak) {
          best_peak = peak;
          best_t = t;
        }
      }
      const auto [a, b] = h.cover(it.len, best_t);
      for (int k = a; k <= b; ++k) ++prof[k];
      times[it.route] = best_t;
    }
  };

  for (int n : order) {
    int best_s = -1, best_peak = std::numeric_limits<int>::max();
    std::vector<int> best_am, best_pm, best_at, best_pt;
    for (int s : domains[n]) {
      if (!p.start_usable(n, s)) continue;
      const bool fresh = std::find(used.begin(), used.end(), s) == used.end();
      if (distinct_start_limit && fresh && static_cast<int>(used.size()) >= *distinct_start_limit) continue;
      std::vector<int> a = am, b = pm, at = am_time, pt = pm_time;
      std::vector<Item> items;
      p.append_items(items, n, s, true);
      place_greedy(p.am, items, a, at);
      items.clear();
      p.append_items(items, n, s, false);
      place_greedy(p.pm, items, b, pt);
      const int peak = std::max(a.empty() ? 0 : *std::max_element(a.begin(), a.end()),
                                b.empty() ? 0 : *std::max_element(b.begin(), b.end()));
      if (peak < best_peak) {
        best_peak = peak;
        best_s = s;
        best_am = std::move(a);
        best_pm = std::move(b);
        best_at = std::move(at);
        best_pt = std::move(pt);
      }
    }
    if (best_s < 0) return std::nullopt;
    start[n] = best_s;
    if (std::find(used.begin(), used.end(), best_s) == used.end()) used.push_back(best_s);
    am = std::move(best_am);
    pm = std::move(best_pm);
    am_time = std::move(best_at);
    pm_time = std::move(best_pt);
  }

  Schedule s;
  s.start = start;
  s.end.resize(N);
  for (int n = 0; n < N; ++n) s.end[n] = start[n] + p.delta[n];
  for (const Route& r : inst.routes) {
    if (r.period == Period::AM) s.am_arrival[r.id] = am_time[r.id];
    else s.pm_departure[r.id] = pm_time[r.id];
  }
  s.buses = min_buses(inst, s);
  return s;
}

}  // namespace bellsched::engine::detail
