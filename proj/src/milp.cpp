#include "bellsched/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace bellsched::milp {

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::Base: return "base";
    case Formulation::MinimaxWeighted: return "minimax-weighted";
    case Formulation::MinimaxEps: return "minimax";
    case Formulation::LexminFull: return "lexmin-full";
    case Formulation::LexminStep: return "lexmin-step";
  }
  return "?";
}

int MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (by_name_.count(name)) throw std::logic_error("duplicate variable name '" + name + "'");
  const int k = static_cast<int>(variables_.size());
  by_name_.emplace(name, k);
  variables_.push_back({std::move(name), kind, lower, upper});
  return k;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  for (const Term& t : terms)
    if (t.var < 0 || t.var >= static_cast<int>(variables_.size()))
      throw std::logic_error("row '" + name + "' references an undeclared variable");
  constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
}

std::optional<int> MilpModel::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int MilpModel::index(const std::string& name) const {
  auto k = find(name);
  if (!k) throw std::out_of_range("model has no variable '" + name + "'");
  return *k;
}

namespace {

bool in_family(const std::string& name, const std::string& family) {
  return name.size() >= family.size() && name.compare(0, family.size(), family) == 0 &&
         (name.size() == family.size() || name[family.size()] == '[');
}

std::string idx(const std::string& base, std::initializer_list<int> ids) {
  std::string s = base + "[";
  bool first = true;
  for (int i : ids) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "]";
}

}  // namespace

int MilpModel::count_rows(const std::string& family) const {
  return static_cast<int>(std::count_if(constraints_.begin(), constraints_.end(),
                                        [&](const Constraint& c) { return in_family(c.name, family); }));
}

int MilpModel::count_vars(const std::string& family) const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [&](const Variable& v) { return in_family(v.name, family); }));
}

// ---------------------------------------------------------------------------
// Builders

namespace {

struct BaseHandles {
  int z = -1;
  std::vector<std::vector<int>> u;  // [school][m - (beta+1)]
};

BaseHandles add_base(MilpModel& model, const Instance& inst, const BaseOptions& opt) {
  if (auto v = validate_instance(inst); !v.empty())
    throw InstanceError("cannot build a model for an invalid instance", v);

  const int M = inst.grid.am_slots;
  const int first = inst.first_start_slot();
  const int pmin = inst.grid.pm_min, pmax = inst.grid.pm_max;
  const int N = inst.num_schools();
  BaseHandles h;

  std::map<int, std::vector<int>> x;  // route id -> var per slot 1..M
  std::map<int, std::vector<int>> y;  // route id -> var per slot pmin..pmax
  std::vector<std::vector<int>> v(N);

  for (const Route& r : inst.routes) {
    if (r.period != Period::AM) continue;
    auto& vars = x[r.id];
    for (int m = 1; m <= M; ++m)
      vars.push_back(model.add_variable(idx("x", {r.id, r.school, m}), VarKind::Binary, 0, 1));
  }
  h.u.resize(N);
  for (const School& s : inst.schools) {
    for (int m = first; m <= M; ++m) {
      const int end = m + s.day_length;
      const bool allowed = std::binary_search(s.allowed_starts.begin(), s.allowed_starts.end(), m) &&
                           end >= pmin && end <= pmax - inst.lambda;
      h.u[s.id - 1].push_back(
          model.add_variable(idx("u", {s.id, m}), VarKind::Binary, 0, allowed ? 1 : 0));
    }
  }
  for (const Route& r : inst.routes) {
    if (r.period != Period::PM) continue;
    auto& vars = y[r.id];
    for (int m = pmin; m <= pmax; ++m)
      vars.push_back(model.add_variable(idx("y", {r.id, r.school, m}), VarKind::Binary, 0, 1));
  }
  for (const School& s : inst.schools)
    for (int m = pmin; m <= pmax - inst.lambda; ++m)
      v[s.id - 1].push_back(model.add_variable(idx("v", {s.id, m}), VarKind::Binary, 0, 1));
  h.z = model.add_variable("z", VarKind::Integer, 0, kInf);

  // Morning.
  for (const School& s : inst.schools) {
    std::vector<Term> t;
    for (int var : h.u[s.id - 1]) t.push_back({var, 1});
    model.add_constraint(idx("start_once", {s.id}), std::move(t), Sense::Equal, 1);
  }
  for (const Route& r : inst.routes) {
    if (r.period != Period::AM) continue;
    for (int m = first; m <= M; ++m) {
      std::vector<Term> t{{h.u[r.school - 1][m - first], 1}};
      for (int a = std::max(m - inst.alpha, 1); a <= m - inst.beta; ++a) t.push_back({x[r.id][a - 1], -1});
      model.add_constraint(idx("am_window", {r.id, r.school, m}), std::move(t), Sense::LessEqual, 0);
    }
  }
  if (!x.empty()) {
    for (int m = 1; m <= M; ++m) {
      std::vector<Term> t;
      for (const Route& r : inst.routes) {
        if (r.period != Period::AM) continue;
        for (int a = m; a <= std::min(m + r.duration_slots - 1, M); ++a) t.push_back({x[r.id][a - 1], 1});
      }
      t.push_back({h.z, -1});
      model.add_constraint(idx("am_cap", {m}), std::move(t), Sense::LessEqual, 0);
    }
  }
  if (opt.require_unique_assignment) {
    for (const auto& [id, vars] : x) {
      std::vector<Term> t;
      for (int var : vars) t.push_back({var, 1});
      model.add_constraint(idx("am_once", {id}), std::move(t), Sense::Equal, 1);
    }
  }

  // Afternoon.
  for (const School& s : inst.schools) {
    std::vector<Term> t;
    for (int var : v[s.id - 1]) t.push_back({var, 1});
    model.add_constraint(idx("end_once", {s.id}), std::move(t), Sense::Equal, 1);
  }
  for (const Route& r : inst.routes) {
    if (r.period != Period::PM) continue;
    for (int m = pmin; m <= pmax - inst.lambda; ++m) {
      std::vector<Term> t{{v[r.school - 1][m - pmin], 1}};
      for (int d = m + inst.lambda; d <= std::min(m + inst.mu, pmax); ++d) t.push_back({y[r.id][d - pmin], -1});
      model.add_constraint(idx("pm_window", {r.id, r.school, m}), std::move(t), Sense::LessEqual, 0);
    }
  }
  if (!y.empty()) {
    for (int m = pmin; m <= pmax; ++m) {
      std::vector<Term> t;
      for (const Route& r : inst.routes) {
        if (r.period != Period::PM) continue;
        for (int d = std::max(m - r.duration_slots + 1, pmin); d <= m; ++d) t.push_back({y[r.id][d - pmin], 1});
      }
      t.push_back({h.z, -1});
      model.add_constraint(idx("pm_cap", {m}), std::move(t), Sense::LessEqual, 0);
    }
  }
  // Start/end linkage over every start whose end has a v variable. Starts
  // outside this range have their u variable fixed to 0 above.
  for (const School& s : inst.schools) {
    const int lo = std::max(first, pmin - s.day_length);
    const int hi = std::min(M, pmax - inst.lambda - s.day_length);
    for (int m = lo; m <= hi; ++m) {
      model.add_constraint(idx("link", {s.id, m}),
                           {{h.u[s.id - 1][m - first], 1}, {v[s.id - 1][m + s.day_length - pmin], -1}},
                           Sense::Equal, 0);
    }
  }
  if (opt.require_unique_assignment) {
    for (const auto& [id, vars] : y) {
      std::vector<Term> t;
      for (int var : vars) t.push_back({var, 1});
      model.add_constraint(idx("pm_once", {id}), std::move(t), Sense::Equal, 1);
    }
  }

  if (opt.distinct_start_limit) {
    if (*opt.distinct_start_limit < 1) throw std::invalid_argument("distinct_start_limit must be >= 1");
    std::vector<int> k;
    for (int m = first; m <= M; ++m) k.push_back(model.add_variable(idx("k", {m}), VarKind::Binary, 0, 1));
    std::vector<Term> t;
    for (int var : k) t.push_back({var, 1});
    model.add_constraint("distinct_limit", std::move(t), Sense::LessEqual, *opt.distinct_start_limit);
    for (const School& s : inst.schools)
      for (int m = first; m <= M; ++m)
        model.add_constraint(idx("start_uses_k", {s.id, m}),
                             {{h.u[s.id - 1][m - first], 1}, {k[m - first], -1}}, Sense::LessEqual, 0);
    model.metadata.params["K"] = *opt.distinct_start_limit;
  }
  return h;
}

std::vector<int> add_pi(MilpModel& model, const Instance& inst, const DisutilityMatrix& c,
                        const BaseHandles& h) {
  if (c.num_schools() != inst.num_schools() || c.first_slot() != inst.first_start_slot() ||
      c.last_slot() != inst.last_start_slot())
    throw std::invalid_argument("disutility matrix does not match the instance");
  std::vector<int> pi;
  for (const School& s : inst.schools) pi.push_back(model.add_variable(idx("pi", {s.id}), VarKind::Continuous, -kInf, kInf));
  const int first = inst.first_start_slot();
  for (const School& s : inst.schools) {
    std::vector<Term> t{{pi[s.id - 1], 1}};
    for (int m = first; m <= inst.last_start_slot(); ++m) {
      const double cost = c(s.id, m);
      if (cost != 0.0) t.push_back({h.u[s.id - 1][m - first], -cost});
    }
    model.add_constraint(idx("pi_def", {s.id}), std::move(t), Sense::Equal, 0);
  }
  return pi;
}

int add_pimax(MilpModel& model, const std::vector<int>& pi) {
  const int pimax = model.add_variable("pimax", VarKind::Continuous, -kInf, kInf);
  for (std::size_t n = 0; n < pi.size(); ++n)
    model.add_constraint(idx("pimax_ge", {static_cast<int>(n) + 1}), {{pimax, 1}, {pi[n], -1}},
                         Sense::GreaterEqual, 0);
  return pimax;
}

// Ranking rows for ranks 1..ranks: cardinality and big-M deactivation.
std::vector<int> add_ranking(MilpModel& model, const DisutilityMatrix& c, const std::vector<int>& pi,
                             int ranks) {
  const int N = static_cast<int>(pi.size());
  std::vector<int> psi;
  for (int j = 1; j <= ranks; ++j) psi.push_back(model.add_variable(idx("psi", {j}), VarKind::Continuous, -kInf, kInf));
  std::vector<std::vector<int>> h(ranks);
  for (int j = 1; j <= ranks; ++j)
    for (int n = 1; n <= N; ++n) h[j - 1].push_back(model.add_variable(idx("h", {j, n}), VarKind::Binary, 0, 1));
  for (int j = 1; j <= ranks; ++j) {
    std::vector<Term> t;
    for (int var : h[j - 1]) t.push_back({var, 1});
    model.add_constraint(idx("rank_count", {j}), std::move(t), Sense::GreaterEqual, N + 1 - j);
  }
  const double big_m = c.c_tilde();
  for (int j = 1; j <= ranks; ++j)
    for (int n = 1; n <= N; ++n)
      model.add_constraint(idx("rank_bigm", {j, n}),
                           {{pi[n - 1], 1}, {psi[j - 1], -1}, {h[j - 1][n - 1], big_m}},
                           Sense::LessEqual, big_m);
  return psi;
}

double round_sig12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

MilpModel build_base(const Instance& inst, const BaseOptions& options) {
  MilpModel model;
  model.metadata.formulation = Formulation::Base;
  const BaseHandles h = add_base(model, inst, options);
  model.set_objective({{h.z, 1}});
  return model;
}

MilpModel build_minimax_weighted(const Instance& inst, const DisutilityMatrix& c, double phi,
                                 const BaseOptions& options) {
  if (!(phi >= 0)) throw std::invalid_argument("phi must be nonnegative");
  MilpModel model;
  model.metadata.formulation = Formulation::MinimaxWeighted;
  model.metadata.params["phi"] = phi;
  const BaseHandles h = add_base(model, inst, options);
  const auto pi = add_pi(model, inst, c, h);
  const int pimax = add_pimax(model, pi);
  std::vector<Term> obj{{h.z, 1}};
  if (phi != 0.0) obj.push_back({pimax, phi});
  model.set_objective(std::move(obj));
  return model;
}

MilpModel build_minimax_eps(const Instance& inst, const DisutilityMatrix& c, int z_bar,
                            const BaseOptions& options) {
  MilpModel model;
  model.metadata.formulation = Formulation::MinimaxEps;
  model.metadata.params["z_bar"] = z_bar;
  const BaseHandles h = add_base(model, inst, options);
  const auto pi = add_pi(model, inst, c, h);
  const int pimax = add_pimax(model, pi);
  model.add_constraint("z_fix", {{h.z, 1}}, Sense::Equal, z_bar);
  model.set_objective({{pimax, 1}});
  return model;
}

MilpModel build_lexmin_full(const Instance& inst, const DisutilityMatrix& c, int z_star,
                            double pimax_star, double epsilon, const BaseOptions& options) {
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  MilpModel model;
  model.metadata.formulation = Formulation::LexminFull;
  model.metadata.params["z_star"] = z_star;
  model.metadata.params["pimax_star"] = pimax_star;
  model.metadata.params["epsilon"] = epsilon;
  const BaseHandles h = add_base(model, inst, options);
  const auto pi = add_pi(model, inst, c, h);
  const int N = inst.num_schools();
  const auto psi = add_ranking(model, c, pi, N);
  for (int j = 1; j < N; ++j)
    model.add_constraint(idx("rank_order", {j}), {{psi[j - 1], 1}, {psi[j], -1}}, Sense::GreaterEqual, 0);
  model.add_constraint("z_fix", {{h.z, 1}}, Sense::Equal, z_star);
  model.add_constraint(idx("psi_fix", {1}), {{psi[0], 1}}, Sense::Equal, pimax_star);

  std::vector<Term> obj;
  double hi = 0, lo = kInf;
  for (int j = 1; j <= N; ++j) {
    const double w = std::pow(epsilon, j);
    obj.push_back({psi[j - 1], w});
    hi = std::max(hi, w);
    lo = std::min(lo, w);
  }
  model.set_objective(std::move(obj));
  // Reported at the 12 significant digits used for export, which also
  // removes the last-ulp noise of pow().
  model.metadata.objective_coefficient_ratio = round_sig12(hi / lo);
  model.metadata.numerically_hazardous = model.metadata.objective_coefficient_ratio > 1e8;
  return model;
}

MilpModel build_lexmin_step(const Instance& inst, const DisutilityMatrix& c, int z_star,
                            double pimax_star, int j_star, const std::vector<double>& fixed_psi,
                            const BaseOptions& options) {
  const int N = inst.num_schools();
  if (j_star < 2 || j_star > N) throw std::invalid_argument("j_star must lie in [2, N]");
  if (static_cast<int>(fixed_psi.size()) != j_star - 2)
    throw std::invalid_argument("fixed_psi must hold psi*_2..psi*_{j*-1}");
  double prev = pimax_star;
  for (std::size_t k = 0; k < fixed_psi.size(); ++k) {
    if (fixed_psi[k] > prev + kDisutilityTol)
      throw std::invalid_argument("fixed_psi is not nonincreasing (psi_" + std::to_string(k + 2) + ")");
    prev = fixed_psi[k];
  }
  MilpModel model;
  model.metadata.formulation = Formulation::LexminStep;
  model.metadata.params["z_star"] = z_star;
  model.metadata.params["pimax_star"] = pimax_star;
  model.metadata.params["j_star"] = j_star;
  model.metadata.fixed_psi = fixed_psi;
  const BaseHandles h = add_base(model, inst, options);
  const auto pi = add_pi(model, inst, c, h);
  const auto psi = add_ranking(model, c, pi, j_star);
  model.add_constraint("z_fix", {{h.z, 1}}, Sense::Equal, z_star);
  model.add_constraint(idx("psi_fix", {1}), {{psi[0], 1}}, Sense::Equal, pimax_star);
  for (int j = 2; j < j_star; ++j)
    model.add_constraint(idx("psi_fix", {j}), {{psi[j - 1], 1}}, Sense::Equal, fixed_psi[j - 2]);
  model.set_objective({{psi[j_star - 1], 1}});
  return model;
}

// ---------------------------------------------------------------------------
// MPS

namespace {

std::string num(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

char sense_code(Sense s) {
  switch (s) {
    case Sense::LessEqual: return 'L';
    case Sense::Equal: return 'E';
    case Sense::GreaterEqual: return 'G';
  }
  return 'N';
}

}  // namespace

std::string to_mps(const MilpModel& model) {
  std::ostringstream out;
  out << "NAME " << model.name << "\n";
  out << "ROWS\n";
  out << " N obj\n";
  for (const Constraint& c : model.constraints()) out << ' ' << sense_code(c.sense) << ' ' << c.name << "\n";

  const auto& vars = model.variables();
  std::vector<std::vector<std::pair<int, double>>> column(vars.size());  // (row, coef); row -1 = obj
  for (const Term& t : model.objective())
    if (t.coef != 0.0) column[t.var].push_back({-1, t.coef});
  for (std::size_t r = 0; r < model.constraints().size(); ++r)
    for (const Term& t : model.constraints()[r].terms)
      if (t.coef != 0.0) column[t.var].push_back({static_cast<int>(r), t.coef});

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const bool is_int = vars[k].kind != VarKind::Continuous;
    if (is_int != in_int) {
      out << " MARKER" << marker++ << " 'MARKER' " << (is_int ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = is_int;
    }
    if (column[k].empty()) out << ' ' << vars[k].name << " obj 0\n";
    for (const auto& [row, coef] : column[k])
      out << ' ' << vars[k].name << ' ' << (row < 0 ? std::string("obj") : model.constraints()[row].name) << ' '
          << num(coef) << "\n";
  }
  if (in_int) out << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (const Constraint& c : model.constraints())
    if (c.rhs != 0.0) out << " RHS " << c.name << ' ' << num(c.rhs) << "\n";

  out << "BOUNDS\n";
  for (const Variable& v : vars) {
    const std::string& n = v.name;
    if (v.kind == VarKind::Binary && v.lower == 0 && v.upper == 1) {
      out << " BV BND " << n << "\n";
      continue;
    }
    if (v.lower == v.upper) {
      out << " FX BND " << n << ' ' << num(v.lower) << "\n";
      continue;
    }
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << " FR BND " << n << "\n";
      continue;
    }
    if (std::isinf(v.lower)) out << " MI BND " << n << "\n";
    else if (v.lower != 0.0 || v.kind != VarKind::Continuous) out << " LO BND " << n << ' ' << num(v.lower) << "\n";
    if (!std::isinf(v.upper)) out << " UP BND " << n << ' ' << num(v.upper) << "\n";
    else if (v.kind != VarKind::Continuous) out << " PL BND " << n << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

void export_mps(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_mps(model);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// Solutions

MilpSolution parse_solution(const std::string& text) {
  MilpSolution sol;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string name;
    if (!(ss >> name)) continue;
    double value = 0;
    if (!(ss >> value))
      throw std::runtime_error("solution line " + std::to_string(lineno) + ": expected 'name value'");
    if (name == "=obj=") sol.objective = value;
    else sol.values[name] = value;
  }
  if (!sol.values.empty()) sol.status = SolutionStatus::Feasible;
  return sol;
}

MilpSolution read_solution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution(buf.str());
}

std::string format_solution(const MilpModel& model, const MilpSolution& sol) {
  std::ostringstream out;
  out << "# " << to_string(model.metadata.formulation) << " model solution\n";
  if (sol.objective) out << "=obj= " << num(*sol.objective) << "\n";
  for (const Variable& v : model.variables()) {
    auto it = sol.values.find(v.name);
    if (it != sol.values.end()) out << v.name << ' ' << num(it->second) << "\n";
  }
  return out.str();
}

namespace {

std::vector<double> resolved_values(const MilpModel& model, const MilpSolution& sol,
                                    std::vector<std::string>* violations) {
  std::vector<double> x;
  x.reserve(model.variables().size());
  for (const Variable& v : model.variables()) {
    auto it = sol.values.find(v.name);
    if (it == sol.values.end())
      throw std::invalid_argument("solution has no value for variable '" + v.name + "'");
    double val = it->second;
    if (v.kind != VarKind::Continuous) {
      const double r = std::round(val);
      if (std::abs(val - r) > kIntegralityTol && violations) violations->push_back("integrality " + v.name);
      val = r;
    }
    if (violations && (val < v.lower - kFeasibilityTol || val > v.upper + kFeasibilityTol))
      violations->push_back("bound " + v.name);
    x.push_back(val);
  }
  return x;
}

double dot(const std::vector<Term>& terms, const std::vector<double>& x) {
  double s = 0;
  for (const Term& t : terms) s += t.coef * x[t.var];
  return s;
}

}  // namespace

double objective_value(const MilpModel& model, const MilpSolution& sol) {
  return dot(model.objective(), resolved_values(model, sol, nullptr));
}

std::vector<std::string> validate_solution(const MilpModel& model, const MilpSolution& sol) {
  std::vector<std::string> out;
  const auto x = resolved_values(model, sol, &out);
  for (const Constraint& c : model.constraints()) {
    const double a = dot(c.terms, x);
    bool ok = true;
    switch (c.sense) {
      case Sense::LessEqual: ok = a <= c.rhs + kFeasibilityTol; break;
      case Sense::GreaterEqual: ok = a >= c.rhs - kFeasibilityTol; break;
      case Sense::Equal: ok = std::abs(a - c.rhs) <= kFeasibilityTol; break;
    }
    if (!ok) out.push_back(c.name);
  }
  if (sol.objective) {
    const double obj = dot(model.objective(), x);
    if (std::abs(obj - *sol.objective) > kFeasibilityTol)
      out.push_back("objective (stated " + num(*sol.objective) + ", recomputed " + num(obj) + ")");
  }
  return out;
}

MilpSolution solution_from_schedule(const MilpModel& model, const Instance& inst, const Schedule& s,
                                    const DisutilityMatrix* c) {
  MilpSolution sol;
  for (const Variable& v : model.variables()) sol.values[v.name] = 0.0;
  auto set = [&](const std::string& name, double value) {
    auto it = sol.values.find(name);
    if (it != sol.values.end()) it->second = value;
  };

  for (const Route& r : inst.routes) {
    if (r.period == Period::AM) set(idx("x", {r.id, r.school, s.am_arrival.at(r.id)}), 1);
    else set(idx("y", {r.id, r.school, s.pm_departure.at(r.id)}), 1);
  }
  for (const School& school : inst.schools) {
    set(idx("u", {school.id, s.start[school.id - 1]}), 1);
    set(idx("v", {school.id, s.end[school.id - 1]}), 1);
    set(idx("k", {s.start[school.id - 1]}), 1);
  }

  const auto& params = model.metadata.params;
  double z = s.buses;
  if (auto it = params.find("z_bar"); it != params.end()) z = it->second;
  if (auto it = params.find("z_star"); it != params.end()) z = it->second;
  set("z", z);

  if (model.metadata.formulation != Formulation::Base) {
    if (!c) throw std::invalid_argument("solution_from_schedule: formulation needs a disutility matrix");
    const EquityReport eq = evaluate(s, *c, inst);
    for (const School& school : inst.schools) set(idx("pi", {school.id}), eq.per_school_disutility[school.id - 1]);
    set("pimax", eq.pi_max);
    for (std::size_t j = 0; j < eq.sorted_desc.size(); ++j) {
      const int rank = static_cast<int>(j) + 1;
      if (!model.find(idx("psi", {rank}))) continue;
      set(idx("psi", {rank}), eq.sorted_desc[j]);
      for (const School& school : inst.schools)
        set(idx("h", {rank, school.id}),
            eq.per_school_disutility[school.id - 1] <= eq.sorted_desc[j] + kDisutilityTol ? 1 : 0);
    }
  }
  sol.objective = objective_value(model, sol);
  sol.status = SolutionStatus::Feasible;
  return sol;
}

}  // namespace bellsched::milp
