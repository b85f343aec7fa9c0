#include "bellsched/equity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace bellsched {

std::string to_string(DisutilityUnit u) {
  switch (u) {
    case DisutilityUnit::Slots: return "slots";
    case DisutilityUnit::Minutes: return "minutes";
    case DisutilityUnit::Custom: return "custom";
  }
  return "?";
}

DisutilityMatrix::DisutilityMatrix(Eigen::MatrixXd values, int first_slot, DisutilityUnit unit)
    : values_(std::move(values)), first_slot_(first_slot), unit_(unit) {
  if (values_.size() > 0) {
    min_ = values_.minCoeff();
    max_ = values_.maxCoeff();
  }
  c_tilde_ = max_ - min_;
}

std::vector<double> DisutilityMatrix::distinct_values() const {
  std::vector<double> v(values_.data(), values_.data() + values_.size());
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x > out.back() + kDisutilityTol) out.push_back(x);
  return out;
}

namespace {

DisutilityMatrix build(const Instance& inst, DisutilityUnit unit,
                       const std::function<double(int n, int m)>& cost) {
  const int first = inst.first_start_slot();
  Eigen::MatrixXd v(inst.num_schools(), inst.start_slot_count());
  for (int n = 1; n <= inst.num_schools(); ++n)
    for (int m = first; m <= inst.last_start_slot(); ++m) v(n - 1, m - first) = cost(n, m);
  return DisutilityMatrix(std::move(v), first, unit);
}

}  // namespace

DisutilityMatrix abs_deviation_matrix(const Instance& inst, DisutilityUnit unit) {
  if (unit == DisutilityUnit::Custom)
    throw std::invalid_argument("abs_deviation_matrix: unit must be slots or minutes");
  const double scale = unit == DisutilityUnit::Minutes ? inst.grid.slot_minutes : 1.0;
  return build(inst, unit, [&](int n, int m) {
    return scale * std::abs(inst.school(n).current_start - m);
  });
}

DisutilityMatrix scenario4_matrix(const Instance& inst) {
  return build(inst, DisutilityUnit::Slots, [&](int n, int m) {
    const int cur = inst.school(n).current_start;
    if (m < cur) return std::pow(static_cast<double>(cur - m), 1.25);
    if (m > cur) return static_cast<double>(m - cur);
    return 0.0;
  });
}

DisutilityMatrix custom_matrix(const Instance& inst,
                               const std::map<std::pair<int, int>, double>& table) {
  return build(inst, DisutilityUnit::Custom, [&](int n, int m) {
    auto it = table.find({n, m});
    if (it == table.end())
      throw std::invalid_argument("custom disutility table missing (" + std::to_string(n) + ", " +
                                  std::to_string(m) + ")");
    return it->second;
  });
}

std::map<std::pair<int, int>, double> read_disutility_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open disutility table '" + path + "'");
  std::map<std::pair<int, int>, double> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("school", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int n = 0, m = 0;
    double v = 0;
    if (!(ss >> n >> m >> v))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected school,slot,value");
    table[{n, m}] = v;
  }
  return table;
}

EquityReport evaluate(const Schedule& schedule, const DisutilityMatrix& c, const Instance& inst) {
  const int N = inst.num_schools();
  if (static_cast<int>(schedule.start.size()) != N || c.num_schools() != N)
    throw std::invalid_argument("evaluate: schedule, matrix and instance disagree on school count");

  EquityReport r;
  r.per_school_disutility.resize(N);
  std::vector<double> change(N);
  for (int n = 0; n < N; ++n) {
    const int m = schedule.start[n];
    if (m < c.first_slot() || m > c.last_slot())
      throw std::invalid_argument("evaluate: school " + std::to_string(n + 1) + " start " +
                                  std::to_string(m) + " outside the matrix domain");
    r.per_school_disutility[n] = c(n + 1, m);
    change[n] = std::abs(m - inst.schools[n].current_start) * inst.grid.slot_minutes;
    ++r.histogram[static_cast<int>(change[n]) / 5 * 5];
  }
  r.pi_max = *std::max_element(r.per_school_disutility.begin(), r.per_school_disutility.end());
  r.sorted_desc = r.per_school_disutility;
  std::sort(r.sorted_desc.begin(), r.sorted_desc.end(), std::greater<>());

  double sum = 0;
  for (double x : change) sum += x;
  r.avg_abs_change_minutes = sum / N;
  double ss = 0;
  for (double x : change) ss += (x - r.avg_abs_change_minutes) * (x - r.avg_abs_change_minutes);
  r.std_abs_change_minutes = std::sqrt(ss / N);
  return r;
}

double price_of_fairness(double f_opt, double f_fair) {
  if (!(f_opt > 0)) throw std::domain_error("price_of_fairness: f(OPT) must be positive");
  return (f_fair - f_opt) / f_opt;
}

std::string equity_csv(const Instance& inst, const Schedule& s, const EquityReport& r) {
  std::ostringstream out;
  out << "school_id,label,current_start,new_start,change_minutes,disutility\n";
  out.precision(12);
  for (const School& school : inst.schools) {
    const int n = school.id - 1;
    out << school.id << ',' << school.label << ',' << school.current_start << ',' << s.start[n]
        << ',' << std::abs(s.start[n] - school.current_start) * inst.grid.slot_minutes << ','
        << r.per_school_disutility[n] << '\n';
  }
  return out.str();
}

}  // namespace bellsched
