#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bellsched/instance.hpp"
#include "bellsched/schedule.hpp"

namespace bellsched {

// Tolerance for comparing real disutilities (thresholds and ranking).
inline constexpr double kDisutilityTol = 1e-9;

enum class DisutilityUnit { Slots, Minutes, Custom };

std::string to_string(DisutilityUnit u);

// Cost c(n, m) of school n starting at slot m, for every m in {beta+1..M}.
class DisutilityMatrix {
 public:
  DisutilityMatrix() = default;
  // values: one row per school, one column per slot beta+1..M.
  DisutilityMatrix(Eigen::MatrixXd values, int first_slot, DisutilityUnit unit);

  double operator()(int school_id, int slot) const {
    return values_(school_id - 1, slot - first_slot_);
  }
  const Eigen::MatrixXd& values() const { return values_; }
  int first_slot() const { return first_slot_; }
  int last_slot() const { return first_slot_ + static_cast<int>(values_.cols()) - 1; }
  int num_schools() const { return static_cast<int>(values_.rows()); }
  DisutilityUnit unit() const { return unit_; }
  // Largest difference between any two entries.
  double c_tilde() const { return c_tilde_; }
  double min_value() const { return min_; }
  double max_value() const { return max_; }

  // Distinct entries in ascending order, merged within kDisutilityTol.
  std::vector<double> distinct_values() const;

 private:
  Eigen::MatrixXd values_;
  int first_slot_ = 1;
  DisutilityUnit unit_ = DisutilityUnit::Slots;
  double c_tilde_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

// |current - m|, in slots or minutes.
DisutilityMatrix abs_deviation_matrix(const Instance& inst, DisutilityUnit unit);

// Piecewise cost on slot indices: (current - m)^1.25 for earlier starts,
// m - current for later ones, 0 when unchanged.
DisutilityMatrix scenario4_matrix(const Instance& inst);

// table is keyed by (school id, slot) and must cover every pair.
DisutilityMatrix custom_matrix(const Instance& inst, const std::map<std::pair<int, int>, double>& table);

// CSV with header "school,slot,value".
std::map<std::pair<int, int>, double> read_disutility_csv(const std::string& path);

struct EquityReport {
  std::vector<double> per_school_disutility;
  double pi_max = 0.0;
  std::vector<double> sorted_desc;
  double avg_abs_change_minutes = 0.0;
  double std_abs_change_minutes = 0.0;  // population convention
  std::map<int, int> histogram;         // 5-minute buckets keyed by lower edge
};

EquityReport evaluate(const Schedule& schedule, const DisutilityMatrix& c, const Instance& inst);

// (f_fair - f_opt) / f_opt; throws std::domain_error when f_opt <= 0.
double price_of_fairness(double f_opt, double f_fair);

std::string equity_csv(const Instance& inst, const Schedule& s, const EquityReport& r);

}  // namespace bellsched
