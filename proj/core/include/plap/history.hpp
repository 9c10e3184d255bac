#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace plap {

/// What the iteration does after a history row was recorded.
enum class Action { eps_plus, eps_minus, refine, kacanov, descent };

/// Stable CSV label: "eps_plus", "eps_minus", "refine", "kacanov", "descent".
std::string_view to_string(Action a);

/// One row of an iteration history. Quantities a driver does not compute
/// are NaN.
struct ConvergenceRecord {
  int iteration = 0;
  int ndof = 0;
  long long ndof_accumulated = 0;
  double eps_minus = 0.0;
  double eps_plus = 0.0;
  double primal_energy_relaxed = 0.0;
  double dual_energy_relaxed = 0.0;
  double primal_energy_unrelaxed = 0.0;
  double dual_energy_unrelaxed = 0.0;
  double gap = 0.0;
  double eta_eps_plus_sq = 0.0;
  double eta_eps_minus_sq = 0.0;
  double eta_h_sq = 0.0;
  Action action = Action::kacanov;
  double wall_time = 0.0;
};

using RecordObserver = std::function<void(const ConvergenceRecord&)>;

/// Header row of history.csv, in column order.
std::string_view history_csv_header();

/// 17 significant digits (exact round trip for doubles), '.' as
/// decimal separator regardless of locale; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

void write_history_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows);
std::string history_csv_row(const ConvergenceRecord& r);

/// Parses a file written by write_history_csv. Throws plap::Error on a
/// header mismatch or malformed row.
std::vector<ConvergenceRecord> read_history_csv(std::istream& is);

}  // namespace plap
