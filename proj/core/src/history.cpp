#include "plap/history.hpp"

#include "plap/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace plap {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::eps_plus: return "eps_plus";
    case Action::eps_minus: return "eps_minus";
    case Action::refine: return "refine";
    case Action::kacanov: return "kacanov";
    case Action::descent: return "descent";
  }
  return "kacanov";
}

std::string_view history_csv_header() {
  return "iteration,ndof,ndof_accumulated,eps_minus,eps_plus,primal_energy_relaxed,"
         "dual_energy_relaxed,primal_energy_unrelaxed,dual_energy_unrelaxed,gap,"
         "eta_eps_plus_sq,eta_eps_minus_sq,eta_h_sq,action,wall_time";
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string history_csv_row(const ConvergenceRecord& r) {
  std::string s;
  s += std::to_string(r.iteration) + ',' + std::to_string(r.ndof) + ',' + std::to_string(r.ndof_accumulated);
  for (double v : {r.eps_minus, r.eps_plus, r.primal_energy_relaxed, r.dual_energy_relaxed,
                   r.primal_energy_unrelaxed, r.dual_energy_unrelaxed, r.gap, r.eta_eps_plus_sq,
                   r.eta_eps_minus_sq, r.eta_h_sq}) {
    s += ',' + format_double(v);
  }
  s += ',';
  s += to_string(r.action);
  s += ',' + format_double(r.wall_time);
  return s;
}

void write_history_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows) {
  os << history_csv_header() << '\n';
  for (const auto& r : rows) os << history_csv_row(r) << '\n';
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw Error("malformed number '" + s + "'");
  return v;
}

Action parse_action(const std::string& s) {
  for (Action a : {Action::eps_plus, Action::eps_minus, Action::refine, Action::kacanov, Action::descent}) {
    if (to_string(a) == s) return a;
  }
  throw Error("unknown action label '" + s + "'");
}

}  // namespace

std::vector<ConvergenceRecord> read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != history_csv_header()) throw Error("history.csv header mismatch");
  std::vector<ConvergenceRecord> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 15) throw Error("history.csv row has " + std::to_string(cells.size()) + " fields");
    ConvergenceRecord r;
    r.iteration = std::stoi(cells[0]);
    r.ndof = std::stoi(cells[1]);
    r.ndof_accumulated = std::stoll(cells[2]);
    double* fields[] = {&r.eps_minus, &r.eps_plus, &r.primal_energy_relaxed, &r.dual_energy_relaxed,
                        &r.primal_energy_unrelaxed, &r.dual_energy_unrelaxed, &r.gap, &r.eta_eps_plus_sq,
                        &r.eta_eps_minus_sq, &r.eta_h_sq};
    for (int k = 0; k < 10; ++k) *fields[k] = parse_double(cells[3 + k]);
    r.action = parse_action(cells[13]);
    r.wall_time = parse_double(cells[14]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace plap
