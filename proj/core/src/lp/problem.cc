#include "vidmesh/lp/problem.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <stdexcept>

namespace vidmesh::lp {

VariableIndex Problem::AddVariable(double lb, double ub, double objective,
                                   std::string name) {
  if (lb > ub) throw std::invalid_argument("variable lb > ub");
  col_lb_.push_back(lb);
  col_ub_.push_back(ub);
  objective_.push_back(objective);
  if (name.empty()) name = "x" + std::to_string(col_lb_.size() - 1);
  col_names_.push_back(std::move(name));
  return num_variables() - 1;
}

ConstraintIndex Problem::AddConstraint(double lb, double ub, std::string name) {
  if (lb > ub) throw std::invalid_argument("constraint lb > ub");
  row_lb_.push_back(lb);
  row_ub_.push_back(ub);
  if (name.empty()) name = "r" + std::to_string(row_lb_.size() - 1);
  row_names_.push_back(std::move(name));
  return num_constraints() - 1;
}

void Problem::AddCoefficient(ConstraintIndex row, VariableIndex col,
                             double value) {
  if (row < 0 || row >= num_constraints() || col < 0 ||
      col >= num_variables()) {
    throw std::out_of_range("coefficient index out of range");
  }
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite coefficient");
  if (value != 0.0) elements_.push_back({row, col, value});
}

std::vector<double> Problem::RowActivity(std::span<const double> x) const {
  std::vector<double> act(num_constraints(), 0.0);
  for (const auto& el : elements_) act[el.row] += el.value * x[el.col];
  return act;
}

double Problem::ObjectiveValue(std::span<const double> x) const {
  double obj = 0.0;
  for (int j = 0; j < num_variables(); ++j) obj += objective_[j] * x[j];
  return obj;
}

double Problem::MaxViolation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max({worst, col_lb_[j] - x[j], x[j] - col_ub_[j]});
  }
  const std::vector<double> act = RowActivity(x);
  for (int i = 0; i < num_constraints(); ++i) {
    worst = std::max({worst, row_lb_[i] - act[i], act[i] - row_ub_[i]});
  }
  return worst;
}

namespace {

void WriteTerm(std::ostream& out, double coef, const std::string& name,
               bool first) {
  if (coef < 0) {
    out << (first ? "- " : " - ");
  } else if (!first) {
    out << " + ";
  }
  out << std::abs(coef) << ' ' << name;
}

}  // namespace

void Problem::WriteLp(std::ostream& out) const {
  out << std::setprecision(17);
  out << (sense_ == Sense::kMaximize ? "Maximize\n" : "Minimize\n");
  out << " obj: ";
  bool first = true;
  for (int j = 0; j < num_variables(); ++j) {
    if (objective_[j] == 0.0) continue;
    WriteTerm(out, objective_[j], col_names_[j], first);
    first = false;
  }
  if (first) out << "0 " << (num_variables() ? col_names_[0] : "x0");
  out << "\nSubject To\n";

  std::vector<std::map<int, double>> rows(num_constraints());
  for (const auto& el : elements_) rows[el.row][el.col] += el.value;
  auto write_body = [&](int i) {
    bool f = true;
    for (const auto& [col, val] : rows[i]) {
      WriteTerm(out, val, col_names_[col], f);
      f = false;
    }
    if (f) out << "0 " << (num_variables() ? col_names_[0] : "x0");
  };
  for (int i = 0; i < num_constraints(); ++i) {
    const double lb = row_lb_[i];
    const double ub = row_ub_[i];
    if (lb == ub) {
      out << ' ' << row_names_[i] << ": ";
      write_body(i);
      out << " = " << ub << '\n';
      continue;
    }
    if (std::isfinite(ub)) {
      out << ' ' << row_names_[i] << (std::isfinite(lb) ? "_ub" : "") << ": ";
      write_body(i);
      out << " <= " << ub << '\n';
    }
    if (std::isfinite(lb)) {
      out << ' ' << row_names_[i] << (std::isfinite(ub) ? "_lb" : "") << ": ";
      write_body(i);
      out << " >= " << lb << '\n';
    }
  }
  out << "Bounds\n";
  for (int j = 0; j < num_variables(); ++j) {
    const double lb = col_lb_[j];
    const double ub = col_ub_[j];
    if (!std::isfinite(lb) && !std::isfinite(ub)) {
      out << ' ' << col_names_[j] << " free\n";
    } else if (lb == 0.0 && !std::isfinite(ub)) {
      continue;  // LP default
    } else {
      out << ' ';
      if (std::isfinite(lb)) out << lb; else out << "-inf";
      out << " <= " << col_names_[j] << " <= ";
      if (std::isfinite(ub)) out << ub; else out << "+inf";
      out << '\n';
    }
  }
  out << "End\n";
}

}  // namespace vidmesh::lp
