#ifndef VIDMESH_LP_PROBLEM_H_
#define VIDMESH_LP_PROBLEM_H_

#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace vidmesh::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };

using VariableIndex = int;
using ConstraintIndex = int;

struct ProblemMatrixElement {
  ConstraintIndex row;
  VariableIndex col;
  double value;
};

// A linear program in range form:
//   optimize  c'x  s.t.  row_lb <= A x <= row_ub,  col_lb <= x <= col_ub.
// Duplicate (row, col) coefficients are summed.
class Problem {
 public:
  explicit Problem(Sense sense = Sense::kMaximize) : sense_(sense) {}

  VariableIndex AddVariable(double lb, double ub, double objective = 0.0,
                            std::string name = {});
  ConstraintIndex AddConstraint(double lb, double ub, std::string name = {});
  void AddCoefficient(ConstraintIndex row, VariableIndex col, double value);
  void SetObjective(VariableIndex col, double value) { objective_[col] = value; }

  Sense sense() const { return sense_; }
  int num_variables() const { return static_cast<int>(col_lb_.size()); }
  int num_constraints() const { return static_cast<int>(row_lb_.size()); }
  double col_lb(VariableIndex j) const { return col_lb_[j]; }
  double col_ub(VariableIndex j) const { return col_ub_[j]; }
  double row_lb(ConstraintIndex i) const { return row_lb_[i]; }
  double row_ub(ConstraintIndex i) const { return row_ub_[i]; }
  double objective(VariableIndex j) const { return objective_[j]; }
  const std::string& variable_name(VariableIndex j) const { return col_names_[j]; }
  const std::string& constraint_name(ConstraintIndex i) const {
    return row_names_[i];
  }
  const std::vector<ProblemMatrixElement>& elements() const { return elements_; }

  // Row activities A x.
  std::vector<double> RowActivity(std::span<const double> x) const;
  double ObjectiveValue(std::span<const double> x) const;
  // Largest bound or row violation of x (absolute).
  double MaxViolation(std::span<const double> x) const;

  // CPLEX LP text format.
  void WriteLp(std::ostream& out) const;

 private:
  Sense sense_;
  std::vector<double> col_lb_, col_ub_, objective_;
  std::vector<std::string> col_names_;
  std::vector<double> row_lb_, row_ub_;
  std::vector<std::string> row_names_;
  std::vector<ProblemMatrixElement> elements_;
};

}  // namespace vidmesh::lp

#endif  // VIDMESH_LP_PROBLEM_H_
