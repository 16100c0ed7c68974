#include <cmath>
#include <vector>

#include "Highs.h"
#include "vidmesh/lp/solver.h"

namespace vidmesh::lp {

namespace {

double Bound(double v) {
  if (std::isinf(v)) return v > 0 ? kHighsInf : -kHighsInf;
  return v;
}

}  // namespace

Solution SolveHighs(const Problem& problem, double time_limit) {
  const int n = problem.num_variables();
  const int m = problem.num_constraints();

  HighsLp lp;
  lp.num_col_ = n;
  lp.num_row_ = m;
  lp.sense_ = problem.sense() == Sense::kMaximize ? ObjSense::kMaximize
                                                  : ObjSense::kMinimize;
  for (int j = 0; j < n; ++j) {
    lp.col_cost_.push_back(problem.objective(j));
    lp.col_lower_.push_back(Bound(problem.col_lb(j)));
    lp.col_upper_.push_back(Bound(problem.col_ub(j)));
  }
  for (int i = 0; i < m; ++i) {
    lp.row_lower_.push_back(Bound(problem.row_lb(i)));
    lp.row_upper_.push_back(Bound(problem.row_ub(i)));
  }

  // Column-wise matrix with duplicates summed.
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (const auto& el : problem.elements()) cols[el.col].push_back({el.row, el.value});
  auto& a = lp.a_matrix_;
  a.format_ = MatrixFormat::kColwise;
  a.num_col_ = n;
  a.num_row_ = m;
  a.start_.assign(1, 0);
  std::vector<double> dense(m, 0.0);
  std::vector<int> touched;
  for (auto& c : cols) {
    touched.clear();
    for (auto [r, v] : c) {
      if (dense[r] == 0.0) touched.push_back(r);
      dense[r] += v;
    }
    for (int r : touched) {
      if (dense[r] != 0.0) {
        a.index_.push_back(r);
        a.value_.push_back(dense[r]);
      }
      dense[r] = 0.0;
    }
    a.start_.push_back(static_cast<int>(a.index_.size()));
  }

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("solver", "simplex");
  highs.setOptionValue("threads", 1);
  if (time_limit > 0.0) highs.setOptionValue("time_limit", time_limit);

  Solution sol;
  if (highs.passModel(lp) == HighsStatus::kError || highs.run() == HighsStatus::kError) {
    sol.status = Status::kNumericalFailure;
    return sol;
  }
  switch (highs.getModelStatus()) {
    case HighsModelStatus::kOptimal:
      sol.status = Status::kOptimal;
      break;
    case HighsModelStatus::kInfeasible:
      sol.status = Status::kInfeasible;
      break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible:
      sol.status = Status::kUnbounded;
      break;
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kTimeLimit:
      sol.status = Status::kIterationLimit;
      break;
    default:
      sol.status = Status::kNumericalFailure;
      break;
  }
  sol.iterations = highs.getInfo().simplex_iteration_count;
  if (sol.status != Status::kOptimal) return sol;

  const HighsSolution& hs = highs.getSolution();
  sol.x = hs.col_value;
  sol.row_duals = hs.row_dual;
  sol.objective = problem.ObjectiveValue(sol.x);
  return sol;
}

Solution SolveWith(const Problem& problem, const SolverOptions& options) {
  if (options.backend == Backend::kSimplex) return Solve(problem, options.simplex);
  return SolveHighs(problem, options.time_limit);
}

}  // namespace vidmesh::lp
