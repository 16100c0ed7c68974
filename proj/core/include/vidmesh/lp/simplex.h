#ifndef VIDMESH_LP_SIMPLEX_H_
#define VIDMESH_LP_SIMPLEX_H_

#include <vector>

#include "vidmesh/lp/problem.h"

namespace vidmesh::lp {

enum class Status {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNumericalFailure,
};

const char* StatusName(Status status);

struct SimplexOptions {
  int max_iterations = 1000000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-7;
  int refactor_interval = 80;
  bool scale = true;
  bool perturb = true;
  double perturbation = 1e-7;
  int log_every = 0;  // progress lines on stderr when > 0
};

struct Solution {
  Status status = Status::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  // Multipliers y with reduced costs d = c - A'y, in the problem's own sense.
  std::vector<double> row_duals;
  int iterations = 0;
};

// Bounded revised primal simplex (two phases, composite phase 1, Harris
// ratio test, LU + product-form updates). Works on the problem as given;
// no presolve.
Solution Solve(const Problem& problem, const SimplexOptions& options = {});

}  // namespace vidmesh::lp

#endif  // VIDMESH_LP_SIMPLEX_H_
