#ifndef VIDMESH_LP_SOLVER_H_
#define VIDMESH_LP_SOLVER_H_

#include "vidmesh/lp/problem.h"
#include "vidmesh/lp/simplex.h"

namespace vidmesh::lp {

enum class Backend { kHighs, kSimplex };

struct SolverOptions {
  Backend backend = Backend::kHighs;
  double time_limit = 0.0;  // seconds, HiGHS only; 0 = none
  SimplexOptions simplex;
};

// Dual simplex from HiGHS. Row duals follow the same convention as Solve().
Solution SolveHighs(const Problem& problem, double time_limit = 0.0);

Solution SolveWith(const Problem& problem, const SolverOptions& options);

}  // namespace vidmesh::lp

#endif  // VIDMESH_LP_SOLVER_H_
