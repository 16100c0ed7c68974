#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "vidmesh/lp/problem.h"
#include "vidmesh/lp/simplex.h"
#include "vidmesh/lp/solver.h"

using namespace vidmesh::lp;

namespace {

const Backend kBackends[] = {Backend::kHighs, Backend::kSimplex};

Solution Run(const Problem& p, Backend b) {
  SolverOptions o;
  o.backend = b;
  return SolveWith(p, o);
}

// Optimality certificate: primal feasibility, sign-correct multipliers and
// complementary slackness, all in the problem's own sense.
void CheckKkt(const Problem& p, const Solution& s, double tol) {
  REQUIRE(s.status == Status::kOptimal);
  REQUIRE(s.x.size() == static_cast<size_t>(p.num_variables()));
  REQUIRE(s.row_duals.size() == static_cast<size_t>(p.num_constraints()));
  CHECK(p.MaxViolation(s.x) <= tol);
  const double sign = p.sense() == Sense::kMaximize ? 1.0 : -1.0;

  std::vector<double> d(p.num_variables());
  for (int j = 0; j < p.num_variables(); ++j) d[j] = p.objective(j);
  for (const auto& el : p.elements()) d[el.col] -= el.value * s.row_duals[el.row];
  for (int j = 0; j < p.num_variables(); ++j) {
    const bool at_lb = std::abs(s.x[j] - p.col_lb(j)) <= tol;
    const bool at_ub = std::abs(s.x[j] - p.col_ub(j)) <= tol;
    // Maximizing, a column at its lower bound must not want to grow.
    if (!at_lb) CHECK(sign * d[j] >= -tol);
    if (!at_ub) CHECK(sign * d[j] <= tol);
  }
  const std::vector<double> act = p.RowActivity(s.x);
  for (int i = 0; i < p.num_constraints(); ++i) {
    const double y = s.row_duals[i];
    const bool at_lb = std::abs(act[i] - p.row_lb(i)) <= tol;
    const bool at_ub = std::abs(act[i] - p.row_ub(i)) <= tol;
    if (!at_lb) CHECK(sign * y >= -tol);
    if (!at_ub) CHECK(sign * y <= tol);
  }
}

// Boxed variables and ranged rows around a known feasible point.
Problem RandomLp(std::mt19937_64& rng, Sense sense, int n, int m) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Problem p(sense);
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    const double ub = 1.0 + 9.0 * u01(rng);
    p.AddVariable(0.0, ub, 4.0 * u01(rng) - 2.0);
    x0[j] = ub * u01(rng);
  }
  for (int i = 0; i < m; ++i) {
    double act = 0.0;
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < 0.4) {
        const double a = 6.0 * u01(rng) - 3.0;
        terms.emplace_back(j, a);
        act += a * x0[j];
      }
    }
    const double kind = u01(rng);
    const double lb = kind < 0.3 ? -kInfinity : act - 2.0 * u01(rng);
    const double ub = kind > 0.7 ? kInfinity : act + 2.0 * u01(rng);
    const int row = p.AddConstraint(lb, ub);
    for (auto [j, a] : terms) p.AddCoefficient(row, j, a);
  }
  return p;
}

}  // namespace

TEST_CASE("textbook LP") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
  Problem p(Sense::kMaximize);
  const int x = p.AddVariable(0, kInfinity, 3, "x");
  const int y = p.AddVariable(0, kInfinity, 5, "y");
  const int r1 = p.AddConstraint(-kInfinity, 4);
  p.AddCoefficient(r1, x, 1);
  const int r2 = p.AddConstraint(-kInfinity, 12);
  p.AddCoefficient(r2, y, 2);
  const int r3 = p.AddConstraint(-kInfinity, 18);
  p.AddCoefficient(r3, x, 3);
  p.AddCoefficient(r3, y, 1);
  p.AddCoefficient(r3, y, 1);  // duplicates are summed
  for (Backend b : kBackends) {
    const Solution s = Run(p, b);
    REQUIRE(s.status == Status::kOptimal);
    CHECK(s.objective == doctest::Approx(36.0));
    CHECK(s.x[x] == doctest::Approx(2.0));
    CHECK(s.x[y] == doctest::Approx(6.0));
    // Shadow prices of the textbook example: 0, 3/2, 1.
    CHECK(s.row_duals[r1] == doctest::Approx(0.0));
    CHECK(s.row_duals[r2] == doctest::Approx(1.5));
    CHECK(s.row_duals[r3] == doctest::Approx(1.0));
    CheckKkt(p, s, 1e-7);
  }
}

TEST_CASE("minimization with equality and ranged rows") {
  // min x + 2y + 3z  s.t. x + y + z = 10, 2 <= y - z <= 4, z >= 1
  Problem p(Sense::kMinimize);
  const int x = p.AddVariable(0, kInfinity, 1);
  const int y = p.AddVariable(0, kInfinity, 2);
  const int z = p.AddVariable(1, kInfinity, 3);
  const int e = p.AddConstraint(10, 10);
  for (int v : {x, y, z}) p.AddCoefficient(e, v, 1);
  const int r = p.AddConstraint(2, 4);
  p.AddCoefficient(r, y, 1);
  p.AddCoefficient(r, z, -1);
  for (Backend b : kBackends) {
    const Solution s = Run(p, b);
    CHECK(s.objective == doctest::Approx(6 + 2 * 3 + 3 * 1));  // (6, 3, 1)
    CheckKkt(p, s, 1e-7);
  }
}

TEST_CASE("infeasible and unbounded programs are reported") {
  Problem inf(Sense::kMaximize);
  const int a = inf.AddVariable(0, kInfinity, 1);
  const int r1 = inf.AddConstraint(5, kInfinity);
  inf.AddCoefficient(r1, a, 1);
  const int r2 = inf.AddConstraint(-kInfinity, 3);
  inf.AddCoefficient(r2, a, 1);

  Problem unb(Sense::kMaximize);
  const int b = unb.AddVariable(0, kInfinity, 1);
  const int c = unb.AddVariable(0, kInfinity, 0);
  const int r = unb.AddConstraint(-kInfinity, 1);
  unb.AddCoefficient(r, b, 1);
  unb.AddCoefficient(r, c, -1);

  for (Backend be : kBackends) {
    CHECK(Run(inf, be).status == Status::kInfeasible);
    CHECK(Run(unb, be).status == Status::kUnbounded);
  }
}

TEST_CASE("random LPs: both backends certify the same optimum") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 60; ++trial) {
    const Sense sense = trial % 2 ? Sense::kMaximize : Sense::kMinimize;
    const Problem p = RandomLp(rng, sense, 5 + trial % 11, 3 + trial % 13);
    const Solution h = Run(p, Backend::kHighs);
    const Solution s = Run(p, Backend::kSimplex);
    CAPTURE(trial);
    CheckKkt(p, h, 1e-6);
    CheckKkt(p, s, 1e-6);
    CHECK(h.objective == doctest::Approx(s.objective).epsilon(1e-7));
  }
}

TEST_CASE("LP text dump names rows and columns") {
  Problem p(Sense::kMaximize);
  const int x = p.AddVariable(0, 3, 1, "flow_x");
  const int r = p.AddConstraint(-kInfinity, 2, "cap_0");
  p.AddCoefficient(r, x, 1);
  std::ostringstream out;
  p.WriteLp(out);
  const std::string text = out.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("flow_x") != std::string::npos);
  CHECK(text.find("cap_0") != std::string::npos);
}
