#include "vidmesh/lp/simplex.h"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>

namespace vidmesh::lp {

const char* StatusName(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration_limit";
    case Status::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

enum class VarState : uint8_t { kBasic, kLower, kUpper, kFree, kFixed };

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

struct Eta {
  int row;
  double pivot;
  std::vector<std::pair<int, double>> others;  // (i, alpha_i), i != row
};

double PowerOfTwoNear(double v) {
  if (!(v > 0) || !std::isfinite(v)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(v))));
}

class Simplex {
 public:
  Simplex(const Problem& p, const SimplexOptions& opt)
      : p_(p), opt_(opt), m_(p.num_constraints()), n_(p.num_variables()) {}

  Solution Run();

 private:
  int total() const { return n_ + m_; }

  void Load();
  void InitialBasis(bool keep_values);
  bool Factorize();
  void Ftran(Vec& v) const;
  void Btran(Vec& v) const;
  void ComputeBasicValues();
  void LoadColumn(int j, Vec& dense) const;
  double ColumnDot(int j, const Vec& y) const;
  bool Infeasible(int j) const;
  double SumInfeasibility() const;
  void SetNonbasicAtBound(int j, bool keep_value);
  // Refactors and recomputes x_B. A singular basis is replaced by the last
  // good one and the pivot tolerance is tightened. False after repeated
  // failures.
  bool Refactor();

  const Problem& p_;
  SimplexOptions opt_;
  int m_, n_;

  std::vector<double> row_scale_, col_scale_;
  std::vector<int> col_start_, row_idx_;
  std::vector<double> val_;
  std::vector<double> lb_, ub_, cost_, x_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  double obj_sign_ = 1.0;
  double pivot_tol_ = 1e-7;
  std::vector<double> orig_lb_, orig_ub_;
  bool perturbed_ = false;
  int failures_ = 0;
  std::vector<int> good_basis_;
  std::vector<VarState> good_state_;
};

void Simplex::Load() {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  const auto& els = p_.elements();
  if (opt_.scale) {
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> rmax(m_, 0.0), rmin(m_, kInfinity);
      for (const auto& e : els) {
        const double a = std::abs(e.value) * col_scale_[e.col] * row_scale_[e.row];
        rmax[e.row] = std::max(rmax[e.row], a);
        rmin[e.row] = std::min(rmin[e.row], a);
      }
      for (int i = 0; i < m_; ++i) {
        if (rmax[i] > 0) row_scale_[i] *= PowerOfTwoNear(1.0 / std::sqrt(rmax[i] * rmin[i]));
      }
      std::vector<double> cmax(n_, 0.0), cmin(n_, kInfinity);
      for (const auto& e : els) {
        const double a = std::abs(e.value) * col_scale_[e.col] * row_scale_[e.row];
        cmax[e.col] = std::max(cmax[e.col], a);
        cmin[e.col] = std::min(cmin[e.col], a);
      }
      for (int j = 0; j < n_; ++j) {
        if (cmax[j] > 0) col_scale_[j] *= PowerOfTwoNear(1.0 / std::sqrt(cmax[j] * cmin[j]));
      }
    }
  }

  // CSC of the scaled matrix; duplicates summed.
  std::vector<int> count(n_ + 1, 0);
  for (const auto& e : els) ++count[e.col + 1];
  for (int j = 0; j < n_; ++j) count[j + 1] += count[j];
  col_start_ = count;
  std::vector<int> rows(els.size());
  std::vector<double> vals(els.size());
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (const auto& e : els) {
    const int k = fill[e.col]++;
    rows[k] = e.row;
    vals[k] = e.value * row_scale_[e.row] * col_scale_[e.col];
  }
  row_idx_.clear();
  val_.clear();
  std::vector<int> new_start(n_ + 1, 0);
  std::vector<int> seen(m_, -1);
  for (int j = 0; j < n_; ++j) {
    const int begin = static_cast<int>(row_idx_.size());
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      if (seen[rows[k]] >= begin) {
        val_[seen[rows[k]]] += vals[k];
      } else {
        seen[rows[k]] = static_cast<int>(row_idx_.size());
        row_idx_.push_back(rows[k]);
        val_.push_back(vals[k]);
      }
    }
    new_start[j + 1] = static_cast<int>(row_idx_.size());
  }
  col_start_ = std::move(new_start);

  obj_sign_ = p_.sense() == Sense::kMaximize ? -1.0 : 1.0;
  lb_.resize(total());
  ub_.resize(total());
  cost_.assign(total(), 0.0);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = p_.col_lb(j) / col_scale_[j];
    ub_[j] = p_.col_ub(j) / col_scale_[j];
    cost_[j] = obj_sign_ * p_.objective(j) * col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) {
    lb_[n_ + i] = p_.row_lb(i) * row_scale_[i];
    ub_[n_ + i] = p_.row_ub(i) * row_scale_[i];
  }
}

void Simplex::SetNonbasicAtBound(int j, bool keep_value) {
  const bool lo = std::isfinite(lb_[j]);
  const bool hi = std::isfinite(ub_[j]);
  if (lo && hi && lb_[j] == ub_[j]) {
    state_[j] = VarState::kFixed;
    x_[j] = lb_[j];
  } else if (lo && hi) {
    const bool upper = keep_value && std::abs(x_[j] - ub_[j]) < std::abs(x_[j] - lb_[j]);
    state_[j] = upper ? VarState::kUpper : VarState::kLower;
    x_[j] = upper ? ub_[j] : lb_[j];
  } else if (lo) {
    state_[j] = VarState::kLower;
    x_[j] = lb_[j];
  } else if (hi) {
    state_[j] = VarState::kUpper;
    x_[j] = ub_[j];
  } else {
    state_[j] = VarState::kFree;
    x_[j] = 0.0;
  }
}

void Simplex::InitialBasis(bool keep_values) {
  if (!keep_values) x_.assign(total(), 0.0);
  state_.assign(total(), VarState::kLower);
  basis_.resize(m_);
  for (int j = 0; j < n_; ++j) SetNonbasicAtBound(j, keep_values);
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    state_[n_ + i] = VarState::kBasic;
  }
}

void Simplex::LoadColumn(int j, Vec& dense) const {
  dense.setZero(m_);
  if (j < n_) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      dense[row_idx_[k]] = val_[k];
    }
  } else {
    dense[j - n_] = -1.0;
  }
}

double Simplex::ColumnDot(int j, const Vec& y) const {
  if (j >= n_) return -y[j - n_];
  double s = 0.0;
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s += val_[k] * y[row_idx_[k]];
  return s;
}

bool Simplex::Factorize() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[i];
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        trips.emplace_back(row_idx_[k], i, val_[k]);
      }
    } else {
      trips.emplace_back(j - n_, i, -1.0);
    }
  }
  SpMat b(m_, m_);
  b.setFromTriplets(trips.begin(), trips.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  return lu_.info() == Eigen::Success;
}

bool Simplex::Refactor() {
  if (Factorize()) {
    good_basis_ = basis_;
    good_state_ = state_;
    ComputeBasicValues();
    return true;
  }
  if (++failures_ > 8) return false;
  pivot_tol_ = std::min(1e-3, pivot_tol_ * 100.0);
  basis_ = good_basis_;
  state_ = good_state_;
  for (int j = 0; j < total(); ++j) {
    switch (state_[j]) {
      case VarState::kBasic: break;
      case VarState::kLower:
      case VarState::kFixed: x_[j] = lb_[j]; break;
      case VarState::kUpper: x_[j] = ub_[j]; break;
      case VarState::kFree: x_[j] = 0.0; break;
    }
  }
  if (!Factorize()) return false;
  ComputeBasicValues();
  return true;
}

void Simplex::Ftran(Vec& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double zr = v[e.row] / e.pivot;
    v[e.row] = zr;
    if (zr == 0.0) continue;
    for (const auto& [i, a] : e.others) v[i] -= a * zr;
  }
}

void Simplex::Btran(Vec& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->row];
    for (const auto& [i, a] : it->others) s -= a * v[i];
    v[it->row] = s / it->pivot;
  }
  Vec w = lu_.transpose().solve(v);
  v = std::move(w);
}

void Simplex::ComputeBasicValues() {
  if (m_ == 0) return;
  Vec rhs = Vec::Zero(m_);
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        rhs[row_idx_[k]] -= val_[k] * x_[j];
      }
    } else {
      rhs[j - n_] += x_[j];
    }
  }
  Ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[basis_[i]] = rhs[i];
}

bool Simplex::Infeasible(int j) const {
  return x_[j] < lb_[j] - opt_.feasibility_tol ||
         x_[j] > ub_[j] + opt_.feasibility_tol;
}

double Simplex::SumInfeasibility() const {
  double s = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[i];
    if (x_[j] < lb_[j]) s += lb_[j] - x_[j];
    if (x_[j] > ub_[j]) s += x_[j] - ub_[j];
  }
  return s;
}

Solution Simplex::Run() {
  Solution sol;
  Load();
  if (opt_.perturb) {
    // Widen every finite bound by a small random amount to break primal
    // degeneracy; removed again once the widened problem is optimal.
    orig_lb_ = lb_;
    orig_ub_ = ub_;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (int j = 0; j < total(); ++j) {
      if (std::isfinite(lb_[j])) lb_[j] -= opt_.perturbation * (1.0 + std::abs(lb_[j])) * u(rng);
      if (std::isfinite(ub_[j])) ub_[j] += opt_.perturbation * (1.0 + std::abs(ub_[j])) * u(rng);
    }
    perturbed_ = true;
  }
  InitialBasis(false);
  pivot_tol_ = opt_.pivot_tol;
  if (!Factorize()) return sol;
  good_basis_ = basis_;
  good_state_ = state_;
  ComputeBasicValues();

  const double ftol = opt_.feasibility_tol;
  const double dtol = opt_.optimality_tol;
  Vec y(m_), alpha(m_), col(m_);
  int degenerate_run = 0;
  bool bland = false;
  bool fresh = true;  // factorization and x_B recomputed since last pivot
  int iter = 0;

  for (;; ++iter) {
    if (iter >= opt_.max_iterations) {
      sol.status = Status::kIterationLimit;
      break;
    }
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!Refactor()) return sol;
      fresh = true;
    }

    bool phase1 = false;
    for (int i = 0; i < m_ && !phase1; ++i) phase1 = Infeasible(basis_[i]);
    if (opt_.log_every > 0 && iter % opt_.log_every == 0) {
      double obj = 0.0;
      for (int j = 0; j < total(); ++j) obj += cost_[j] * x_[j];
      std::fprintf(stderr, "simplex it=%d phase=%d sinf=%.3e obj=%.9g etas=%zu bland=%d\n",
                   iter, phase1 ? 1 : 2, SumInfeasibility(), obj_sign_ * obj,
                   etas_.size(), bland ? 1 : 0);
    }

    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (phase1) {
        y[i] = x_[j] < lb_[j] - ftol ? -1.0 : (x_[j] > ub_[j] + ftol ? 1.0 : 0.0);
      } else {
        y[i] = cost_[j];
      }
    }
    Btran(y);

    // Pricing.
    int q = -1;
    double best = 0.0;
    double dir = 0.0;
    for (int j = 0; j < total(); ++j) {
      const VarState s = state_[j];
      if (s == VarState::kBasic || s == VarState::kFixed) continue;
      const double d = (phase1 ? 0.0 : cost_[j]) - ColumnDot(j, y);
      double improve = 0.0;
      double jdir = 0.0;
      if (d < -dtol && (s == VarState::kLower || s == VarState::kFree)) {
        improve = -d;
        jdir = 1.0;
      } else if (d > dtol && (s == VarState::kUpper || s == VarState::kFree)) {
        improve = d;
        jdir = -1.0;
      }
      if (jdir == 0.0) continue;
      if (bland) {
        q = j;
        dir = jdir;
        break;
      }
      if (improve > best) {
        best = improve;
        q = j;
        dir = jdir;
      }
    }

    if (q < 0) {
      if (!fresh) {
        if (!Refactor()) return sol;
        fresh = true;
        continue;
      }
      if (phase1) {
        sol.status = SumInfeasibility() > ftol * std::max(1, m_)
                         ? Status::kInfeasible
                         : Status::kOptimal;
        if (sol.status == Status::kOptimal) {
          // Residual infeasibility below tolerance: accept as phase 2 start.
          for (int i = 0; i < m_; ++i) {
            const int j = basis_[i];
            x_[j] = std::clamp(x_[j], lb_[j], ub_[j]);
          }
          continue;
        }
      } else {
        if (perturbed_) {
          lb_ = orig_lb_;
          ub_ = orig_ub_;
          perturbed_ = false;
          for (int j = 0; j < total(); ++j) {
            if (state_[j] != VarState::kBasic) SetNonbasicAtBound(j, true);
          }
          if (!Refactor()) return sol;
          bland = false;
          degenerate_run = 0;
          continue;
        }
        sol.status = Status::kOptimal;
      }
      break;
    }

    LoadColumn(q, col);
    alpha = col;
    Ftran(alpha);

    // Harris two-pass ratio test.
    bool hit_lower = false;
    auto target = [&](int i, double delta, double* dist) -> bool {
      const int j = basis_[i];
      const double v = x_[j];
      if (delta > 0) {
        if (v < lb_[j] - ftol) { *dist = lb_[j] - v; hit_lower = true; return true; }
        if (v <= ub_[j] + ftol && std::isfinite(ub_[j])) {
          *dist = ub_[j] - v;
          hit_lower = false;
          return true;
        }
      } else {
        if (v > ub_[j] + ftol) { *dist = v - ub_[j]; hit_lower = false; return true; }
        if (v >= lb_[j] - ftol && std::isfinite(lb_[j])) {
          *dist = v - lb_[j];
          hit_lower = true;
          return true;
        }
      }
      return false;
    };
    bool r_lower = false;

    int r = -1;
    double theta = kInfinity;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) < pivot_tol_) continue;
        const double delta = -dir * alpha[i];
        double dist;
        if (!target(i, delta, &dist)) continue;
        const double ratio = std::max(0.0, dist) / std::abs(delta);
        if (ratio < theta - 1e-12 ||
            (ratio <= theta + 1e-12 && r >= 0 && basis_[i] < basis_[r])) {
          theta = std::min(theta, ratio);
          r = i;
          r_lower = hit_lower;
        }
      }
    } else {
      double theta_max = kInfinity;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) < pivot_tol_) continue;
        const double delta = -dir * alpha[i];
        double dist;
        if (!target(i, delta, &dist)) continue;
        theta_max = std::min(theta_max, (dist + ftol) / std::abs(delta));
      }
      double best_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) < pivot_tol_) continue;
        const double delta = -dir * alpha[i];
        double dist;
        if (!target(i, delta, &dist)) continue;
        const double ratio = dist / std::abs(delta);
        if (ratio <= theta_max && std::abs(alpha[i]) > best_pivot) {
          best_pivot = std::abs(alpha[i]);
          r = i;
          r_lower = hit_lower;
          theta = std::max(0.0, ratio);
        }
      }
    }

    const double range = ub_[q] - lb_[q];
    const bool flip = std::isfinite(range) && range <= theta;
    if (r < 0 && !flip) {
      if (!fresh) {
        if (!Refactor()) return sol;
        fresh = true;
        continue;
      }
      sol.status = phase1 ? Status::kNumericalFailure : Status::kUnbounded;
      break;
    }
    if (flip) theta = range;

    const double step = dir * theta;
    x_[q] += step;
    if (theta != 0.0) {
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= step * alpha[i];
    }

    if (theta * std::max(1.0, std::abs(best)) < 1e-12) {
      if (++degenerate_run > 50) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (flip) {
      state_[q] = dir > 0 ? VarState::kUpper : VarState::kLower;
      x_[q] = dir > 0 ? ub_[q] : lb_[q];
      continue;
    }

    const int leaving = basis_[r];
    const bool to_lower = r_lower;
    x_[leaving] = to_lower ? lb_[leaving] : ub_[leaving];
    state_[leaving] = lb_[leaving] == ub_[leaving]
                          ? VarState::kFixed
                          : (to_lower ? VarState::kLower : VarState::kUpper);

    Eta eta;
    eta.row = r;
    eta.pivot = alpha[r];
    for (int i = 0; i < m_; ++i) {
      if (i != r && std::abs(alpha[i]) > 1e-14) eta.others.emplace_back(i, alpha[i]);
    }
    etas_.push_back(std::move(eta));
    basis_[r] = q;
    state_[q] = VarState::kBasic;
    fresh = false;
  }

  sol.iterations = iter;
  sol.x.resize(n_);
  for (int j = 0; j < n_; ++j) sol.x[j] = x_[j] * col_scale_[j];
  sol.objective = p_.ObjectiveValue(sol.x);
  sol.row_duals.assign(m_, 0.0);
  if (sol.status == Status::kOptimal && m_ > 0) {
    for (int i = 0; i < m_; ++i) y[i] = cost_[basis_[i]];
    Btran(y);
    for (int i = 0; i < m_; ++i) sol.row_duals[i] = obj_sign_ * y[i] * row_scale_[i];
  }
  return sol;
}

}  // namespace

Solution Solve(const Problem& problem, const SimplexOptions& options) {
  Simplex s(problem, options);
  return s.Run();
}

}  // namespace vidmesh::lp
