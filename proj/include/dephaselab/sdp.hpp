#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

// Small dense primal-dual interior-point solver for real symmetric
// block-diagonal semidefinite programs in standard form:
//
//   min  sum_b <C_b, X_b>
//   s.t. sum_b <A_{j,b}, X_b> = rhs_j   (j = 1..p),    X_b >= 0,
//
// with dual
//
//   max  rhs.y   s.t.  Z_b = C_b - sum_j y_j A_{j,b} >= 0.
//
// Every constraint matrix is a sparse sum of symmetrized unit entries,
// A_j = sum_t coeff_t Sym(e_r e_c^T), so <A_j, X> = sum_t coeff_t X_rc.
// That shape covers the block-coherence programs this library needs and
// keeps the Schur complement assembly cheap. The search direction is the
// HKM one with a Mehrotra predictor-corrector; the Schur system is solved
// by dense Cholesky. Problem sizes are a few hundred constraints at most.

namespace dephaselab::sdp {

/// One summand of a constraint matrix: coeff * Sym(e_row e_col^T) on the
/// given block (row <= col).
struct ConstraintTerm {
  int block;
  int row;
  int col;
  double coeff;
};

struct BlockProblem {
  std::vector<int> block_sizes;
  std::vector<Eigen::MatrixXd> objective;                // C_b, symmetric
  std::vector<std::vector<ConstraintTerm>> constraints;  // A_j as term lists
  Eigen::VectorXd rhs;

  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
};

struct Options {
  int max_iterations = 200;
  /// Relative duality gap at which the iteration stops.
  double gap_tolerance = 1e-8;
  double feasibility_tolerance = 1e-9;
  /// Gap bound that still counts as converged if the iteration cap is hit.
  double declared_gap_tolerance = 1e-6;
  double step_fraction = 0.98;
  double initial_scale = 0.0;  // 0 = pick automatically
};

struct Solution {
  std::vector<Eigen::MatrixXd> x_blocks;
  std::vector<Eigen::MatrixXd> z_blocks;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& message, double last_gap, int iterations)
      : std::runtime_error(message), last_gap_(last_gap), iterations_(iterations) {}

  double last_gap() const { return last_gap_; }
  int iterations() const { return iterations_; }

 private:
  double last_gap_;
  int iterations_;
};

/// Solve to the requested gap; throws SolverError on non-convergence.
Solution solve(const BlockProblem& problem, const Options& opts = {});

}  // namespace dephaselab::sdp
