#pragma once

#include "dephaselab/operator_core.hpp"
#include "dephaselab/sdp.hpp"
#include "dephaselab/states.hpp"

#include <functional>
#include <vector>

// Multilevel-coherence machinery. C_k is the convex hull of pure states
// with at most k nonzero computational-basis amplitudes; the robustness of
// k-level coherence R_{C_k}(rho) is the least mixing weight s such that
// (rho + s tau)/(1+s) lies in C_k for some state tau. It is computed from
// the block semidefinite program
//
//   min  Tr(sum_I sigma_I) - 1
//   s.t. sigma_I >= 0,  P_I sigma_I P_I = sigma_I  for every k-subset I,
//        sum_I sigma_I >= rho,
//
// where each sigma_I lives on a k-dimensional support. Complex Hermitian
// blocks are embedded as real symmetric ones of twice the size via
// M -> [[Re M, -Im M], [Im M, Re M]] (eigenvalues double up, traces and
// objective scale by 2), solved with the interior-point engine in sdp.hpp
// and mapped back by averaging over the embedding symmetry.

namespace dephaselab {

/// Sorted k-element subset of basis indices {0..d-1}; the support of one
/// SDP block.
using SupportIndexSet = std::vector<int>;

/// Number of nonzero computational-basis amplitudes of a pure state.
int coherence_rank(const PureState& s, double tol = 1e-9);

/// All k-element subsets of {0..d-1} in lexicographic order.
std::vector<SupportIndexSet> enumerate_support_sets(int d, int k);

/// The robustness program for one state and coherence level.
struct SdpProblem {
  DensityMatrix rho;
  int k;
  std::vector<SupportIndexSet> blocks;

  static SdpProblem full(const DensityMatrix& rho, int k);
};

/// Primal/dual solution data for a robustness solve. primal_blocks[i] is
/// the k x k complex block sigma_I on blocks[i]; dual_matrix is the d x d
/// dual witness Y with Y >= 0 and Y_II <= I for every block.
struct SdpCertificate {
  std::vector<SupportIndexSet> blocks;
  std::vector<Matrix> primal_blocks;
  double objective = 0.0;       // R_{C_k}, clamped at zero
  double dual_objective = 0.0;  // Tr(Y rho) - 1
  double dual_gap = 0.0;        // relative duality gap, >= 0
  Matrix dual_matrix;
  int iterations = 0;
};

struct RobustnessResult {
  double value;
  SdpCertificate certificate;
};

/// Solve the robustness SDP. Throws sdp::SolverError on non-convergence
/// and std::invalid_argument when the problem exceeds the dense-path caps
/// (d <= 16, at most 5000 blocks).
RobustnessResult solve_robustness(const SdpProblem& problem, const sdp::Options& opts = {});

/// Convenience wrapper over the full block family.
RobustnessResult robustness(const DensityMatrix& rho, int k, const sdp::Options& opts = {});

/// R_{C_k} along a one-parameter family of states.
std::vector<double> robustness_curve(const std::function<DensityMatrix(double)>& family, int k,
                                     const std::vector<double>& p_grid,
                                     const sdp::Options& opts = {});

/// Violation magnitudes of the certificate invariants, computed from
/// scratch (independent of the solver internals).
struct CertificateDiagnostics {
  double min_block_eigenvalue = 0.0;   // over all sigma_I; >= -1e-9 when feasible
  double support_violation = 0.0;      // max |(sigma_I)_{ij}| off the support
  double slack_min_eigenvalue = 0.0;   // min eig(sum sigma_I - rho); >= -1e-8
  double dual_min_eigenvalue = 0.0;    // min eig(Y)
  double dual_block_excess = 0.0;      // max_I max eig(Y_II) - 1
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double weak_duality_gap = 0.0;       // primal - dual (>= -1e-7 when consistent)

  bool primal_feasible() const {
    return min_block_eigenvalue >= -1e-9 && support_violation <= 1e-9 &&
           slack_min_eigenvalue >= -1e-8;
  }
  bool dual_feasible() const {
    return dual_min_eigenvalue >= -1e-7 && dual_block_excess <= 1e-7;
  }
};

CertificateDiagnostics verify_certificate(const DensityMatrix& rho, const SdpCertificate& cert);

}  // namespace dephaselab
