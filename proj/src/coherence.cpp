#include "dephaselab/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dephaselab {

namespace {

constexpr int kMaxDim = 16;
constexpr int kMaxBlocks = 5000;
constexpr double kDiagonalTol = 1e-14;

double binomial_count(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// [[Re M, -Im M], [Im M, Re M]] real embedding of a complex matrix.
Eigen::MatrixXd real_embedding(const Matrix& m) {
  const Eigen::Index d = m.rows();
  Eigen::MatrixXd out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = m.real();
  out.bottomRightCorner(d, d) = m.real();
  out.topRightCorner(d, d) = -m.imag();
  out.bottomLeftCorner(d, d) = m.imag();
  return out;
}

// Inverse of the embedding, averaged over its symmetry: a real symmetric
// 2k x 2k block maps to the Hermitian (P+Q)/2 + i (R - R^T)/2.
Matrix complex_extraction(const Eigen::MatrixXd& s) {
  const Eigen::Index k = s.rows() / 2;
  Eigen::MatrixXd re = 0.5 * (s.topLeftCorner(k, k) + s.bottomRightCorner(k, k));
  Eigen::MatrixXd im = 0.5 * (s.bottomLeftCorner(k, k) - s.bottomLeftCorner(k, k).transpose());
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

// Certificate for a diagonal state: distribute the diagonal over blocks,
// dual witness Y = I. Exactly optimal with zero gap, no iterations.
RobustnessResult diagonal_certificate(const SdpProblem& problem) {
  const int d = problem.rho.dim();
  SdpCertificate cert;
  cert.blocks = problem.blocks;
  cert.primal_blocks.assign(problem.blocks.size(),
                            Matrix::Zero(problem.k, problem.k));
  for (int i = 0; i < d; ++i) {
    for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
      const auto& idx = problem.blocks[b];
      auto pos = std::find(idx.begin(), idx.end(), i);
      if (pos != idx.end()) {
        const int local = static_cast<int>(pos - idx.begin());
        cert.primal_blocks[b](local, local) += problem.rho.matrix()(i, i).real();
        break;
      }
    }
  }
  cert.objective = 0.0;
  cert.dual_objective = 0.0;
  cert.dual_gap = 0.0;
  cert.dual_matrix = Matrix::Identity(d, d);
  cert.iterations = 0;
  return RobustnessResult{0.0, std::move(cert)};
}

}  // namespace

int coherence_rank(const PureState& s, double tol) {
  int rank = 0;
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    if (std::abs(s.amplitudes()[i]) > tol) ++rank;
  }
  return rank;
}

std::vector<SupportIndexSet> enumerate_support_sets(int d, int k) {
  std::vector<SupportIndexSet> sets;
  SupportIndexSet current(k);
  for (int i = 0; i < k; ++i) current[i] = i;
  while (true) {
    sets.push_back(current);
    // Advance to the next combination in lexicographic order.
    int i = k - 1;
    while (i >= 0 && current[i] == d - k + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return sets;
}

SdpProblem SdpProblem::full(const DensityMatrix& rho, int k) {
  const int d = rho.dim();
  if (k < 1 || k > d) {
    throw std::invalid_argument("coherence level k must lie in [1, dim]");
  }
  if (d > kMaxDim) {
    throw std::invalid_argument("robustness SDP limited to dim <= " + std::to_string(kMaxDim));
  }
  if (binomial_count(d, k) > kMaxBlocks) {
    throw std::invalid_argument("robustness SDP block family too large (C(d,k) > " +
                                std::to_string(kMaxBlocks) + ")");
  }
  return SdpProblem{rho, k, enumerate_support_sets(d, k)};
}

RobustnessResult solve_robustness(const SdpProblem& problem, const sdp::Options& opts) {
  const int d = problem.rho.dim();
  const int k = problem.k;
  const int m = static_cast<int>(problem.blocks.size());
  if (m == 0) {
    throw std::invalid_argument("robustness SDP needs at least one block");
  }

  // C_1 contains every diagonal state, so a diagonal input is feasible as
  // it stands for any k; return the exact certificate without iterating.
  double max_offdiag = 0.0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      if (r != c) max_offdiag = std::max(max_offdiag, std::abs(problem.rho.matrix()(r, c)));
    }
  }
  bool covers_all = true;
  std::vector<bool> covered(d, false);
  for (const auto& idx : problem.blocks) {
    for (int i : idx) covered[i] = true;
  }
  for (int i = 0; i < d; ++i) covers_all = covers_all && covered[i];
  if (max_offdiag <= kDiagonalTol && covers_all) {
    return diagonal_certificate(problem);
  }

  // Embedded problem: m real symmetric blocks of size 2k plus one slack
  // block of size 2d tied entry-wise to sum_I sigma_I - rho.
  sdp::BlockProblem pb;
  pb.block_sizes.assign(m, 2 * k);
  pb.block_sizes.push_back(2 * d);
  pb.objective.assign(m, 0.5 * Eigen::MatrixXd::Identity(2 * k, 2 * k));
  pb.objective.push_back(Eigen::MatrixXd::Zero(2 * d, 2 * d));

  const int p = d * (2 * d + 1);  // entries of a 2d x 2d symmetric matrix
  pb.constraints.resize(p);
  pb.rhs.resize(p);

  Eigen::MatrixXd rho_embedded = real_embedding(problem.rho.matrix());
  Eigen::MatrixXi constraint_id(2 * d, 2 * d);
  {
    int j = 0;
    for (int r = 0; r < 2 * d; ++r) {
      for (int c = r; c < 2 * d; ++c) {
        constraint_id(r, c) = j;
        pb.rhs[j] = rho_embedded(r, c);
        pb.constraints[j].push_back({m, r, c, -1.0});  // slack block
        ++j;
      }
    }
  }

  for (int b = 0; b < m; ++b) {
    const auto& idx = problem.blocks[b];
    auto embed = [&](int t) { return t < k ? idx[t] : d + idx[t - k]; };
    for (int lr = 0; lr < 2 * k; ++lr) {
      for (int lc = lr; lc < 2 * k; ++lc) {
        pb.constraints[constraint_id(embed(lr), embed(lc))].push_back({b, lr, lc, 1.0});
      }
    }
  }

  sdp::Solution sol = sdp::solve(pb, opts);

  SdpCertificate cert;
  cert.blocks = problem.blocks;
  cert.primal_blocks.reserve(m);
  double trace_sum = 0.0;
  for (int b = 0; b < m; ++b) {
    Matrix sigma = complex_extraction(sol.x_blocks[b]);
    trace_sum += sigma.trace().real();
    cert.primal_blocks.push_back(std::move(sigma));
  }
  // The dual slack of the last block is the embedded dual witness; the
  // factor 2 undoes the 1/2 objective scaling of the embedding.
  cert.dual_matrix = 2.0 * complex_extraction(sol.z_blocks[m]);
  cert.objective = std::max(0.0, trace_sum - 1.0);
  cert.dual_objective =
      (cert.dual_matrix * problem.rho.matrix()).trace().real() - 1.0;
  cert.dual_gap = sol.relative_gap;
  cert.iterations = sol.iterations;
  return RobustnessResult{cert.objective, std::move(cert)};
}

RobustnessResult robustness(const DensityMatrix& rho, int k, const sdp::Options& opts) {
  return solve_robustness(SdpProblem::full(rho, k), opts);
}

std::vector<double> robustness_curve(const std::function<DensityMatrix(double)>& family, int k,
                                     const std::vector<double>& p_grid,
                                     const sdp::Options& opts) {
  std::vector<double> values;
  values.reserve(p_grid.size());
  for (double p : p_grid) {
    values.push_back(robustness(family(p), k, opts).value);
  }
  return values;
}

CertificateDiagnostics verify_certificate(const DensityMatrix& rho, const SdpCertificate& cert) {
  const int d = rho.dim();
  CertificateDiagnostics diag;

  Matrix total = Matrix::Zero(d, d);
  diag.min_block_eigenvalue = 0.0;
  for (std::size_t b = 0; b < cert.blocks.size(); ++b) {
    const auto& idx = cert.blocks[b];
    const Matrix& sigma = cert.primal_blocks[b];
    diag.min_block_eigenvalue = std::min(diag.min_block_eigenvalue, min_eigenvalue(sigma));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) {
        total(idx[r], idx[c]) += sigma(r, c);
      }
    }
  }
  // The assembled sum has support exactly on the index sets by
  // construction; support_violation stays zero unless a block carries
  // entries of the wrong shape.
  diag.support_violation = 0.0;
  for (std::size_t b = 0; b < cert.blocks.size(); ++b) {
    const int k = static_cast<int>(cert.blocks[b].size());
    if (cert.primal_blocks[b].rows() != k || cert.primal_blocks[b].cols() != k) {
      diag.support_violation = std::numeric_limits<double>::infinity();
    }
  }

  diag.slack_min_eigenvalue = min_eigenvalue(total - rho.matrix());

  double primal = 0.0;
  for (const Matrix& sigma : cert.primal_blocks) primal += sigma.trace().real();
  diag.primal_objective = primal - 1.0;

  diag.dual_min_eigenvalue = min_eigenvalue(cert.dual_matrix);
  diag.dual_block_excess = -std::numeric_limits<double>::infinity();
  for (const auto& idx : cert.blocks) {
    const int k = static_cast<int>(idx.size());
    Matrix sub(k, k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) sub(r, c) = cert.dual_matrix(idx[r], idx[c]);
    }
    diag.dual_block_excess = std::max(diag.dual_block_excess, max_eigenvalue(sub) - 1.0);
  }
  diag.dual_objective = (cert.dual_matrix * rho.matrix()).trace().real() - 1.0;
  diag.weak_duality_gap = diag.primal_objective - diag.dual_objective;
  return diag;
}

}  // namespace dephaselab
