#include "dephaselab/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace dephaselab {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kEigenvalueClipTol = 1e-10;

}  // namespace

int qubits_from_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("operator dimension must be a power of two >= 2, got " +
                                std::to_string(dim));
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

Operator::Operator(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) {
    throw std::invalid_argument("operator matrix must be square");
  }
  num_qubits_ = qubits_from_dim(mat_.rows());
  if (!mat_.allFinite()) {
    throw std::invalid_argument("operator entries must be finite");
  }
}

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) {
    throw std::invalid_argument("density matrix must be square");
  }
  num_qubits_ = qubits_from_dim(mat_.rows());
  if (!mat_.allFinite()) {
    throw std::invalid_argument("density matrix entries must be finite");
  }
  if (hermiticity_defect(mat_) > kHermitianTol) {
    throw std::invalid_argument("density matrix must be Hermitian");
  }
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > kHermitianTol) {
    throw std::invalid_argument("density matrix must have unit trace, got " +
                                std::to_string(tr));
  }
  // Absorb roundoff so downstream spectral code sees an exactly Hermitian
  // matrix.
  mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

Bipartition::Bipartition(std::vector<int> side_a, int n_qubits)
    : side_a_(std::move(side_a)), n_qubits_(n_qubits) {
  if (n_qubits_ < 2) {
    throw std::invalid_argument("bipartition needs at least 2 qubits");
  }
  if (side_a_.empty() || static_cast<int>(side_a_.size()) >= n_qubits_) {
    throw std::invalid_argument("side_a must be a non-empty proper subset of the register");
  }
  std::sort(side_a_.begin(), side_a_.end());
  for (std::size_t i = 0; i < side_a_.size(); ++i) {
    if (side_a_[i] < 1 || side_a_[i] > n_qubits_) {
      throw std::invalid_argument("bipartition qubit index out of range");
    }
    if (i > 0 && side_a_[i] == side_a_[i - 1]) {
      throw std::invalid_argument("duplicate qubit index in bipartition");
    }
  }
}

std::vector<int> Bipartition::side_b() const {
  std::vector<int> b;
  std::size_t j = 0;
  for (int q = 1; q <= n_qubits_; ++q) {
    if (j < side_a_.size() && side_a_[j] == q) {
      ++j;
    } else {
      b.push_back(q);
    }
  }
  return b;
}

std::string Bipartition::label() const {
  std::string s;
  for (int q : side_a_) s += std::to_string(q);
  s += 'v';
  for (int q : side_b()) s += std::to_string(q);
  return s;
}

std::vector<Bipartition> Bipartition::standard_set(int n_qubits) {
  std::vector<Bipartition> parts;
  for (int q = 1; q <= n_qubits; ++q) {
    parts.emplace_back(std::vector<int>{q}, n_qubits);
  }
  if (n_qubits == 4) {
    parts.emplace_back(std::vector<int>{1, 2}, 4);
    parts.emplace_back(std::vector<int>{1, 3}, 4);
    parts.emplace_back(std::vector<int>{1, 4}, 4);
  }
  return parts;
}

Operator identity_op(int dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Operator(m);
}

Operator pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return Operator(m);
}

Operator pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return Operator(m);
}

Operator hadamard_gate() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << s, s, s, -s;
  return Operator(m);
}

Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index da = a.dim(), db = b.dim();
  Matrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return Operator(std::move(out));
}

Operator partial_transpose(const Operator& rho, const Bipartition& part) {
  const int n = rho.num_qubits();
  if (part.n_qubits() != n) {
    throw std::invalid_argument("bipartition register size does not match operator");
  }
  if (hermiticity_defect(rho.matrix()) > kHermitianTol) {
    throw std::invalid_argument("partial_transpose expects a Hermitian operator");
  }
  // Mask of side-A bit positions within the basis index.
  std::size_t mask = 0;
  for (int q : part.side_a()) mask |= (std::size_t{1} << (n - q));

  const std::size_t d = static_cast<std::size_t>(rho.dim());
  Matrix out(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      // Swap the side-A bits between row and column index.
      const std::size_t r2 = (r & ~mask) | (c & mask);
      const std::size_t c2 = (c & ~mask) | (r & mask);
      out(r2, c2) = rho.matrix()(r, c);
    }
  }
  return Operator(std::move(out));
}

Operator partial_trace(const Operator& rho, const std::vector<int>& keep) {
  if (keep.empty()) {
    throw std::invalid_argument("partial_trace: keep set must be non-empty");
  }
  const int n = rho.num_qubits();
  std::set<int> keep_set(keep.begin(), keep.end());
  for (int q : keep_set) {
    if (q < 1 || q > n) {
      throw std::invalid_argument("partial_trace: qubit index out of range");
    }
  }
  std::vector<int> kept(keep_set.begin(), keep_set.end());
  std::vector<int> traced;
  for (int q = 1; q <= n; ++q) {
    if (!keep_set.count(q)) traced.push_back(q);
  }
  const int nk = static_cast<int>(kept.size());
  const int nt = static_cast<int>(traced.size());
  const std::size_t dk = std::size_t{1} << nk;
  const std::size_t dt = std::size_t{1} << nt;

  // Scatter the bits of a reduced index back into the full-register index.
  auto expand = [n](std::size_t packed, const std::vector<int>& qubits) {
    std::size_t x = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      const std::size_t bit = (packed >> (qubits.size() - 1 - i)) & 1u;
      x |= bit << (n - qubits[i]);
    }
    return x;
  };

  std::vector<std::size_t> kept_bits(dk), traced_bits(dt);
  for (std::size_t i = 0; i < dk; ++i) kept_bits[i] = expand(i, kept);
  for (std::size_t t = 0; t < dt; ++t) traced_bits[t] = expand(t, traced);

  Matrix out = Matrix::Zero(dk, dk);
  for (std::size_t r = 0; r < dk; ++r) {
    for (std::size_t c = 0; c < dk; ++c) {
      Complex sum = 0;
      for (std::size_t t = 0; t < dt; ++t) {
        sum += rho.matrix()(kept_bits[r] | traced_bits[t], kept_bits[c] | traced_bits[t]);
      }
      out(r, c) = sum;
    }
  }
  return Operator(std::move(out));
}

HermitianEig hermitian_eig(const Operator& a) {
  if (hermiticity_defect(a.matrix()) > kHermitianTol) {
    throw std::invalid_argument("hermitian_eig expects a Hermitian operator");
  }
  // Symmetrize before factorizing so roundoff in the input cannot leak
  // imaginary parts into the spectrum.
  Matrix sym = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian eigendecomposition failed to converge");
  }
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

// Shared spectral-function machinery for sqrt and log2.
Operator spectral_apply(const Operator& a, double (*f)(double), const char* what) {
  HermitianEig eig = hermitian_eig(a);
  Eigen::VectorXd vals = eig.eigenvalues;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -kEigenvalueClipTol) {
      throw std::invalid_argument(std::string(what) + ": eigenvalue " +
                                  std::to_string(vals[i]) + " below PSD tolerance");
    }
    if (vals[i] < 0.0) vals[i] = 0.0;
    vals[i] = f(vals[i]);
  }
  Matrix out = eig.eigenvectors * vals.asDiagonal() * eig.eigenvectors.adjoint();
  return Operator(std::move(out));
}

double sqrt_on_support(double x) { return std::sqrt(x); }
double log2_on_support(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

}  // namespace

Operator matrix_sqrt(const Operator& a) { return spectral_apply(a, sqrt_on_support, "matrix_sqrt"); }

Operator matrix_log2(const Operator& a) { return spectral_apply(a, log2_on_support, "matrix_log2"); }

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Matrix& u) {
  Matrix id = Matrix::Identity(u.rows(), u.cols());
  return (u * u.adjoint() - id).cwiseAbs().maxCoeff();
}

}  // namespace dephaselab
