#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

// Dense complex linear algebra kernel for multi-qubit operators.
//
// Index convention used throughout the library: qubit 1 is the most
// significant bit of the computational-basis index, so |0...0> is basis
// vector 0 and |1...1> is basis vector dim-1.

namespace dephaselab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense square complex matrix over an N-qubit Hilbert space (dim = 2^N).
/// The universal carrier for states, gates and observables. Immutable by
/// convention: operations return new values.
class Operator {
 public:
  explicit Operator(Matrix m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  int num_qubits() const { return num_qubits_; }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
  int num_qubits_;
};

/// Spectral decomposition of a Hermitian operator. Eigenvalues ascending,
/// eigenvector columns orthonormal.
struct HermitianEig {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
};

/// Hermitian unit-trace operator: the central state representation.
/// Hermiticity and trace are enforced at construction (1e-10 tolerance);
/// positive semidefiniteness is a contract on the producing operations.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  int num_qubits() const { return num_qubits_; }
  const Matrix& matrix() const { return mat_; }
  Operator op() const { return Operator(mat_); }

  static DensityMatrix maximally_mixed(int n_qubits);

 private:
  Matrix mat_;
  int num_qubits_;
};

/// A bipartition of the qubit register {1..N} into side_a and its
/// complement. Indices are 1-based, matching the qubit-1-is-MSB convention.
class Bipartition {
 public:
  Bipartition(std::vector<int> side_a, int n_qubits);

  const std::vector<int>& side_a() const { return side_a_; }
  std::vector<int> side_b() const;
  int n_qubits() const { return n_qubits_; }

  /// "1v234"-style label used in CSV column headers.
  std::string label() const;

  /// All 1-vs-rest partitions, plus the three 2-vs-2 ones when n = 4.
  static std::vector<Bipartition> standard_set(int n_qubits);

 private:
  std::vector<int> side_a_;
  int n_qubits_;
};

// -- constructors for common operators --------------------------------------

Operator identity_op(int dim);
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator hadamard_gate();

// -- core operations ---------------------------------------------------------

/// Kronecker product; a's qubits become the most significant ones.
Operator kron(const Operator& a, const Operator& b);

/// Transposition applied on the side_a subsystem only. Trace and
/// Hermiticity are preserved; negative eigenvalues of the result witness
/// entanglement across the cut.
Operator partial_transpose(const Operator& rho, const Bipartition& part);

/// Trace out every qubit not in `keep` (1-based indices). The kept qubits
/// retain their relative order.
Operator partial_trace(const Operator& rho, const std::vector<int>& keep);

/// Full spectral decomposition. Requires ||a - a^dag||_max <= 1e-10.
HermitianEig hermitian_eig(const Operator& a);

/// Spectral square root of a PSD operator. Eigenvalues in [-1e-10, 0) are
/// clipped to zero; anything more negative is an error.
Operator matrix_sqrt(const Operator& a);

/// Spectral log2 of a PSD operator, taken on the support only (zero
/// eigenvalues map to zero by convention).
Operator matrix_log2(const Operator& a);

// -- small helpers -----------------------------------------------------------

/// Max-norm distance from Hermiticity.
double hermiticity_defect(const Matrix& m);

/// Max-norm distance from unitarity (||u u^dag - I||_max).
double unitarity_defect(const Matrix& u);

/// num_qubits for a power-of-two dimension; throws otherwise.
int qubits_from_dim(Eigen::Index dim);

}  // namespace dephaselab
