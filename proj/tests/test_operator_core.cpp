#include "dephaselab/operator_core.hpp"

#include "dephaselab/channels.hpp"
#include "dephaselab/states.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dephaselab;
using testsupport::max_abs_diff;

TEST_CASE("operator construction enforces the power-of-two invariant") {
  CHECK_THROWS_AS(Operator(Matrix::Identity(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(Operator(Matrix::Identity(2, 4)), std::invalid_argument);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Operator{bad}, std::invalid_argument);
  CHECK(Operator(Matrix::Identity(8, 8)).num_qubits() == 3);
}

TEST_CASE("kron identity and parity cases") {
  Operator i2 = identity_op(2);
  CHECK(max_abs_diff(kron(i2, i2).matrix(), Matrix::Identity(4, 4)) == 0.0);

  // sigma_z (x) sigma_z leaves |11> invariant with eigenvalue +1.
  Operator zz = kron(pauli_z(), pauli_z());
  Vector e11 = Vector::Zero(4);
  e11[3] = 1.0;
  CHECK((zz.matrix() * e11 - e11).norm() == doctest::Approx(0.0).epsilon(1e-15));

  // H (x) H |00> has all four amplitudes equal to 1/2.
  Operator hh = kron(hadamard_gate(), hadamard_gate());
  for (int r = 0; r < 4; ++r) {
    CHECK(hh.matrix()(r, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hh.matrix()(r, 0).imag() == 0.0);
  }
}

TEST_CASE("kron is associative") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Operator a(testsupport::random_gaussian_matrix(2, rng));
    Operator b(testsupport::random_gaussian_matrix(4, rng));
    Operator c(testsupport::random_gaussian_matrix(2, rng));
    CHECK(max_abs_diff(kron(kron(a, b), c).matrix(), kron(a, kron(b, c)).matrix()) < 1e-14);
  }
}

TEST_CASE("kron ordering puts qubit 1 in the most significant position") {
  // Z (x) I is diagonal (+1,+1,-1,-1): qubit 1 owns the leading bit.
  Operator zi = kron(pauli_z(), identity_op(2));
  CHECK(zi.matrix()(0, 0).real() == 1.0);
  CHECK(zi.matrix()(1, 1).real() == 1.0);
  CHECK(zi.matrix()(2, 2).real() == -1.0);
  CHECK(zi.matrix()(3, 3).real() == -1.0);
}

TEST_CASE("partial transpose fixes diagonal states and is an involution") {
  Bipartition cut({1}, 2);
  Operator mixed(Matrix::Identity(4, 4) / 4.0);
  CHECK(max_abs_diff(partial_transpose(mixed, cut).matrix(), mixed.matrix()) == 0.0);

  std::mt19937_64 rng(17);
  DensityMatrix rho = testsupport::random_density(8, rng);
  Bipartition cut3({2}, 3);
  Operator once = partial_transpose(rho.op(), cut3);
  Operator twice = partial_transpose(once, cut3);
  CHECK(max_abs_diff(twice.matrix(), rho.matrix()) < 1e-14);

  // Trace and Hermiticity preserved, spectrum real.
  CHECK(once.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hermiticity_defect(once.matrix()) < 1e-12);
}

TEST_CASE("partial transpose of the singlet witnesses entanglement") {
  Operator rho = singlet().projector();
  Operator pt = partial_transpose(rho, Bipartition({1}, 2));
  HermitianEig eig = hermitian_eig(pt);
  CHECK(eig.eigenvalues.minCoeff() == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("partial trace recovers marginals") {
  std::mt19937_64 rng(23);
  DensityMatrix a = testsupport::random_density(2, rng);
  DensityMatrix b = testsupport::random_density(4, rng);
  Operator joint = kron(a.op(), b.op());
  CHECK(max_abs_diff(partial_trace(joint, {1}).matrix(), a.matrix()) < 1e-13);
  CHECK(max_abs_diff(partial_trace(joint, {2, 3}).matrix(), b.matrix()) < 1e-13);

  // GHZ_2 marginal is maximally mixed.
  Operator ghz2 = ghz(2).projector();
  CHECK(max_abs_diff(partial_trace(ghz2, {1}).matrix(), Matrix::Identity(2, 2) / 2.0) < 1e-14);

  // Unit trace preserved on a random state.
  DensityMatrix rho = testsupport::random_density(16, rng);
  CHECK(partial_trace(rho.op(), {2, 4}).matrix().trace().real() ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(partial_trace(rho.op(), {}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(rho.op(), {5}), std::invalid_argument);
}

TEST_CASE("hermitian_eig meets its reconstruction contract") {
  HermitianEig zeig = hermitian_eig(pauli_z());
  CHECK(zeig.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(zeig.eigenvalues[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(31);
  DensityMatrix rho = testsupport::random_density(32, rng);
  HermitianEig eig = hermitian_eig(rho.op());
  Matrix rebuilt =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.adjoint();
  CHECK(max_abs_diff(rebuilt, rho.matrix()) < 1e-10);
  CHECK(max_abs_diff(eig.eigenvectors.adjoint() * eig.eigenvectors,
                     Matrix::Identity(32, 32)) < 1e-10);

  // Density-matrix spectra sum to one and stay in [0,1].
  CHECK(eig.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eig.eigenvalues.minCoeff() > -1e-10);
  CHECK(eig.eigenvalues.maxCoeff() < 1.0 + 1e-10);

  CHECK_THROWS_AS(hermitian_eig(Operator(testsupport::random_gaussian_matrix(4, rng))),
                  std::invalid_argument);
}

TEST_CASE("dephased GHZ spectra match the analytic corner values") {
  // Bare GHZ_4 at p = 0.5: nonzero eigenvalues (1 +- 0.5^4)/2.
  DensityMatrix rho(ghz(4).projector().matrix());
  DensityMatrix dephased = dephase(rho, NoiseSpec::uniform(4, 0.5));
  HermitianEig eig = hermitian_eig(dephased.op());
  CHECK(eig.eigenvalues[14] == doctest::Approx(0.46875).epsilon(1e-12));
  CHECK(eig.eigenvalues[15] == doctest::Approx(0.53125).epsilon(1e-12));
  CHECK(std::abs(eig.eigenvalues[13]) < 1e-12);

  // Encoded GHZ_4 at p = 1, before decoding: flat spectrum 2^{1-N} with
  // total multiplicity 8.
  PureState encoded = apply_mask(ghz(4), EncodingMask::all_hadamard(4));
  DensityMatrix enc_dephased =
      dephase(DensityMatrix(encoded.projector().matrix()), NoiseSpec::uniform(4, 1.0));
  HermitianEig enc_eig = hermitian_eig(enc_dephased.op());
  int multiplicity = 0;
  for (int i = 0; i < 16; ++i) {
    if (std::abs(enc_eig.eigenvalues[i] - 0.125) < 1e-12) ++multiplicity;
  }
  CHECK(multiplicity == 8);
}

TEST_CASE("unitary conjugation preserves the spectrum") {
  std::mt19937_64 rng(37);
  DensityMatrix rho = testsupport::random_density(8, rng);
  Operator u = testsupport::random_unitary(8, rng);
  HermitianEig before = hermitian_eig(rho.op());
  HermitianEig after =
      hermitian_eig(Operator(u.matrix() * rho.matrix() * u.matrix().adjoint()));
  for (int i = 0; i < 8; ++i) {
    CHECK(after.eigenvalues[i] == doctest::Approx(before.eigenvalues[i]).epsilon(1e-9));
  }
}

TEST_CASE("matrix_sqrt and matrix_log2 follow the spectral calculus") {
  CHECK(max_abs_diff(matrix_sqrt(identity_op(4)).matrix(), Matrix::Identity(4, 4)) < 1e-12);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 4.0 / 13.0;
  diag(1, 1) = 9.0 / 13.0;
  Operator s = matrix_sqrt(Operator(diag));
  CHECK(s.matrix()(0, 0).real() == doctest::Approx(std::sqrt(4.0 / 13.0)).epsilon(1e-14));
  CHECK(s.matrix()(1, 1).real() == doctest::Approx(std::sqrt(9.0 / 13.0)).epsilon(1e-14));

  // A rank-1 projector is its own square root; log2 vanishes on it.
  std::mt19937_64 rng(41);
  PureState psi = testsupport::random_pure(8, rng);
  Operator proj = psi.projector();
  CHECK(max_abs_diff(matrix_sqrt(proj).matrix(), proj.matrix()) < 1e-10);
  CHECK(matrix_log2(proj).matrix().cwiseAbs().maxCoeff() < 1e-10);

  // sqrt squared rebuilds the input.
  DensityMatrix rho = testsupport::random_density(16, rng);
  Operator root = matrix_sqrt(rho.op());
  CHECK(max_abs_diff(root.matrix() * root.matrix(), rho.matrix()) < 1e-9);

  Matrix indefinite = Matrix::Zero(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(matrix_sqrt(Operator(indefinite)), std::invalid_argument);
}

TEST_CASE("bipartitions validate and label themselves") {
  CHECK_THROWS_AS(Bipartition({}, 4), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition({1, 2, 3, 4}, 4), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition({0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition({5}, 4), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition({2, 2}, 4), std::invalid_argument);

  Bipartition part({3, 1}, 4);
  CHECK(part.label() == "13v24");
  CHECK(part.side_b() == std::vector<int>{2, 4});
  CHECK(Bipartition::standard_set(4).size() == 7);
  CHECK(Bipartition::standard_set(5).size() == 5);
}
