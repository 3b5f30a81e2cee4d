#include "dephaselab/channels.hpp"

#include "dephaselab/metrics.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace dephaselab;
using testsupport::max_abs_diff;

namespace {

// Independent oracle: full Kraus-sum application of a per-qubit channel
// with single-qubit Kraus pair {k0, k1}. Exponential in N; test sizes only.
Matrix kraus_apply(const Matrix& rho, int n, const Matrix& k0, const Matrix& k1) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (std::size_t choice = 0; choice < (std::size_t{1} << n); ++choice) {
    Matrix full = Matrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
      const bool second = (choice >> (n - 1 - q)) & 1;
      const Matrix& k = second ? k1 : k0;
      Matrix next(full.rows() * 2, full.cols() * 2);
      for (Eigen::Index r = 0; r < full.rows(); ++r) {
        for (Eigen::Index c = 0; c < full.cols(); ++c) {
          next.block(2 * r, 2 * c, 2, 2) = full(r, c) * k;
        }
      }
      full = next;
    }
    out += full * rho * full.adjoint();
  }
  return out;
}

Matrix dephasing_kraus_oracle(const Matrix& rho, int n, double p) {
  Matrix k0 = std::sqrt(1.0 - p / 2.0) * Matrix::Identity(2, 2);
  Matrix k1 = std::sqrt(p / 2.0) * pauli_z().matrix();
  return kraus_apply(rho, n, k0, k1);
}

}  // namespace

TEST_CASE("noise spec validation") {
  CHECK_THROWS_AS(NoiseSpec::uniform(2, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::uniform(2, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec({}), std::invalid_argument);
  CHECK(NoiseSpec({0.2, 0.8}).p(2) == 0.8);
}

TEST_CASE("dephasing endpoints") {
  std::mt19937_64 rng(5);
  DensityMatrix rho = testsupport::random_density(8, rng);
  CHECK(max_abs_diff(dephase(rho, NoiseSpec::uniform(3, 0.0)).matrix(), rho.matrix()) == 0.0);

  // Full dephasing of |+><+| is maximally mixed.
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs_diff(dephase(DensityMatrix(plus), NoiseSpec::uniform(1, 1.0)).matrix(),
                     Matrix::Identity(2, 2) / 2.0) == 0.0);
}

TEST_CASE("GHZ corner element decays as (1-p)^N") {
  for (int n : {2, 3, 5}) {
    DensityMatrix rho(ghz(n).projector().matrix());
    const double p = 0.3;
    DensityMatrix out = dephase(rho, NoiseSpec::uniform(n, p));
    const std::size_t last = (std::size_t{1} << n) - 1;
    CHECK(out.matrix()(0, last).real() ==
          doctest::Approx(0.5 * std::pow(1.0 - p, n)).epsilon(1e-13));
    CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("element-wise damping equals the Kraus sum") {
  std::mt19937_64 rng(13);
  for (double p : {0.0, 0.15, 0.5, 0.97, 1.0}) {
    DensityMatrix rho = testsupport::random_density(8, rng);
    Matrix oracle = dephasing_kraus_oracle(rho.matrix(), 3, p);
    Matrix fast = dephase(rho, NoiseSpec::uniform(3, p)).matrix();
    CHECK(max_abs_diff(fast, oracle) < 1e-12);
  }
}

TEST_CASE("heterogeneous per-qubit noise dampens the right bits") {
  std::mt19937_64 rng(19);
  DensityMatrix rho = testsupport::random_density(4, rng);
  NoiseSpec spec({0.4, 0.0});
  Matrix out = dephase(rho, spec).matrix();
  // Qubit 1 owns the leading bit: rows/cols {0,1} vs {2,3} are damped.
  CHECK(out(0, 2) == rho.matrix()(0, 2) * 0.6);
  CHECK(out(1, 3) == rho.matrix()(1, 3) * 0.6);
  // Qubit 2 untouched.
  CHECK(out(0, 1) == rho.matrix()(0, 1));
  CHECK(out(2, 3) == rho.matrix()(2, 3));
}

TEST_CASE("conjugation basics") {
  std::mt19937_64 rng(29);
  DensityMatrix rho = testsupport::random_density(8, rng);
  CHECK(max_abs_diff(conjugate(rho, identity_op(8)).matrix(), rho.matrix()) == 0.0);

  Operator u = testsupport::random_unitary(8, rng);
  CHECK(purity(conjugate(rho, u)) == doctest::Approx(purity(rho)).epsilon(1e-12));

  CHECK_THROWS_AS(conjugate(rho, Operator(testsupport::random_gaussian_matrix(8, rng))),
                  std::invalid_argument);
}

TEST_CASE("Hadamard conjugation turns dephasing into bit flips") {
  // H Z H = X, so encode -> dephase -> decode is the X-flip channel.
  std::mt19937_64 rng(31);
  const double p = 0.37;
  DensityMatrix rho = testsupport::random_density(4, rng);
  Operator hh = EncodingMask::all_hadamard(2).unitary();
  DensityMatrix sandwich =
      conjugate(dephase(conjugate(rho, hh), NoiseSpec::uniform(2, p)), hh);

  Matrix k0 = std::sqrt(1.0 - p / 2.0) * Matrix::Identity(2, 2);
  Matrix k1 = std::sqrt(p / 2.0) * pauli_x().matrix();
  CHECK(max_abs_diff(sandwich.matrix(), kraus_apply(rho.matrix(), 2, k0, k1)) < 1e-12);
}

TEST_CASE("pipeline validation") {
  EncodingMask mask = EncodingMask::all_hadamard(2);
  EncodingMask other = EncodingMask::from_bitstring("10");
  CHECK_THROWS_AS(Pipeline({DecodeStage{mask}}), std::invalid_argument);
  CHECK_THROWS_AS(Pipeline({EncodeStage{mask}, DecodeStage{other}}), std::invalid_argument);
  CHECK_NOTHROW(Pipeline({EncodeStage{mask}, DephaseStage{NoiseSpec::uniform(2, 0.5)},
                          DecodeStage{mask}}));
}

TEST_CASE("noiseless pipeline reproduces the projector") {
  Pipeline pl = Pipeline::canonical(std::nullopt, NoiseSpec::uniform(4, 0.0));
  DensityMatrix out = run_pipeline(ghz(4), pl);
  CHECK(max_abs_diff(out.matrix(), ghz(4).projector().matrix()) < 1e-14);
}

TEST_CASE("fully dephased encoded GHZ is PPT in every cut") {
  Pipeline pl = Pipeline::canonical(EncodingMask::all_hadamard(4), NoiseSpec::uniform(4, 1.0));
  DensityMatrix out = run_pipeline(ghz(4), pl);
  for (const Bipartition& part : Bipartition::standard_set(4)) {
    CHECK(negativity(out, part) < 1e-12);
  }
}

TEST_CASE("canonical encoded pipeline has the binomial eigenvalue family") {
  const int n = 4;
  for (double p : {0.2, 0.6, 1.0}) {
    Pipeline pl = Pipeline::canonical(EncodingMask::all_hadamard(n), NoiseSpec::uniform(n, p));
    HermitianEig eig = hermitian_eig(run_pipeline(ghz(n), pl).op());

    std::vector<double> expected;
    for (const auto& [value, mult] : closed_form_suite(n, p).encoded_spectrum) {
      for (int i = 0; i < mult; ++i) expected.push_back(value);
    }
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < (1 << n); ++i) {
      CHECK(eig.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("dephasing is idempotent at p=1 and composes as a semigroup") {
  std::mt19937_64 rng(37);
  DensityMatrix rho = testsupport::random_density(8, rng);
  NoiseSpec full = NoiseSpec::uniform(3, 1.0);
  CHECK(max_abs_diff(dephase(dephase(rho, full), full).matrix(),
                     dephase(rho, full).matrix()) < 1e-12);

  const double p1 = 0.35, p2 = 0.6;
  const double combined = 1.0 - (1.0 - p1) * (1.0 - p2);
  CHECK(max_abs_diff(
            dephase(dephase(rho, NoiseSpec::uniform(3, p1)), NoiseSpec::uniform(3, p2)).matrix(),
            dephase(rho, NoiseSpec::uniform(3, combined)).matrix()) < 1e-12);
}

TEST_CASE("dephasing commutes with the phase imprint") {
  std::mt19937_64 rng(43);
  DensityMatrix rho = testsupport::random_density(8, rng);
  NoiseSpec spec = NoiseSpec::uniform(3, 0.45);
  const double phi = 1.234;
  Matrix a = imprint_phase(dephase(rho, spec), phi).matrix();
  Matrix b = dephase(imprint_phase(rho, phi), spec).matrix();
  CHECK(max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("channel outputs stay PSD with unit trace") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 4; ++trial) {
    DensityMatrix rho = testsupport::random_density(8, rng);
    DensityMatrix out = dephase(rho, NoiseSpec({0.1, 0.8, 0.5}));
    CHECK(out.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hermitian_eig(out.op()).eigenvalues.minCoeff() > -1e-10);
  }
}
