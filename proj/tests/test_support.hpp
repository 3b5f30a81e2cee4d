#pragma once

#include "dephaselab/operator_core.hpp"
#include "dephaselab/states.hpp"

#include <random>

// Shared randomized-input helpers for the test suites. All draws are from
// explicitly seeded engines so failures replay.

namespace testsupport {

using dephaselab::Complex;
using dephaselab::Matrix;
using dephaselab::Vector;

inline Matrix random_gaussian_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      g(r, c) = Complex(gauss(rng), gauss(rng));
    }
  }
  return g;
}

/// Random full-rank density matrix from a Ginibre draw, rho = GG^dag / tr.
inline dephaselab::DensityMatrix random_density(int dim, std::mt19937_64& rng) {
  Matrix g = random_gaussian_matrix(dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return dephaselab::DensityMatrix(rho);
}

/// Haar-ish random unitary from the QR of a Ginibre draw.
inline dephaselab::Operator random_unitary(int dim, std::mt19937_64& rng) {
  Matrix g = random_gaussian_matrix(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return dephaselab::Operator(q);
}

inline dephaselab::PureState random_pure(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector amp(dim);
  for (int i = 0; i < dim; ++i) amp[i] = Complex(gauss(rng), gauss(rng));
  amp /= amp.norm();
  return dephaselab::PureState(amp);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testsupport
