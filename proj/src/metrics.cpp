#include "dephaselab/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace dephaselab {

namespace {
constexpr double kQfiKernelCutoff = 1e-12;
constexpr double kEntropyCutoff = 1e-15;
}

double negativity(const DensityMatrix& rho, const Bipartition& part) {
  Operator pt = partial_transpose(rho.op(), part);
  HermitianEig eig = hermitian_eig(pt);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues[i] < 0.0) neg -= eig.eigenvalues[i];
  }
  return neg;
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double entropy(const DensityMatrix& rho) {
  HermitianEig eig = hermitian_eig(rho.op());
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double l = eig.eigenvalues[i];
    if (l > kEntropyCutoff) s -= l * std::log2(l);
  }
  return s;
}

double fidelity(const DensityMatrix& rho_e, const DensityMatrix& rho_t) {
  if (rho_e.dim() != rho_t.dim()) {
    throw std::invalid_argument("fidelity dimension mismatch");
  }
  Operator sqrt_t = matrix_sqrt(rho_t.op());
  Operator inner(sqrt_t.matrix() * rho_e.matrix() * sqrt_t.matrix());
  HermitianEig eig = hermitian_eig(inner);
  double tr_sqrt = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues[i] > 0.0) tr_sqrt += std::sqrt(eig.eigenvalues[i]);
  }
  return std::clamp(tr_sqrt * tr_sqrt, 0.0, 1.0);
}

double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("concurrence is defined for 2-qubit states only");
  }
  Operator yy = kron(pauli_y(), pauli_y());
  // Spin-flipped state rho~ = (Y(x)Y) rho* (Y(x)Y).
  Matrix rho_tilde = yy.matrix() * rho.matrix().conjugate() * yy.matrix();
  // Eigenvalues of rho rho~ equal those of the Hermitian sqrt(rho) rho~ sqrt(rho).
  Operator s = matrix_sqrt(rho.op());
  HermitianEig eig = hermitian_eig(Operator(s.matrix() * rho_tilde * s.matrix()));
  double lambda[4];
  for (int i = 0; i < 4; ++i) {
    lambda[i] = std::sqrt(std::max(0.0, eig.eigenvalues[3 - i]));  // descending
  }
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

Operator collective_z_generator(int n) {
  const std::size_t d = std::size_t{1} << n;
  Matrix g = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < d; ++x) {
    const int ones = std::popcount(x);
    g(x, x) = 0.5 * (n - 2 * ones);
  }
  return Operator(std::move(g));
}

double qfi(const DensityMatrix& rho, const Operator& generator) {
  if (generator.dim() != rho.dim()) {
    throw std::invalid_argument("qfi generator dimension mismatch");
  }
  if (hermiticity_defect(generator.matrix()) > 1e-10) {
    throw std::invalid_argument("qfi generator must be Hermitian");
  }
  HermitianEig eig = hermitian_eig(rho.op());
  const Eigen::Index d = eig.eigenvalues.size();
  // G in the eigenbasis of rho.
  Matrix g = eig.eigenvectors.adjoint() * generator.matrix() * eig.eigenvectors;
  double f = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double li = eig.eigenvalues[i];
      const double lj = eig.eigenvalues[j];
      if (li + lj > kQfiKernelCutoff) {
        const double diff = li - lj;
        f += 2.0 * diff * diff / (li + lj) * std::norm(g(i, j));
      }
    }
  }
  return f;
}

double entropy_from_spectrum(const std::vector<std::pair<double, int>>& spectrum) {
  double s = 0.0;
  for (const auto& [l, mult] : spectrum) {
    if (l > kEntropyCutoff) s -= mult * l * std::log2(l);
  }
  return s;
}

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

ClosedFormValues closed_form_suite(int n, double p) {
  if (n < 2) throw std::invalid_argument("closed_form_suite needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("closed_form_suite needs p in [0,1]");

  ClosedFormValues v;
  v.n = n;
  v.p = p;

  const double q = 1.0 - p;
  const double qn = std::pow(q, n);

  v.bare_negativity = 0.5 * qn;
  v.ghz2_negativity = 0.5 * q * q;
  v.bare_purity = 0.5 * (1.0 + std::pow(q, 2 * n));
  v.bare_qfi = n * n * std::pow(q, 2 * n);

  const double l0 = 0.5 * (1.0 - qn);
  v.bare_spectrum = {{l0, 1}, {1.0 - l0, 1}, {0.0, (1 << n) - 2}};
  v.bare_entropy = entropy_from_spectrum(v.bare_spectrum);

  const double a = 1.0 - 0.5 * p;  // 1 - p/2
  const double b = 0.5 * p;        // p/2
  v.encoded_purity = std::pow(p, n) * std::pow(a, n) + std::pow(1.0 - p + 0.5 * p * p, n);
  v.encoded_qfi = n * n * q * q + 4.0 * n * a * b;

  int total_mult = 0;
  for (int k = 0; k <= n - 1; ++k) {
    const double lk = std::pow(a, n - k) * std::pow(b, k) + std::pow(a, k) * std::pow(b, n - k);
    const int mult = static_cast<int>(std::lround(binomial(n - 1, k)));
    v.encoded_spectrum.emplace_back(lk, mult);
    total_mult += mult;
  }
  v.encoded_spectrum.emplace_back(0.0, (1 << n) - total_mult);
  v.encoded_entropy = entropy_from_spectrum(v.encoded_spectrum);

  return v;
}

MetricReport metric_report(const DensityMatrix& rho, const std::vector<Bipartition>& parts,
                           const DensityMatrix* target) {
  MetricReport report;
  for (const Bipartition& part : parts) {
    report.negativity_by_partition[part.label()] = negativity(rho, part);
  }
  report.purity = purity(rho);
  report.entropy = entropy(rho);
  report.qfi = qfi(rho, collective_z_generator(rho.num_qubits()));
  if (target != nullptr) {
    report.fidelity_to_target = fidelity(rho, *target);
  }
  return report;
}

}  // namespace dephaselab
