#pragma once

#include "dephaselab/operator_core.hpp"

#include <map>
#include <string>
#include <vector>

// Scalar figures of merit: negativity, purity, von Neumann entropy (bits),
// fidelity, concurrence and quantum Fisher information, plus the analytic
// closed forms for dephased bare and Hadamard-encoded GHZ states used as
// oracles against the numeric pipeline.

namespace dephaselab {

/// (||rho^Gamma||_1 - 1)/2, the absolute sum of negative eigenvalues of
/// the partial transpose. Zero on PPT states.
double negativity(const DensityMatrix& rho, const Bipartition& part);

/// Tr[rho^2].
double purity(const DensityMatrix& rho);

/// -sum_k lambda_k log2 lambda_k over the support, in bits.
double entropy(const DensityMatrix& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho_t) rho_e sqrt(rho_t)))^2.
double fidelity(const DensityMatrix& rho_e, const DensityMatrix& rho_t);

/// Wootters concurrence of a 2-qubit state.
double concurrence(const DensityMatrix& rho);

/// The collective phase generator G = 1/2 sum_k sigma_z^(k).
Operator collective_z_generator(int n);

/// Quantum Fisher information for the unitary family e^{-i phi G}:
///   F = 2 sum_{i,j} (l_i - l_j)^2 / (l_i + l_j) |<i|G|j>|^2
/// restricted to pairs with l_i + l_j > 1e-12.
double qfi(const DensityMatrix& rho, const Operator& generator);

/// Analytic predictions for the dephased N-qubit GHZ family at noise p.
/// "Encoded" values refer to the all-Hadamard encode -> dephase -> decode
/// pipeline; spectra are those of the pre-decode state, which the decode
/// unitary leaves unchanged.
struct ClosedFormValues {
  int n = 0;
  double p = 0.0;
  double bare_negativity = 0.0;   // (1-p)^N / 2, any bipartition
  double bare_purity = 0.0;       // (1 + (1-p)^{2N}) / 2
  double bare_entropy = 0.0;      // from the rank-2 spectrum
  double bare_qfi = 0.0;          // N^2 (1-p)^{2N}
  double encoded_purity = 0.0;    // p^N (1-p/2)^N + (1-p+p^2/2)^N
  double encoded_entropy = 0.0;   // from the binomial spectrum
  double encoded_qfi = 0.0;       // N^2 (1-p)^2 + 4N (1-p/2)(p/2)
  double ghz2_negativity = 0.0;   // (1-p)^2 / 2, the encoded lower bound

  /// Spectrum {lambda, multiplicity} of the bare dephased GHZ (rank 2 on
  /// the corner space plus zeros).
  std::vector<std::pair<double, int>> bare_spectrum;
  /// Spectrum of the encoded dephased GHZ before decoding:
  /// lambda_k = (1-p/2)^{N-k}(p/2)^k + (1-p/2)^k(p/2)^{N-k}, k = 0..N-1,
  /// multiplicity C(N-1,k).
  std::vector<std::pair<double, int>> encoded_spectrum;
};

ClosedFormValues closed_form_suite(int n, double p);

/// Entropy in bits of a spectrum given as {value, multiplicity} pairs.
double entropy_from_spectrum(const std::vector<std::pair<double, int>>& spectrum);

/// Bundle of figures of merit for one state, as emitted by sweeps.
struct MetricReport {
  std::map<std::string, double> negativity_by_partition;
  double purity = 0.0;
  double entropy = 0.0;
  double qfi = 0.0;
  double fidelity_to_target = 1.0;
};

MetricReport metric_report(const DensityMatrix& rho, const std::vector<Bipartition>& parts,
                           const DensityMatrix* target = nullptr);

}  // namespace dephaselab
