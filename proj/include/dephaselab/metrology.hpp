#pragma once

#include "dephaselab/channels.hpp"
#include "dephaselab/metrics.hpp"
#include "dephaselab/states.hpp"

#include <optional>
#include <string>
#include <vector>

// Noisy phase estimation: fringe curves <+...+>(phi, p), estimator
// variance by error propagation at the steepest point, and QFI sweeps
// against the shot-noise (N) and Heisenberg (N^2) limits.

namespace dephaselab {

/// A probe preparation: initial pure state plus an optional local encoding
/// that wraps the dephasing stage (encode -> dephase -> decode -> phase).
struct ProbeFamily {
  std::string name;
  PureState initial;
  std::optional<EncodingMask> mask;

  int num_qubits() const { return initial.num_qubits(); }

  /// encode -> dephase(p) -> decode.
  DensityMatrix noisy_state(double p) const;

  /// noisy_state followed by the collective phase imprint.
  DensityMatrix probe_state(double p, double phi) const;
};

/// Families by name: ghz, ghz_encoded, cluster, cluster_encoded, product,
/// graph (requires a GraphSpec). A mask override replaces the default
/// encoding; giving one to a bare family makes it encoded with that mask.
ProbeFamily make_family(const std::string& name, int n_qubits,
                        const std::optional<EncodingMask>& mask_override = {},
                        const std::optional<GraphSpec>& graph = {});

/// Expectation of the all-|+> projector versus imprinted phase, at fixed
/// noise strength. Values are probabilities in [0,1].
struct FringeCurve {
  ProbeFamily family;
  double p = 0.0;
  std::vector<double> phi_grid;
  std::vector<double> expectation;
};

FringeCurve fringe(const ProbeFamily& family, double p, const std::vector<double>& phi_grid);

/// Single-point evaluation of the fringe model.
double fringe_value(const ProbeFamily& family, double p, double phi);

// Closed forms for the 4-qubit GHZ fringes (bare at any p, encoded at
// full dephasing) and their phi-derivatives.
double ghz4_bare_fringe(double phi, double p);
double ghz4_bare_fringe_slope(double phi, double p);
double ghz4_encoded_fringe_full_dephasing(double phi);
double ghz4_encoded_fringe_full_dephasing_slope(double phi);

/// Error-propagation variance Var[phi] = Var[eps] / |d eps/d phi|^2 at the
/// steepest point of the fringe, with binomial Var[eps] = eps(1-eps)/nu.
struct VarianceReport {
  double phi_star = 0.0;  // steepest point, smallest phi on ties
  double epsilon = 0.0;   // fringe value there
  double slope = 0.0;     // d eps / d phi there
  double var_phi = 0.0;   // +infinity on flat fringes
  long long shots = 0;
};

/// The curve must be dense near the steepest point (grid step <= 0.01 rad);
/// the derivative itself is refined by a central difference with
/// h = 1e-3 on the model curve.
VarianceReport phase_variance(const FringeCurve& curve, long long nu);

struct QfiSweepRow {
  int n = 0;
  double p = 0.0;
  double qfi_numeric = 0.0;
  double qfi_closed_form = 0.0;  // NaN for families without one
  double shot_noise_limit = 0.0;
  double heisenberg_limit = 0.0;
};

/// QFI of the noisy state over (N, p); n <= 10 keeps the dense simulation
/// affordable. Closed forms attach to the ghz and ghz_encoded families.
std::vector<QfiSweepRow> qfi_sweep(const std::string& family_name, const std::vector<int>& n_values,
                                   const std::vector<double>& p_grid);

/// p where the bare-GHZ QFI crosses the shot-noise limit, by bisection on
/// the numeric curve.
double bare_qfi_snl_crossover(int n, double tol = 1e-9);

}  // namespace dephaselab
