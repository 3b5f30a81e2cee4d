#include "dephaselab/metrology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dephaselab {

DensityMatrix ProbeFamily::noisy_state(double p) const {
  return run_pipeline(initial,
                      Pipeline::canonical(mask, NoiseSpec::uniform(num_qubits(), p)));
}

DensityMatrix ProbeFamily::probe_state(double p, double phi) const {
  return run_pipeline(initial,
                      Pipeline::canonical(mask, NoiseSpec::uniform(num_qubits(), p), phi));
}

ProbeFamily make_family(const std::string& name, int n_qubits,
                        const std::optional<EncodingMask>& mask_override,
                        const std::optional<GraphSpec>& graph) {
  auto masked = [&](EncodingMask default_mask) -> std::optional<EncodingMask> {
    if (mask_override) {
      if (mask_override->size() != n_qubits) {
        throw std::invalid_argument("mask length does not match qubit count");
      }
      return *mask_override;
    }
    return default_mask;
  };

  if (name == "ghz") {
    return ProbeFamily{name, ghz(n_qubits), mask_override};
  }
  if (name == "ghz_encoded") {
    return ProbeFamily{name, ghz(n_qubits), masked(EncodingMask::all_hadamard(n_qubits))};
  }
  if (name == "cluster") {
    return ProbeFamily{name, graph_state(GraphSpec::path(n_qubits)), mask_override};
  }
  if (name == "cluster_encoded") {
    return ProbeFamily{name, graph_state(GraphSpec::path(n_qubits)),
                       masked(EncodingMask::cluster_default(n_qubits))};
  }
  if (name == "product") {
    return ProbeFamily{name, plus_state(n_qubits), mask_override};
  }
  if (name == "graph") {
    if (!graph) {
      throw std::invalid_argument("graph family requires a graph spec");
    }
    if (graph->n_qubits() != n_qubits) {
      throw std::invalid_argument("graph spec qubit count does not match --n");
    }
    return ProbeFamily{name, graph_state(*graph), mask_override};
  }
  throw std::invalid_argument("unknown family: " + name);
}

namespace {

// Fixed-noise fringe model: the noisy state is computed once, phi points
// are O(d^2) quadratic forms. Tr[rho_phi P_+] = <v| rho |v> with
// |v> = U_phi^dag |+...+> and U_phi diagonal.
class FringeModel {
 public:
  FringeModel(const ProbeFamily& family, double p)
      : rho_(family.noisy_state(p)), n_(family.num_qubits()) {}

  double at(double phi) const {
    const std::size_t d = std::size_t{1} << n_;
    const double amp = std::pow(2.0, -0.5 * n_);
    Vector v(d);
    for (std::size_t x = 0; x < d; ++x) {
      const int ones = std::popcount(x);
      v[x] = std::polar(amp, -0.5 * phi * (2 * ones - n_));
    }
    const double value = (v.adjoint() * rho_.matrix() * v).value().real();
    return std::clamp(value, 0.0, 1.0);
  }

 private:
  DensityMatrix rho_;
  int n_;
};

}  // namespace

double fringe_value(const ProbeFamily& family, double p, double phi) {
  return FringeModel(family, p).at(phi);
}

FringeCurve fringe(const ProbeFamily& family, double p, const std::vector<double>& phi_grid) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("fringe noise strength must lie in [0,1]");
  }
  FringeModel model(family, p);
  FringeCurve curve{family, p, phi_grid, {}};
  curve.expectation.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    curve.expectation.push_back(model.at(phi));
  }
  return curve;
}

double ghz4_bare_fringe(double phi, double p) {
  return (std::pow(p - 1.0, 4) * std::cos(4.0 * phi) + 1.0) / 16.0;
}

double ghz4_bare_fringe_slope(double phi, double p) {
  return -std::pow(p - 1.0, 4) * std::sin(4.0 * phi) / 4.0;
}

double ghz4_encoded_fringe_full_dephasing(double phi) {
  return (4.0 * std::cos(2.0 * phi) + std::cos(4.0 * phi) + 11.0) / 128.0;
}

double ghz4_encoded_fringe_full_dephasing_slope(double phi) {
  return (-8.0 * std::sin(2.0 * phi) - 4.0 * std::sin(4.0 * phi)) / 128.0;
}

VarianceReport phase_variance(const FringeCurve& curve, long long nu) {
  if (curve.phi_grid.size() < 3) {
    throw std::invalid_argument("phase_variance needs at least three grid points");
  }
  if (nu < 1) {
    throw std::invalid_argument("phase_variance needs at least one shot");
  }
  const double h = 1e-3;
  FringeModel model(curve.family, curve.p);

  // Model-curve slope at every grid point; the steepest one is phi*.
  std::size_t best = 0;
  double best_slope = -1.0;
  std::vector<double> slopes(curve.phi_grid.size());
  for (std::size_t i = 0; i < curve.phi_grid.size(); ++i) {
    const double phi = curve.phi_grid[i];
    slopes[i] = (model.at(phi + h) - model.at(phi - h)) / (2.0 * h);
    if (std::abs(slopes[i]) > best_slope + 1e-12) {
      best_slope = std::abs(slopes[i]);
      best = i;
    }
  }
  // Smallest phi on ties.
  for (std::size_t i = 0; i < best; ++i) {
    if (std::abs(slopes[i]) >= best_slope - 1e-12) {
      best = i;
      break;
    }
  }

  // Density contract near phi*.
  for (std::size_t i = 0; i + 1 < curve.phi_grid.size(); ++i) {
    const double step = curve.phi_grid[i + 1] - curve.phi_grid[i];
    const bool near = std::abs(curve.phi_grid[i] - curve.phi_grid[best]) < 0.1 ||
                      std::abs(curve.phi_grid[i + 1] - curve.phi_grid[best]) < 0.1;
    if (near && step > 0.01 + 1e-12) {
      throw std::invalid_argument("phase_variance: grid step exceeds 0.01 rad near phi*");
    }
  }

  VarianceReport report;
  report.phi_star = curve.phi_grid[best];
  report.slope = slopes[best];
  report.epsilon = model.at(report.phi_star);
  report.shots = nu;
  const double var_eps = report.epsilon * (1.0 - report.epsilon) / static_cast<double>(nu);
  if (std::abs(report.slope) < 1e-10) {
    report.var_phi = std::numeric_limits<double>::infinity();
  } else {
    report.var_phi = var_eps / (report.slope * report.slope);
  }
  return report;
}

std::vector<QfiSweepRow> qfi_sweep(const std::string& family_name,
                                   const std::vector<int>& n_values,
                                   const std::vector<double>& p_grid) {
  std::vector<QfiSweepRow> rows;
  for (int n : n_values) {
    if (n > 10) {
      throw std::invalid_argument("qfi_sweep limited to n <= 10");
    }
    ProbeFamily family = make_family(family_name, n);
    Operator generator = collective_z_generator(n);
    for (double p : p_grid) {
      QfiSweepRow row;
      row.n = n;
      row.p = p;
      row.qfi_numeric = qfi(family.noisy_state(p), generator);
      row.shot_noise_limit = n;
      row.heisenberg_limit = static_cast<double>(n) * n;
      if (family_name == "ghz") {
        row.qfi_closed_form = closed_form_suite(n, p).bare_qfi;
      } else if (family_name == "ghz_encoded") {
        row.qfi_closed_form = closed_form_suite(n, p).encoded_qfi;
      } else {
        row.qfi_closed_form = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double bare_qfi_snl_crossover(int n, double tol) {
  ProbeFamily family = make_family("ghz", n);
  Operator generator = collective_z_generator(n);
  auto above_snl = [&](double p) { return qfi(family.noisy_state(p), generator) > n; };
  double lo = 0.0, hi = 1.0;
  if (!above_snl(lo)) {
    throw std::runtime_error("bare QFI does not start above the shot-noise limit");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (above_snl(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dephaselab
