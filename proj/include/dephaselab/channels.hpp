#pragma once

#include "dephaselab/operator_core.hpp"
#include "dephaselab/states.hpp"

#include <optional>
#include <variant>
#include <vector>

// Quantum channels and the encode -> noise -> decode pipeline. Dephasing is
// applied as element-wise damping in the computational basis: entry (x,y)
// is scaled by prod_k (1-p_k) over the qubits where x and y differ, which
// is exact and avoids the exponential Kraus expansion.

namespace dephaselab {

/// Per-qubit dephasing strength p in [0,1]; uniform by default.
class NoiseSpec {
 public:
  explicit NoiseSpec(std::vector<double> per_qubit);
  static NoiseSpec uniform(int n_qubits, double p);

  int size() const { return static_cast<int>(p_.size()); }
  double p(int qubit) const { return p_[qubit - 1]; }
  const std::vector<double>& values() const { return p_; }

 private:
  std::vector<double> p_;
};

struct EncodeStage {
  EncodingMask mask;
};
struct DephaseStage {
  NoiseSpec noise;
};
struct DecodeStage {
  EncodingMask mask;
};
struct PhaseStage {
  double phi;
};

using Stage = std::variant<EncodeStage, DephaseStage, DecodeStage, PhaseStage>;

/// Ordered stage list. Decode stages must pair with the most recent open
/// encode stage and carry the same mask.
class Pipeline {
 public:
  explicit Pipeline(std::vector<Stage> stages);

  const std::vector<Stage>& stages() const { return stages_; }

  /// The protocol ordering: encode -> dephase -> decode -> phase. The mask
  /// is optional; without it the pipeline is the bare dephase -> phase.
  static Pipeline canonical(const std::optional<EncodingMask>& mask, const NoiseSpec& noise,
                            double phi = 0.0);

 private:
  std::vector<Stage> stages_;
};

/// Per-qubit dephasing channel, entry-wise in the computational basis.
DensityMatrix dephase(const DensityMatrix& rho, const NoiseSpec& spec);

/// u rho u^dag for unitary u (unitarity checked to 1e-10).
DensityMatrix conjugate(const DensityMatrix& rho, const Operator& u);

/// Imprint a collective phase: U_phi^(x)n rho U_phi^dag^(x)n.
DensityMatrix imprint_phase(const DensityMatrix& rho, double phi);

DensityMatrix apply_stage(const DensityMatrix& rho, const Stage& stage);

/// Stages applied left to right, starting from |s><s|.
DensityMatrix run_pipeline(const PureState& s, const Pipeline& pl);

}  // namespace dephaselab
