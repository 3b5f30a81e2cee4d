#include "dephaselab/channels.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dephaselab {

namespace {
constexpr double kUnitaryTol = 1e-10;
}

NoiseSpec::NoiseSpec(std::vector<double> per_qubit) : p_(std::move(per_qubit)) {
  if (p_.empty()) {
    throw std::invalid_argument("noise spec must cover at least one qubit");
  }
  for (double p : p_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("dephasing strength must lie in [0,1], got " +
                                  std::to_string(p));
    }
  }
}

NoiseSpec NoiseSpec::uniform(int n_qubits, double p) {
  return NoiseSpec(std::vector<double>(n_qubits, p));
}

Pipeline::Pipeline(std::vector<Stage> stages) : stages_(std::move(stages)) {
  std::vector<const EncodingMask*> open;
  for (const Stage& st : stages_) {
    if (const auto* enc = std::get_if<EncodeStage>(&st)) {
      open.push_back(&enc->mask);
    } else if (const auto* dec = std::get_if<DecodeStage>(&st)) {
      if (open.empty()) {
        throw std::invalid_argument("pipeline decode stage without a matching encode");
      }
      if (!(*open.back() == dec->mask)) {
        throw std::invalid_argument("pipeline decode mask differs from its encode mask");
      }
      open.pop_back();
    }
  }
}

Pipeline Pipeline::canonical(const std::optional<EncodingMask>& mask, const NoiseSpec& noise,
                             double phi) {
  std::vector<Stage> stages;
  if (mask) stages.push_back(EncodeStage{*mask});
  stages.push_back(DephaseStage{noise});
  if (mask) stages.push_back(DecodeStage{*mask});
  if (phi != 0.0) stages.push_back(PhaseStage{phi});
  return Pipeline(std::move(stages));
}

DensityMatrix dephase(const DensityMatrix& rho, const NoiseSpec& spec) {
  const int n = rho.num_qubits();
  if (spec.size() != n) {
    throw std::invalid_argument("noise spec size does not match register");
  }
  const std::size_t d = std::size_t{1} << n;

  // damping[m] = prod over set bits of m of (1 - p_k); entry (x,y) is
  // scaled by damping[x ^ y].
  std::vector<double> damping(d, 1.0);
  for (std::size_t m = 1; m < d; ++m) {
    const std::size_t low = m & (m - 1);       // m without its lowest set bit
    const std::size_t bit = m ^ low;
    const int qubit = n - std::countr_zero(bit);  // MSB-first labels
    damping[m] = damping[low] * (1.0 - spec.p(qubit));
  }

  Matrix out(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out(r, c) = rho.matrix()(r, c) * damping[r ^ c];
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix conjugate(const DensityMatrix& rho, const Operator& u) {
  if (u.dim() != rho.dim()) {
    throw std::invalid_argument("conjugation dimension mismatch");
  }
  if (unitarity_defect(u.matrix()) > kUnitaryTol) {
    throw std::invalid_argument("conjugate expects a unitary operator");
  }
  return DensityMatrix(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

DensityMatrix imprint_phase(const DensityMatrix& rho, double phi) {
  return conjugate(rho, phase_unitary(phi, rho.num_qubits()));
}

DensityMatrix apply_stage(const DensityMatrix& rho, const Stage& stage) {
  return std::visit(
      [&rho](const auto& st) -> DensityMatrix {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, EncodeStage> || std::is_same_v<T, DecodeStage>) {
          return conjugate(rho, st.mask.unitary());
        } else if constexpr (std::is_same_v<T, DephaseStage>) {
          return dephase(rho, st.noise);
        } else {
          return imprint_phase(rho, st.phi);
        }
      },
      stage);
}

DensityMatrix run_pipeline(const PureState& s, const Pipeline& pl) {
  DensityMatrix rho(s.projector().matrix());
  for (const Stage& st : pl.stages()) {
    rho = apply_stage(rho, st);
  }
  return rho;
}

}  // namespace dephaselab
