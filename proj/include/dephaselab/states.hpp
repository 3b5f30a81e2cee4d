#pragma once

#include "dephaselab/operator_core.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

// Constructors for the pure states and local gates the library works with:
// computational basis states, GHZ states, graph states built from an
// adjacency list (the linear cluster being the path-graph instance), local
// Hadamard encodings and the two-qubit singlet.

namespace dephaselab {

/// Normalized pure state on an N-qubit register. Constructors fix the
/// global phase so the first nonzero amplitude is real positive; equality
/// up to phase is |<a|b>| = 1.
class PureState {
 public:
  explicit PureState(Vector amplitudes);

  int dim() const { return static_cast<int>(amp_.size()); }
  int num_qubits() const { return num_qubits_; }
  const Vector& amplitudes() const { return amp_; }

  /// |psi><psi| as a dense operator.
  Operator projector() const;

  /// Rotate the global phase so the first nonzero amplitude is real positive.
  PureState canonicalized() const;

 private:
  Vector amp_;
  int num_qubits_;
};

/// |<a|b>| — 1 iff equal up to a global phase.
double overlap_magnitude(const PureState& a, const PureState& b);

/// Undirected simple graph on {1..n_qubits}; edges are the CZ links of the
/// corresponding graph state.
class GraphSpec {
 public:
  GraphSpec(int n_qubits, std::vector<std::pair<int, int>> edges);

  int n_qubits() const { return n_qubits_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Plain-text edge list: first line n_qubits, one "i j" pair per line.
  static GraphSpec parse(std::istream& in);
  static GraphSpec from_file(const std::string& path);

  /// Path graph 1-2-...-n (the linear cluster layout).
  static GraphSpec path(int n_qubits);

 private:
  int n_qubits_;
  std::vector<std::pair<int, int>> edges_;
};

/// Per-qubit choice of local unitary: identity or Hadamard. Self-inverse,
/// so the same mask encodes and decodes.
class EncodingMask {
 public:
  explicit EncodingMask(std::vector<bool> hadamard);

  int size() const { return static_cast<int>(hadamard_.size()); }
  bool is_hadamard(int qubit) const { return hadamard_[qubit - 1]; }
  const std::vector<bool>& flags() const { return hadamard_; }
  bool operator==(const EncodingMask& other) const { return hadamard_ == other.hadamard_; }

  /// "1001"-style string, 1 = Hadamard on that qubit.
  std::string to_bitstring() const;
  static EncodingMask from_bitstring(const std::string& bits);
  static EncodingMask all_hadamard(int n);
  static EncodingMask none(int n);
  /// H on qubits 1 and n only (the optimal linear-cluster encoding).
  static EncodingMask cluster_default(int n);

  /// The full tensor-product unitary realizing this mask.
  Operator unitary() const;

 private:
  std::vector<bool> hadamard_;
};

// -- state constructors -------------------------------------------------------

/// Basis state |index> on n qubits.
PureState basis_state(int n, std::size_t index);

/// (|0...0> + |1...1>)/sqrt(2), n >= 2.
PureState ghz(int n);

/// CZ along every edge applied to |+>^n; amplitudes are +-2^{-n/2}.
PureState graph_state(const GraphSpec& g);

/// The 4-qubit linear cluster, graph_state on the path 1-2-3-4.
PureState linear_cluster4();

/// Apply the mask's local unitaries to a pure state.
PureState apply_mask(const PureState& s, const EncodingMask& m);

/// (|01> - |10>)/sqrt(2).
PureState singlet();

/// |+>^n.
PureState plus_state(int n);

/// exp(-i phi sigma_z / 2) on every qubit: tensor power of
/// diag(e^{-i phi/2}, e^{+i phi/2}).
Operator phase_unitary(double phi, int n);

}  // namespace dephaselab
