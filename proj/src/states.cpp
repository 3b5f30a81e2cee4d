#include "dephaselab/states.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dephaselab {

namespace {
constexpr double kNormTol = 1e-12;
}

PureState::PureState(Vector amplitudes) : amp_(std::move(amplitudes)) {
  num_qubits_ = qubits_from_dim(amp_.size());
  const double norm = amp_.norm();
  if (std::abs(norm - 1.0) > kNormTol) {
    throw std::invalid_argument("pure state must be normalized, got norm " +
                                std::to_string(norm));
  }
}

Operator PureState::projector() const {
  return Operator(amp_ * amp_.adjoint());
}

PureState PureState::canonicalized() const {
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    const double mag = std::abs(amp_[i]);
    if (mag > 1e-14) {
      const Complex phase = amp_[i] / mag;
      return PureState(Vector(amp_ / phase));
    }
  }
  return *this;
}

double overlap_magnitude(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("overlap of states with different dimensions");
  }
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

GraphSpec::GraphSpec(int n_qubits, std::vector<std::pair<int, int>> edges)
    : n_qubits_(n_qubits), edges_(std::move(edges)) {
  if (n_qubits_ < 1) {
    throw std::invalid_argument("graph needs at least one qubit");
  }
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) {
      throw std::invalid_argument("graph edge endpoints must be distinct");
    }
    if (e.first < 1 || e.second > n_qubits_) {
      throw std::invalid_argument("graph edge endpoint out of range");
    }
    if (!seen.insert(e).second) {
      throw std::invalid_argument("duplicate graph edge");
    }
  }
}

GraphSpec GraphSpec::parse(std::istream& in) {
  int n = 0;
  if (!(in >> n)) {
    throw std::invalid_argument("graph spec: missing qubit count on first line");
  }
  std::vector<std::pair<int, int>> edges;
  int i = 0, j = 0;
  while (in >> i >> j) {
    edges.emplace_back(i, j);
  }
  if (!in.eof()) {
    throw std::invalid_argument("graph spec: malformed edge line");
  }
  return GraphSpec(n, std::move(edges));
}

GraphSpec GraphSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open graph spec file: " + path);
  }
  return parse(in);
}

GraphSpec GraphSpec::path(int n_qubits) {
  std::vector<std::pair<int, int>> edges;
  for (int q = 1; q < n_qubits; ++q) edges.emplace_back(q, q + 1);
  return GraphSpec(n_qubits, std::move(edges));
}

EncodingMask::EncodingMask(std::vector<bool> hadamard) : hadamard_(std::move(hadamard)) {
  if (hadamard_.empty()) {
    throw std::invalid_argument("encoding mask must be non-empty");
  }
}

std::string EncodingMask::to_bitstring() const {
  std::string s;
  for (bool h : hadamard_) s += h ? '1' : '0';
  return s;
}

EncodingMask EncodingMask::from_bitstring(const std::string& bits) {
  std::vector<bool> flags;
  for (char c : bits) {
    if (c == '0') {
      flags.push_back(false);
    } else if (c == '1') {
      flags.push_back(true);
    } else {
      throw std::invalid_argument("mask bitstring must contain only 0 and 1");
    }
  }
  return EncodingMask(std::move(flags));
}

EncodingMask EncodingMask::all_hadamard(int n) {
  return EncodingMask(std::vector<bool>(n, true));
}

EncodingMask EncodingMask::none(int n) {
  return EncodingMask(std::vector<bool>(n, false));
}

EncodingMask EncodingMask::cluster_default(int n) {
  std::vector<bool> flags(n, false);
  flags.front() = true;
  flags.back() = true;
  return EncodingMask(std::move(flags));
}

Operator EncodingMask::unitary() const {
  Operator u = hadamard_[0] ? hadamard_gate() : identity_op(2);
  for (std::size_t q = 1; q < hadamard_.size(); ++q) {
    u = kron(u, hadamard_[q] ? hadamard_gate() : identity_op(2));
  }
  return u;
}

PureState basis_state(int n, std::size_t index) {
  const std::size_t d = std::size_t{1} << n;
  if (index >= d) {
    throw std::invalid_argument("basis state index out of range");
  }
  Vector amp = Vector::Zero(d);
  amp[index] = 1.0;
  return PureState(std::move(amp));
}

PureState ghz(int n) {
  if (n < 2) {
    throw std::invalid_argument("GHZ state needs n >= 2");
  }
  const std::size_t d = std::size_t{1} << n;
  Vector amp = Vector::Zero(d);
  amp[0] = amp[d - 1] = 1.0 / std::sqrt(2.0);
  return PureState(std::move(amp));
}

PureState graph_state(const GraphSpec& g) {
  const int n = g.n_qubits();
  const std::size_t d = std::size_t{1} << n;
  const double mag = std::pow(2.0, -0.5 * n);
  Vector amp(d);
  for (std::size_t x = 0; x < d; ++x) {
    // CZ on edge (i,j) contributes a sign when both bits are set.
    int sign = 0;
    for (const auto& [i, j] : g.edges()) {
      sign ^= static_cast<int>((x >> (n - i)) & (x >> (n - j)) & 1u);
    }
    amp[x] = sign ? -mag : mag;
  }
  return PureState(std::move(amp)).canonicalized();
}

PureState linear_cluster4() { return graph_state(GraphSpec::path(4)); }

PureState apply_mask(const PureState& s, const EncodingMask& m) {
  if (m.size() != s.num_qubits()) {
    throw std::invalid_argument("encoding mask size does not match state");
  }
  const int n = s.num_qubits();
  const std::size_t d = std::size_t{1} << n;
  const double h = 1.0 / std::sqrt(2.0);
  Vector amp = s.amplitudes();
  // Apply H in place on each flagged qubit; butterfly over the paired indices.
  for (int q = 1; q <= n; ++q) {
    if (!m.is_hadamard(q)) continue;
    const std::size_t bit = std::size_t{1} << (n - q);
    for (std::size_t x = 0; x < d; ++x) {
      if (x & bit) continue;
      const Complex a0 = amp[x];
      const Complex a1 = amp[x | bit];
      amp[x] = h * (a0 + a1);
      amp[x | bit] = h * (a0 - a1);
    }
  }
  return PureState(std::move(amp));
}

PureState singlet() {
  Vector amp = Vector::Zero(4);
  amp[1] = 1.0 / std::sqrt(2.0);
  amp[2] = -1.0 / std::sqrt(2.0);
  return PureState(std::move(amp));
}

PureState plus_state(int n) {
  const std::size_t d = std::size_t{1} << n;
  return PureState(Vector::Constant(d, std::pow(2.0, -0.5 * n)));
}

Operator phase_unitary(double phi, int n) {
  if (n < 1) {
    throw std::invalid_argument("phase_unitary needs n >= 1");
  }
  const std::size_t d = std::size_t{1} << n;
  Matrix u = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < d; ++x) {
    // Each |1> bit picks up +phi/2, each |0> bit -phi/2.
    const int ones = std::popcount(x);
    const double angle = 0.5 * phi * (2 * ones - n);
    u(x, x) = std::polar(1.0, angle);
  }
  return Operator(std::move(u));
}

}  // namespace dephaselab
