#include "dephaselab/states.hpp"

#include "dephaselab/metrics.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

using namespace dephaselab;
using testsupport::max_abs_diff;

namespace {

// Product of single-qubit kets given as characters from {0,1,+,-}.
PureState product_ket(const std::string& spec) {
  Vector v(1);
  v[0] = 1.0;
  const double s = 1.0 / std::sqrt(2.0);
  for (char c : spec) {
    Vector q(2);
    switch (c) {
      case '0': q << 1, 0; break;
      case '1': q << 0, 1; break;
      case '+': q << s, s; break;
      default: q << s, -s; break;
    }
    Vector next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next[2 * i] = v[i] * q[0];
      next[2 * i + 1] = v[i] * q[1];
    }
    v = next;
  }
  return PureState(v);
}

}  // namespace

TEST_CASE("ghz construction") {
  PureState g2 = ghz(2);
  CHECK(g2.amplitudes()[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(g2.amplitudes()[3].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(g2.amplitudes()[1]) == 0.0);
  CHECK(std::abs(g2.amplitudes()[2]) == 0.0);

  CHECK(ghz(4).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(ghz(1), std::invalid_argument);

  // |<+^4|GHZ_4>|^2 = 1/8, the p=0 fringe value at phi=0.
  const double overlap = overlap_magnitude(plus_state(4), ghz(4));
  CHECK(overlap * overlap == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("ghz is permutation invariant up to global phase") {
  // Swapping any two qubits of a GHZ state leaves it unchanged; swap via
  // basis-index bit permutation on the amplitudes.
  PureState g = ghz(3);
  Vector swapped(8);
  for (std::size_t x = 0; x < 8; ++x) {
    const std::size_t b1 = (x >> 2) & 1, b2 = (x >> 1) & 1, b3 = x & 1;
    const std::size_t y = (b2 << 2) | (b1 << 1) | b3;  // swap qubits 1,2
    swapped[y] = g.amplitudes()[x];
  }
  CHECK(overlap_magnitude(PureState(swapped), g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("graph states from edge lists") {
  // No edges: |+>^N.
  GraphSpec empty(3, {});
  CHECK(overlap_magnitude(graph_state(empty), plus_state(3)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Path graph 1-2-3-4 equals the printed +- expansion up to global phase.
  Vector expansion = 0.5 * (product_ket("+00+").amplitudes() + product_ket("-10+").amplitudes() +
                            product_ket("+01-").amplitudes() - product_ket("-11-").amplitudes());
  PureState expected(expansion);
  CHECK(overlap_magnitude(linear_cluster4(), expected) == doctest::Approx(1.0).epsilon(1e-12));

  // Every amplitude of a graph state is +-2^{-N/2}.
  GraphSpec ring(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
  PureState rs = graph_state(ring);
  for (Eigen::Index i = 0; i < rs.dim(); ++i) {
    CHECK(std::abs(std::abs(rs.amplitudes()[i].real()) - 0.25) < 1e-14);
    CHECK(rs.amplitudes()[i].imag() == 0.0);
  }

  // A single edge on two qubits is maximally entangled.
  PureState bell = graph_state(GraphSpec(2, {{1, 2}}));
  Operator reduced = partial_trace(bell.projector(), {1});
  CHECK(max_abs_diff(reduced.matrix(), Matrix::Identity(2, 2) / 2.0) < 1e-14);
}

TEST_CASE("graph spec validation and parsing") {
  CHECK_THROWS_AS(GraphSpec(2, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(GraphSpec(2, {{1, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(GraphSpec(3, {{1, 2}, {2, 1}}), std::invalid_argument);

  std::istringstream in("4\n1 2\n2 3\n3 4\n");
  GraphSpec parsed = GraphSpec::parse(in);
  CHECK(parsed.n_qubits() == 4);
  CHECK(parsed.edges().size() == 3);
  CHECK(overlap_magnitude(graph_state(parsed), linear_cluster4()) ==
        doctest::Approx(1.0).epsilon(1e-14));

  std::istringstream junk("4\n1 x\n");
  CHECK_THROWS_AS(GraphSpec::parse(junk), std::invalid_argument);
}

TEST_CASE("encoding masks") {
  EncodingMask mask = EncodingMask::from_bitstring("1001");
  CHECK(mask.is_hadamard(1));
  CHECK_FALSE(mask.is_hadamard(2));
  CHECK(mask.to_bitstring() == "1001");
  CHECK(mask == EncodingMask::cluster_default(4));
  CHECK_THROWS_AS(EncodingMask::from_bitstring("10a1"), std::invalid_argument);

  // The mask unitary squares to the identity.
  Operator u = mask.unitary();
  CHECK(max_abs_diff(u.matrix() * u.matrix(), Matrix::Identity(16, 16)) < 1e-14);
}

TEST_CASE("apply_mask behaviour") {
  PureState g4 = ghz(4);
  CHECK(max_abs_diff(apply_mask(g4, EncodingMask::none(4)).projector().matrix(),
                     g4.projector().matrix()) == 0.0);

  // All-H encoding spreads GHZ_4 over the 8 even-parity terms with
  // magnitude 1/(2 sqrt 2).
  PureState encoded = apply_mask(g4, EncodingMask::all_hadamard(4));
  const double mag = 1.0 / (2.0 * std::sqrt(2.0));
  for (std::size_t x = 0; x < 16; ++x) {
    const int parity = std::popcount(x) % 2;
    if (parity == 0) {
      CHECK(std::abs(encoded.amplitudes()[x].real() - mag) < 1e-14);
    } else {
      CHECK(std::abs(encoded.amplitudes()[x]) < 1e-14);
    }
  }

  // (H,1,1,H) on the linear cluster gives the sparse four-term form.
  Vector expected = Vector::Zero(16);
  expected[0b0000] = 0.5;
  expected[0b1100] = 0.5;
  expected[0b0011] = 0.5;
  expected[0b1111] = -0.5;
  PureState enc_cluster = apply_mask(linear_cluster4(), EncodingMask::cluster_default(4));
  CHECK(overlap_magnitude(enc_cluster, PureState(expected)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Applying the same mask twice is the identity, exactly.
  std::mt19937_64 rng(7);
  PureState psi = testsupport::random_pure(16, rng);
  EncodingMask involution = EncodingMask::from_bitstring("0110");
  PureState back = apply_mask(apply_mask(psi, involution), involution);
  CHECK((back.amplitudes() - psi.amplitudes()).norm() < 1e-12);

  CHECK_THROWS_AS(apply_mask(g4, EncodingMask::none(3)), std::invalid_argument);
}

TEST_CASE("singlet and phase unitary") {
  PureState s = singlet();
  CHECK(s.amplitudes()[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.amplitudes()[2].real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(concurrence(DensityMatrix(s.projector().matrix())) ==
        doctest::Approx(1.0).epsilon(1e-10));

  CHECK(max_abs_diff(phase_unitary(0.0, 3).matrix(), Matrix::Identity(8, 8)) == 0.0);

  // Single qubit: |<+| U_phi |+>|^2 = cos^2(phi/2).
  const double phi = 0.7;
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Complex amp = (plus.adjoint() * phase_unitary(phi, 1).matrix() * plus).value();
  CHECK(std::norm(amp) == doctest::Approx(std::pow(std::cos(phi / 2.0), 2)).epsilon(1e-12));

  CHECK(unitarity_defect(phase_unitary(1.3, 4).matrix()) < 1e-14);
}

TEST_CASE("constructors canonicalize the global phase") {
  PureState cl = linear_cluster4();
  Eigen::Index first = 0;
  while (std::abs(cl.amplitudes()[first]) < 1e-14) ++first;
  CHECK(cl.amplitudes()[first].real() > 0.0);
  CHECK(std::abs(cl.amplitudes()[first].imag()) < 1e-15);
}
