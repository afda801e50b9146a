#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "pmrecycle/errors.hpp"
#include "pmrecycle/quantum_core.hpp"

namespace pmrecycle {
namespace {

constexpr Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(Pauli, StandardMatrices) {
  EXPECT_EQ(pauli(PauliAxis::X), mat2(0.0, 1.0, 1.0, 0.0));
  EXPECT_EQ(pauli(PauliAxis::Y), mat2(0.0, -kI, kI, 0.0));
  EXPECT_EQ(pauli(PauliAxis::Z), mat2(1.0, 0.0, 0.0, -1.0));
  EXPECT_EQ(pauli(PauliAxis::Identity), mat2(1.0, 0.0, 0.0, 1.0));
}

TEST(Tensor, IdentityAndDiagonal) {
  const auto id = pauli(PauliAxis::Identity);
  EXPECT_EQ(tensor(id, id), ComplexMatrix::Identity(4, 4));

  ComplexMatrix zz = ComplexMatrix::Zero(4, 4);
  zz.diagonal() << 1.0, -1.0, -1.0, 1.0;
  EXPECT_EQ(tensor(pauli(PauliAxis::Z), pauli(PauliAxis::Z)), zz);
}

TEST(Tensor, XTimesYIsAntidiagonal) {
  const auto m = tensor(pauli(PauliAxis::X), pauli(PauliAxis::Y));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 3) = -kI;
  expected(1, 2) = kI;
  expected(2, 1) = -kI;
  expected(3, 0) = kI;
  EXPECT_EQ(m, expected);
}

TEST(Square, ContextProducts) {
  const auto sq = build_square();
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  int parity = 1;
  for (int j = 1; j <= kNumContexts; ++j) {
    const double sign = j == 5 ? -1.0 : 1.0;
    EXPECT_LT(max_abs_entry(sq.product(j) - sign * id), 1e-12) << "context " << j;
    parity *= context_sign(j);
  }
  EXPECT_EQ(parity, -1);
}

TEST(Square, ContextsCommute) {
  const auto sq = build_square();
  EXPECT_EQ(max_abs_entry(sq.commutator(0, 1)), 0.0);
  for (int j = 1; j <= kNumContexts; ++j) {
    const auto& t = sq.context(j);
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) EXPECT_LT(spectral_norm(sq.commutator(t[a], t[b])), 1e-12);
    }
  }
}

TEST(Square, ObservablesAreDichotomicHermitian) {
  const auto sq = build_square();
  for (const auto& a : sq.observables) {
    EXPECT_TRUE(is_hermitian(a));
    EXPECT_LT(max_abs_entry(a * a - ComplexMatrix::Identity(4, 4)), 1e-12);
  }
}

TEST(Square, CanonicalContextOrder) {
  const auto c = canonical_contexts();
  EXPECT_EQ(c[0], (ContextTriple{0, 1, 2}));
  EXPECT_EQ(c[1], (ContextTriple{3, 4, 5}));
  EXPECT_EQ(c[2], (ContextTriple{0, 3, 6}));
  EXPECT_EQ(c[3], (ContextTriple{1, 4, 7}));
  EXPECT_EQ(c[4], (ContextTriple{6, 7, 8}));
  EXPECT_EQ(c[5], (ContextTriple{2, 5, 8}));
}

TEST(Square, CorruptedObservableFailsNamedCheck) {
  auto obs = build_square().observables;
  obs[8] *= -1.0;
  const auto checks = check_square(square_from(obs));
  bool products_failed = false;
  for (const auto& c : checks) {
    if (c.name == "context products") products_failed = !c.passed;
    if (c.name == "commutation") EXPECT_TRUE(c.passed);
  }
  EXPECT_TRUE(products_failed);

  obs = build_square().observables;
  obs[0](0, 1) = 0.5;
  bool hermitian_failed = false;
  for (const auto& c : check_square(square_from(obs))) {
    if (c.name == "hermitian") hermitian_failed = !c.passed;
  }
  EXPECT_TRUE(hermitian_failed);
}

TEST(TripleEigenbasis, ColumnOnePlusPlusIsProductOfPlusX) {
  const auto basis = triple_eigenbasis(build_square(), 3);
  const auto& v = basis[0].vector;
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(v[k] - Complex(0.5, 0.0)), 0.0, 1e-12);
  EXPECT_EQ(basis[0].outcomes, (Outcomes{1, 1, 1}));
}

TEST(TripleEigenbasis, LastRowGivesBellStates) {
  ComplexVector phi_p(4), phi_m(4), psi_p(4), psi_m(4);
  phi_p << kInvSqrt2, 0, 0, kInvSqrt2;
  phi_m << kInvSqrt2, 0, 0, -kInvSqrt2;
  psi_p << 0, kInvSqrt2, kInvSqrt2, 0;
  psi_m << 0, kInvSqrt2, -kInvSqrt2, 0;
  const std::array<ComplexVector, 4> bell = {phi_p, phi_m, psi_p, psi_m};

  std::set<int> matched;
  for (const auto& s : triple_eigenbasis(build_square(), 5)) {
    EXPECT_TRUE(is_maximally_entangled(s.vector));
    for (int b = 0; b < 4; ++b) {
      if (std::abs(std::norm(bell[b].dot(s.vector)) - 1.0) < 1e-12) matched.insert(b);
    }
  }
  EXPECT_EQ(matched.size(), 4U);
}

TEST(TripleEigenbasis, InvariantsForEveryContext) {
  const auto sq = build_square();
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  for (int j = 1; j <= kNumContexts; ++j) {
    const auto basis = triple_eigenbasis(sq, j);
    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      const auto& s = basis[i];
      EXPECT_EQ(s.context, j);
      EXPECT_EQ(s.slot, i + 1);
      EXPECT_EQ(s.flat_index(), 4 * (j - 1) + i);
      EXPECT_EQ(s.outcomes[0] * s.outcomes[1] * s.outcomes[2], context_sign(j));
      const auto expected_pair = slot_signs(i + 1);
      EXPECT_EQ(s.outcomes[0], expected_pair[0]);
      EXPECT_EQ(s.outcomes[1], expected_pair[1]);

      EXPECT_NEAR(std::abs(s.projector.trace() - 1.0), 0.0, 1e-12);
      EXPECT_LT(max_abs_entry(s.projector * s.projector - s.projector), 1e-12);
      const auto& t = sq.context(j);
      for (int k = 0; k < 3; ++k) {
        const ComplexVector r = sq.observables[t[k]] * s.vector - double(s.outcomes[k]) * s.vector;
        EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12);
      }
      // Phase convention: first nonzero component real and positive.
      for (int k = 0; k < 4; ++k) {
        if (std::abs(s.vector[k]) > 1e-9) {
          EXPECT_GT(s.vector[k].real(), 0.0);
          EXPECT_EQ(s.vector[k].imag(), 0.0);
          break;
        }
      }
      for (int i2 = 0; i2 < i; ++i2) EXPECT_LT(overlap(s, basis[i2]), 1e-24);
      sum += s.projector;
    }
    EXPECT_LT(max_abs_entry(sum - id), 1e-12);
  }
}

TEST(TripleEigenbasis, SixteenProductEightEntangled) {
  int product = 0;
  int entangled = 0;
  for (const auto& s : all_triple_states(build_square())) {
    const bool p = is_product_state(s.vector);
    const bool e = is_maximally_entangled(s.vector);
    EXPECT_NE(p, e);
    product += p;
    entangled += e;
    EXPECT_EQ(p, s.context <= 4);
  }
  EXPECT_EQ(product, 16);
  EXPECT_EQ(entangled, 8);
}

TEST(TripleEigenbasis, CrossContextOverlapsTakeThreeValues) {
  const auto states = all_triple_states(build_square());
  for (const auto& a : states) {
    for (const auto& b : states) {
      if (a.context == b.context) continue;
      const double o = overlap(a, b);
      const bool allowed = std::abs(o) < 1e-12 || std::abs(o - 0.25) < 1e-12 || std::abs(o - 0.5) < 1e-12;
      EXPECT_TRUE(allowed) << a.flat_index() << " " << b.flat_index() << " " << o;
    }
  }
}

TEST(TripleEigenbasis, WrongSignTripleHasZeroProjector) {
  const auto sq = build_square();
  EXPECT_LT(max_abs_entry(outcome_projector(sq, 1, {1, 1, -1})), 1e-12);
  EXPECT_LT(max_abs_entry(outcome_projector(sq, 5, {1, 1, 1})), 1e-12);
  EXPECT_THROW(triple_eigenbasis(sq, 0), DomainError);
  EXPECT_THROW(triple_eigenbasis(sq, 7), DomainError);
}

TEST(TripleEigenbasis, InadmissibleSquareRaisesAlgebraViolation) {
  auto obs = build_square().observables;
  obs[8] *= -1.0;  // row 3 now multiplies to +1, so the -1 triples vanish
  EXPECT_THROW(triple_eigenbasis(square_from(obs), 5), AlgebraViolation);
}

TEST(BornProbability, Cases) {
  const auto states = all_triple_states(build_square());
  EXPECT_NEAR(born_probability(states[0].projector, states[0]), 1.0, 1e-12);
  const ComplexMatrix mixed = ComplexMatrix::Identity(4, 4) / 4.0;
  for (const auto& s : states) EXPECT_NEAR(born_probability(mixed, s), 0.25, 1e-12);
  for (int i = 1; i <= 4; ++i) {
    EXPECT_NEAR(born_probability(states[0].projector, states[flat_index(2, i)]), 0.25, 1e-12);
  }
  EXPECT_NEAR(born_probability(states[0].projector, states[1]), 0.0, 1e-12);
  EXPECT_GE(born_probability(states[0].projector, states[1]), 0.0);
}

TEST(BornProbability, RejectsUnnormalizedState) {
  const auto states = all_triple_states(build_square());
  const ComplexMatrix rho = ComplexMatrix::Identity(4, 4) / 2.0;
  EXPECT_THROW(born_probability(rho, states[0]), InvalidState);
}

TEST(SlotHelpers, RoundTrip) {
  for (int j = 1; j <= 6; ++j) {
    for (int i = 1; i <= 4; ++i) {
      EXPECT_EQ(slot_of(slot_outcomes(i, context_sign(j))), i);
      EXPECT_EQ(slot_of(slot_outcomes(i, -context_sign(j))), i);
    }
  }
}

}  // namespace
}  // namespace pmrecycle
