#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pmrecycle {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kDim = 4;
inline constexpr int kNumObservables = 9;
inline constexpr int kNumContexts = 6;
inline constexpr int kSlotsPerContext = 4;
inline constexpr int kNumTripleStates = kNumContexts * kSlotsPerContext;

/// Context containing A7 A8 A9, the only one whose product is -1.
inline constexpr int kNegativeContext = 5;

inline constexpr double kAlgebraTol = 1e-12;

enum class PauliAxis { X, Y, Z, Identity };

ComplexMatrix pauli(PauliAxis axis);

/// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol = kAlgebraTol);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m);

double max_abs_entry(const ComplexMatrix& m);

using Outcomes = std::array<int, 3>;
/// Zero-based observable indices of one context.
using ContextTriple = std::array<int, 3>;

/// +1 for every context except the last row, which multiplies to -1.
constexpr int context_sign(int context) {
  return context == kNegativeContext ? -1 : 1;
}

/// Flat index 4(j-1)+(i-1) of context j, slot i.
constexpr int flat_index(int context, int slot) {
  return kSlotsPerContext * (context - 1) + (slot - 1);
}

/// (s1, s2) for slot 1..4 in the order (+,+), (+,-), (-,+), (-,-).
constexpr std::array<int, 2> slot_signs(int slot) {
  return {slot <= 2 ? 1 : -1, (slot % 2 == 1) ? 1 : -1};
}

/// Outcome triple of a slot; s3 is fixed by the product `product_sign`.
constexpr Outcomes slot_outcomes(int slot, int product_sign) {
  const auto s = slot_signs(slot);
  return {s[0], s[1], product_sign * s[0] * s[1]};
}

/// Inverse of slot_outcomes on (s1, s2).
constexpr int slot_of(const Outcomes& o) {
  return 1 + (o[0] == 1 ? 0 : 2) + (o[1] == 1 ? 0 : 1);
}

/// The nine observables of the Peres-Mermin square and its six contexts.
///
/// Observables are stored row-major A1..A9. Contexts are ordered
/// row 1, row 2, column 1, column 2, row 3, column 3, so that contexts
/// 1..4 have product eigenstates and 5, 6 have entangled ones.
struct SquareOperators {
  std::array<ComplexMatrix, kNumObservables> observables;
  std::array<ContextTriple, kNumContexts> contexts;

  const ComplexMatrix& observable(int k) const { return observables.at(k); }
  const ContextTriple& context(int j) const { return contexts.at(j - 1); }

  /// Ordered product of the context's three observables.
  ComplexMatrix product(int j) const;

  /// [A_a, A_b] for zero-based observable indices.
  ComplexMatrix commutator(int a, int b) const;
};

/// Canonical contexts, zero-based observable indices.
std::array<ContextTriple, kNumContexts> canonical_contexts();

/// The square exactly as written, verified. Throws AlgebraViolation.
SquareOperators build_square();

/// Wraps arbitrary observables in the canonical contexts without checking.
/// Used to exercise the verifier on corrupted operators.
SquareOperators square_from(std::array<ComplexMatrix, kNumObservables> observables);

struct InvariantCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Algebraic invariants of a square: Hermiticity, dichotomic spectrum,
/// pairwise commutation within contexts and context product signs.
std::vector<InvariantCheck> check_square(const SquareOperators& square);

struct TripleState {
  int context = 0;  // 1..6
  int slot = 0;     // 1..4
  Outcomes outcomes{};
  ComplexMatrix projector;
  ComplexVector vector;

  int flat_index() const { return pmrecycle::flat_index(context, slot); }
};

/// Joint eigenprojector prod_k (1 + s_k A_k)/2 of context j for an arbitrary
/// outcome triple. Zero for triples with the wrong product sign.
ComplexMatrix outcome_projector(const SquareOperators& square, int j, const Outcomes& outcomes);

/// The four joint eigenstates of context j in canonical slot order.
/// Throws AlgebraViolation if a projector is not rank one.
std::array<TripleState, kSlotsPerContext> triple_eigenbasis(const SquareOperators& square, int j);

/// All 24 triple states indexed by flat index.
std::vector<TripleState> all_triple_states(const SquareOperators& square);

/// Tr(rho P). Throws InvalidState if Tr(rho) is not 1 within 1e-10.
double born_probability(const ComplexMatrix& rho, const TripleState& target);

/// |<a|b>|^2
double overlap(const TripleState& a, const TripleState& b);

/// Schmidt rank one across the 2 (x) 2 split.
bool is_product_state(const ComplexVector& v, double tol = kAlgebraTol);

/// Reduced single-qubit state equals 1/2.
bool is_maximally_entangled(const ComplexVector& v, double tol = kAlgebraTol);

/// Partial trace over the second qubit.
ComplexMatrix reduced_first(const ComplexVector& v);

}  // namespace pmrecycle
