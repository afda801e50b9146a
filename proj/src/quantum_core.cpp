#include "pmrecycle/quantum_core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pmrecycle/errors.hpp"

namespace pmrecycle {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_context_index(int j) {
  if (j < 1 || j > kNumContexts) {
    throw DomainError(fmt::format("context index {} outside 1..6", j));
  }
}

// Normalize and rotate the phase so the first nonzero component is real and positive.
ComplexVector canonical_phase(ComplexVector v) {
  v /= v.norm();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > 1e-9) {
      v *= std::conj(v[k]) / std::abs(v[k]);
      v[k] = Complex(v[k].real(), 0.0);
      break;
    }
  }
  return v;
}

}  // namespace

ComplexMatrix pauli(PauliAxis axis) {
  ComplexMatrix m(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case PauliAxis::Y:
      m << 0.0, -kI, kI, 0.0;
      break;
    case PauliAxis::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
    case PauliAxis::Identity:
      m << 1.0, 0.0, 0.0, 1.0;
      break;
  }
  return m;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs_entry(m - m.adjoint()) <= tol;
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix SquareOperators::product(int j) const {
  check_context_index(j);
  const auto& c = context(j);
  return observables[c[0]] * observables[c[1]] * observables[c[2]];
}

ComplexMatrix SquareOperators::commutator(int a, int b) const {
  return observables.at(a) * observables.at(b) - observables.at(b) * observables.at(a);
}

std::array<ContextTriple, kNumContexts> canonical_contexts() {
  return {{
      {0, 1, 2},  // row 1
      {3, 4, 5},  // row 2
      {0, 3, 6},  // column 1
      {1, 4, 7},  // column 2
      {6, 7, 8},  // row 3
      {2, 5, 8},  // column 3
  }};
}

SquareOperators square_from(std::array<ComplexMatrix, kNumObservables> observables) {
  return SquareOperators{std::move(observables), canonical_contexts()};
}

SquareOperators build_square() {
  const auto x = pauli(PauliAxis::X);
  const auto y = pauli(PauliAxis::Y);
  const auto z = pauli(PauliAxis::Z);
  const auto id = pauli(PauliAxis::Identity);
  auto square = square_from({
      tensor(x, id), tensor(id, y), tensor(x, y),
      tensor(id, x), tensor(y, id), tensor(y, x),
      tensor(x, x), tensor(y, y), tensor(z, z),
  });
  for (const auto& check : check_square(square)) {
    if (!check.passed) {
      throw AlgebraViolation(fmt::format("{}: {}", check.name, check.detail));
    }
  }
  return square;
}

std::vector<InvariantCheck> check_square(const SquareOperators& square) {
  std::vector<InvariantCheck> checks;
  const ComplexMatrix identity = ComplexMatrix::Identity(kDim, kDim);

  {
    InvariantCheck c{"hermitian", true, ""};
    for (int k = 0; k < kNumObservables; ++k) {
      if (!is_hermitian(square.observables[k])) {
        c.passed = false;
        c.detail += fmt::format("A{} not hermitian; ", k + 1);
      }
    }
    checks.push_back(std::move(c));
  }
  {
    InvariantCheck c{"dichotomic", true, ""};
    for (int k = 0; k < kNumObservables; ++k) {
      const auto& a = square.observables[k];
      const double err = max_abs_entry(a * a - identity);
      if (err > kAlgebraTol) {
        c.passed = false;
        c.detail += fmt::format("A{}^2 - 1 has error {:.3g}; ", k + 1, err);
      }
    }
    checks.push_back(std::move(c));
  }
  {
    InvariantCheck c{"commutation", true, ""};
    double worst = 0.0;
    for (int j = 1; j <= kNumContexts; ++j) {
      const auto& t = square.context(j);
      for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
          const double norm = spectral_norm(square.commutator(t[a], t[b]));
          worst = std::max(worst, norm);
          if (norm >= kAlgebraTol) {
            c.passed = false;
            c.detail += fmt::format("[A{},A{}] norm {:.3g} in context {}; ", t[a] + 1,
                                    t[b] + 1, norm, j);
          }
        }
      }
    }
    if (c.passed) c.detail = fmt::format("max commutator norm {:.3g}", worst);
    checks.push_back(std::move(c));
  }
  {
    InvariantCheck c{"context products", true, ""};
    double worst = 0.0;
    int parity = 1;
    for (int j = 1; j <= kNumContexts; ++j) {
      const double err =
          max_abs_entry(square.product(j) - double(context_sign(j)) * identity);
      worst = std::max(worst, err);
      parity *= context_sign(j);
      if (err >= kAlgebraTol) {
        c.passed = false;
        c.detail += fmt::format("context {} product off by {:.3g}; ", j, err);
      }
    }
    if (c.passed) {
      c.detail = fmt::format("max entry error {:.3g}, sign parity {}", worst, parity);
    }
    checks.push_back(std::move(c));
  }
  return checks;
}

ComplexMatrix outcome_projector(const SquareOperators& square, int j, const Outcomes& outcomes) {
  check_context_index(j);
  const auto& t = square.context(j);
  const ComplexMatrix identity = ComplexMatrix::Identity(kDim, kDim);
  ComplexMatrix p = identity;
  for (int k = 0; k < 3; ++k) {
    p = p * (identity + double(outcomes[k]) * square.observables[t[k]]) * 0.5;
  }
  return p;
}

std::array<TripleState, kSlotsPerContext> triple_eigenbasis(const SquareOperators& square, int j) {
  check_context_index(j);
  std::array<TripleState, kSlotsPerContext> basis;
  for (int slot = 1; slot <= kSlotsPerContext; ++slot) {
    TripleState s;
    s.context = j;
    s.slot = slot;
    s.outcomes = slot_outcomes(slot, context_sign(j));
    const ComplexMatrix p = outcome_projector(square, j, s.outcomes);
    const double trace_err = std::abs(p.trace() - 1.0);
    if (trace_err > kAlgebraTol) {
      throw AlgebraViolation(fmt::format(
          "context {} slot {}: projector trace {:.6g}, expected 1", j, slot, p.trace().real()));
    }
    // A rank-one projector's largest column is proportional to its range.
    Eigen::Index best = 0;
    p.colwise().norm().maxCoeff(&best);
    s.vector = canonical_phase(p.col(best));
    s.projector = s.vector * s.vector.adjoint();
    if (max_abs_entry(s.projector - p) > kAlgebraTol) {
      throw AlgebraViolation(
          fmt::format("context {} slot {}: projector is not rank one", j, slot));
    }
    basis[slot - 1] = std::move(s);
  }
  return basis;
}

std::vector<TripleState> all_triple_states(const SquareOperators& square) {
  std::vector<TripleState> states;
  states.reserve(kNumTripleStates);
  for (int j = 1; j <= kNumContexts; ++j) {
    for (auto& s : triple_eigenbasis(square, j)) states.push_back(std::move(s));
  }
  return states;
}

double born_probability(const ComplexMatrix& rho, const TripleState& target) {
  if (rho.rows() != kDim || rho.cols() != kDim) {
    throw InvalidState(fmt::format("density matrix must be 4x4, got {}x{}", rho.rows(), rho.cols()));
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw InvalidState(fmt::format("density matrix trace {:.12g} is not 1", tr.real()));
  }
  const double prob = (rho * target.projector).trace().real();
  return std::clamp(prob, 0.0, 1.0);
}

double overlap(const TripleState& a, const TripleState& b) {
  return std::norm(a.vector.dot(b.vector));
}

ComplexMatrix reduced_first(const ComplexVector& v) {
  // v indexed as 2*a + b; reshape into the 2x2 coefficient matrix C(a, b).
  ComplexMatrix c(2, 2);
  c << v[0], v[1], v[2], v[3];
  return c * c.adjoint();
}

bool is_product_state(const ComplexVector& v, double tol) {
  return std::abs(v[0] * v[3] - v[1] * v[2]) <= tol;
}

bool is_maximally_entangled(const ComplexVector& v, double tol) {
  return max_abs_entry(reduced_first(v) - 0.5 * ComplexMatrix::Identity(2, 2)) <= tol;
}

}  // namespace pmrecycle
