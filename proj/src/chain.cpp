#include "pmrecycle/chain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "pmrecycle/errors.hpp"

namespace pmrecycle {

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries, std::optional<double> alignment)
    : entries_(std::move(entries)), alignment_(alignment) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw DomainError(fmt::format("transition matrix must be square and nonempty, got {}x{}",
                                  entries_.rows(), entries_.cols()));
  }
  if (entries_.minCoeff() < 0.0 || entries_.maxCoeff() > 1.0) {
    throw DomainError("transition matrix entries must lie in [0,1]");
  }
  const double err = max_column_sum_error();
  if (err > kStochasticTol) {
    throw DomainError(fmt::format("transition matrix column sums off by {:.3g}", err));
  }
}

bool TransitionMatrix::is_symmetric(double tol) const {
  return (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double TransitionMatrix::max_column_sum_error() const {
  return (column_sums().array() - 1.0).abs().maxCoeff();
}

ProbabilityVector::ProbabilityVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0) throw DomainError("probability vector is empty");
  if (values_.minCoeff() < 0.0) throw DomainError("probability vector has a negative entry");
  const double err = std::abs(values_.sum() - 1.0);
  if (err > kStochasticTol) {
    throw DomainError(fmt::format("probability vector sums to 1 {:+.3g}", values_.sum() - 1.0));
  }
}

ProbabilityVector ProbabilityVector::uniform(int n) {
  if (n <= 0) throw DomainError("uniform vector needs n > 0");
  return ProbabilityVector(Eigen::VectorXd::Constant(n, 1.0 / n));
}

ProbabilityVector ProbabilityVector::point_mass(int n, int index) {
  if (index < 0 || index >= n) {
    throw DomainError(fmt::format("point mass index {} outside 0..{}", index, n - 1));
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[index] = 1.0;
  return ProbabilityVector(std::move(v));
}

int SpectralSummary::multiplicity_of(double value, double tol) const {
  return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                        [&](double e) { return std::abs(e - value) <= tol; }));
}

TransitionMatrix build_perfect_chain(const SquareOperators& square) {
  const auto states = all_triple_states(square);
  Eigen::MatrixXd t(kNumTripleStates, kNumTripleStates);
  for (int from = 0; from < kNumTripleStates; ++from) {
    for (int to = 0; to < kNumTripleStates; ++to) {
      double tr = (states[from].projector * states[to].projector).trace().real();
      // Overlaps are exact quarters; drop the round-off so entries are exact.
      const double quarters = std::round(4.0 * tr);
      if (std::abs(4.0 * tr - quarters) < 1e-12) tr = quarters / 4.0;
      t(to, from) = std::max(0.0, tr) / kNumContexts;
    }
  }
  return TransitionMatrix(std::move(t));
}

TransitionMatrix build_error_chain(const TransitionMatrix& perfect, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("alignment probability {} outside [0,1]", p));
  }
  if (perfect.size() != kNumTripleStates) {
    throw DimensionMismatch(
        fmt::format("error chain needs the 24-state chain, got {} states", perfect.size()));
  }
  constexpr int n = kNumTripleStates;
  Eigen::MatrixXd t(2 * n, 2 * n);
  t.topLeftCorner(n, n) = p * perfect.entries();
  t.topRightCorner(n, n).setConstant(p / n);
  t.bottomRows(n).setConstant((1.0 - p) / n);
  return TransitionMatrix(std::move(t), p);
}

ProbabilityVector step(const TransitionMatrix& t, const ProbabilityVector& p) {
  if (t.size() != p.size()) {
    throw DimensionMismatch(
        fmt::format("cannot step a {}-vector with a {}-state matrix", p.size(), t.size()));
  }
  Eigen::VectorXd next = t.entries() * p.values();
  const double drift = next.sum() - 1.0;
  if (std::abs(drift) > kStochasticTol) {
    next /= next.sum();
    return ProbabilityVector(ProbabilityVector::Unchecked{}, std::move(next), drift);
  }
  return ProbabilityVector(ProbabilityVector::Unchecked{}, std::move(next), 0.0);
}

ProbabilityVector stationary(const TransitionMatrix& t, int max_iterations) {
  auto current = ProbabilityVector::uniform(t.size());
  for (int it = 0; it < max_iterations; ++it) {
    auto next = step(t, current);
    const double change = tv_distance(next, current);
    current = std::move(next);
    if (change < 1e-14) {
      const double residual = (t.entries() * current.values() - current.values()).cwiseAbs().maxCoeff();
      if (residual > 1e-12) {
        throw NoConvergence(fmt::format("stationary residual {:.3g} after {} iterations", residual, it + 1));
      }
      return current;
    }
  }
  throw NoConvergence(fmt::format("power iteration did not converge in {} iterations", max_iterations));
}

SpectralSummary spectrum(const TransitionMatrix& t) {
  SpectralSummary s;
  if (t.is_symmetric()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t.entries(), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(t.entries(), false);
    for (const auto& ev : solver.eigenvalues()) {
      s.eigenvalues.push_back(ev.real());
      s.max_imag = std::max(s.max_imag, std::abs(ev.imag()));
    }
    if (s.max_imag > 1e-10) {
      s.warnings.push_back(
          fmt::format("discarded imaginary parts up to {:.3g}; reporting real parts", s.max_imag));
    }
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<>());
  for (double e : s.eigenvalues) {
    if (!s.groups.empty() && std::abs(s.groups.back().value - e) <= SpectralSummary::kGroupTol) {
      ++s.groups.back().multiplicity;
    } else {
      s.groups.push_back({e, 1});
    }
  }
  if (s.eigenvalues.size() > 1) s.second_largest = s.eigenvalues[1];
  return s;
}

double tv_distance(const ProbabilityVector& mu, const ProbabilityVector& nu) {
  if (mu.size() != nu.size()) {
    throw DimensionMismatch(fmt::format("tv distance of {}- and {}-vectors", mu.size(), nu.size()));
  }
  return 0.5 * (mu.values() - nu.values()).cwiseAbs().sum();
}

std::vector<double> worst_case_distances(const TransitionMatrix& t, int max_steps) {
  if (max_steps < 0) throw DomainError("step count must be nonnegative");
  const Eigen::VectorXd pi = stationary(t).values();
  std::vector<double> out;
  out.reserve(max_steps + 1);
  // Column s of `power` is T^k delta_s.
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(t.size(), t.size());
  for (int k = 0; k <= max_steps; ++k) {
    if (k > 0) power = t.entries() * power;
    const Eigen::MatrixXd diff = power.colwise() - pi;
    out.push_back(0.5 * diff.cwiseAbs().colwise().sum().maxCoeff());
  }
  return out;
}

double worst_case_distance(const TransitionMatrix& t, int steps) {
  return worst_case_distances(t, steps).back();
}

double mixing_time_bound(double epsilon) {
  return mixing_time_bound(epsilon, 1.0 / kNumTripleStates, 1.0 / 3.0);
}

double mixing_time_bound(double epsilon, double pi_min, double lambda_star) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError(fmt::format("epsilon {} outside (0,1)", epsilon));
  }
  if (!(pi_min > 0.0 && pi_min <= 1.0) || !(lambda_star < 1.0)) {
    throw DomainError("mixing bound needs pi_min in (0,1] and lambda_* < 1");
  }
  return std::log(1.0 / (epsilon * pi_min)) / (1.0 - lambda_star);
}

std::optional<int> mixing_time(const TransitionMatrix& t, double epsilon, int max_steps) {
  const auto d = worst_case_distances(t, max_steps);
  for (int k = 0; k < static_cast<int>(d.size()); ++k) {
    if (d[k] <= epsilon) return k;
  }
  return std::nullopt;
}

ComplexMatrix effective_state(const ProbabilityVector& pi, const std::vector<TripleState>& states) {
  if (pi.size() != kNumTripleStates || states.size() != static_cast<size_t>(kNumTripleStates)) {
    throw DimensionMismatch("effective state needs 24 weights and 24 triple states");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(kDim, kDim);
  for (int q = 0; q < kNumTripleStates; ++q) rho += pi[q] * states[q].projector;
  return rho;
}

}  // namespace pmrecycle
