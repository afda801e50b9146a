#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmrecycle/quantum_core.hpp"

namespace pmrecycle {

inline constexpr int kNumChainStates = 2 * kNumTripleStates;
inline constexpr double kStochasticTol = 1e-12;

/// Column-stochastic matrix: entry(to, from) is the probability of moving
/// from state `from` to state `to`, so that p(t+1) = T p(t).
class TransitionMatrix {
 public:
  /// Validates entries in [0,1] and unit column sums. Throws DomainError.
  /// `alignment` records the alignment probability of an error chain.
  explicit TransitionMatrix(Eigen::MatrixXd entries, std::optional<double> alignment = std::nullopt);

  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int to, int from) const { return entries_(to, from); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  std::optional<double> alignment() const { return alignment_; }

  bool is_symmetric(double tol = kStochasticTol) const;
  Eigen::VectorXd column_sums() const { return entries_.colwise().sum().transpose(); }
  double max_column_sum_error() const;

 private:
  Eigen::MatrixXd entries_;
  std::optional<double> alignment_;
};

/// Nonnegative vector summing to one.
class ProbabilityVector {
 public:
  /// Validates nonnegativity and normalization to 1e-12. Throws DomainError.
  explicit ProbabilityVector(Eigen::VectorXd values);

  static ProbabilityVector uniform(int n);
  static ProbabilityVector point_mass(int n, int index);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const Eigen::VectorXd& values() const { return values_; }

  /// Normalization error removed by renormalization when this vector was
  /// produced by step(); zero if none was needed.
  double drift() const { return drift_; }

 private:
  struct Unchecked {};
  ProbabilityVector(Unchecked, Eigen::VectorXd values, double drift)
      : values_(std::move(values)), drift_(drift) {}

  Eigen::VectorXd values_;
  double drift_ = 0.0;

  friend ProbabilityVector step(const TransitionMatrix&, const ProbabilityVector&);
};

struct EigenvalueGroup {
  double value = 0.0;
  int multiplicity = 0;
};

struct SpectralSummary {
  /// Real parts, sorted descending.
  std::vector<double> eigenvalues;
  /// Eigenvalues clustered at kGroupTol, descending by value.
  std::vector<EigenvalueGroup> groups;
  /// Second largest eigenvalue.
  double second_largest = 0.0;
  /// Largest imaginary part discarded; nonzero only for non-symmetric input.
  double max_imag = 0.0;
  std::vector<std::string> warnings;

  static constexpr double kGroupTol = 1e-9;

  int multiplicity_of(double value, double tol = kGroupTol) const;
};

/// Entry (flat(j',i'), flat(j,i)) = Tr(M_{j_i} M_{j'_{i'}}) / 6.
TransitionMatrix build_perfect_chain(const SquareOperators& square);

/// 48-state chain with blocks p T | p/24 over (1-p)/24 | (1-p)/24.
/// States 0..23 are triple states, 24..47 error states. Throws DomainError.
TransitionMatrix build_error_chain(const TransitionMatrix& perfect, double p);

/// T p. Renormalizes if the sum drifts from one by more than 1e-12.
/// Throws DimensionMismatch.
ProbabilityVector step(const TransitionMatrix& t, const ProbabilityVector& p);

/// Fixed point by power iteration from the uniform vector. Throws
/// NoConvergence.
ProbabilityVector stationary(const TransitionMatrix& t, int max_iterations = 100000);

SpectralSummary spectrum(const TransitionMatrix& t);

/// Half the L1 distance. Throws DimensionMismatch.
double tv_distance(const ProbabilityVector& mu, const ProbabilityVector& nu);

/// max over point-mass starts s of tv(T^t delta_s, pi).
double worst_case_distance(const TransitionMatrix& t, int steps);

/// worst_case_distance for steps 0..max_steps in one pass.
std::vector<double> worst_case_distances(const TransitionMatrix& t, int max_steps);

/// (3/2) ln(24/eps): the perfect-chain bound with pi_min = 1/24 and
/// lambda_* = 1/3. Throws DomainError unless 0 < eps < 1.
double mixing_time_bound(double epsilon);

/// ln(1/(eps pi_min)) / (1 - lambda_*).
double mixing_time_bound(double epsilon, double pi_min, double lambda_star);

/// First t <= max_steps with worst_case_distance(t) <= eps.
std::optional<int> mixing_time(const TransitionMatrix& t, double epsilon, int max_steps = 1000);

/// sum_q pi_q |b_q><b_q| over the 24 triple states.
ComplexMatrix effective_state(const ProbabilityVector& pi, const std::vector<TripleState>& states);

}  // namespace pmrecycle
