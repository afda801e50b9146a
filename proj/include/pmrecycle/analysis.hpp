#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pmrecycle/experiment.hpp"
#include "pmrecycle/quantum_core.hpp"

namespace pmrecycle {

inline constexpr double kClassicalBound = 4.0;
inline constexpr double kQuantumValue = 6.0;

struct Correlator {
  double estimate = 0.0;
  std::int64_t count = 0;
  /// sqrt((1 - estimate^2) / count)
  double std_error = 0.0;
};

/// Per-context means of s1 s2 s3; an empty entry marks a context with no
/// post-burn-in records.
struct CorrelatorSet {
  std::array<std::optional<Correlator>, kNumContexts> values;

  const std::optional<Correlator>& at(int context) const { return values.at(context - 1); }
  std::vector<int> missing_contexts() const;
  /// Throws InsufficientData naming the empty contexts.
  void require_complete() const;
};

struct InequalityReport {
  double value = 0.0;
  double std_error = 0.0;
  double classical_bound = kClassicalBound;
  double quantum_value = kQuantumValue;
  /// value - 2 std_error > 4
  bool violated = false;
  std::array<double, kNumContexts> correlators{};
};

CorrelatorSet estimate_correlators(const Trajectory& traj);

/// Sum of the six correlators, the row-3 context (j = 5) entering with a
/// minus sign; standard errors combined in quadrature.
/// Throws InsufficientData.
InequalityReport evaluate_inequality(const CorrelatorSet& c);

/// 12p - 6. Throws DomainError.
double noisy_inequality_value(double p);

/// n/(1-p0) * H_n. Throws DomainError.
double coupon_expectation(int n, double p0);

struct SweepPoint {
  double p = 0.0;
  InequalityReport report;
  double analytic = 0.0;
};

/// For each p: build the error chain, simulate `rounds` rounds in chain
/// mode on substream (seed, index) and evaluate the inequality. Points run
/// in parallel.
std::vector<SweepPoint> sweep_noise(const SquareOperators& square, const std::vector<double>& p_grid,
                                    std::int64_t rounds, std::uint64_t seed,
                                    std::int64_t burn_in = default_burn_in());

}  // namespace pmrecycle
