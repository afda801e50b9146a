#include "pmrecycle/analysis.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "pmrecycle/errors.hpp"

namespace pmrecycle {

std::vector<int> CorrelatorSet::missing_contexts() const {
  std::vector<int> missing;
  for (int j = 1; j <= kNumContexts; ++j) {
    if (!at(j)) missing.push_back(j);
  }
  return missing;
}

void CorrelatorSet::require_complete() const {
  auto missing = missing_contexts();
  if (!missing.empty()) {
    throw InsufficientData(
        fmt::format("no post-burn-in records for context(s) {}", fmt::join(missing, ", ")),
        std::move(missing));
  }
}

CorrelatorSet estimate_correlators(const Trajectory& traj) {
  std::array<std::int64_t, kNumContexts> count{};
  std::array<std::int64_t, kNumContexts> sum{};
  for (const auto& rec : traj.records) {
    if (rec.round < traj.config.burn_in) continue;
    ++count[rec.context - 1];
    sum[rec.context - 1] += rec.outcomes[0] * rec.outcomes[1] * rec.outcomes[2];
  }
  CorrelatorSet set;
  for (int k = 0; k < kNumContexts; ++k) {
    if (count[k] == 0) continue;
    Correlator c;
    c.count = count[k];
    c.estimate = double(sum[k]) / double(count[k]);
    c.std_error = std::sqrt(std::max(0.0, 1.0 - c.estimate * c.estimate) / double(count[k]));
    set.values[k] = c;
  }
  return set;
}

InequalityReport evaluate_inequality(const CorrelatorSet& c) {
  c.require_complete();
  InequalityReport r;
  double variance = 0.0;
  for (int j = 1; j <= kNumContexts; ++j) {
    const auto& cj = *c.at(j);
    r.correlators[j - 1] = cj.estimate;
    r.value += context_sign(j) * cj.estimate;
    variance += cj.std_error * cj.std_error;
  }
  r.std_error = std::sqrt(variance);
  r.violated = r.value - 2.0 * r.std_error > kClassicalBound;
  return r;
}

double noisy_inequality_value(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("p = {} outside [0,1]", p));
  return 12.0 * p - 6.0;
}

double coupon_expectation(int n, double p0) {
  if (n < 1) throw DomainError(fmt::format("coupon count {} must be positive", n));
  if (!(p0 >= 0.0 && p0 < 1.0)) throw DomainError(fmt::format("p0 = {} outside [0,1)", p0));
  double harmonic = 0.0;
  for (int i = n; i >= 1; --i) harmonic += 1.0 / i;
  return n / (1.0 - p0) * harmonic;
}

std::vector<SweepPoint> sweep_noise(const SquareOperators& square, const std::vector<double>& p_grid,
                                    std::int64_t rounds, std::uint64_t seed, std::int64_t burn_in) {
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("grid value {} outside [0,1]", p));
  }
  const auto perfect = build_perfect_chain(square);
  std::vector<SweepPoint> points(p_grid.size());
  parallel_for(static_cast<std::int64_t>(p_grid.size()), [&](std::int64_t k) {
    const double p = p_grid[k];
    ExperimentConfig config;
    config.rounds = rounds;
    config.burn_in = burn_in;
    config.alignment_p = p;
    config.seed = seed;
    const auto chain = build_error_chain(perfect, p);
    auto rng = Rng::substream(seed, static_cast<std::uint64_t>(k));
    const auto traj = run(config, square, chain, rng);
    points[k] = SweepPoint{p, evaluate_inequality(estimate_correlators(traj)),
                           noisy_inequality_value(p)};
  });
  return points;
}

}  // namespace pmrecycle
