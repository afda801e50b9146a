#include "pmrecycle/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bitset>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "pmrecycle/errors.hpp"

namespace pmrecycle {

std::string to_string(SimulationMode mode) {
  return mode == SimulationMode::Chain ? "chain" : "quantum";
}

SimulationMode parse_mode(const std::string& text) {
  if (text == "chain") return SimulationMode::Chain;
  if (text == "quantum") return SimulationMode::Quantum;
  throw ConfigError(fmt::format("unknown mode '{}', expected chain or quantum", text));
}

int default_burn_in() { return static_cast<int>(std::ceil(mixing_time_bound(1e-3))); }

void ExperimentConfig::validate() const {
  if (rounds <= 0) throw ConfigError(fmt::format("rounds must be positive, got {}", rounds));
  if (burn_in < 0) throw ConfigError(fmt::format("burn-in must be nonnegative, got {}", burn_in));
  if (burn_in >= rounds) {
    throw ConfigError(fmt::format("burn-in {} must be smaller than rounds {}", burn_in, rounds));
  }
  if (!(alignment_p >= 0.0 && alignment_p <= 1.0)) {
    throw ConfigError(fmt::format("alignment probability {} outside [0,1]", alignment_p));
  }
  if (initial_state && (*initial_state < 0 || *initial_state >= kNumTripleStates)) {
    throw ConfigError(fmt::format("initial state {} outside 0..23", *initial_state));
  }
}

int chain_state_of(int context, const Outcomes& outcomes) {
  const int product = outcomes[0] * outcomes[1] * outcomes[2];
  const int flat = flat_index(context, slot_of(outcomes));
  return product == context_sign(context) ? flat : kNumTripleStates + flat;
}

namespace {

void check_chain(const ExperimentConfig& config, const TransitionMatrix& chain) {
  if (chain.size() == kNumChainStates) {
    if (!chain.alignment() || std::abs(*chain.alignment() - config.alignment_p) > 1e-15) {
      throw ConfigError(fmt::format(
          "error chain was built for p = {}, experiment uses p = {}",
          chain.alignment() ? fmt::format("{}", *chain.alignment()) : std::string("?"),
          config.alignment_p));
    }
  } else if (chain.size() == kNumTripleStates) {
    if (config.alignment_p != 1.0) {
      throw ConfigError("the 24-state chain only supports alignment_p = 1; build the error chain");
    }
  } else {
    throw ConfigError(fmt::format("chain has {} states, expected 24 or 48", chain.size()));
  }
}

// Samples index k with probability weights[k] / sum(weights).
int sample_weighted(const std::array<double, kSlotsPerContext>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  int last_positive = 0;
  for (int k = 0; k < kSlotsPerContext; ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    if (u < weights[k]) return k;
    u -= weights[k];
  }
  return last_positive;
}

class ChainStepper {
 public:
  explicit ChainStepper(const TransitionMatrix& chain) : chain_(chain) {}

  int measure(int current, int context, Rng& rng) const {
    std::array<double, kSlotsPerContext> w{};
    for (int i = 0; i < kSlotsPerContext; ++i) {
      w[i] = chain_(flat_index(context, i + 1), current);
    }
    return 1 + sample_weighted(w, rng);
  }

 private:
  const TransitionMatrix& chain_;
};

class QuantumStepper {
 public:
  explicit QuantumStepper(const SquareOperators& square)
      : states_(all_triple_states(square)),
        mixed_(ComplexMatrix::Identity(kDim, kDim) / double(kDim)) {}

  void reset(int flat) { rho_ = states_[flat].projector; }
  void reset_mixed() { rho_ = mixed_; }

  int measure(int context, Rng& rng) {
    std::array<double, kSlotsPerContext> w{};
    for (int i = 0; i < kSlotsPerContext; ++i) {
      w[i] = born_probability(rho_, states_[flat_index(context, i + 1)]);
    }
    const int slot = 1 + sample_weighted(w, rng);
    rho_ = states_[flat_index(context, slot)].projector;
    return slot;
  }

 private:
  std::vector<TripleState> states_;
  ComplexMatrix mixed_;
  ComplexMatrix rho_;
};

}  // namespace

Trajectory run(const ExperimentConfig& config, const SquareOperators& square,
               const TransitionMatrix& chain) {
  Rng rng(config.seed);
  return run(config, square, chain, rng);
}

Trajectory run(const ExperimentConfig& config, const SquareOperators& square,
               const TransitionMatrix& chain, Rng& rng) {
  config.validate();
  check_chain(config, chain);

  Trajectory traj{config, {}};
  traj.records.reserve(static_cast<size_t>(config.rounds));

  const int start = config.initial_state ? *config.initial_state
                                         : rng.uniform_int(0, kNumTripleStates - 1);
  const bool quantum = config.mode == SimulationMode::Quantum;
  ChainStepper chain_stepper(chain);
  std::optional<QuantumStepper> quantum_stepper;
  if (quantum) {
    quantum_stepper.emplace(square);
    quantum_stepper->reset(start);
  }

  int current = start;
  for (std::int64_t round = 0; round < config.rounds; ++round) {
    MeasurementRecord rec;
    rec.round = round;
    rec.context = rng.uniform_int(1, kNumContexts);
    if (rng.bernoulli(config.alignment_p)) {
      const int slot = quantum ? quantum_stepper->measure(rec.context, rng)
                               : chain_stepper.measure(current, rec.context, rng);
      rec.outcomes = slot_outcomes(slot, context_sign(rec.context));
      rec.chain_state = flat_index(rec.context, slot);
    } else {
      const int slot = rng.uniform_int(1, kSlotsPerContext);
      rec.outcomes = slot_outcomes(slot, -context_sign(rec.context));
      rec.chain_state = kNumTripleStates + flat_index(rec.context, slot);
      rec.is_error = true;
      if (quantum) quantum_stepper->reset_mixed();
    }
    current = rec.chain_state;
    traj.records.push_back(rec);
  }
  return traj;
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body) {
  const auto workers = static_cast<std::int64_t>(
      std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), 64U)));
  if (workers == 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::int64_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::int64_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void run_trials(const ExperimentConfig& config, const SquareOperators& square,
                const TransitionMatrix& chain, std::int64_t count,
                const std::function<void(std::int64_t, Trajectory&&)>& consume) {
  config.validate();
  check_chain(config, chain);
  parallel_for(count, [&](std::int64_t k) {
    auto rng = Rng::substream(config.seed, static_cast<std::uint64_t>(k));
    consume(k, run(config, square, chain, rng));
  });
}

std::vector<std::int64_t> recurrence_times(const Trajectory& traj, int state) {
  std::vector<std::int64_t> gaps;
  std::optional<std::int64_t> last;
  for (const auto& rec : traj.records) {
    if (rec.chain_state != state) continue;
    if (last) gaps.push_back(rec.round - *last);
    last = rec.round;
  }
  return gaps;
}

std::optional<std::int64_t> coupon_time(const Trajectory& traj) {
  std::bitset<kNumTripleStates> seen;
  std::int64_t count = 0;
  for (const auto& rec : traj.records) {
    if (rec.round < traj.config.burn_in) continue;
    ++count;
    if (rec.chain_state < kNumTripleStates) {
      seen.set(static_cast<size_t>(rec.chain_state));
      if (seen.all()) return count;
    }
  }
  return std::nullopt;
}

}  // namespace pmrecycle
