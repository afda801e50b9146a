#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmrecycle/chain.hpp"
#include "pmrecycle/quantum_core.hpp"
#include "pmrecycle/rng.hpp"

namespace pmrecycle {

enum class SimulationMode { Chain, Quantum };

std::string to_string(SimulationMode mode);
/// Throws ConfigError.
SimulationMode parse_mode(const std::string& text);

/// ceil((3/2) ln(24/1e-3)) = 16.
int default_burn_in();

struct ExperimentConfig {
  std::int64_t rounds = 0;
  std::int64_t burn_in = default_burn_in();
  double alignment_p = 1.0;
  std::uint64_t seed = 0;
  /// Flat index 0..23 of the starting triple state; nullopt draws it uniformly.
  std::optional<int> initial_state;
  SimulationMode mode = SimulationMode::Chain;

  /// Throws ConfigError.
  void validate() const;
};

struct MeasurementRecord {
  std::int64_t round = 0;
  int context = 0;  // 1..6
  Outcomes outcomes{};
  int chain_state = 0;  // 0..47
  bool is_error = false;
};

struct Trajectory {
  ExperimentConfig config;
  std::vector<MeasurementRecord> records;
};

/// Chain state of an outcome triple: flat index when the product has the
/// context sign, otherwise 24 + flat index of the matching error triple.
int chain_state_of(int context, const Outcomes& outcomes);

/// Simulates `config.rounds` recycled measurement rounds.
///
/// Each round draws a context uniformly. With probability alignment_p the
/// measurement is perfect: the chain mode samples the transition column of
/// the current state restricted to that context's triple states, the
/// quantum mode projects the density matrix by the Born rule. Otherwise one
/// of the four wrong-sign triples is recorded uniformly and the system is
/// left maximally mixed.
///
/// `chain` must be the 48-state error chain built with alignment_p, or the
/// 24-state perfect chain when alignment_p == 1. Throws ConfigError.
Trajectory run(const ExperimentConfig& config, const SquareOperators& square,
               const TransitionMatrix& chain);

/// Same as run() but draws from an explicit generator; used for substreams.
Trajectory run(const ExperimentConfig& config, const SquareOperators& square,
               const TransitionMatrix& chain, Rng& rng);

/// Runs `count` independent trajectories, trajectory k on
/// Rng::substream(config.seed, k), and hands each to `consume(k, traj)`.
/// Trajectories are produced in parallel; `consume` may be called
/// concurrently with different k.
void run_trials(const ExperimentConfig& config, const SquareOperators& square,
                const TransitionMatrix& chain, std::int64_t count,
                const std::function<void(std::int64_t, Trajectory&&)>& consume);

/// Gaps between successive visits to chain state `state`.
std::vector<std::int64_t> recurrence_times(const Trajectory& traj, int state);

/// Number of post-burn-in rounds until each of the 24 triple states has
/// been recorded once; nullopt if the trajectory ends first.
std::optional<std::int64_t> coupon_time(const Trajectory& traj);

/// Runs `body(i)` for i in [0, count) over the available hardware threads.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body);

}  // namespace pmrecycle
