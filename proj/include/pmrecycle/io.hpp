#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmrecycle/analysis.hpp"
#include "pmrecycle/chain.hpp"
#include "pmrecycle/experiment.hpp"

namespace pmrecycle::io {

/// 17 significant digits; lossless for doubles.
std::string format_number(double x);

std::string matrix_csv(const TransitionMatrix& t);
/// {"n": int, "entries": [[...], ...]}
nlohmann::json matrix_json(const TransitionMatrix& t);

/// Header round,context,s1,s2,s3,chain_state,is_error.
std::string trajectory_csv(const Trajectory& traj);

nlohmann::json report_json(const InequalityReport& r);

/// Header p,empirical,analytic,std_error,violated.
std::string sweep_csv(const std::vector<SweepPoint>& points);

nlohmann::json config_json(const ExperimentConfig& config);

/// Writes to a sibling temporary and renames over `path`. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Hex SHA-256 of a file. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record for the files written by one subcommand.
class RunManifest {
 public:
  RunManifest(std::string subcommand, nlohmann::json config, std::uint64_t seed);

  void add_output(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Stamps the finish time and writes atomically.
  void write(const std::filesystem::path& path);

 private:
  std::string subcommand_;
  nlohmann::json config_;
  std::uint64_t seed_;
  std::string started_;
  std::string finished_;
  nlohmann::json outputs_ = nlohmann::json::array();
};

std::string tool_version();

}  // namespace pmrecycle::io
