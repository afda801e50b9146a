#include "pmrecycle/io.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "pmrecycle/errors.hpp"

namespace pmrecycle::io {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z",
                     std::chrono::time_point_cast<std::chrono::seconds>(now));
}

}  // namespace

std::string tool_version() { return "1.0.0"; }

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::string matrix_csv(const TransitionMatrix& t) {
  std::string out;
  for (int r = 0; r < t.size(); ++r) {
    for (int c = 0; c < t.size(); ++c) {
      if (c > 0) out += ',';
      out += format_number(t(r, c));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json matrix_json(const TransitionMatrix& t) {
  auto rows = nlohmann::json::array();
  for (int r = 0; r < t.size(); ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < t.size(); ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return {{"n", t.size()}, {"entries", std::move(rows)}};
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "round,context,s1,s2,s3,chain_state,is_error\n";
  out.reserve(traj.records.size() * 24);
  for (const auto& r : traj.records) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{}\n", r.round, r.context,
                   r.outcomes[0], r.outcomes[1], r.outcomes[2], r.chain_state,
                   r.is_error ? 1 : 0);
  }
  return out;
}

nlohmann::json report_json(const InequalityReport& r) {
  return {
      {"correlators", r.correlators},
      {"value", r.value},
      {"std_error", r.std_error},
      {"bound", r.classical_bound},
      {"quantum", r.quantum_value},
      {"violated", r.violated},
  };
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "p,empirical,analytic,std_error,violated\n";
  for (const auto& pt : points) {
    out += fmt::format("{},{},{},{},{}\n", format_number(pt.p), format_number(pt.report.value),
                       format_number(pt.analytic), format_number(pt.report.std_error),
                       pt.report.violated ? "true" : "false");
  }
  return out;
}

nlohmann::json config_json(const ExperimentConfig& config) {
  nlohmann::json j = {
      {"rounds", config.rounds},
      {"burn_in", config.burn_in},
      {"alignment_p", config.alignment_p},
      {"seed", config.seed},
      {"mode", to_string(config.mode)},
  };
  if (config.initial_state) {
    j["initial_state"] = *config.initial_state;
  } else {
    j["initial_state"] = "uniform";
  }
  return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError(fmt::format("write to {} failed", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(fmt::format("cannot move output into place at {}", path.string()));
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

RunManifest::RunManifest(std::string subcommand, nlohmann::json config, std::uint64_t seed)
    : subcommand_(std::move(subcommand)), config_(std::move(config)), seed_(seed), started_(utc_now()) {}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs_.push_back({{"path", path.filename().string()},
                      {"sha256", sha256_file(path)},
                      {"bytes", std::filesystem::file_size(path)}});
}

nlohmann::json RunManifest::to_json() const {
  return {
      {"tool", "pmrecycle"},
      {"version", tool_version()},
      {"subcommand", subcommand_},
      {"config", config_},
      {"seed", seed_},
      {"started", started_},
      {"finished", finished_},
      {"outputs", outputs_},
  };
}

void RunManifest::write(const std::filesystem::path& path) {
  finished_ = utc_now();
  write_atomic(path, to_json().dump(2) + "\n");
}

}  // namespace pmrecycle::io
