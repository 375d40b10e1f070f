#pragma once

#include "boussinesq/random.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boussinesq::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitBadConfig = 2 };

/// expsum, kernel, strichartz, maximal, converge, randomize, duality, all.
const std::vector<std::string>& subcommands();

/// Every tunable with its default; exponents accept the string "inf".
nlohmann::json default_config();

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Defaults overlaid with the file's contents. Parse errors carry line:column;
/// unknown fields are rejected by dotted name.
nlohmann::json load_config(const std::optional<std::filesystem::path>& path);

/// "section.key=value"; value is parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Pure validation; an empty list means runnable.
std::vector<std::string> validate_config(const nlohmann::json& config);

struct RunOptions {
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = "boussinesq_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> seed2;
  std::optional<int> threads;
  std::vector<std::string> overrides;
  std::optional<std::vector<int>> N_list;  ///< replaces the N list of expsum and strichartz
};

struct RunManifest {
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  RandomSeedPair seeds;
  std::string tool_version = kToolVersion;
  double duration_seconds = 0.0;
  std::vector<std::string> files;

  nlohmann::json to_json() const;
};

/// Runs the mapped experiment(s), writes reports under out_dir and returns
/// kExitPass, kExitCheckFailed (failing invariants named on err) or kExitBadConfig.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace boussinesq::cli
