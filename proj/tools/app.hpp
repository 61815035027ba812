#pragma once
// mu3 command-line front end: link sources, run records, ergodic configs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mu3/flows.hpp"
#include "mu3/invariants.hpp"

namespace mu3::cli {

/// Every default a command can fall back on. Bump `version` when a value changes.
struct Defaults {
  static constexpr int version = 1;
  static constexpr int lk_n = 256;
  static constexpr int mu_n = 48;
  static constexpr int subtorus_n = 256;
  static constexpr double tol_exact = kDefaultTolExact;
  static constexpr const char* run_log = "mu3_runs.jsonl";
  static constexpr double tube_radius = 0.25;
  static constexpr double profile_r0 = 0.7;
  static constexpr int profile_smoothness = 6;
  static constexpr int samples = 64;
  static constexpr double T_periods = 40.0;
  static constexpr int steps_per_period = 100;
  static constexpr int grid_n = 48;
  static constexpr int energy_n = 32;
  static constexpr int energy_mc = 20000;
};
nlohmann::json defaults_table();

struct RunRecord {
  std::string timestamp;
  std::string command;
  nlohmann::json config;
  std::string config_hash;
  int grid_n = 0;
  std::uint64_t seed = 0;
  std::map<std::string, InvariantResult> results;
  std::map<std::string, double> timings_ms;
  std::vector<std::string> artifacts;
  /// Values that are not invariants (stderrs, energies, ...).
  nlohmann::json extra = nlohmann::json::object();
};
nlohmann::json to_json(const RunRecord& r);
/// Hex SHA-256 of the compact dump of `config`.
std::string config_hash(const nlohmann::json& config);
void append_run_log(const std::filesystem::path& path, const RunRecord& r);

struct ErgodicConfig {
  std::string tubes = "borromean";
  double radius = Defaults::tube_radius;
  std::vector<double> fluxes{1.0, 1.0, 1.0};
  Profile profile{"flat_top", Defaults::profile_r0, Defaults::profile_smoothness};
  int samples = Defaults::samples;
  /// Exactly one of T_periods / T is used; T wins when both are set.
  double T_periods = Defaults::T_periods;
  std::optional<double> T;
  int steps_per_period = Defaults::steps_per_period;
  std::optional<double> dt;
  std::uint64_t seed = 1;
  int grid_n = Defaults::grid_n;
  ClosureFamily closure = ClosureFamily::Short;
  EstimatorMode mode = EstimatorMode::Covering;
  std::optional<SwirlDeformation> deformation;
  bool pairwise = true;
  int energy_n = Defaults::energy_n;
  int energy_mc = Defaults::energy_mc;

  /// Throws IoError on unknown keys or wrong types.
  static ErgodicConfig from_json(const nlohmann::json& doc);
  static ErgodicConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct ErgodicReport {
  TimeGrid time;
  Estimate estimate;
  double prediction = 0.0;
  int core_mu = 0;
  std::array<Estimate, 3> pairwise{};
  bool has_pairwise = false;
  EnergyReport energy;
  /// |H123| / E2^(3/2), 0 when E2 vanishes.
  double ratio = 0.0;
  std::map<std::string, double> timings_ms;
};

std::shared_ptr<const VectorFieldSpec> build_field(const ErgodicConfig& cfg);
ErgodicReport run_ergodic(const ErgodicConfig& cfg, std::shared_ptr<const VectorFieldSpec> field = nullptr);

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 1 usage, 2 geometry, 3 numerics, 4 i/o.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mu3::cli
