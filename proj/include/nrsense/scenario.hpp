#pragma once

// Run configuration shared by the roc, mc and validate subcommands: loaded
// from JSON, overridden by flags, echoed back as JSON next to the output.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nrsense/detector.hpp"
#include "nrsense/fusion.hpp"

namespace nrsense {

struct UserConfig {
  int n = 3;
  double snr_db = 10.0;
  double u = 5.0;
  double pe = 0.01;
  int L = 1;

  bool operator==(const UserConfig&) const = default;
};

/// Log-spaced per-user false-alarm grid, written "min:max:count".
struct GridSpec {
  double min = 1e-4;
  double max = 1.0;
  int count = 50;

  static GridSpec parse(const std::string& text);
  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::vector<double> values() const;
};

struct Scenario {
  std::vector<UserConfig> users = std::vector<UserConfig>(3);
  GridSpec pf_grid;
  std::vector<std::string> methods{"quadrature"};
  int k = 500;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string out = "-"; // "-" writes the CSV to stdout

  /// Throws InputError (bad structure) or DomainError (bad values).
  void validate() const;

  [[nodiscard]] AvgPdMethod method(const std::string& label) const;
  [[nodiscard]] FusionNetwork network(const AvgPdMethod& method) const;

  [[nodiscard]] nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& doc);
};

Scenario load_scenario(const std::filesystem::path& path);

/// Splits "a,b,c" into trimmed, non-empty items.
std::vector<std::string> split_list(const std::string& text);

} // namespace nrsense
