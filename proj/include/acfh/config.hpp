#pragma once

// Run configuration.
//
// Two equivalent on-disk forms are accepted:
//   * flat "key = value" text, one entry per line, '#' starts a comment;
//   * a single JSON object with the same keys (lists as JSON arrays).
// Lists in the text form are comma separated. Lengths accept a trailing "pi"
// ("2pi", "2*pi") for multiples of pi. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "acfh/admm.hpp"
#include "acfh/model.hpp"

namespace acfh {

enum class InitialCondition { sine, uniform_random, custom_snapshot };

std::string to_string(InitialCondition ic);

struct StudySettings {
  std::vector<double> ladder;        ///< N values (spatial) or tau values (temporal)
  double reference = 0.0;            ///< reference N or tau
  int step = 2;                      ///< time step diagnosed by rate/phi studies
  std::vector<double> rho_factors = {0.1, 1.0, 10.0};  ///< multiples of rho_opt swept by rate-study
  std::vector<double> alphas = {0.25, 0.5, 1.0, 1.25, 1.5, 1.6};
};

struct RunConfig {
  ModelParams params;
  double final_time = 1.0;
  AdmmConfig admm;
  InitialCondition initial_condition = InitialCondition::sine;
  double ic_offset = 0.5;
  double ic_amplitude = 0.25;
  std::filesystem::path ic_snapshot;
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times;
  std::filesystem::path output_dir;  ///< empty: nothing written
  StudySettings study;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  /// Number of steps M = T / tau (T must be a multiple of tau up to rounding).
  int steps() const;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues parse_json_config(const std::string& text);
/// Dispatches on the first non-blank character ('{' selects JSON).
KeyValues parse_config_text(const std::string& text);

RunConfig config_from_key_values(const KeyValues& kv);
RunConfig load_config(const std::filesystem::path& path);

/// Renders cfg in the key = value form; load(render(cfg)) reproduces cfg.
std::string render_config(const RunConfig& cfg);

}  // namespace acfh
