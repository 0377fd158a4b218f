#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectranet/consistency.hpp"
#include "spectranet/market_data.hpp"
#include "spectranet/synth.hpp"

namespace spectranet {

enum class SynthModel { noise, one_factor, block_factor };

SynthModel parse_synth_model(std::string_view text);
std::string_view to_string(SynthModel model);

struct SynthInput {
  SynthModel model = SynthModel::one_factor;
  FactorSpec spec;
};

struct RunConfig {
  /// Price CSV path; unset when `synth` is used.
  std::optional<std::filesystem::path> input_csv;
  SynthInput synth;
  AlignPolicy align = AlignPolicy::intersect;
  std::vector<StartMode> start_modes{StartMode::from_largest, StartMode::from_second};
  std::vector<DegreeThreshold> thresholds{DegreeThreshold::at_least(1), DegreeThreshold::max()};
  bool renormalize = false;
  AxisFormula axis = AxisFormula::two_x_minus_1;
  std::filesystem::path output_dir = "spectranet_out";
  bool write_csv = true;
  bool write_json = false;
};

using ConfigMap = std::map<std::string, std::string>;

/// Every key accepted in config files and as `--key value` flags.
const std::vector<std::string>& config_keys();

/// Flat `key = value` text. `#` and `;` start comments; `[section]` lines
/// are ignored. Text whose first non-blank character is `{` is read as a run
/// manifest and its "config" object is used instead.
ConfigMap parse_config_text(std::string_view text);
ConfigMap load_config_file(const std::filesystem::path& path);

/// Throws ConfigError on unknown keys, bad values or an empty selection.
RunConfig to_run_config(const ConfigMap& values);

/// Canonical key/value echo of a config; to_run_config inverts it.
ConfigMap to_config_map(const RunConfig& config);

}  // namespace spectranet
