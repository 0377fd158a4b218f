#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectranet/config.hpp"
#include "spectranet/consistency.hpp"
#include "spectranet/market_data.hpp"

namespace spectranet {

inline constexpr std::string_view kVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);

/// The panel a config describes, and a hash identifying its source bytes
/// (the CSV file, or the canonical synth parameters).
struct LoadedInput {
  ReturnPanel panel;
  std::string sha256;
};

LoadedInput load_input(const RunConfig& config);

struct RunReport {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;  // relative to output_dir, manifest last
  std::vector<std::string> warnings;
  std::string input_sha256;
};

/// Runs the full pipeline and writes, under config.output_dir:
///   eigenvalues.{csv,json}       index, eigenvalue, regime
///   bounds.{csv,json}            noise band, omitted when T <= N
///   original_tree.{csv,json}     MST edge list of the full correlation
///   clamps_<mode>.{csv,json}     entries clamped per band
///   curve_<mode>_k<k>.{csv,json} survivor curves
///   manifest.json                input hash, config echo, file hashes
RunReport run_analyze(const RunConfig& config);

/// Survivor curves of several datasets on a common L* grid.
struct AveragedCurve {
  StartMode start_mode = StartMode::from_largest;
  DegreeThreshold threshold = DegreeThreshold::at_least(1);
  std::vector<double> axis;
  std::vector<std::optional<double>> mean;
  std::vector<std::size_t> contributors;
};

/// Evaluates each curve on the grid of the curve with the most points by
/// linear interpolation between its defined neighbours, then averages the
/// defined values per grid point. Needs >= 2 curves sharing start mode, k and
/// axis endpoints.
AveragedCurve average_curves(const std::vector<SurvivorCurve>& curves);

/// Linear interpolation of a curve at x; empty when x falls next to an
/// undefined point or outside the axis.
std::optional<double> interpolate(const SurvivorCurve& curve, double x);

/// CSV `start_mode,k,L_star,ratio,contributors`.
void write_average_csv(std::ostream& out, const AveragedCurve& avg);

/// Reads the curve files, averages them and writes `output` (CSV; a JSON
/// twin is written alongside when `json` is set).
AveragedCurve run_average(const std::vector<std::filesystem::path>& curve_files,
                          const std::filesystem::path& output, bool json = false);

}  // namespace spectranet
