#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectranet/market_data.hpp"
#include "spectranet/network.hpp"
#include "spectranet/spectral.hpp"

namespace spectranet {

/// Where the swept bands begin: at lambda_1, or at lambda_2 to exclude the
/// market mode.
enum class StartMode { from_largest, from_second };

StartMode parse_start_mode(std::string_view text);
std::string_view to_string(StartMode mode);
std::size_t band_start(StartMode mode);

/// Degree threshold k for "stocks with at least k links in the original
/// tree". The max token means the original tree's maximum degree.
class DegreeThreshold {
 public:
  static DegreeThreshold at_least(std::size_t k);
  static DegreeThreshold max() { return DegreeThreshold(0); }

  /// Accepts a positive integer or "max".
  static DegreeThreshold parse(std::string_view text);

  bool is_max() const { return k_ == 0; }
  std::size_t resolve(const DegreeSequence& original) const {
    return is_max() ? original.max() : k_;
  }
  std::string to_string() const;

  friend bool operator==(const DegreeThreshold&, const DegreeThreshold&) = default;

 private:
  explicit DegreeThreshold(std::size_t k) : k_(k) {}
  std::size_t k_;
};

/// Mean over qualifying stocks of the fraction of original neighbors that
/// are also neighbors in the estimated tree. `value` is empty when no stock
/// qualifies.
struct SurvivorRatio {
  std::optional<double> value;
  std::size_t qualifying = 0;
};

/// Stocks qualify by their degree in `original` only, so the measure is not
/// symmetric in its two arguments.
SurvivorRatio survivor_ratio(const SpanningTree& original, const SpanningTree& estimated,
                             std::size_t k);

struct SurvivorPoint {
  SpectralBand band;
  std::size_t threshold = 1;
  std::optional<double> ratio;
  std::size_t m = 0;
};

/// L* variants. two_x_minus_1 spans [-1, 1]; literal is
/// (L - L_min)/(L_max - L_min) - 1 and spans [-1, 0].
enum class AxisFormula { two_x_minus_1, literal };

AxisFormula parse_axis_formula(std::string_view text);
std::string_view to_string(AxisFormula formula);

/// Maps strictly increasing eigenvalue counts onto L*. Needs >= 2 counts.
std::vector<double> normalize_axis(const std::vector<std::size_t>& counts,
                                   AxisFormula formula = AxisFormula::two_x_minus_1);

struct SurvivorCurve {
  StartMode start_mode = StartMode::from_largest;
  DegreeThreshold threshold = DegreeThreshold::at_least(1);
  std::size_t resolved_k = 1;
  std::vector<SurvivorPoint> points;  // ascending band end
  std::vector<double> axis;           // L*, one per point
};

struct SweepOptions {
  /// false: raw band sums with a unit diagonal (clamp_to_correlation).
  /// true: divide by the band's own diagonal (renormalize). A rank-one band
  /// then saturates to +-1 everywhere and its tree is decided by tie-breaks.
  bool renormalize = false;
  AxisFormula axis = AxisFormula::two_x_minus_1;
  /// 0 = SPECTRANET_THREADS if set, else the hardware default.
  unsigned threads = 0;
};

struct SweepResult {
  StartMode start_mode = StartMode::from_largest;
  SpanningTree original;
  DegreeSequence original_degrees;
  /// One tree per band end, ascending.
  std::vector<SpanningTree> estimated;
  /// Off-diagonal entries clamped while turning each band into a correlation.
  std::vector<std::size_t> clamp_counts;
  std::vector<SurvivorCurve> curves;  // one per threshold, in input order
};

/// Worker count for the band sweep.
unsigned resolve_thread_count(unsigned requested);

/// The original tree comes from `c`; for each band end i = start..N the
/// estimated tree is the MST of the distances of reconstruct(eig, (start, i)),
/// turned into a correlation matrix as selected by options.renormalize.
/// Bands are processed in parallel chunks, and the output does not depend on
/// the thread count.
SweepResult sweep(const CorrelationMatrix& c, const EigenSystem& eig, StartMode start_mode,
                  const std::vector<DegreeThreshold>& thresholds, const SweepOptions& options = {});

/// Convenience overload computing correlation and eigensystem from a panel.
SweepResult sweep(const ReturnPanel& panel, StartMode start_mode,
                  const std::vector<DegreeThreshold>& thresholds, const SweepOptions& options = {});

/// 1-based eigenvalue indices split by the noise band. Each group is a
/// contiguous run of the descending order.
struct BandRegimes {
  std::vector<std::size_t> above;  // lambda > lambda_plus
  std::vector<std::size_t> bulk;
  std::vector<std::size_t> below;  // lambda < lambda_minus
};

BandRegimes band_regimes(const EigenSystem& eig, const RMTBounds& bounds);

/// Curve CSV: `start_mode,k,band_end,L_star,ratio,m_count`; undefined
/// ratios are empty fields.
void write_curve_csv(std::ostream& out, const SurvivorCurve& curve);
SurvivorCurve read_curve_csv(std::istream& in);

}  // namespace spectranet
