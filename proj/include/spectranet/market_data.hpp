#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spectranet/matrix.hpp"

namespace spectranet {

/// Calendar date. Text form is ISO-8601 YYYY-MM-DD only.
class Date {
 public:
  constexpr Date() = default;
  explicit constexpr Date(std::chrono::sys_days days) : days_(days) {}

  /// Throws InputError on anything other than a valid YYYY-MM-DD.
  static Date parse(std::string_view text);

  std::chrono::sys_days days() const { return days_; }
  std::string to_string() const;

  Date next_day() const { return Date(days_ + std::chrono::days(1)); }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Price history of one ticker: strictly increasing dates, positive prices.
struct PriceSeries {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> prices;
};

/// Throws InputError if a PriceSeries invariant is violated.
void validate(const PriceSeries& series);

/// N x T log returns. Row j belongs to tickers[j]; column t to dates[t],
/// the later of the two prices the return spans.
struct ReturnPanel {
  std::vector<std::string> tickers;
  std::vector<Date> dates;
  Matrix returns;

  std::size_t n() const { return returns.rows(); }
  std::size_t t() const { return returns.cols(); }
};

void validate(const ReturnPanel& panel);

enum class AlignPolicy { intersect, forward_fill };

AlignPolicy parse_align_policy(std::string_view text);
std::string_view to_string(AlignPolicy policy);

/// Reads the price CSV: header `date,TICKER...`, one row per ISO date, empty
/// cells for missing observations. Series are returned sorted by ticker, so
/// the result does not depend on column order. Any unparseable date,
/// unparseable number or non-positive price aborts with an InputError naming
/// the row; so does a ticker with fewer than two usable rows.
std::vector<PriceSeries> load_prices(const std::filesystem::path& source);
std::vector<PriceSeries> load_prices(std::istream& in);

/// Puts all series on one date grid; see AlignPolicy. forward_fill uses the
/// union of dates from the latest first observation onwards and carries the
/// last price forward.
std::vector<PriceSeries> align(const std::vector<PriceSeries>& series,
                               AlignPolicy policy = AlignPolicy::intersect);

/// returns[j][t] = ln P_j(t+1) - ln P_j(t). Inputs must share one date vector.
ReturnPanel log_returns(const std::vector<PriceSeries>& series);

/// Rescales each row to mean 0 and sample standard deviation 1 (T-1
/// denominator). Pearson correlation is invariant under this rescaling, so
/// correlation(standardize(p)) equals correlation(p) up to rounding; it only
/// matters where raw eigenvalues are compared with noise bounds.
ReturnPanel standardize(const ReturnPanel& panel);

/// Writes the price CSV format read by load_prices. Prices use 17
/// significant digits. All series must be aligned.
void write_prices_csv(std::ostream& out, const std::vector<PriceSeries>& series);

/// Rebuilds prices from a return panel starting at `start_price` on the day
/// before the first return date.
std::vector<PriceSeries> prices_from_returns(const ReturnPanel& panel, double start_price = 100.0);

}  // namespace spectranet
