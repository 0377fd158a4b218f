#include "spectranet/consistency.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <istream>
#include <ostream>
#include <thread>

#include "csv.hpp"
#include "spectranet/errors.hpp"

namespace spectranet {

StartMode parse_start_mode(std::string_view text) {
  if (text == "from_largest") return StartMode::from_largest;
  if (text == "from_second") return StartMode::from_second;
  throw ConfigError("unknown start mode '" + std::string(text) + "'");
}

std::string_view to_string(StartMode mode) {
  return mode == StartMode::from_largest ? "from_largest" : "from_second";
}

std::size_t band_start(StartMode mode) { return mode == StartMode::from_largest ? 1 : 2; }

DegreeThreshold DegreeThreshold::at_least(std::size_t k) {
  if (k == 0) throw ConfigError("degree threshold must be at least 1");
  return DegreeThreshold(k);
}

DegreeThreshold DegreeThreshold::parse(std::string_view text) {
  text = detail::trim(text);
  if (text == "max" || text == "Max" || text == "MAX") return max();
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc{} || ptr != text.data() + text.size() || k == 0) {
    throw ConfigError("degree threshold must be a positive integer or 'max', got '" +
                      std::string(text) + "'");
  }
  return DegreeThreshold(k);
}

std::string DegreeThreshold::to_string() const { return is_max() ? "max" : std::to_string(k_); }

SurvivorRatio survivor_ratio(const SpanningTree& original, const SpanningTree& estimated,
                             std::size_t k) {
  if (original.n != estimated.n) {
    throw InputError("survivor_ratio: trees have " + std::to_string(original.n) + " and " +
                     std::to_string(estimated.n) + " nodes");
  }
  if (k == 0) throw InputError("survivor_ratio: degree threshold must be at least 1");
  const auto orig_adj = adjacency(original);
  const auto est_adj = adjacency(estimated);

  SurvivorRatio out;
  double sum = 0.0;
  for (std::size_t j = 0; j < original.n; ++j) {
    const auto& o = orig_adj[j];
    if (o.size() < k) continue;
    const auto& e = est_adj[j];
    std::size_t shared = 0;
    auto ei = e.begin();
    for (std::size_t node : o) {
      while (ei != e.end() && *ei < node) ++ei;
      if (ei != e.end() && *ei == node) ++shared;
    }
    sum += static_cast<double>(shared) / static_cast<double>(o.size());
    ++out.qualifying;
  }
  if (out.qualifying > 0) out.value = sum / static_cast<double>(out.qualifying);
  return out;
}

AxisFormula parse_axis_formula(std::string_view text) {
  if (text == "two_x_minus_1") return AxisFormula::two_x_minus_1;
  if (text == "literal") return AxisFormula::literal;
  throw ConfigError("unknown axis formula '" + std::string(text) + "'");
}

std::string_view to_string(AxisFormula formula) {
  return formula == AxisFormula::two_x_minus_1 ? "two_x_minus_1" : "literal";
}

std::vector<double> normalize_axis(const std::vector<std::size_t>& counts, AxisFormula formula) {
  if (counts.size() < 2) throw InputError("normalize_axis: need at least 2 counts");
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] <= counts[i - 1]) throw InputError("normalize_axis: counts must be strictly increasing");
  }
  const double lo = static_cast<double>(counts.front());
  const double span = static_cast<double>(counts.back()) - lo;
  std::vector<double> axis;
  axis.reserve(counts.size());
  for (std::size_t c : counts) {
    const double x = (static_cast<double>(c) - lo) / span;
    axis.push_back(formula == AxisFormula::two_x_minus_1 ? 2.0 * x - 1.0 : x - 1.0);
  }
  axis.front() = -1.0;
  axis.back() = formula == AxisFormula::two_x_minus_1 ? 1.0 : 0.0;
  return axis;
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPECTRANET_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const CorrelationMatrix& c, const EigenSystem& eig, StartMode start_mode,
                  const std::vector<DegreeThreshold>& thresholds, const SweepOptions& options) {
  const std::size_t n = c.n();
  if (eig.n() != n) throw InputError("sweep: eigensystem and correlation matrix differ in size");
  if (thresholds.empty()) throw ConfigError("sweep: no degree thresholds given");
  const std::size_t start = band_start(start_mode);
  if (start > n) throw InputError("sweep: not enough eigenvalues for " + std::string(to_string(start_mode)));

  SweepResult result;
  result.start_mode = start_mode;
  result.original = mst_kruskal(distance(c));
  result.original_degrees = degrees(result.original);

  const std::size_t bands = n - start + 1;
  result.estimated.resize(bands);
  result.clamp_counts.resize(bands);

  const std::size_t workers = std::min<std::size_t>(resolve_thread_count(options.threads), bands);
  std::vector<std::exception_ptr> errors(workers);
  auto run_chunk = [&](std::size_t w) {
    const std::size_t lo = bands * w / workers;
    const std::size_t hi = bands * (w + 1) / workers;
    try {
      ReconstructionAccumulator acc(eig, start);
      for (std::size_t b = lo; b < hi; ++b) {
        const Matrix& partial = acc.extend_to(start + b);
        Renormalized corr = options.renormalize ? renormalize(partial) : clamp_to_correlation(partial);
        result.clamp_counts[b] = corr.clamp_count;
        result.estimated[b] = mst_kruskal(distance(corr.matrix));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::size_t> counts(bands);
  for (std::size_t b = 0; b < bands; ++b) counts[b] = b + 1;
  std::vector<double> axis;
  if (bands >= 2) {
    axis = normalize_axis(counts, options.axis);
  } else {
    axis = {options.axis == AxisFormula::two_x_minus_1 ? 1.0 : 0.0};
  }

  for (const auto& threshold : thresholds) {
    SurvivorCurve curve;
    curve.start_mode = start_mode;
    curve.threshold = threshold;
    curve.resolved_k = threshold.resolve(result.original_degrees);
    curve.axis = axis;
    curve.points.reserve(bands);
    for (std::size_t b = 0; b < bands; ++b) {
      const auto r = survivor_ratio(result.original, result.estimated[b], curve.resolved_k);
      curve.points.push_back({SpectralBand{start, start + b}, curve.resolved_k, r.value, r.qualifying});
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

SweepResult sweep(const ReturnPanel& panel, StartMode start_mode,
                  const std::vector<DegreeThreshold>& thresholds, const SweepOptions& options) {
  const CorrelationMatrix c = correlation(panel);
  const EigenSystem eig = eigendecompose(c);
  return sweep(c, eig, start_mode, thresholds, options);
}

BandRegimes band_regimes(const EigenSystem& eig, const RMTBounds& bounds) {
  BandRegimes out;
  for (std::size_t k = 0; k < eig.n(); ++k) {
    const double lambda = eig.eigenvalues[k];
    if (lambda > bounds.lambda_plus) {
      out.above.push_back(k + 1);
    } else if (lambda < bounds.lambda_minus) {
      out.below.push_back(k + 1);
    } else {
      out.bulk.push_back(k + 1);
    }
  }
  return out;
}

void write_curve_csv(std::ostream& out, const SurvivorCurve& curve) {
  out << "start_mode,k,band_end,L_star,ratio,m_count\n";
  const std::string k = curve.threshold.to_string();
  for (std::size_t p = 0; p < curve.points.size(); ++p) {
    const auto& pt = curve.points[p];
    out << to_string(curve.start_mode) << ',' << k << ',' << pt.band.end << ','
        << format_double(curve.axis[p]) << ',' << (pt.ratio ? format_double(*pt.ratio) : "") << ','
        << pt.m << '\n';
  }
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("curve CSV line " + std::to_string(line) + ": unparseable number '" +
                     std::string(s) + "'");
  }
  return v;
}

}  // namespace

SurvivorCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "start_mode,k,band_end,L_star,ratio,m_count") {
    throw InputError("curve CSV: missing or malformed header");
  }
  SurvivorCurve curve;
  std::size_t line_no = 1;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6) throw InputError("curve CSV line " + std::to_string(line_no) + ": expected 6 fields");
    const StartMode mode = parse_start_mode(detail::trim(f[0]));
    const DegreeThreshold k = DegreeThreshold::parse(f[1]);
    if (first) {
      curve.start_mode = mode;
      curve.threshold = k;
      curve.resolved_k = k.is_max() ? 0 : k.resolve(DegreeSequence{});
      first = false;
    } else if (mode != curve.start_mode || !(k == curve.threshold)) {
      throw InputError("curve CSV line " + std::to_string(line_no) + ": mixed start_mode or k");
    }
    SurvivorPoint pt;
    pt.band = {band_start(mode), parse_number<std::size_t>(detail::trim(f[2]), line_no)};
    pt.threshold = curve.resolved_k;
    const auto ratio = detail::trim(f[4]);
    if (!ratio.empty()) pt.ratio = parse_number<double>(ratio, line_no);
    pt.m = parse_number<std::size_t>(detail::trim(f[5]), line_no);
    curve.axis.push_back(parse_number<double>(detail::trim(f[3]), line_no));
    curve.points.push_back(pt);
  }
  if (curve.points.empty()) throw InputError("curve CSV: no data rows");
  return curve;
}

}  // namespace spectranet
