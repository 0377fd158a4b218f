#include "spectranet/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "spectranet/errors.hpp"
#include "spectranet/network.hpp"
#include "spectranet/spectral.hpp"
#include "spectranet/synth.hpp"

namespace spectranet {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

LoadedInput load_input(const RunConfig& config) {
  LoadedInput out;
  if (config.input_csv) {
    std::ifstream in(*config.input_csv, std::ios::binary);
    if (!in) throw InputError("cannot open price file " + config.input_csv->string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    out.sha256 = sha256_hex(bytes);
    std::istringstream text(bytes);
    out.panel = log_returns(align(load_prices(text), config.align));
    validate(out.panel);
    return out;
  }

  const auto& s = config.synth;
  switch (s.model) {
    case SynthModel::noise: out.panel = gen_noise(s.spec.n, s.spec.t, s.spec.seed); break;
    case SynthModel::one_factor: {
      FactorSpec spec = s.spec;
      spec.n_groups = 0;
      out.panel = gen_one_factor(spec).panel;
      break;
    }
    case SynthModel::block_factor: out.panel = gen_block_factor(s.spec).panel; break;
  }
  std::string canonical = "synth";
  for (const auto& [k, v] : to_config_map(config)) {
    if (k.starts_with("synth_")) canonical += ";" + k + "=" + v;
  }
  out.sha256 = sha256_hex(canonical);
  return out;
}

namespace {

std::string curve_stem(const SurvivorCurve& c) {
  return "curve_" + std::string(to_string(c.start_mode)) + "_k" + c.threshold.to_string();
}

json curve_json(const SurvivorCurve& c) {
  json points = json::array();
  for (std::size_t p = 0; p < c.points.size(); ++p) {
    const auto& pt = c.points[p];
    points.push_back({{"band_end", pt.band.end},
                      {"L_star", c.axis[p]},
                      {"ratio", pt.ratio ? json(*pt.ratio) : json(nullptr)},
                      {"m_count", pt.m}});
  }
  return {{"start_mode", to_string(c.start_mode)},
          {"k", c.threshold.to_string()},
          {"resolved_k", c.resolved_k},
          {"points", std::move(points)}};
}

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + (dir_ / name).string());
    out << content;
    if (!out) throw InputError("failed writing " + (dir_ / name).string());
    if (name != "manifest.json") files_.push_back({{"name", name}, {"sha256", sha256_hex(content)}});
    names_.emplace_back(name);
  }

  const json& files() const { return files_; }
  const std::vector<std::filesystem::path>& names() const { return names_; }

 private:
  std::filesystem::path dir_;
  json files_ = json::array();
  std::vector<std::filesystem::path> names_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunReport run_analyze(const RunConfig& config) {
  RunReport report;
  report.output_dir = config.output_dir;
  const LoadedInput input = load_input(config);
  report.input_sha256 = input.sha256;
  const ReturnPanel& panel = input.panel;

  const CorrelationMatrix c = correlation(panel);
  const EigenSystem eig = eigendecompose(c);

  std::optional<RMTBounds> bounds;
  if (panel.t() > panel.n()) {
    bounds = rmt_bounds(panel.n(), panel.t());
  } else {
    report.warnings.push_back("T=" + std::to_string(panel.t()) + " <= N=" + std::to_string(panel.n()) +
                              ": noise bounds undefined, bounds file and regime labels omitted");
  }

  OutputWriter out(config.output_dir);
  auto emit = [&](const std::string& stem, const std::string& csv, const json& j) {
    if (config.write_csv) out.write(stem + ".csv", csv);
    if (config.write_json) out.write(stem + ".json", j.dump(2) + "\n");
  };

  {
    std::vector<std::string> regime(eig.n());
    if (bounds) {
      const BandRegimes r = band_regimes(eig, *bounds);
      for (auto k : r.above) regime[k - 1] = "above";
      for (auto k : r.bulk) regime[k - 1] = "bulk";
      for (auto k : r.below) regime[k - 1] = "below";
    }
    std::ostringstream csv;
    csv << "index,eigenvalue,regime\n";
    json rows = json::array();
    for (std::size_t k = 0; k < eig.n(); ++k) {
      csv << k + 1 << ',' << format_double(eig.eigenvalues[k]) << ',' << regime[k] << '\n';
      rows.push_back({{"index", k + 1},
                      {"eigenvalue", eig.eigenvalues[k]},
                      {"regime", regime[k].empty() ? json(nullptr) : json(regime[k])}});
    }
    emit("eigenvalues", csv.str(), rows);
  }

  if (bounds) {
    std::ostringstream csv;
    csv << "n,t,q,lambda_minus,lambda_plus\n"
        << panel.n() << ',' << panel.t() << ',' << format_double(bounds->q) << ','
        << format_double(bounds->lambda_minus) << ',' << format_double(bounds->lambda_plus) << '\n';
    emit("bounds", csv.str(),
         {{"n", panel.n()}, {"t", panel.t()}, {"q", bounds->q},
          {"lambda_minus", bounds->lambda_minus}, {"lambda_plus", bounds->lambda_plus}});
  }

  json sweep_summary = json::array();
  bool tree_written = false;
  SweepOptions options;
  options.renormalize = config.renormalize;
  options.axis = config.axis;
  for (StartMode mode : config.start_modes) {
    const SweepResult result = sweep(c, eig, mode, config.thresholds, options);
    if (!tree_written) {
      std::ostringstream csv;
      write_tree_csv(csv, result.original, panel.tickers);
      json edges = json::array();
      for (const auto& e : result.original.edges) {
        edges.push_back({{"i", e.i}, {"j", e.j}, {"ticker_i", panel.tickers[e.i]},
                         {"ticker_j", panel.tickers[e.j]}, {"weight", e.weight}});
      }
      emit("original_tree", csv.str(), edges);
      tree_written = true;
    }

    const std::string mode_name(to_string(mode));
    std::ostringstream clamps;
    clamps << "start_mode,band_end,clamp_count\n";
    json clamp_rows = json::array();
    std::size_t total_clamped = 0;
    for (std::size_t b = 0; b < result.clamp_counts.size(); ++b) {
      const std::size_t band_end = band_start(mode) + b;
      clamps << mode_name << ',' << band_end << ',' << result.clamp_counts[b] << '\n';
      clamp_rows.push_back({{"start_mode", mode_name}, {"band_end", band_end},
                            {"clamp_count", result.clamp_counts[b]}});
      total_clamped += result.clamp_counts[b];
    }
    emit("clamps_" + mode_name, clamps.str(), clamp_rows);

    for (const auto& curve : result.curves) {
      std::ostringstream csv;
      write_curve_csv(csv, curve);
      emit(curve_stem(curve), csv.str(), curve_json(curve));
    }
    sweep_summary.push_back({{"start_mode", mode_name},
                             {"original_max_degree", result.original_degrees.max()},
                             {"total_clamped", total_clamped}});
  }

  json config_echo = json::object();
  for (const auto& [k, v] : to_config_map(config)) config_echo[k] = v;
  json manifest = {
      {"tool", "spectranet"},
      {"version", kVersion},
      {"versions", {{"spectranet", kVersion},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                    {"compiler", __VERSION__}}},
      {"created_utc", utc_timestamp()},
      {"input", {{"source", config.input_csv ? config.input_csv->string() : "synth"},
                 {"sha256", input.sha256}}},
      {"panel", {{"n", panel.n()}, {"t", panel.t()}}},
      {"config", config_echo},
      {"eigensolver", {{"sweeps", eig.sweeps}, {"off_diagonal_norm", eig.off_diagonal_norm}}},
      {"bounds_available", bounds.has_value()},
      {"sweeps", sweep_summary},
      {"warnings", report.warnings},
      {"files", out.files()},
  };
  out.write("manifest.json", manifest.dump(2) + "\n");
  report.files = out.names();
  return report;
}

std::optional<double> interpolate(const SurvivorCurve& curve, double x) {
  constexpr double kEps = 1e-12;
  const auto& axis = curve.axis;
  if (axis.empty() || x < axis.front() - kEps || x > axis.back() + kEps) return std::nullopt;
  for (std::size_t p = 0; p < axis.size(); ++p) {
    if (std::abs(axis[p] - x) <= kEps) return curve.points[p].ratio;
  }
  for (std::size_t p = 0; p + 1 < axis.size(); ++p) {
    if (axis[p] < x && x < axis[p + 1]) {
      const auto& lo = curve.points[p].ratio;
      const auto& hi = curve.points[p + 1].ratio;
      if (!lo || !hi) return std::nullopt;
      const double w = (x - axis[p]) / (axis[p + 1] - axis[p]);
      return *lo + w * (*hi - *lo);
    }
  }
  return std::nullopt;
}

AveragedCurve average_curves(const std::vector<SurvivorCurve>& curves) {
  if (curves.size() < 2) throw InputError("average: need at least 2 curves");
  std::size_t finest = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    if (c.start_mode != curves[0].start_mode || !(c.threshold == curves[0].threshold)) {
      throw InputError("average: curves differ in start_mode or k");
    }
    if (c.axis.empty() || c.axis.size() != c.points.size()) throw InputError("average: malformed curve");
    if (c.axis.size() > curves[finest].axis.size()) finest = i;
  }
  const auto& grid = curves[finest].axis;
  for (const auto& c : curves) {
    if (std::abs(c.axis.front() - grid.front()) > 1e-9 || std::abs(c.axis.back() - grid.back()) > 1e-9) {
      throw InputError("average: curves span different L* ranges (mixed axis formulas?)");
    }
  }

  AveragedCurve avg;
  avg.start_mode = curves[0].start_mode;
  avg.threshold = curves[0].threshold;
  avg.axis = grid;
  for (double x : grid) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& c : curves) {
      if (const auto v = interpolate(c, x)) {
        sum += *v;
        ++count;
      }
    }
    avg.mean.push_back(count ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt);
    avg.contributors.push_back(count);
  }
  return avg;
}

void write_average_csv(std::ostream& out, const AveragedCurve& avg) {
  out << "start_mode,k,L_star,ratio,contributors\n";
  for (std::size_t p = 0; p < avg.axis.size(); ++p) {
    out << to_string(avg.start_mode) << ',' << avg.threshold.to_string() << ','
        << format_double(avg.axis[p]) << ',' << (avg.mean[p] ? format_double(*avg.mean[p]) : "")
        << ',' << avg.contributors[p] << '\n';
  }
}

AveragedCurve run_average(const std::vector<std::filesystem::path>& curve_files,
                          const std::filesystem::path& output, bool json_twin) {
  if (curve_files.size() < 2) throw InputError("average: need at least 2 curve files");
  std::vector<SurvivorCurve> curves;
  for (const auto& path : curve_files) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open curve file " + path.string());
    try {
      curves.push_back(read_curve_csv(in));
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  const AveragedCurve avg = average_curves(curves);

  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + output.string());
  write_average_csv(out, avg);

  if (json_twin) {
    json points = json::array();
    for (std::size_t p = 0; p < avg.axis.size(); ++p) {
      points.push_back({{"L_star", avg.axis[p]},
                        {"ratio", avg.mean[p] ? json(*avg.mean[p]) : json(nullptr)},
                        {"contributors", avg.contributors[p]}});
    }
    json j = {{"start_mode", to_string(avg.start_mode)},
              {"k", avg.threshold.to_string()},
              {"points", std::move(points)}};
    auto twin = output;
    twin.replace_extension(".json");
    std::ofstream jout(twin, std::ios::binary | std::ios::trunc);
    if (!jout) throw InputError("cannot write " + twin.string());
    jout << j.dump(2) << '\n';
  }
  return avg;
}

}  // namespace spectranet
