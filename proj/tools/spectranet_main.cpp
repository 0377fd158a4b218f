// spectranet: eigenvalue-band filtering of correlation matrices and
// minimum-spanning-tree survivor analysis.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spectranet/config.hpp"
#include "spectranet/errors.hpp"
#include "spectranet/market_data.hpp"
#include "spectranet/network.hpp"
#include "spectranet/pipeline.hpp"
#include "spectranet/spectral.hpp"
#include "spectranet/synth.hpp"

namespace {

using namespace spectranet;

int fail(const char* category, std::string detail, int code) {
  for (char& ch : detail)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::cerr << "error[" << category << "]: " << detail << '\n';
  return code;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InputError("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue-band filtered stock networks and survivor ratios"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline from a config file and/or flags");
  std::string config_path;
  analyze->add_option("--config", config_path, "Config file (key = value) or a previous manifest.json");
  std::map<std::string, std::string> flag_values;
  for (const auto& key : config_keys()) {
    analyze->add_option("--" + key, flag_values[key], "Overrides config key " + key);
  }

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic panel and export it as a price CSV");
  std::string synth_model = "one_factor";
  FactorSpec spec;
  std::string synth_out;
  synth->add_option("--model", synth_model, "noise | one_factor | block_factor")->capture_default_str();
  synth->add_option("--n", spec.n, "Stocks")->capture_default_str();
  synth->add_option("--t", spec.t, "Return observations")->capture_default_str();
  synth->add_option("--groups", spec.n_groups, "Groups (block_factor)")->capture_default_str();
  synth->add_option("--beta_low", spec.beta_low)->capture_default_str();
  synth->add_option("--beta_high", spec.beta_high)->capture_default_str();
  synth->add_option("--group_beta", spec.group_beta)->capture_default_str();
  synth->add_option("--sigma", spec.idio_sigma, "Idiosyncratic volatility")->capture_default_str();
  synth->add_option("--seed", spec.seed)->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Price CSV path (default stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Print Marchenko-Pastur edges for N stocks and T observations");
  std::size_t bounds_n = 0, bounds_t = 0;
  bounds->add_option("--n", bounds_n)->required();
  bounds->add_option("--t", bounds_t)->required();

  // mst
  auto* mst = app.add_subcommand("mst", "Minimum spanning tree of a price CSV or correlation matrix CSV");
  std::string mst_prices, mst_matrix, mst_align = "intersect", mst_out;
  auto* prices_opt = mst->add_option("--input", mst_prices, "Price CSV");
  auto* matrix_opt = mst->add_option("--matrix", mst_matrix, "Correlation matrix CSV");
  prices_opt->excludes(matrix_opt);
  mst->add_option("--align", mst_align, "intersect | forward_fill")->capture_default_str();
  mst->add_option("-o,--output", mst_out, "Edge list CSV path (default stdout)");

  // average
  auto* average = app.add_subcommand("average", "Average survivor curves of several datasets");
  std::vector<std::string> curve_files;
  std::string average_out;
  bool average_json = false;
  average->add_option("curves", curve_files, "Curve CSV files")->required();
  average->add_option("-o,--output", average_out, "Output CSV")->required();
  average->add_flag("--json", average_json, "Also write a JSON twin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what(), 3);
  }

  try {
    if (*analyze) {
      ConfigMap values;
      if (!config_path.empty()) values = load_config_file(config_path);
      for (const auto& key : config_keys()) {
        if (analyze->count("--" + key) > 0) values[key] = flag_values[key];
      }
      const RunConfig cfg = to_run_config(values);
      const RunReport report = run_analyze(cfg);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "wrote " << report.files.size() << " files to " << report.output_dir.string() << '\n';
    } else if (*synth) {
      const SynthModel model = parse_synth_model(synth_model);
      ReturnPanel panel;
      if (model == SynthModel::noise) {
        panel = gen_noise(spec.n, spec.t, spec.seed);
      } else if (model == SynthModel::one_factor) {
        spec.n_groups = 0;
        panel = gen_one_factor(spec).panel;
      } else {
        panel = gen_block_factor(spec).panel;
      }
      std::ofstream file;
      write_prices_csv(open_output(synth_out, file), prices_from_returns(panel));
    } else if (*bounds) {
      const RMTBounds b = rmt_bounds(bounds_n, bounds_t);
      std::cout << "n,t,q,lambda_minus,lambda_plus\n"
                << bounds_n << ',' << bounds_t << ',' << format_double(b.q) << ','
                << format_double(b.lambda_minus) << ',' << format_double(b.lambda_plus) << '\n';
    } else if (*mst) {
      CorrelationMatrix c;
      if (!mst_matrix.empty()) {
        std::ifstream in(mst_matrix);
        if (!in) throw InputError("cannot open matrix file " + mst_matrix);
        auto m = read_matrix_csv(in);
        c = CorrelationMatrix{std::move(m.labels), std::move(m.values)};
        validate(c);
      } else if (!mst_prices.empty()) {
        c = correlation(log_returns(align(load_prices(mst_prices), parse_align_policy(mst_align))));
      } else {
        throw ConfigError("mst needs --input or --matrix");
      }
      std::ofstream file;
      write_tree_csv(open_output(mst_out, file), mst_kruskal(distance(c)), c.tickers);
    } else if (*average) {
      std::vector<std::filesystem::path> paths(curve_files.begin(), curve_files.end());
      run_average(paths, average_out, average_json);
    }
  } catch (const InputError& e) {
    return fail("input", e.what(), 1);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), 2);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("input", e.what(), 1);
  }
  return 0;
}
