#include "spectranet/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "spectranet/errors.hpp"

namespace spectranet {

SynthModel parse_synth_model(std::string_view text) {
  if (text == "noise") return SynthModel::noise;
  if (text == "one_factor") return SynthModel::one_factor;
  if (text == "block_factor") return SynthModel::block_factor;
  throw ConfigError("unknown synth model '" + std::string(text) + "'");
}

std::string_view to_string(SynthModel model) {
  switch (model) {
    case SynthModel::noise: return "noise";
    case SynthModel::one_factor: return "one_factor";
    case SynthModel::block_factor: return "block_factor";
  }
  return "";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "input",        "align",       "start_modes",    "thresholds",    "renormalize",
      "axis_formula", "output_dir",  "formats",        "synth_model",   "synth_n",
      "synth_t",      "synth_groups", "synth_beta_low", "synth_beta_high", "synth_group_beta",
      "synth_sigma",  "synth_seed"};
  return keys;
}

ConfigMap parse_config_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  ConfigMap out;
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw ConfigError("manifest has no \"config\" object");
    }
    for (const auto& [key, value] : j["config"].items()) {
      if (!value.is_string()) throw ConfigError("manifest config value for " + key + " is not a string");
      out[key] = value.get<std::string>();
    }
    return out;
  }

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const auto body = detail::trim(line);
    if (body.empty() || (body.front() == '[' && body.back() == ']')) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(detail::trim(body.substr(0, eq)));
    std::string value(detail::trim(body.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = value;
  }
  return out;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& item : detail::split_csv_line(text)) {
    const auto t = detail::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("config key " + key + ": invalid number '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, std::string_view text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError("config key " + key + ": expected a boolean, got '" + std::string(text) + "'");
}

}  // namespace

RunConfig to_run_config(const ConfigMap& values) {
  const auto& known = config_keys();
  for (const auto& [key, value] : values) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  RunConfig cfg;
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };

  const std::string* input = get("input");
  if (!input || input->empty()) throw ConfigError("config key input is required (a CSV path or 'synth')");
  if (*input != "synth") cfg.input_csv = std::filesystem::path(*input);

  if (auto v = get("align")) cfg.align = parse_align_policy(*v);
  if (auto v = get("start_modes")) {
    cfg.start_modes.clear();
    for (const auto& item : split_list(*v)) cfg.start_modes.push_back(parse_start_mode(item));
    if (cfg.start_modes.empty()) throw ConfigError("start_modes must name at least one mode");
    for (std::size_t i = 0; i < cfg.start_modes.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.start_modes.size(); ++j)
        if (cfg.start_modes[i] == cfg.start_modes[j]) throw ConfigError("start_modes lists a mode twice");
  }
  if (auto v = get("thresholds")) {
    cfg.thresholds.clear();
    for (const auto& item : split_list(*v)) cfg.thresholds.push_back(DegreeThreshold::parse(item));
    if (cfg.thresholds.empty()) throw ConfigError("thresholds must list at least one k");
    for (std::size_t i = 0; i < cfg.thresholds.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.thresholds.size(); ++j)
        if (cfg.thresholds[i] == cfg.thresholds[j]) throw ConfigError("thresholds lists a k twice");
  }
  if (auto v = get("renormalize")) cfg.renormalize = parse_bool("renormalize", *v);
  if (auto v = get("axis_formula")) cfg.axis = parse_axis_formula(*v);
  if (auto v = get("output_dir")) {
    if (v->empty()) throw ConfigError("output_dir must not be empty");
    cfg.output_dir = *v;
  }
  if (auto v = get("formats")) {
    cfg.write_csv = cfg.write_json = false;
    for (const auto& item : split_list(*v)) {
      if (item == "csv") {
        cfg.write_csv = true;
      } else if (item == "json") {
        cfg.write_json = true;
      } else {
        throw ConfigError("unknown output format '" + item + "'");
      }
    }
    if (!cfg.write_csv && !cfg.write_json) throw ConfigError("formats must include csv or json");
  }

  auto& s = cfg.synth;
  if (auto v = get("synth_model")) s.model = parse_synth_model(*v);
  if (auto v = get("synth_n")) s.spec.n = parse_number<std::size_t>("synth_n", *v);
  if (auto v = get("synth_t")) s.spec.t = parse_number<std::size_t>("synth_t", *v);
  if (auto v = get("synth_groups")) s.spec.n_groups = parse_number<std::size_t>("synth_groups", *v);
  if (auto v = get("synth_beta_low")) s.spec.beta_low = parse_number<double>("synth_beta_low", *v);
  if (auto v = get("synth_beta_high")) s.spec.beta_high = parse_number<double>("synth_beta_high", *v);
  if (auto v = get("synth_group_beta")) s.spec.group_beta = parse_number<double>("synth_group_beta", *v);
  if (auto v = get("synth_sigma")) s.spec.idio_sigma = parse_number<double>("synth_sigma", *v);
  if (auto v = get("synth_seed")) s.spec.seed = parse_number<std::uint64_t>("synth_seed", *v);
  if (!cfg.input_csv) {
    if (s.model == SynthModel::one_factor) s.spec.n_groups = 0;
    if (s.model == SynthModel::block_factor && s.spec.n_groups < 2) {
      throw ConfigError("synth_groups must be at least 2 for block_factor");
    }
    validate(s.spec);
  }
  return cfg;
}

ConfigMap to_config_map(const RunConfig& cfg) {
  ConfigMap m;
  m["input"] = cfg.input_csv ? cfg.input_csv->string() : "synth";
  m["align"] = std::string(to_string(cfg.align));
  std::string modes;
  for (auto mode : cfg.start_modes) modes += (modes.empty() ? "" : ",") + std::string(to_string(mode));
  m["start_modes"] = modes;
  std::string ks;
  for (const auto& k : cfg.thresholds) ks += (ks.empty() ? "" : ",") + k.to_string();
  m["thresholds"] = ks;
  m["renormalize"] = cfg.renormalize ? "true" : "false";
  m["axis_formula"] = std::string(to_string(cfg.axis));
  m["output_dir"] = cfg.output_dir.string();
  std::string formats;
  if (cfg.write_csv) formats = "csv";
  if (cfg.write_json) formats += formats.empty() ? "json" : ",json";
  m["formats"] = formats;
  if (!cfg.input_csv) {
    const auto& s = cfg.synth;
    m["synth_model"] = std::string(to_string(s.model));
    m["synth_n"] = std::to_string(s.spec.n);
    m["synth_t"] = std::to_string(s.spec.t);
    m["synth_groups"] = std::to_string(s.spec.n_groups);
    m["synth_beta_low"] = format_double(s.spec.beta_low);
    m["synth_beta_high"] = format_double(s.spec.beta_high);
    m["synth_group_beta"] = format_double(s.spec.group_beta);
    m["synth_sigma"] = format_double(s.spec.idio_sigma);
    m["synth_seed"] = std::to_string(s.spec.seed);
  }
  return m;
}

}  // namespace spectranet
