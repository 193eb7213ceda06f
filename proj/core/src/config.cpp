#include "hypercolor/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "hypercolor/error.hpp"
#include "hypercolor/io.hpp"
#include "hypercolor/metrics.hpp"
#include "hypercolor/synthetic.hpp"

namespace hypercolor {

namespace {

const std::vector<std::string> kMetricNames{"psnr", "ssim", "gfc", "ssv", "emd"};

std::string_view to_string(BasisSource source) {
  switch (source) {
    case BasisSource::none: return "none";
    case BasisSource::truth: return "truth";
    case BasisSource::file: return "file";
  }
  return "none";
}

BasisSource parse_basis_source(const std::string& name) {
  if (name == "none") return BasisSource::none;
  if (name == "truth") return BasisSource::truth;
  if (name == "file") return BasisSource::file;
  throw ConfigError("basis.source must be none, truth or file (got '" + name + "')");
}

// Numbers, or the strings "inf"/"infinity" for a noiseless exposure.
double number_or_inf(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError(key + " must be a number or \"inf\"");
}

nlohmann::ordered_json path_json(const std::filesystem::path& p) {
  if (p.empty()) return nullptr;
  return p.string();
}

nlohmann::ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& key) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + text + "' as an unsigned integer");
  }
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

void parse_dims(const nlohmann::json& j, ExperimentConfig& config) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "auto") {
      config.dims_mode = DimsMode::automatic;
    } else if (s == "all") {
      config.dims_mode = DimsMode::all;
    } else {
      throw ConfigError("dims must be a list, \"all\" or \"auto\"");
    }
    config.dims.clear();
    return;
  }
  if (!j.is_array()) throw ConfigError("dims must be a list, \"all\" or \"auto\"");
  config.dims_mode = DimsMode::fixed;
  config.dims = j.get<std::vector<std::size_t>>();
}

void check_file(const std::filesystem::path& path, const std::string& key) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError(key + ": file not found: " + path.string());
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

std::string SceneSource::name() const {
  if (!path.empty()) return path.stem().string();
  return synthetic + "-s" + std::to_string(seed);
}

HyperCube SceneSource::load() const {
  if (!path.empty()) return read_cube(path);
  return make_synthetic(synthetic, height, width, bands, seed);
}

void ExperimentConfig::validate() const {
  if (scenes.empty()) throw ConfigError("scenes: at least one scene is required");
  for (const auto& scene : scenes) {
    if (!scene.path.empty()) {
      check_file(scene.path, "scenes.path");
    } else if (scene.synthetic.empty()) {
      throw ConfigError("scenes: each entry needs a path or a synthetic kind");
    } else if (scene.height == 0 || scene.width == 0 || scene.bands == 0) {
      throw ConfigError("scenes: synthetic dimensions must be nonzero");
    }
  }
  if (!guide_path.empty()) check_file(guide_path, "guide.path");
  if (guide_response != "visible-flat" && guide_response != "flat") {
    throw ConfigError("guide.response must be visible-flat or flat");
  }
  if (patterns.empty()) throw ConfigError("sampling.patterns: at least one pattern is required");
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("sampling.rate must be in (0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("sampling.alpha must be in [0, 1]");
  if (t_values.empty()) throw ConfigError("noise.t: at least one exposure is required");
  for (double t : t_values) {
    if (!(t > 0.0)) throw ConfigError("noise.t: exposures must be positive");
  }
  if (!(noise.rho > 0.0) || !std::isfinite(noise.rho)) throw ConfigError("noise.rho must be positive");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma) || !std::isfinite(noise.mu)) {
    throw ConfigError("noise.sigma must be >= 0 and noise.mu finite");
  }
  if (basis == BasisSource::file) check_file(basis_path, "basis.path");
  if (dims_mode == DimsMode::fixed) {
    if (dims.empty()) throw ConfigError("dims: list must not be empty");
    if (std::ranges::find(dims, 0u) != dims.end()) throw ConfigError("dims: entries must be >= 1");
    if (basis == BasisSource::none) throw ConfigError("dims: a basis is required to reduce dimensions");
  }
  if (dims_mode == DimsMode::automatic) {
    if (basis == BasisSource::none) throw ConfigError("dims: auto requires a basis");
    if (dim_model_path.empty()) throw ConfigError("dims: auto requires dim_model");
    check_file(dim_model_path, "dim_model");
  }
  if (metrics.empty()) throw ConfigError("metrics: at least one metric is required");
  for (const auto& m : metrics) {
    if (std::ranges::find(kMetricNames, m) == kMetricNames.end()) {
      throw ConfigError("metrics: unknown metric '" + m + "'");
    }
  }
  if (!ratios.empty()) {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) {
      throw ConfigError("budget.total_time must be positive and finite");
    }
    for (double r : ratios) {
      if (!(r > 0.0 && r <= 1.0)) throw ConfigError("budget.ratios must lie in (0, 1]");
    }
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  auto& js = j["scenes"] = nlohmann::ordered_json::array();
  for (const auto& s : scenes) {
    nlohmann::ordered_json e;
    if (!s.path.empty()) {
      e["path"] = s.path.string();
    } else {
      e["synthetic"] = s.synthetic;
      e["height"] = s.height;
      e["width"] = s.width;
      e["bands"] = s.bands;
      e["seed"] = s.seed;
    }
    js.push_back(e);
  }
  j["guide"] = {{"path", path_json(guide_path)},
                {"response", guide_response},
                {"noisy", noisy_guide}};
  std::vector<std::string> names;
  for (auto p : patterns) names.emplace_back(to_string(p));
  j["sampling"] = {{"patterns", names}, {"rate", rate}, {"alpha", alpha}};
  auto ts = nlohmann::ordered_json::array();
  for (double t : t_values) ts.push_back(number_json(t));
  j["noise"] = {{"rho", noise.rho}, {"t", ts}, {"mu", noise.mu}, {"sigma", noise.sigma}};
  j["basis"] = {{"source", to_string(basis)},
                {"path", path_json(basis_path)}};
  switch (dims_mode) {
    case DimsMode::all: j["dims"] = "all"; break;
    case DimsMode::automatic: j["dims"] = "auto"; break;
    case DimsMode::fixed: j["dims"] = dims; break;
  }
  j["dim_model"] = path_json(dim_model_path);
  j["metrics"] = metrics;
  j["budget"] = {{"total_time", total_time}, {"ratios", ratios}};
  j["edge_filter"] = edge_filter;
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  j["workers"] = workers;
  j["timing"] = timing;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  ExperimentConfig c;
  if (j.contains("scenes")) {
    for (const auto& e : j.at("scenes")) {
      SceneSource s;
      if (e.is_string()) {
        s.path = e.get<std::string>();
      } else {
        s.path = get_or<std::string>(e, "path", "");
        s.synthetic = get_or<std::string>(e, "synthetic", "");
        s.height = get_or<std::size_t>(e, "height", s.height);
        s.width = get_or<std::size_t>(e, "width", s.width);
        s.bands = get_or<std::size_t>(e, "bands", s.bands);
        s.seed = get_or<std::uint64_t>(e, "seed", s.seed);
      }
      c.scenes.push_back(std::move(s));
    }
  }
  if (j.contains("guide")) {
    const auto& g = j.at("guide");
    c.guide_path = get_or<std::string>(g, "path", "");
    c.guide_response = get_or<std::string>(g, "response", c.guide_response);
    c.noisy_guide = get_or<bool>(g, "noisy", c.noisy_guide);
  }
  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    if (s.contains("patterns")) {
      c.patterns.clear();
      for (const auto& p : s.at("patterns")) {
        try {
          c.patterns.push_back(parse_sampling_pattern(p.get<std::string>()));
        } catch (const ParameterError& e) {
          throw ConfigError(std::string("sampling.patterns: ") + e.what());
        }
      }
    }
    c.rate = get_or<double>(s, "rate", c.rate);
    c.alpha = get_or<double>(s, "alpha", c.alpha);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    c.noise.rho = get_or<double>(n, "rho", c.noise.rho);
    c.noise.mu = get_or<double>(n, "mu", c.noise.mu);
    c.noise.sigma = get_or<double>(n, "sigma", c.noise.sigma);
    if (n.contains("t")) {
      c.t_values.clear();
      const auto& t = n.at("t");
      if (t.is_array()) {
        for (const auto& v : t) c.t_values.push_back(number_or_inf(v, "noise.t"));
      } else {
        c.t_values.push_back(number_or_inf(t, "noise.t"));
      }
    }
  }
  if (j.contains("basis")) {
    const auto& b = j.at("basis");
    c.basis = parse_basis_source(get_or<std::string>(b, "source", "truth"));
    c.basis_path = get_or<std::string>(b, "path", "");
  }
  if (j.contains("dims")) parse_dims(j.at("dims"), c);
  c.dim_model_path = get_or<std::string>(j, "dim_model", "");
  if (j.contains("metrics")) c.metrics = j.at("metrics").get<std::vector<std::string>>();
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    c.total_time = get_or<double>(b, "total_time", 0.0);
    c.ratios = get_or<std::vector<double>>(b, "ratios", {});
  }
  c.edge_filter = get_or<bool>(j, "edge_filter", c.edge_filter);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir.string());
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.workers = get_or<std::size_t>(j, "workers", c.workers);
  c.timing = get_or<bool>(j, "timing", c.timing);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool apply_env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  ExperimentConfig c;
  try {
    c = ExperimentConfig::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  for (auto& s : c.scenes) resolve(s.path);
  resolve(c.guide_path);
  resolve(c.basis_path);
  resolve(c.dim_model_path);
  resolve(c.output_dir);
  if (apply_env) apply_environment(c);
  return c;
}

void apply_environment(ExperimentConfig& c) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
  };
  if (const char* v = env("HYPERCOLOR_SEED")) c.seed = parse_u64(v, "HYPERCOLOR_SEED");
  if (const char* v = env("HYPERCOLOR_OUTPUT_DIR")) c.output_dir = v;
  if (const char* v = env("HYPERCOLOR_RATE")) c.rate = parse_double(v, "HYPERCOLOR_RATE");
  if (const char* v = env("HYPERCOLOR_PATTERNS")) {
    c.patterns.clear();
    for (const auto& name : split_list(v)) {
      try {
        c.patterns.push_back(parse_sampling_pattern(name));
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("HYPERCOLOR_PATTERNS: ") + e.what());
      }
    }
  }
  if (const char* v = env("HYPERCOLOR_T")) {
    c.t_values.clear();
    for (const auto& item : split_list(v)) c.t_values.push_back(parse_double(item, "HYPERCOLOR_T"));
  }
  if (const char* v = env("HYPERCOLOR_DIMS")) {
    const std::string s = v;
    if (s == "auto" || s == "all") {
      parse_dims(s, c);
    } else {
      c.dims_mode = DimsMode::fixed;
      c.dims.clear();
      for (const auto& item : split_list(s)) c.dims.push_back(parse_u64(item, "HYPERCOLOR_DIMS"));
    }
  }
  if (const char* v = env("HYPERCOLOR_BASIS")) c.basis = parse_basis_source(v);
  if (const char* v = env("HYPERCOLOR_EDGE_FILTER")) {
    c.edge_filter = parse_bool(v, "HYPERCOLOR_EDGE_FILTER");
  }
  if (const char* v = env("HYPERCOLOR_TIMING")) c.timing = parse_bool(v, "HYPERCOLOR_TIMING");
  if (const char* v = env("HYPERCOLOR_WORKERS")) c.workers = parse_u64(v, "HYPERCOLOR_WORKERS");
}

}  // namespace hypercolor
