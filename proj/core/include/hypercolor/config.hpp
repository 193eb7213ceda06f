#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypercolor/cube.hpp"
#include "hypercolor/noise.hpp"
#include "hypercolor/sampling.hpp"

namespace hypercolor {

/// A ground-truth cube: either an HSC1 file or a named synthetic generator.
struct SceneSource {
  std::filesystem::path path;
  std::string synthetic;  ///< see make_synthetic; used when path is empty
  std::size_t height = 128;
  std::size_t width = 128;
  std::size_t bands = 31;
  std::uint64_t seed = 0;

  std::string name() const;
  HyperCube load() const;
};

enum class BasisSource {
  none,   ///< colorize every band directly
  truth,  ///< learn from the ground-truth cube being reconstructed
  file,   ///< HSB1 file
};

enum class DimsMode {
  all,    ///< every basis vector
  fixed,  ///< the listed dimensions
  automatic,  ///< predicted by a dimension model from the clue variance curve
};

struct ExperimentConfig {
  std::vector<SceneSource> scenes;

  std::filesystem::path guide_path;          ///< optional pre-captured guide
  std::string guide_response = "visible-flat";  ///< or "flat"
  bool noisy_guide = true;

  std::vector<SamplingPattern> patterns{SamplingPattern::uniform_whisk};
  double rate = 0.04;
  double alpha = kDefaultFeatureAlpha;

  NoiseParams noise;             ///< t is replaced by each entry of t_values
  std::vector<double> t_values{1e-4};

  BasisSource basis = BasisSource::truth;
  std::filesystem::path basis_path;

  DimsMode dims_mode = DimsMode::all;
  std::vector<std::size_t> dims;
  std::filesystem::path dim_model_path;

  std::vector<std::string> metrics{"psnr", "ssim", "gfc", "ssv", "emd"};

  double total_time = 0.0;       ///< time-budget sweeps only
  std::vector<double> ratios;

  bool edge_filter = true;
  std::filesystem::path output_dir = "hypercolor-out";
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  bool timing = false;           ///< record wall time (makes outputs run-dependent)

  /// Throws ConfigError naming the offending key.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Reads JSON; relative paths resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path, bool apply_env = true);

/// HYPERCOLOR_SEED, _OUTPUT_DIR, _RATE, _PATTERNS, _T, _DIMS, _BASIS,
/// _EDGE_FILTER, _TIMING, _WORKERS. List values are comma separated.
void apply_environment(ExperimentConfig& config);

}  // namespace hypercolor
