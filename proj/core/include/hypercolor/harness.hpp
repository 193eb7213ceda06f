#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypercolor/colorizer.hpp"
#include "hypercolor/config.hpp"
#include "hypercolor/cube.hpp"
#include "hypercolor/metrics.hpp"
#include "hypercolor/noise.hpp"
#include "hypercolor/sampling.hpp"
#include "hypercolor/subspace.hpp"

namespace hypercolor {

/// One acquisition setting. The guide shares the noise model with the clues
/// but may use its own exposure.
struct PointSpec {
  SamplingPlan plan;
  NoiseParams noise;              ///< clue noise; t is the per-sample exposure
  double guide_t = 0.0;           ///< guide exposure; 0 reuses noise.t
  bool noisy_guide = true;
  std::string guide_response = "visible-flat";
  bool edge_filter = true;
  bool timing = false;            ///< fill wall_ms; off keeps outputs reproducible
  std::size_t workers = 0;

  SpectralResponse guide_spectral_response(std::span<const double> wavelengths) const;
  ColorizeOptions colorize_options(std::span<const double> wavelengths) const;
};

struct Acquisition {
  GuideImage guide;
  Mask mask;
  ClueSet clues;
};

/// Simulated guide (or `captured` when given), sampling mask and noisy clues.
Acquisition acquire(const HyperCube& truth, const PointSpec& spec,
                    const GuideImage* captured = nullptr);

/// Reconstructions for several basis dimensions from one solve: the
/// coefficient channels are independent, so the first p channels of a
/// max(dims)-channel solve equal a p-channel solve.
struct MultiDimReconstruction {
  std::vector<std::size_t> dims;
  std::vector<HyperCube> cubes;
  ColorizeReport report;
};
MultiDimReconstruction reconstruct_dims(const Acquisition& acquisition,
                                        const SpectralBasis& basis,
                                        std::span<const std::size_t> dims,
                                        const ColorizeOptions& options);

/// How run_point picks the colorization space.
struct DimensionChoice {
  std::optional<SpectralBasis> basis;   ///< none: colorize every band
  std::size_t fixed = 0;                ///< 0: all basis vectors
  std::optional<DimensionModel> model;  ///< set: predict from the clue variance curve
};

struct PointResult {
  Acquisition acquisition;
  HyperCube recon;
  std::size_t dims = 0;
  std::string dims_source;  ///< "bands", "all", "fixed" or "auto"
  std::optional<VarianceCurve> curve;
  ColorizeReport colorize;
  MetricReport metrics;
};

PointResult run_point(const HyperCube& truth, const PointSpec& spec, const DimensionChoice& dims,
                      const GuideImage* captured = nullptr);

// ---------------------------------------------------------------------------
// Sweep results

struct SweepRow {
  std::string image;
  std::string pattern;
  double rate = 0.0;
  double t_exposure = 0.0;
  std::size_t dim = 0;
  MetricReport metrics;
};

struct BestDim {
  std::string image;
  double t_exposure = 0.0;
  std::size_t dim = 0;
  double emd = 0.0;
};

struct CurveRecord {
  std::string image;
  double t_exposure = 0.0;
  VarianceCurve curve;
};

struct BudgetDistribution {
  std::string image;
  double ratio = 0.0;
  std::size_t samples = 0;
  double t_per_sample = 0.0;
  double total_time = 0.0;
  double exposure_sum = 0.0;  ///< sum of per-sample exposures
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  double mean_emd = 0.0;
  std::size_t skipped = 0;

  bool conserves_budget(double relative_tolerance = 1e-12) const;
};

/// Long-format table keyed by (image, pattern, rate, t_exposure, dim).
struct SweepResult {
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
  std::vector<BestDim> best_dims;
  std::vector<CurveRecord> curves;
  std::vector<BudgetDistribution> distributions;

  /// Sorts rows by key; throws ParameterError on duplicate keys.
  void finalize();
  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;
  static SweepResult from_json(const nlohmann::json& j);
  /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
  void save(const std::filesystem::path& dir, const std::string& stem = "results") const;
  static SweepResult load(const std::filesystem::path& json_path);
};

inline constexpr const char* kCsvHeader =
    "image,pattern,rate,t_exposure,dim,psnr,ssim,gfc,ssv,emd,wall_ms";
std::string csv_row(const SweepRow& row);

MetricReport metric_report_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Experiments

inline constexpr double kDimTieTolerance = 1e-9;

/// Full factorial over exposures x dims. Each exposure reuses one
/// acquisition for every dim; best dim per exposure by EMD, ties within
/// kDimTieTolerance going to the smallest dim.
SweepResult grid_search_dimension(const HyperCube& truth, const std::string& image,
                                  const PointSpec& base, std::span<const double> t_values,
                                  std::span<const std::size_t> dims, const SpectralBasis& basis);

struct NamedCube {
  std::string name;
  HyperCube cube;
};

struct TrainingResult {
  DimensionModel model;
  std::vector<DimensionSample> samples;
  double rmse = 0.0;
  SweepResult sweeps;

  nlohmann::ordered_json diagnostics() const;
};

/// Grid search per cube x exposure (basis learned from each cube), pairing
/// the best-EMD dim with the variance-curve features of the same clues.
TrainingResult train_dimension_model(std::span<const NamedCube> cubes, const PointSpec& base,
                                     std::span<const double> t_values,
                                     std::span<const std::size_t> dims);

/// Fixed total exposure T: for each sampling ratio s the per-sample exposure
/// is T / (number of sampled pixels); the guide receives T / (m n) per pixel.
SweepResult time_budget_sweep(const HyperCube& truth, const std::string& image,
                              const PointSpec& base, double total_time,
                              std::span<const double> ratios, const DimensionChoice& dims,
                              std::size_t bins = 32);

/// One row per pattern at the base rate and noise with shared seeds.
SweepResult compare_sampling(const HyperCube& truth, const std::string& image,
                             const PointSpec& base, std::span<const SamplingPattern> patterns,
                             const DimensionChoice& dims);

// ---------------------------------------------------------------------------
// Configured runs

/// Learns, loads or omits the basis according to the configuration.
std::optional<SpectralBasis> configured_basis(const ExperimentConfig& config,
                                              const HyperCube& truth);
PointSpec configured_point(const ExperimentConfig& config, SamplingPattern pattern, double t);

struct PipelineOutput {
  PointResult point;
  nlohmann::ordered_json report;
  std::vector<std::filesystem::path> artifacts;
};

/// First scene, pattern and exposure of the configuration. Writes recon.hsc,
/// mask.pbm and report.json into output_dir; on failure removes whatever it
/// wrote before rethrowing.
PipelineOutput run_pipeline(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Plot data

enum class PlotKind { variance, dimension, budget };
PlotKind parse_plot_kind(const std::string& name);

struct PlotTable {
  std::string filename;
  std::string content;
};

/// Tidy CSV tables: explained-variance curves, EMD versus dim per exposure,
/// and per-pixel EMD histograms per sampling ratio.
std::vector<PlotTable> plot_tables(const SweepResult& result, PlotKind kind);
std::vector<std::filesystem::path> export_plotdata(const SweepResult& result, PlotKind kind,
                                                   const std::filesystem::path& dir);

}  // namespace hypercolor
