#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hypercolor/cube.hpp"

namespace hypercolor {

/// Orthonormal spectral basis (l x p), columns ordered by decreasing
/// singular value. Each column's largest-magnitude entry is positive.
struct SpectralBasis {
  std::vector<double> wavelengths;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd singular_values;
  std::string source;

  std::size_t bands() const noexcept { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(vectors.cols()); }

  /// Leading `p` columns.
  SpectralBasis truncated(std::size_t p) const;
};

/// Right singular vectors of the stacked (pixels x bands) matrix of all
/// cubes, computed from the eigendecomposition of the l x l Gram matrix.
/// Data is not mean-centred.
SpectralBasis learn_basis(std::span<const HyperCube> cubes, std::size_t p,
                          std::size_t workers = 0);

// HSB1: "HSB1", u32 l, u32 p, l x f64 wavelengths, p x f64 singular values,
// l*p x f64 vectors column-major.
void write_basis(const SpectralBasis& basis, const std::filesystem::path& path);
SpectralBasis read_basis(const std::filesystem::path& path);

ChannelImage project(const HyperCube& cube, const SpectralBasis& basis);
ChannelSamples project(const ChannelSamples& samples, const SpectralBasis& basis);
ChannelSamples project(const ClueSet& clues, const SpectralBasis& basis);
/// Coefficients back to band space (l channels).
ChannelImage unproject(const ChannelImage& coefficients, const SpectralBasis& basis);
/// Rank-p least-squares approximation of `cube`.
HyperCube rank_approximation(const HyperCube& cube, const SpectralBasis& basis);

struct VarianceCurve {
  std::vector<double> explained;  ///< variance of each coefficient across clues
  std::size_t elbow_index = 1;
  double log_min_variance = 0.0;  ///< log10(min explained)
};

/// Kneedle elbow of log10(explained) against dimension: both axes min-max
/// normalized, elbow at the largest drop below the end-to-end chord. The
/// returned index is the number of dimensions before the flat tail, in [1, l].
std::size_t kneedle_elbow(std::span<const double> explained);

/// Projects every clue onto all basis vectors and measures the per-dimension
/// spread of the mean-centred coefficients. Needs at least 8 clues.
VarianceCurve variance_curve(const ClueSet& clues, const SpectralBasis& basis);

struct DimensionFeatures {
  double elbow = 0.0;
  double log_min_variance = 0.0;
};

inline DimensionFeatures features_of(const VarianceCurve& curve) {
  return {static_cast<double>(curve.elbow_index), curve.log_min_variance};
}

struct DimensionSample {
  DimensionFeatures features;
  double best_dim = 0.0;
};

/// Quadratic regression of the best dimension on (elbow e, log min variance v):
/// c0 + c1 e + c2 v + c3 e^2 + c4 v^2 + c5 e v, clamped to [min_dim, max_dim].
struct DimensionModel {
  std::array<double, 6> coefficients{};
  std::size_t min_dim = 2;
  std::size_t max_dim = 2;

  double evaluate(const DimensionFeatures& f) const noexcept;

  nlohmann::ordered_json to_json() const;
  static DimensionModel from_json(const nlohmann::json& j);
};

DimensionModel fit_dimension_model(std::span<const DimensionSample> training, std::size_t max_dim);
double training_rmse(const DimensionModel& model, std::span<const DimensionSample> training);

/// Rounded, clamped prediction; the upper clamp is also bounded by the
/// curve's length.
std::size_t predict_dimension(const DimensionModel& model, const VarianceCurve& curve);
std::size_t predict_dimension(const DimensionModel& model, const DimensionFeatures& features);

void write_dimension_model(const DimensionModel& model, const std::filesystem::path& path);
DimensionModel read_dimension_model(const std::filesystem::path& path);

}  // namespace hypercolor
