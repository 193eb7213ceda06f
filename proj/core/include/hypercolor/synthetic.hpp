#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypercolor/cube.hpp"

namespace hypercolor {

/// Synthetic ground-truth scenes with controlled spectral structure. Values
/// lie in [0, 1]; all generators are deterministic in their seed.

/// l wavelengths evenly spaced over [low, high] nm.
std::vector<double> linear_wavelengths(std::size_t bands, double low = 400.0, double high = 700.0);

/// Smooth reflectance-like spectrum: a sloped baseline plus a few Gaussian
/// bumps, scaled so the peak lies in [0.3, 0.95].
std::vector<double> smooth_spectrum(std::span<const double> wavelengths, std::uint64_t seed);

/// Every pixel holds `spectrum`.
HyperCube constant_scene(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                         std::span<const double> spectrum);

/// Nonnegative mixture of exactly `rank` smooth spectra with smoothly
/// varying nonnegative abundances; the pixels x bands matrix has rank `rank`.
HyperCube rank_k_scene(std::size_t height, std::size_t width, std::size_t bands, std::size_t rank,
                       std::uint64_t seed);

struct TwoRegionScene {
  HyperCube cube;
  std::vector<double> left;   ///< spectrum for columns < boundary
  std::vector<double> right;  ///< spectrum for columns >= boundary
  std::size_t boundary = 0;
};

/// Two flat regions split by a vertical edge; the right region is darker so
/// the edge is visible in the guide.
TwoRegionScene two_region_scene(std::size_t height, std::size_t width, std::size_t bands,
                                std::uint64_t seed);

struct NaturalSceneParams {
  std::size_t materials = 12;     ///< distinct base spectra
  std::size_t cells = 40;         ///< Voronoi cells
  double mixing = 0.35;           ///< strength of the secondary-material blend
  double shading = 0.5;           ///< depth of smooth illumination variation
  double texture = 0.05;          ///< fine multiplicative texture amplitude
};

/// Piecewise material map with smooth shading, soft material mixing and
/// fine texture: a stand-in for natural reflectance scenes whose singular
/// values decay gradually.
HyperCube natural_scene(std::size_t height, std::size_t width, std::size_t bands,
                        std::uint64_t seed, const NaturalSceneParams& params = {});

/// Mostly a smoothly shaded single material; all spectral diversity (many
/// small cells with different materials and brightness) sits inside one
/// rectangular patch covering about a fifth of the image.
HyperCube texture_concentrated_scene(std::size_t height, std::size_t width, std::size_t bands,
                                     std::uint64_t seed);

struct BlobScene {
  HyperCube cube;
  std::size_t center_row = 0;
  std::size_t center_col = 0;
  double radius = 0.0;
};

/// Smoothly shaded background with one small disc of a distinct spectrum.
BlobScene blob_scene(std::size_t height, std::size_t width, std::size_t bands, double radius,
                     std::uint64_t seed);

/// Names accepted by make_synthetic: "natural", "rank<k>", "two-region",
/// "texture", "blob".
HyperCube make_synthetic(const std::string& kind, std::size_t height, std::size_t width,
                         std::size_t bands, std::uint64_t seed);

}  // namespace hypercolor
