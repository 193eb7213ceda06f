#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hypercolor/cube.hpp"
#include "hypercolor/image_ops.hpp"
#include "hypercolor/solver.hpp"
#include "hypercolor/subspace.hpp"

namespace hypercolor {

// ---------------------------------------------------------------------------
// Affinity weights

struct NeighborWeight {
  PixelIndex pixel;
  double weight = 0.0;
};

/// Intensity variance of the 3x3 patch centred on (row, col), centre
/// included, clipped at the border.
double patch_variance(const GuideImage& guide, std::size_t row, std::size_t col);

/// Substitute for patch variances below 1e-8 * (guide dynamic range)^2.
double affinity_variance_floor(const GuideImage& guide);

/// Normalized weights exp(-(G(r) - G(s))^2 / (2 sigma_r^2)) over the 8-
/// neighbourhood of r (3 or 5 neighbours on the border); they sum to 1.
std::vector<NeighborWeight> affinity_weights(const GuideImage& guide, std::size_t row,
                                             std::size_t col);

// ---------------------------------------------------------------------------
// Edge-aware clue pre-filter

struct EdgeFilterOptions {
  EdgeWeightParams edges;
  std::size_t window = 21;  ///< odd side of the square neighbourhood
};

/// M'(r) = zeta(r) M(r) + (1 - zeta(r)) mean_{s in N(r)} M(s), N(r) being the
/// other clues inside the window around r. Clues without neighbours pass
/// through unchanged.
ChannelSamples edge_filter(const ChannelSamples& clues, const GuideImage& zeta,
                           std::size_t window = 21);
ClueSet edge_filter(const ClueSet& clues, const GuideImage& guide,
                    const EdgeFilterOptions& options = {});

// ---------------------------------------------------------------------------
// Linear system

/// One sparse matrix shared by every channel: row r has kappa(r) (2 at
/// clues, 1 elsewhere) on the diagonal and -w_rs on its neighbours. The
/// right-hand side is the clue value at clue pixels, zero elsewhere.
struct AffinitySystem {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  SparseMatrix matrix;
  std::vector<std::uint8_t> is_clue;
  std::vector<double> rhs;  ///< channel-major: rhs[ch * pixels + pixel]

  std::size_t unknowns() const noexcept { return height * width; }
  std::span<const double> rhs_channel(std::size_t ch) const {
    return {rhs.data() + ch * unknowns(), unknowns()};
  }
};

AffinitySystem build_system(const GuideImage& guide, const ChannelSamples& clues);
AffinitySystem build_system(const GuideImage& guide, const ClueSet& clues);

enum class SolverKind { iterative, dense };

struct ChannelSolveStats {
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct SolveOptions {
  SolverKind kind = SolverKind::iterative;
  SolverOptions iterative;
  std::size_t workers = 0;
};

/// Solves every channel against the shared matrix. Result is channel-
/// interleaved. Per-channel statistics go to `stats` when given.
ChannelImage solve(const AffinitySystem& system, const SolveOptions& options = {},
                   std::vector<ChannelSolveStats>* stats = nullptr);

// ---------------------------------------------------------------------------
// Luminance renormalization

enum class RescaleMode {
  per_pixel,  ///< denominator sums over bands at each pixel
  per_image,  ///< denominator sums each band over all pixels
};

struct RescaleOptions {
  double alpha = 1.0;
  std::optional<SpectralResponse> guide_response;     ///< S_G, flat when unset
  std::optional<SpectralResponse> spectral_response;  ///< S_H, flat when unset
  RescaleMode mode = RescaleMode::per_pixel;
};

inline constexpr double kRescaleEpsilon = 1e-12;

/// Per-band weights q = S_G / (l S_H), so that sum_b q_b H_b reproduces the
/// guide for a consistent camera pair.
std::vector<double> rescale_weights(std::size_t bands, const RescaleOptions& options);

/// H'(r, b) = alpha G(r) H(r, b) / sum_b |H(r, b)| q_b. Pixels whose
/// denominator is below 1e-12 are left unscaled and listed in `degenerate`.
ChannelImage luminance_rescale(const ChannelImage& spectra, const GuideImage& guide,
                               const RescaleOptions& options = {},
                               std::vector<PixelIndex>* degenerate = nullptr);
HyperCube luminance_rescale(const HyperCube& cube, const GuideImage& guide,
                            const RescaleOptions& options = {},
                            std::vector<PixelIndex>* degenerate = nullptr);

// ---------------------------------------------------------------------------
// Full reconstruction

struct ColorizeOptions {
  bool edge_filter = true;
  EdgeFilterOptions edge;
  /// Colorize in the span of the leading `dims` basis vectors; raw bands
  /// when unset.
  std::optional<SpectralBasis> basis;
  std::size_t dims = 0;  ///< 0: all basis vectors
  SolveOptions solve;
  RescaleOptions rescale;
};

struct ColorizeReport {
  std::size_t channels = 0;  ///< channels solved (p with a basis, l without)
  std::vector<ChannelSolveStats> solves;
  std::vector<PixelIndex> degenerate_pixels;
  double wall_ms = 0.0;
};

/// edge filter -> optional projection -> shared-matrix solve -> unproject ->
/// luminance rescale -> clamp at zero. Intermediate values are unclamped.
ChannelImage colorize_unclamped(const GuideImage& guide, const ClueSet& clues,
                                const ColorizeOptions& options = {},
                                ColorizeReport* report = nullptr);
HyperCube colorize(const GuideImage& guide, const ClueSet& clues,
                   const ColorizeOptions& options = {}, ColorizeReport* report = nullptr);

}  // namespace hypercolor
