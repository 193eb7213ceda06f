#pragma once

#include <cmath>
#include <cstdint>

#include "hypercolor/cube.hpp"

namespace hypercolor {

/// Photons per full grayscale range for an office-lit scene.
inline constexpr double kDefaultPhotonsPerFullScale = 9.6e7;

/// Poisson-Gaussian capture parameters. An infinite exposure time means a
/// noiseless capture (values are copied exactly, no draws happen).
struct NoiseParams {
  double rho = kDefaultPhotonsPerFullScale;  ///< photons per unit radiance per second
  double t = 1e-4;                           ///< exposure per measurement [s]
  double mu = 0.0;                           ///< read-noise mean [counts]
  double sigma = 0.1;                        ///< read-noise std [counts]
  std::uint64_t seed = 0;

  bool noiseless() const noexcept { return std::isinf(t); }
  /// Throws ParameterError unless rho > 0, t > 0, sigma >= 0 (all finite
  /// except t, which may be +inf).
  void validate() const;
};

/// Grayscale capture: (Poisson(rho t sum_b w_b H(r,b)) + N(mu, sigma^2)) / (rho t).
/// Values are not clamped.
GuideImage simulate_guide(const HyperCube& truth, const NoiseParams& params,
                          const SpectralResponse& response, std::size_t workers = 0);

/// Spectral capture at the masked pixels, one independent draw per band:
/// (Poisson(rho t H(r,b)) + N(mu, sigma^2)) / (rho t). Not clamped.
ClueSet simulate_clues(const HyperCube& truth, const Mask& mask, const NoiseParams& params,
                       std::size_t workers = 0);

}  // namespace hypercolor
