#include "hypercolor/noise.hpp"

#include <string>

#include "hypercolor/error.hpp"
#include "hypercolor/parallel.hpp"
#include "hypercolor/random.hpp"

namespace hypercolor {

namespace {

// Stream domains keep guide and clue draws independent under one seed.
constexpr std::uint64_t kGuideDomain = 0x4755494445ull;
constexpr std::uint64_t kClueDomain = 0x434C554553ull;

// Largest mean for which integer counts stay exact in a double.
constexpr double kMaxPoissonMean = 9007199254740992.0;  // 2^53

double capture(double signal, const NoiseParams& p, CounterRng& rng) {
  const double photons_per_unit = p.rho * p.t;
  const double mean = photons_per_unit * signal;
  if (mean > kMaxPoissonMean) {
    throw ParameterError("Poisson mean " + std::to_string(mean) +
                         " exceeds 2^53; reduce rho or t");
  }
  const double counts = sample_poisson(mean, rng) + p.mu + p.sigma * sample_standard_normal(rng);
  return counts / photons_per_unit;
}

}  // namespace

void NoiseParams::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("rho must be > 0");
  if (!(t > 0.0) || std::isnan(t)) throw ParameterError("exposure time t must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be >= 0");
  if (!std::isfinite(mu)) throw ParameterError("mu must be finite");
}

GuideImage simulate_guide(const HyperCube& truth, const NoiseParams& params,
                          const SpectralResponse& response, std::size_t workers) {
  params.validate();
  truth.require_nonnegative("simulate_guide");
  GuideImage guide = make_guide(truth, response);
  if (params.noiseless()) return guide;

  auto data = guide.data();
  const std::size_t width = guide.width();
  parallel_for(guide.height(), workers, [&](std::size_t row) {
    for (std::size_t col = 0; col < width; ++col) {
      const std::size_t pixel = row * width + col;
      CounterRng rng(params.seed, kGuideDomain, pixel);
      data[pixel] = capture(data[pixel], params, rng);
    }
  });
  return guide;
}

ClueSet simulate_clues(const HyperCube& truth, const Mask& mask, const NoiseParams& params,
                       std::size_t workers) {
  params.validate();
  truth.require_nonnegative("simulate_clues");
  if (mask.count() == 0) throw ParameterError("sampling mask is empty");
  ClueSet exact = cube_to_clues(truth, mask);
  if (params.noiseless()) return exact;

  ChannelSamples samples = exact.samples();
  const std::size_t l = samples.channels;
  parallel_for(samples.count(), workers, [&](std::size_t i) {
    const PixelIndex p = samples.coords[i];
    const std::uint64_t pixel = std::uint64_t{p.row} * samples.width + p.col;
    auto spectrum = samples.sample(i);
    for (std::size_t b = 0; b < l; ++b) {
      CounterRng rng(params.seed, kClueDomain, pixel * l + b);
      spectrum[b] = capture(spectrum[b], params, rng);
    }
  });
  return with_spectra(exact, std::move(samples));
}

}  // namespace hypercolor
