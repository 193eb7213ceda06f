#include "hypercolor/random.hpp"

#include <cmath>
#include <numbers>

#include "hypercolor/error.hpp"

namespace hypercolor {

namespace {

double poisson_inversion(double mean, CounterRng& rng) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  double k = 0.0;
  // The tail beyond 1000 has negligible mass for mean < 10.
  while (u > cdf && k < 1000.0) {
    k += 1.0;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
double poisson_ptrs(double mean, CounterRng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

double sample_poisson(double mean, CounterRng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ParameterError("Poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0.0;
  return mean < 10.0 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

double sample_standard_normal(CounterRng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hypercolor
