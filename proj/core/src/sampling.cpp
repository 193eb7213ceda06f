#include "hypercolor/sampling.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numeric>

#include "hypercolor/error.hpp"
#include "hypercolor/random.hpp"

namespace hypercolor {

namespace {

constexpr std::uint64_t kRandomMaskDomain = 0x4D41534Bull;

// Relative slack so that repeated subtraction of 1/rate does not turn an
// exact tie into a miss.
constexpr double kTieSlack = 1e-12;

__extension__ using u128 = unsigned __int128;

std::uint64_t bounded(CounterRng& rng, std::uint64_t bound) {
  // Lemire's nearly-divisionless unbiased range reduction.
  u128 m = static_cast<u128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void check_rate(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ParameterError("sampling rate must be in (0, 1]");
}

void check_dims(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw ParameterError("cannot sample an empty image");
}

Mask rows_mask(std::size_t height, std::size_t width, const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw ParameterError("sampling rate selects no rows");
  Mask mask(height, width);
  for (std::size_t r : rows) {
    for (std::size_t c = 0; c < width; ++c) mask.set(r, c);
  }
  return mask;
}

using LevelSet = std::bitset<256>;

struct FeatureMaps {
  std::vector<std::uint32_t> corners;  // per-pixel corner indicator
  std::vector<std::uint8_t> levels;    // posterized guide
};

FeatureMaps feature_maps(const GuideImage& guide, const FeatureWindow& window) {
  FeatureMaps maps;
  maps.corners.assign(guide.pixels(), 0);
  for (const PixelIndex& p : detect_corners(guide, window.corners)) {
    maps.corners[p.row * guide.width() + p.col] = 1;
  }
  maps.levels = posterize(guide, window.gray_levels);
  return maps;
}

std::pair<std::size_t, std::size_t> span_around(std::size_t centre, std::size_t half,
                                                std::size_t n) {
  const std::size_t lo = centre >= half ? centre - half : 0;
  const std::size_t hi = std::min(n - 1, centre + half);
  return {lo, hi};
}

std::vector<double> row_weights_from(const GuideImage& guide, const FeatureMaps& maps,
                                     double alpha, const FeatureWindow& window) {
  const std::size_t h = guide.height();
  const std::size_t w = guide.width();
  std::vector<double> row_corners(h, 0.0);
  std::vector<LevelSet> row_levels(h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      row_corners[r] += maps.corners[r * w + c];
      row_levels[r].set(maps.levels[r * w + c]);
    }
  }
  std::vector<double> f_corners(h, 0.0);
  std::vector<double> f_levels(h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    const auto [lo, hi] = span_around(r, window.row_half_width, h);
    LevelSet seen;
    for (std::size_t rr = lo; rr <= hi; ++rr) {
      f_corners[r] += row_corners[rr];
      seen |= row_levels[rr];
    }
    f_levels[r] = static_cast<double>(seen.count());
  }
  return combine_features(f_corners, f_levels, alpha);
}

std::vector<double> pixel_weights_from(const GuideImage& guide, const FeatureMaps& maps,
                                       std::size_t row, double alpha,
                                       const FeatureWindow& window) {
  const std::size_t h = guide.height();
  const std::size_t w = guide.width();
  const auto [r_lo, r_hi] = span_around(row, window.row_half_width, h);
  std::vector<double> col_corners(w, 0.0);
  std::vector<LevelSet> col_levels(w);
  for (std::size_t r = r_lo; r <= r_hi; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      col_corners[c] += maps.corners[r * w + c];
      col_levels[c].set(maps.levels[r * w + c]);
    }
  }
  std::vector<double> f_corners(w, 0.0);
  std::vector<double> f_levels(w, 0.0);
  for (std::size_t c = 0; c < w; ++c) {
    const auto [lo, hi] = span_around(c, window.col_half_width, w);
    LevelSet seen;
    for (std::size_t cc = lo; cc <= hi; ++cc) {
      f_corners[c] += col_corners[cc];
      seen |= col_levels[cc];
    }
    f_levels[c] = static_cast<double>(seen.count());
  }
  return combine_features(f_corners, f_levels, alpha);
}

}  // namespace

std::string_view to_string(SamplingPattern pattern) {
  switch (pattern) {
    case SamplingPattern::random: return "random";
    case SamplingPattern::uniform_push: return "uniform-push";
    case SamplingPattern::uniform_whisk: return "uniform-whisk";
    case SamplingPattern::guided_push: return "guided-push";
    case SamplingPattern::guided_whisk: return "guided-whisk";
  }
  return "unknown";
}

SamplingPattern parse_sampling_pattern(std::string_view name) {
  std::string key(name);
  std::ranges::replace(key, '_', '-');
  for (SamplingPattern p : kAllPatterns) {
    if (to_string(p) == key) return p;
  }
  throw ParameterError("unknown sampling pattern '" + std::string(name) + "'");
}

void SamplingPlan::validate() const {
  check_rate(rate);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must be in [0, 1]");
}

std::vector<double> feature_gamma(const std::vector<double>& features) {
  std::vector<double> out(features.size(), 1.0);
  if (features.empty()) return out;
  const auto [lo, hi] = std::ranges::minmax(features);
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    out[i] = 0.1 + 0.9 * (features[i] - lo) / (hi - lo);
  }
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v /= mean;
  return out;
}

std::vector<double> combine_features(const std::vector<double>& corner_counts,
                                     const std::vector<double>& level_counts, double alpha) {
  if (corner_counts.size() != level_counts.size()) {
    throw ParameterError("feature vectors differ in length");
  }
  const auto g_corners = feature_gamma(corner_counts);
  const auto g_levels = feature_gamma(level_counts);
  std::vector<double> out(g_corners.size());
  bool uniform = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * g_corners[i] + (1.0 - alpha) * g_levels[i];
    uniform = uniform && g_corners[i] == 1.0 && g_levels[i] == 1.0;
  }
  if (uniform || out.empty()) return std::vector<double>(out.size(), 1.0);
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v /= mean;
  return out;
}

std::vector<std::size_t> accumulate_select(const std::vector<double>& weights, double rate) {
  check_rate(rate);
  const double threshold = 1.0 / rate;
  double acc = threshold;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (acc >= threshold * (1.0 - kTieSlack)) {
      picked.push_back(i);
      acc -= threshold;
    }
    acc += weights[i];
  }
  return picked;
}

std::vector<double> compute_row_weights(const GuideImage& guide, double alpha,
                                        const FeatureWindow& window) {
  guide.validate();
  return row_weights_from(guide, feature_maps(guide, window), alpha, window);
}

std::vector<double> compute_pixel_weights(const GuideImage& guide, std::size_t row, double alpha,
                                          const FeatureWindow& window) {
  guide.validate();
  if (row >= guide.height()) throw ParameterError("row out of range");
  return pixel_weights_from(guide, feature_maps(guide, window), row, alpha, window);
}

Mask sample_uniform_push(std::size_t height, std::size_t width, double rate) {
  check_dims(height, width);
  return rows_mask(height, width, accumulate_select(std::vector<double>(height, 1.0), rate));
}

Mask sample_uniform_whisk(std::size_t height, std::size_t width, double rate) {
  check_dims(height, width);
  check_rate(rate);
  const double axis_rate = std::sqrt(rate);
  const auto rows = accumulate_select(std::vector<double>(height, 1.0), axis_rate);
  const auto cols = accumulate_select(std::vector<double>(width, 1.0), axis_rate);
  Mask mask(height, width);
  for (std::size_t r : rows) {
    for (std::size_t c : cols) mask.set(r, c);
  }
  return mask;
}

Mask sample_random(std::size_t height, std::size_t width, double rate, std::uint64_t seed) {
  check_dims(height, width);
  check_rate(rate);
  const std::size_t total = height * width;
  const auto count = static_cast<std::size_t>(std::floor(rate * static_cast<double>(total)));
  if (count == 0) throw ParameterError("sampling rate selects no pixels");
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed, kRandomMaskDomain, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + bounded(rng, total - i);
    std::swap(order[i], order[j]);
  }
  Mask mask(height, width);
  for (std::size_t i = 0; i < count; ++i) mask.set(order[i] / width, order[i] % width);
  return mask;
}

Mask sample_guided_push(const GuideImage& guide, double rate, double alpha,
                        const FeatureWindow& window) {
  check_dims(guide.height(), guide.width());
  const auto weights = compute_row_weights(guide, alpha, window);
  return rows_mask(guide.height(), guide.width(), accumulate_select(weights, rate));
}

Mask sample_guided_whisk(const GuideImage& guide, double rate, double alpha,
                         const FeatureWindow& window) {
  check_dims(guide.height(), guide.width());
  check_rate(rate);
  guide.validate();
  const double axis_rate = std::sqrt(rate);
  const FeatureMaps maps = feature_maps(guide, window);
  const auto rows = accumulate_select(row_weights_from(guide, maps, alpha, window), axis_rate);
  Mask mask(guide.height(), guide.width());
  for (std::size_t r : rows) {
    const auto weights = pixel_weights_from(guide, maps, r, alpha, window);
    for (std::size_t c : accumulate_select(weights, axis_rate)) mask.set(r, c);
  }
  if (mask.count() == 0) throw ParameterError("sampling rate selects no pixels");
  return mask;
}

Mask make_mask(const SamplingPlan& plan, std::size_t height, std::size_t width,
               const GuideImage* guide, const FeatureWindow& window) {
  plan.validate();
  const bool guided = plan.pattern == SamplingPattern::guided_push ||
                      plan.pattern == SamplingPattern::guided_whisk;
  if (guided) {
    if (guide == nullptr) throw ParameterError("guided sampling requires a guide image");
    if (guide->height() != height || guide->width() != width) {
      throw ParameterError("guide dimensions do not match");
    }
  }
  switch (plan.pattern) {
    case SamplingPattern::random: return sample_random(height, width, plan.rate, plan.seed);
    case SamplingPattern::uniform_push: return sample_uniform_push(height, width, plan.rate);
    case SamplingPattern::uniform_whisk: return sample_uniform_whisk(height, width, plan.rate);
    case SamplingPattern::guided_push:
      return sample_guided_push(*guide, plan.rate, plan.alpha, window);
    case SamplingPattern::guided_whisk:
      return sample_guided_whisk(*guide, plan.rate, plan.alpha, window);
  }
  throw ParameterError("unknown sampling pattern");
}

}  // namespace hypercolor
