#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypercolor/cube.hpp"
#include "hypercolor/image_ops.hpp"

namespace hypercolor {

enum class SamplingPattern { random, uniform_push, uniform_whisk, guided_push, guided_whisk };

std::string_view to_string(SamplingPattern pattern);
/// Accepts the CLI spelling ("guided-whisk") and the enum spelling.
SamplingPattern parse_sampling_pattern(std::string_view name);
inline constexpr SamplingPattern kAllPatterns[] = {
    SamplingPattern::random, SamplingPattern::uniform_push, SamplingPattern::uniform_whisk,
    SamplingPattern::guided_push, SamplingPattern::guided_whisk};

/// Default feature mixing weight (corners vs. gray-level diversity).
inline constexpr double kDefaultFeatureAlpha = 0.7;

struct SamplingPlan {
  SamplingPattern pattern = SamplingPattern::uniform_whisk;
  double rate = 0.04;       ///< fraction of pixels, (0, 1]
  double alpha = kDefaultFeatureAlpha;
  std::uint64_t seed = 0;   ///< random pattern only

  void validate() const;
};

/// Neighbourhood used to count features around a row (push) or pixel (whisk).
struct FeatureWindow {
  std::size_t row_half_width = 5;
  std::size_t col_half_width = 10;
  unsigned gray_levels = 16;
  CornerParams corners;
};

/// Gamma(x) = eta(0.1 + 0.9 (x - min) / (max - min)), eta(x) = x / mean(x).
/// Constant input maps to all ones.
std::vector<double> feature_gamma(const std::vector<double>& features);

/// alpha * Gamma(corners) + (1 - alpha) * Gamma(unique gray levels), mean 1.
std::vector<double> combine_features(const std::vector<double>& corner_counts,
                                     const std::vector<double>& level_counts, double alpha);

/// Accumulate-and-threshold selection. The accumulator starts at the
/// threshold 1/rate, so index 0 is always taken; equality counts as a hit.
std::vector<std::size_t> accumulate_select(const std::vector<double>& weights, double rate);

std::vector<double> compute_row_weights(const GuideImage& guide, double alpha,
                                        const FeatureWindow& window = {});
/// Per-pixel weights along `row` for the whisk-broom second stage.
std::vector<double> compute_pixel_weights(const GuideImage& guide, std::size_t row, double alpha,
                                          const FeatureWindow& window = {});

Mask sample_uniform_push(std::size_t height, std::size_t width, double rate);
Mask sample_uniform_whisk(std::size_t height, std::size_t width, double rate);
Mask sample_random(std::size_t height, std::size_t width, double rate, std::uint64_t seed);
Mask sample_guided_push(const GuideImage& guide, double rate, double alpha,
                        const FeatureWindow& window = {});
Mask sample_guided_whisk(const GuideImage& guide, double rate, double alpha,
                         const FeatureWindow& window = {});

/// Dispatches on plan.pattern; guided patterns require `guide`.
Mask make_mask(const SamplingPlan& plan, std::size_t height, std::size_t width,
               const GuideImage* guide, const FeatureWindow& window = {});

}  // namespace hypercolor
