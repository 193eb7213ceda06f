#pragma once

#include <cstdint>
#include <vector>

#include "hypercolor/cube.hpp"

namespace hypercolor {

// Scalar image operators on GuideImage planes. Borders replicate the edge
// pixel unless noted.

struct Gradients {
  GuideImage gx;
  GuideImage gy;
};

/// 3x3 Sobel derivatives.
Gradients sobel(const GuideImage& image);

/// Normalized 1-D Gaussian taps, `size` odd.
std::vector<double> gaussian_kernel(std::size_t size, double sigma);

/// Separable convolution with the same kernel along both axes.
GuideImage convolve_separable(const GuideImage& image, const std::vector<double>& kernel);

struct CannyParams {
  double sigma = 1.4;        ///< Gaussian pre-smoothing
  double low_pct = 70.0;     ///< hysteresis low threshold, percentile of |grad|
  double high_pct = 90.0;    ///< hysteresis high threshold, percentile of |grad|
};

/// Binary Canny edge map (non-maximum suppression + hysteresis).
Mask canny(const GuideImage& image, const CannyParams& params = {});

struct EdgeWeightParams {
  CannyParams canny;
  std::size_t blur_size = 31;
  double blur_variance = 11.0;
};

/// zeta in [0,1]: Canny edges blurred by a normalized Gaussian, rescaled so
/// the maximum is 1. All zeros when the image has no edges.
GuideImage edge_weight_map(const GuideImage& image, const EdgeWeightParams& params = {});

struct CornerParams {
  double quality = 0.01;     ///< keep scores >= quality * max score
  std::size_t window = 5;    ///< structure-tensor box window
  std::size_t nms = 5;       ///< non-maximum suppression window
};

/// Shi-Tomasi minimum-eigenvalue response.
GuideImage corner_response(const GuideImage& image, std::size_t window = 5);

/// "Good features to track": local maxima of the Shi-Tomasi response above
/// quality * max, row-major order.
std::vector<PixelIndex> detect_corners(const GuideImage& image, const CornerParams& params = {});

/// Quantizes to `levels` gray levels over the image's own [min, max].
std::vector<std::uint8_t> posterize(const GuideImage& image, unsigned levels = 16);

}  // namespace hypercolor
