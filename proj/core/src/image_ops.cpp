#include "hypercolor/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "hypercolor/error.hpp"

namespace hypercolor {

namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) return 0.0;
  const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

// Sum over the odd `window` box centred on each pixel, clipped at the border.
GuideImage box_sum(const GuideImage& in, std::size_t window) {
  const std::size_t h = in.height();
  const std::size_t w = in.width();
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  GuideImage tmp(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        const auto cc = static_cast<std::ptrdiff_t>(c) + d;
        if (cc >= 0 && cc < static_cast<std::ptrdiff_t>(w)) acc += in.at(r, static_cast<std::size_t>(cc));
      }
      tmp.at(r, c) = acc;
    }
  }
  GuideImage out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        const auto rr = static_cast<std::ptrdiff_t>(r) + d;
        if (rr >= 0 && rr < static_cast<std::ptrdiff_t>(h)) acc += tmp.at(static_cast<std::size_t>(rr), c);
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

Gradients sobel(const GuideImage& image) {
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  Gradients g{GuideImage(h, w), GuideImage(h, w)};
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t ru = clamp_index(static_cast<std::ptrdiff_t>(r) - 1, h);
    const std::size_t rd = clamp_index(static_cast<std::ptrdiff_t>(r) + 1, h);
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t cl = clamp_index(static_cast<std::ptrdiff_t>(c) - 1, w);
      const std::size_t cr = clamp_index(static_cast<std::ptrdiff_t>(c) + 1, w);
      g.gx.at(r, c) = (image.at(ru, cr) + 2.0 * image.at(r, cr) + image.at(rd, cr)) -
                      (image.at(ru, cl) + 2.0 * image.at(r, cl) + image.at(rd, cl));
      g.gy.at(r, c) = (image.at(rd, cl) + 2.0 * image.at(rd, c) + image.at(rd, cr)) -
                      (image.at(ru, cl) + 2.0 * image.at(ru, c) + image.at(ru, cr));
    }
  }
  return g;
}

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
  if (size % 2 == 0 || size == 0) throw ParameterError("Gaussian kernel size must be odd");
  if (!(sigma > 0.0)) throw ParameterError("Gaussian sigma must be > 0");
  std::vector<double> k(size);
  const double centre = static_cast<double>(size / 2);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double x = static_cast<double>(i) - centre;
    k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    total += k[i];
  }
  for (double& v : k) v /= total;
  return k;
}

GuideImage convolve_separable(const GuideImage& image, const std::vector<double>& kernel) {
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  GuideImage tmp(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        acc += kernel[static_cast<std::size_t>(d + half)] *
               image.at(r, clamp_index(static_cast<std::ptrdiff_t>(c) + d, w));
      }
      tmp.at(r, c) = acc;
    }
  }
  GuideImage out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        acc += kernel[static_cast<std::size_t>(d + half)] *
               tmp.at(clamp_index(static_cast<std::ptrdiff_t>(r) + d, h), c);
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

Mask canny(const GuideImage& image, const CannyParams& params) {
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  if (!(params.sigma > 0.0) || !(params.low_pct >= 0.0 && params.low_pct <= params.high_pct &&
                                 params.high_pct <= 100.0)) {
    throw ParameterError("canny: need sigma > 0 and 0 <= low_pct <= high_pct <= 100");
  }
  Mask edges(h, w);
  if (h == 0 || w == 0) return edges;

  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * params.sigma));
  const GuideImage smooth = convolve_separable(image, gaussian_kernel(2 * radius + 1, params.sigma));
  const Gradients g = sobel(smooth);

  GuideImage magnitude(h, w);
  for (std::size_t i = 0; i < magnitude.pixels(); ++i) {
    magnitude.data()[i] = std::hypot(g.gx.data()[i], g.gy.data()[i]);
  }

  // Non-maximum suppression along the gradient direction, quantized to 4
  // sectors (0, 45, 90, 135 degrees).
  GuideImage thin(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double m = magnitude.at(r, c);
      if (m <= 0.0) continue;
      double angle = std::atan2(g.gy.at(r, c), g.gx.at(r, c)) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      int dr = 0;
      int dc = 0;
      if (angle < 22.5 || angle >= 157.5) {
        dc = 1;
      } else if (angle < 67.5) {
        dr = 1;
        dc = 1;
      } else if (angle < 112.5) {
        dr = 1;
      } else {
        dr = 1;
        dc = -1;
      }
      auto sample = [&](int sr, int sc) {
        const auto rr = static_cast<std::ptrdiff_t>(r) + sr;
        const auto cc = static_cast<std::ptrdiff_t>(c) + sc;
        if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(h) ||
            cc >= static_cast<std::ptrdiff_t>(w)) {
          return 0.0;
        }
        return magnitude.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
      };
      // Ties resolved toward the forward neighbour so plateaus stay one pixel wide.
      if (m >= sample(-dr, -dc) && m > sample(dr, dc)) thin.at(r, c) = m;
    }
  }

  const std::vector<double> all(magnitude.data().begin(), magnitude.data().end());
  const double low = percentile(all, params.low_pct);
  const double high = percentile(all, params.high_pct);

  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < thin.pixels(); ++i) {
    const double m = thin.data()[i];
    if (m > 0.0 && m >= high) {
      edges.set(i / w, i % w);
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const auto r = static_cast<std::ptrdiff_t>(i / w);
    const auto c = static_cast<std::ptrdiff_t>(i % w);
    for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
      for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
        const auto rr = r + dr;
        const auto cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(h) ||
            cc >= static_cast<std::ptrdiff_t>(w)) {
          continue;
        }
        const auto ur = static_cast<std::size_t>(rr);
        const auto uc = static_cast<std::size_t>(cc);
        const double m = thin.at(ur, uc);
        if (!edges.at(ur, uc) && m > 0.0 && m >= low) {
          edges.set(ur, uc);
          frontier.push_back(ur * w + uc);
        }
      }
    }
  }
  return edges;
}

GuideImage edge_weight_map(const GuideImage& image, const EdgeWeightParams& params) {
  const Mask edges = canny(image, params.canny);
  GuideImage binary(image.height(), image.width());
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) binary.at(r, c) = edges.at(r, c) ? 1.0 : 0.0;
  }
  // Zero padding here: an edge should not gain weight from the image border.
  const auto kernel = gaussian_kernel(params.blur_size, std::sqrt(params.blur_variance));
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  GuideImage tmp(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        const auto cc = static_cast<std::ptrdiff_t>(c) + d;
        if (cc >= 0 && cc < static_cast<std::ptrdiff_t>(w)) {
          acc += kernel[static_cast<std::size_t>(d + half)] * binary.at(r, static_cast<std::size_t>(cc));
        }
      }
      tmp.at(r, c) = acc;
    }
  }
  GuideImage zeta(h, w);
  double peak = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        const auto rr = static_cast<std::ptrdiff_t>(r) + d;
        if (rr >= 0 && rr < static_cast<std::ptrdiff_t>(h)) {
          acc += kernel[static_cast<std::size_t>(d + half)] * tmp.at(static_cast<std::size_t>(rr), c);
        }
      }
      zeta.at(r, c) = acc;
      peak = std::max(peak, acc);
    }
  }
  if (peak > 0.0) {
    for (double& v : zeta.data()) v = std::clamp(v / peak, 0.0, 1.0);
  }
  return zeta;
}

GuideImage corner_response(const GuideImage& image, std::size_t window) {
  const Gradients g = sobel(image);
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  GuideImage xx(h, w);
  GuideImage xy(h, w);
  GuideImage yy(h, w);
  for (std::size_t i = 0; i < image.pixels(); ++i) {
    const double gx = g.gx.data()[i];
    const double gy = g.gy.data()[i];
    xx.data()[i] = gx * gx;
    xy.data()[i] = gx * gy;
    yy.data()[i] = gy * gy;
  }
  const GuideImage sxx = box_sum(xx, window);
  const GuideImage sxy = box_sum(xy, window);
  const GuideImage syy = box_sum(yy, window);
  GuideImage score(h, w);
  for (std::size_t i = 0; i < image.pixels(); ++i) {
    const double a = sxx.data()[i];
    const double b = sxy.data()[i];
    const double c = syy.data()[i];
    const double half_trace = 0.5 * (a + c);
    const double root = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    score.data()[i] = std::max(0.0, half_trace - root);
  }
  return score;
}

std::vector<PixelIndex> detect_corners(const GuideImage& image, const CornerParams& params) {
  const GuideImage score = corner_response(image, params.window);
  std::vector<PixelIndex> corners;
  if (score.pixels() == 0) return corners;
  const double peak = *std::ranges::max_element(score.data());
  if (!(peak > 0.0)) return corners;
  // Relative to the peak so that round-off on flat images is not a corner.
  const double floor = std::max(params.quality * peak, 1e-12 * peak);
  const auto half = static_cast<std::ptrdiff_t>(params.nms / 2);
  const auto h = static_cast<std::ptrdiff_t>(image.height());
  const auto w = static_cast<std::ptrdiff_t>(image.width());
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      const double s = score.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (s < floor) continue;
      bool is_max = true;
      for (std::ptrdiff_t dr = -half; dr <= half && is_max; ++dr) {
        for (std::ptrdiff_t dc = -half; dc <= half; ++dc) {
          const auto rr = r + dr;
          const auto cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
          if (score.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) > s) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        corners.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)});
      }
    }
  }
  return corners;
}

std::vector<std::uint8_t> posterize(const GuideImage& image, unsigned levels) {
  if (levels < 1 || levels > 256) throw ParameterError("posterize levels must be in [1, 256]");
  std::vector<std::uint8_t> out(image.pixels(), 0);
  if (image.pixels() == 0) return out;
  const auto [lo, hi] = std::ranges::minmax(image.data());
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double q = std::floor(levels * (image.data()[i] - lo) / (hi - lo));
    out[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, static_cast<double>(levels - 1)));
  }
  return out;
}

}  // namespace hypercolor
