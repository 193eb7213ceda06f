#include "hypercolor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hypercolor/error.hpp"
#include "hypercolor/image_ops.hpp"

namespace hypercolor {

namespace {

constexpr double kMassEpsilon = 1e-12;

void require_same_shape(const HyperCube& a, const HyperCube& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.bands() != b.bands()) {
    throw ParameterError("reconstruction and truth differ in shape");
  }
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

// Valid-mode separable correlation of one band plane.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t oh = h - n + 1;
  const std::size_t ow = w - n + 1;
  std::vector<double> tmp(h * ow, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * plane[r * w + c + i];
      tmp[r * ow + c] = acc;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * tmp[(r + i) * ow + c];
      out[r * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

nlohmann::ordered_json MetricReport::to_json() const {
  auto number = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  return {{"psnr", number(psnr)},      {"ssim", number(ssim)},
          {"gfc", number(gfc)},        {"ssv", number(ssv)},
          {"emd", number(emd)},        {"wall_ms", number(wall_ms)},
          {"pixels", pixels},          {"gfc_skipped", gfc_skipped},
          {"ssv_skipped", ssv_skipped}, {"emd_skipped", emd_skipped}};
}

double psnr(const HyperCube& recon, const HyperCube& truth) {
  require_same_shape(recon, truth);
  std::vector<double> sq(truth.data().size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = recon.data()[i] - truth.data()[i];
    sq[i] = d * d;
  }
  const double mse = mean_of(sq);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = truth.data().empty() ? 0.0 : *std::ranges::max_element(truth.data());
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const HyperCube& recon, const HyperCube& truth, const SsimOptions& options) {
  require_same_shape(recon, truth);
  const std::size_t h = truth.height();
  const std::size_t w = truth.width();
  const std::size_t l = truth.bands();
  if (h < options.window || w < options.window) {
    throw ParameterError("SSIM needs images of at least " + std::to_string(options.window) +
                         " pixels per side");
  }
  double range = *std::ranges::max_element(truth.data());
  if (!(range > 0.0)) range = 1.0;
  const double c1 = (options.k1 * range) * (options.k1 * range);
  const double c2 = (options.k2 * range) * (options.k2 * range);
  const auto kernel = gaussian_kernel(options.window, options.sigma);

  std::vector<double> per_band(l);
  std::vector<double> x(h * w), y(h * w), xx(h * w), yy(h * w), xy(h * w);
  for (std::size_t b = 0; b < l; ++b) {
    for (std::size_t p = 0; p < h * w; ++p) {
      x[p] = recon.data()[p * l + b];
      y[p] = truth.data()[p * l + b];
      xx[p] = x[p] * x[p];
      yy[p] = y[p] * y[p];
      xy[p] = x[p] * y[p];
    }
    const auto mx = filter_valid(x, h, w, kernel);
    const auto my = filter_valid(y, h, w, kernel);
    const auto sxx = filter_valid(xx, h, w, kernel);
    const auto syy = filter_valid(yy, h, w, kernel);
    const auto sxy = filter_valid(xy, h, w, kernel);
    std::vector<double> map(mx.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      map[i] = ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
               ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    per_band[b] = mean_of(map);
  }
  return mean_of(per_band);
}

std::optional<double> gfc_spectra(std::span<const double> recon, std::span<const double> truth) {
  double dot = 0.0;
  double nr = 0.0;
  double nt = 0.0;
  for (std::size_t b = 0; b < truth.size(); ++b) {
    dot += recon[b] * truth[b];
    nr += recon[b] * recon[b];
    nt += truth[b] * truth[b];
  }
  if (nt == 0.0) return std::nullopt;
  if (nr == 0.0) return 0.0;
  return std::min(1.0, std::abs(dot) / (std::sqrt(nr) * std::sqrt(nt)));
}

double gfc(const HyperCube& recon, const HyperCube& truth, std::size_t* skipped) {
  require_same_shape(recon, truth);
  std::vector<double> values;
  values.reserve(truth.pixels());
  for (std::size_t p = 0; p < truth.pixels(); ++p) {
    if (auto v = gfc_spectra(recon.spectrum(p), truth.spectrum(p))) values.push_back(*v);
  }
  if (skipped) *skipped = truth.pixels() - values.size();
  return mean_of(values);
}

std::optional<double> ssv_spectra(std::span<const double> recon, std::span<const double> truth) {
  const std::size_t l = truth.size();
  double nt = 0.0;
  double mr = 0.0;
  double mt = 0.0;
  for (std::size_t b = 0; b < l; ++b) {
    nt += truth[b] * truth[b];
    mr += recon[b];
    mt += truth[b];
  }
  if (nt == 0.0) return std::nullopt;
  mr /= static_cast<double>(l);
  mt /= static_cast<double>(l);
  double sq = 0.0;
  double vr = 0.0;
  double vt = 0.0;
  double cov = 0.0;
  for (std::size_t b = 0; b < l; ++b) {
    const double d = recon[b] - truth[b];
    sq += d * d;
    vr += (recon[b] - mr) * (recon[b] - mr);
    vt += (truth[b] - mt) * (truth[b] - mt);
    cov += (recon[b] - mr) * (truth[b] - mt);
  }
  const double rmse_sq = sq / static_cast<double>(l);
  double r = 1.0;
  if (vr > 0.0 && vt > 0.0) r = std::clamp(cov / std::sqrt(vr * vt), -1.0, 1.0);
  return std::sqrt(rmse_sq + (1.0 - r * r));
}

double ssv(const HyperCube& recon, const HyperCube& truth, std::size_t* skipped) {
  require_same_shape(recon, truth);
  std::vector<double> values;
  values.reserve(truth.pixels());
  for (std::size_t p = 0; p < truth.pixels(); ++p) {
    if (auto v = ssv_spectra(recon.spectrum(p), truth.spectrum(p))) values.push_back(*v);
  }
  if (skipped) *skipped = truth.pixels() - values.size();
  return mean_of(values);
}

std::optional<double> emd_spectra(std::span<const double> recon, std::span<const double> truth) {
  const std::size_t l = truth.size();
  double mass_r = 0.0;
  double mass_t = 0.0;
  for (std::size_t b = 0; b < l; ++b) {
    mass_r += std::max(recon[b], 0.0);
    mass_t += std::max(truth[b], 0.0);
  }
  if (mass_r < kMassEpsilon || mass_t < kMassEpsilon) return std::nullopt;
  if (l < 2) return 0.0;
  double cdf_r = 0.0;
  double cdf_t = 0.0;
  double acc = 0.0;
  for (std::size_t b = 0; b < l; ++b) {
    cdf_r += std::max(recon[b], 0.0) / mass_r;
    cdf_t += std::max(truth[b], 0.0) / mass_t;
    acc += std::abs(cdf_r - cdf_t);
  }
  return acc / static_cast<double>(l - 1);
}

std::vector<double> emd_per_pixel(const HyperCube& recon, const HyperCube& truth) {
  require_same_shape(recon, truth);
  std::vector<double> out(truth.pixels(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t p = 0; p < truth.pixels(); ++p) {
    if (auto v = emd_spectra(recon.spectrum(p), truth.spectrum(p))) out[p] = *v;
  }
  return out;
}

double emd(const HyperCube& recon, const HyperCube& truth, std::size_t* skipped) {
  const auto per_pixel = emd_per_pixel(recon, truth);
  std::vector<double> kept;
  kept.reserve(per_pixel.size());
  for (double v : per_pixel) {
    if (!std::isnan(v)) kept.push_back(v);
  }
  if (skipped) *skipped = per_pixel.size() - kept.size();
  return mean_of(kept);
}

MetricReport report(const HyperCube& recon, const HyperCube& truth, double wall_ms) {
  MetricReport r;
  r.pixels = truth.pixels();
  r.psnr = psnr(recon, truth);
  r.ssim = ssim(recon, truth);
  r.gfc = gfc(recon, truth, &r.gfc_skipped);
  r.ssv = ssv(recon, truth, &r.ssv_skipped);
  r.emd = emd(recon, truth, &r.emd_skipped);
  r.wall_ms = wall_ms;
  return r;
}

}  // namespace hypercolor
