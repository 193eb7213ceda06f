#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypercolor/cube.hpp"

namespace hypercolor {

/// Full-reference scores of a reconstruction against ground truth.
struct MetricReport {
  double psnr = 0.0;  ///< dB, +inf for identical cubes
  double ssim = 0.0;
  double gfc = 0.0;
  double ssv = 0.0;
  double emd = 0.0;
  double wall_ms = 0.0;
  std::size_t pixels = 0;
  std::size_t gfc_skipped = 0;  ///< zero-norm truth spectra
  std::size_t ssv_skipped = 0;
  std::size_t emd_skipped = 0;  ///< either spectrum sums below 1e-12 after clamping

  nlohmann::ordered_json to_json() const;
};

/// 10 log10(peak^2 / MSE), peak = max of truth, MSE over every value.
double psnr(const HyperCube& recon, const HyperCube& truth);

struct SsimOptions {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Gaussian-window SSIM per band over the valid window positions, dynamic
/// range = truth max, averaged over bands.
double ssim(const HyperCube& recon, const HyperCube& truth, const SsimOptions& options = {});

/// |<a, b>| / (|a| |b|) for one pair of spectra; nullopt when |truth| = 0.
std::optional<double> gfc_spectra(std::span<const double> recon, std::span<const double> truth);
double gfc(const HyperCube& recon, const HyperCube& truth, std::size_t* skipped = nullptr);

/// sqrt(RMSE^2 + (1 - r^2)) with r the Pearson correlation (r := 1 when
/// either spectrum is constant); nullopt when |truth| = 0.
std::optional<double> ssv_spectra(std::span<const double> recon, std::span<const double> truth);
double ssv(const HyperCube& recon, const HyperCube& truth, std::size_t* skipped = nullptr);

/// Wasserstein-1 between the spectra clamped at zero and normalized to unit
/// mass, divided by (l - 1) so the value lies in [0, 1]. nullopt when either
/// mass is below 1e-12.
std::optional<double> emd_spectra(std::span<const double> recon, std::span<const double> truth);
/// Per-pixel values, NaN where skipped.
std::vector<double> emd_per_pixel(const HyperCube& recon, const HyperCube& truth);
double emd(const HyperCube& recon, const HyperCube& truth, std::size_t* skipped = nullptr);

/// All five metrics; `wall_ms` is carried through as given.
MetricReport report(const HyperCube& recon, const HyperCube& truth, double wall_ms = 0.0);

/// Pairwise summation; result does not depend on thread count or traversal.
double pairwise_sum(std::span<const double> values);

/// Decimal rendering shared by the CSV and JSON writers ("inf" for +inf).
std::string format_number(double value);

}  // namespace hypercolor
