#include "hypercolor/cube.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hypercolor/error.hpp"

namespace hypercolor {

namespace {

void check_wavelengths(std::span<const double> wl) {
  if (wl.empty()) throw ValidationError("cube must have at least one band");
  for (std::size_t i = 0; i < wl.size(); ++i) {
    if (!std::isfinite(wl[i])) throw ValidationError("non-finite wavelength");
    if (i > 0 && !(wl[i] > wl[i - 1])) {
      throw ValidationError("wavelengths must be strictly increasing (band " +
                            std::to_string(i) + ")");
    }
  }
}

}  // namespace

SpectralResponse SpectralResponse::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw ParameterError("spectral response is empty");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ParameterError("spectral response weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) throw ParameterError("spectral response is all zero");
  for (double& w : weights) w /= total;
  return SpectralResponse(std::move(weights));
}

SpectralResponse SpectralResponse::flat(std::size_t bands) {
  return from_weights(std::vector<double>(bands, 1.0));
}

SpectralResponse SpectralResponse::visible_flat(std::span<const double> wavelengths) {
  std::vector<double> w(wavelengths.size(), 0.0);
  for (std::size_t b = 0; b < wavelengths.size(); ++b) {
    if (wavelengths[b] >= kVisibleLowNm && wavelengths[b] <= kVisibleHighNm) w[b] = 1.0;
  }
  return from_weights(std::move(w));
}

HyperCube::HyperCube(std::size_t height, std::size_t width, std::vector<double> wavelengths)
    : height_(height), width_(width), wavelengths_(std::move(wavelengths)) {
  check_wavelengths(wavelengths_);
  data_.assign(height_ * width_ * wavelengths_.size(), 0.0);
}

HyperCube::HyperCube(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                     std::vector<double> data)
    : height_(height),
      width_(width),
      wavelengths_(std::move(wavelengths)),
      data_(std::move(data)) {
  validate();
}

void HyperCube::validate() const {
  check_wavelengths(wavelengths_);
  if (data_.size() != height_ * width_ * wavelengths_.size()) {
    throw ValidationError("cube payload has " + std::to_string(data_.size()) +
                          " values, expected " +
                          std::to_string(height_ * width_ * wavelengths_.size()));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw ValidationError("cube contains non-finite values");
  }
}

bool HyperCube::is_nonnegative() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

void HyperCube::require_nonnegative(const char* what) const {
  if (!is_nonnegative()) {
    throw ValidationError(std::string(what) + ": cube contains negative values");
  }
}

GuideImage::GuideImage(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width, fill) {}

GuideImage::GuideImage(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  validate();
}

void GuideImage::validate() const {
  if (data_.size() != height_ * width_) throw ValidationError("guide payload size mismatch");
  for (double v : data_) {
    if (!std::isfinite(v)) throw ValidationError("guide contains non-finite values");
  }
}

Mask::Mask(std::size_t height, std::size_t width, bool fill)
    : height_(height), width_(width), bits_(height * width, fill ? 1 : 0) {}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<PixelIndex> Mask::indices() const {
  std::vector<PixelIndex> out;
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < width_; ++c) {
      if (at(r, c)) {
        out.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)});
      }
    }
  }
  return out;
}

ClueSet::ClueSet(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                 std::vector<PixelIndex> coords, std::vector<double> spectra)
    : wavelengths_(std::move(wavelengths)), mask_(height, width) {
  check_wavelengths(wavelengths_);
  const std::size_t l = wavelengths_.size();
  if (spectra.size() != coords.size() * l) {
    throw ValidationError("clue spectra length does not match count x bands");
  }
  for (double v : spectra) {
    if (!std::isfinite(v)) throw ValidationError("clue spectra contain non-finite values");
  }

  std::vector<std::size_t> order(coords.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });

  samples_.height = height;
  samples_.width = width;
  samples_.channels = l;
  samples_.coords.reserve(coords.size());
  samples_.values.reserve(spectra.size());
  for (std::size_t i : order) {
    const PixelIndex p = coords[i];
    if (p.row >= height || p.col >= width) {
      throw ValidationError("clue coordinate out of range");
    }
    if (mask_.at(p.row, p.col)) throw ValidationError("duplicate clue coordinate");
    mask_.set(p.row, p.col);
    samples_.coords.push_back(p);
    samples_.values.insert(samples_.values.end(), spectra.begin() + i * l,
                           spectra.begin() + (i + 1) * l);
  }
}

GuideImage make_guide(const HyperCube& cube, const SpectralResponse& response) {
  if (response.size() != cube.bands()) {
    throw ParameterError("response has " + std::to_string(response.size()) +
                         " bands, cube has " + std::to_string(cube.bands()));
  }
  GuideImage guide(cube.height(), cube.width());
  auto out = guide.data();
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto s = cube.spectrum(p);
    double acc = 0.0;
    for (std::size_t b = 0; b < s.size(); ++b) acc += response[b] * s[b];
    out[p] = acc;
  }
  return guide;
}

GuideImage make_guide(const HyperCube& cube) {
  return make_guide(cube, SpectralResponse::visible_flat(cube.wavelengths()));
}

HyperCube clues_to_cube(const ClueSet& clues) {
  HyperCube cube(clues.height(), clues.width(),
                 std::vector<double>(clues.wavelengths().begin(), clues.wavelengths().end()));
  for (std::size_t i = 0; i < clues.count(); ++i) {
    const PixelIndex p = clues.coords()[i];
    std::ranges::copy(clues.spectrum(i), cube.spectrum(p.row, p.col).begin());
  }
  return cube;
}

ClueSet cube_to_clues(const HyperCube& cube, const Mask& mask) {
  if (mask.height() != cube.height() || mask.width() != cube.width()) {
    throw ParameterError("mask dimensions do not match cube");
  }
  auto coords = mask.indices();
  std::vector<double> spectra;
  spectra.reserve(coords.size() * cube.bands());
  for (const PixelIndex& p : coords) {
    const auto s = cube.spectrum(p.row, p.col);
    spectra.insert(spectra.end(), s.begin(), s.end());
  }
  return ClueSet(cube.height(), cube.width(),
                 std::vector<double>(cube.wavelengths().begin(), cube.wavelengths().end()),
                 std::move(coords), std::move(spectra));
}

ClueSet with_spectra(const ClueSet& clues, ChannelSamples samples) {
  if (samples.channels != clues.bands() || samples.coords.size() != clues.count()) {
    throw ParameterError("samples do not match clue geometry");
  }
  return ClueSet(clues.height(), clues.width(),
                 std::vector<double>(clues.wavelengths().begin(), clues.wavelengths().end()),
                 std::move(samples.coords), std::move(samples.values));
}

}  // namespace hypercolor
