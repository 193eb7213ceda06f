#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hypercolor {

struct PixelIndex {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  auto operator<=>(const PixelIndex&) const = default;
};

/// Per-band weights of a camera, normalized to unit L1 norm.
class SpectralResponse {
 public:
  /// Normalizes `weights`; throws ParameterError when empty, negative,
  /// non-finite or all zero.
  static SpectralResponse from_weights(std::vector<double> weights);
  /// Uniform over all bands.
  static SpectralResponse flat(std::size_t bands);
  /// Uniform over bands inside [400, 700] nm, zero elsewhere.
  static SpectralResponse visible_flat(std::span<const double> wavelengths);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t band) const { return values_[band]; }

 private:
  explicit SpectralResponse(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

inline constexpr double kVisibleLowNm = 400.0;
inline constexpr double kVisibleHighNm = 700.0;

/// Dense m x n x l datacube stored band-interleaved-by-pixel: the l values of
/// a pixel are contiguous, pixels run row-major.
class HyperCube {
 public:
  HyperCube() = default;
  /// Zero-filled cube.
  HyperCube(std::size_t height, std::size_t width, std::vector<double> wavelengths);
  /// Takes ownership of `data` (length height*width*bands) and validates.
  HyperCube(std::size_t height, std::size_t width, std::vector<double> wavelengths,
            std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t bands() const noexcept { return wavelengths_.size(); }
  std::size_t pixels() const noexcept { return height_ * width_; }
  std::span<const double> wavelengths() const noexcept { return wavelengths_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> spectrum(std::size_t row, std::size_t col) const {
    return {data_.data() + (row * width_ + col) * bands(), bands()};
  }
  std::span<double> spectrum(std::size_t row, std::size_t col) {
    return {data_.data() + (row * width_ + col) * bands(), bands()};
  }
  std::span<const double> spectrum(std::size_t pixel) const {
    return {data_.data() + pixel * bands(), bands()};
  }
  std::span<double> spectrum(std::size_t pixel) {
    return {data_.data() + pixel * bands(), bands()};
  }

  double at(std::size_t row, std::size_t col, std::size_t band) const {
    return data_[(row * width_ + col) * bands() + band];
  }
  double& at(std::size_t row, std::size_t col, std::size_t band) {
    return data_[(row * width_ + col) * bands() + band];
  }

  /// Shape, strictly increasing wavelengths, finite payload.
  void validate() const;
  bool is_nonnegative() const noexcept;
  /// Throws ValidationError mentioning `what` when any value is negative.
  void require_nonnegative(const char* what) const;

  bool operator==(const HyperCube&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> wavelengths_;
  std::vector<double> data_;
};

class GuideImage {
 public:
  GuideImage() = default;
  GuideImage(std::size_t height, std::size_t width, double fill = 0.0);
  GuideImage(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixels() const noexcept { return data_.size(); }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  double& at(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }

  void validate() const;

  bool operator==(const GuideImage&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// Boolean occupancy image.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t height, std::size_t width, bool fill = false);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  bool at(std::size_t row, std::size_t col) const { return bits_[row * width_ + col] != 0; }
  void set(std::size_t row, std::size_t col, bool value = true) {
    bits_[row * width_ + col] = value ? 1 : 0;
  }
  std::size_t count() const noexcept;
  /// Sampled pixels in row-major order.
  std::vector<PixelIndex> indices() const;

  bool operator==(const Mask&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Dense multi-channel image of doubles, channel-interleaved like HyperCube.
/// Holds subspace coefficients and unclamped intermediate reconstructions.
struct ChannelImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  ChannelImage() = default;
  ChannelImage(std::size_t h, std::size_t w, std::size_t c)
      : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  std::span<const double> pixel(std::size_t index) const {
    return {values.data() + index * channels, channels};
  }
  std::span<double> pixel(std::size_t index) {
    return {values.data() + index * channels, channels};
  }
};

/// Sparse per-pixel vectors: coordinates in row-major order, unique, with
/// `channels` values each.
struct ChannelSamples {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<PixelIndex> coords;
  std::vector<double> values;

  std::size_t count() const noexcept { return coords.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {values.data() + i * channels, channels};
  }
  std::span<double> sample(std::size_t i) {
    return {values.data() + i * channels, channels};
  }
  bool operator==(const ChannelSamples&) const = default;
};

/// Sparse spectral measurements aligned with a cube.
class ClueSet {
 public:
  ClueSet() = default;
  /// Entries are re-ordered row-major. Throws ValidationError on duplicate or
  /// out-of-range coordinates, wrong spectrum length or non-finite values.
  ClueSet(std::size_t height, std::size_t width, std::vector<double> wavelengths,
          std::vector<PixelIndex> coords, std::vector<double> spectra);

  std::size_t height() const noexcept { return samples_.height; }
  std::size_t width() const noexcept { return samples_.width; }
  std::size_t bands() const noexcept { return wavelengths_.size(); }
  std::size_t count() const noexcept { return samples_.count(); }
  std::span<const double> wavelengths() const noexcept { return wavelengths_; }
  std::span<const PixelIndex> coords() const noexcept { return samples_.coords; }
  std::span<const double> spectrum(std::size_t i) const { return samples_.sample(i); }
  const ChannelSamples& samples() const noexcept { return samples_; }
  const Mask& mask() const noexcept { return mask_; }

  bool operator==(const ClueSet&) const = default;

 private:
  std::vector<double> wavelengths_;
  ChannelSamples samples_;
  Mask mask_;
};

/// Weighted band average G(r) = sum_b w_b * cube(r, b).
GuideImage make_guide(const HyperCube& cube, const SpectralResponse& response);
/// Guide from the uniform visible-band response.
GuideImage make_guide(const HyperCube& cube);

HyperCube clues_to_cube(const ClueSet& clues);
ClueSet cube_to_clues(const HyperCube& cube, const Mask& mask);

/// Rebuilds a ClueSet from generic samples sharing the clue geometry.
ClueSet with_spectra(const ClueSet& clues, ChannelSamples samples);

}  // namespace hypercolor
