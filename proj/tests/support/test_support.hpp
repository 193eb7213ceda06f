#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hypercolor/cube.hpp"

namespace hctest {

/// Uniform values in [lo, hi) from a counter stream.
std::vector<double> random_values(std::size_t count, std::uint64_t seed, double lo = 0.0,
                                  double hi = 1.0);

hypercolor::GuideImage random_guide(std::size_t height, std::size_t width, std::uint64_t seed);
hypercolor::HyperCube random_cube(std::size_t height, std::size_t width, std::size_t bands,
                                  std::uint64_t seed);

/// `count` distinct pixels with `channels` random values each, row-major.
hypercolor::ChannelSamples random_samples(std::size_t height, std::size_t width,
                                          std::size_t channels, std::size_t count,
                                          std::uint64_t seed);

/// ||a - b|| / ||b||; ||a - b|| when b is zero.
double relative_error(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

std::string read_file(const std::filesystem::path& path);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace hctest
