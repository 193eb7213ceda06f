#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hypercolor/cube.hpp"

namespace hypercolor {

// HSC1: "HSC1", u32 m, u32 n, u32 l, l x f64 wavelengths, m*n*l x f32 data
// (pixel-major: row, column, band). All little-endian.
HyperCube read_cube(const std::filesystem::path& path);
void write_cube(const HyperCube& cube, const std::filesystem::path& path);

// HSK1: "HSK1", u32 m, n, l, count, l x f64 wavelengths,
// count x (u32 row, u32 col, l x f32 spectrum).
ClueSet read_clues(const std::filesystem::path& path);
void write_clues(const ClueSet& clues, const std::filesystem::path& path);

/// Sidecar describing how 16-bit PGM codes map back to linear guide values:
/// value = offset + scale * code.
struct GuideEncoding {
  double scale = 1.0;
  double offset = 0.0;
};

std::filesystem::path guide_sidecar_path(const std::filesystem::path& pgm_path);

/// Writes a 16-bit binary PGM and its JSON sidecar `<path>.json`.
GuideEncoding write_guide(const GuideImage& guide, const std::filesystem::path& path);
/// Reads a PGM guide; without a sidecar, codes are scaled by 1/maxval.
GuideImage read_guide(const std::filesystem::path& path);

/// Binary PBM (P4). The reader also accepts plain P1.
void write_mask(const Mask& mask, const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> pixels;
};

/// 8- or 16-bit PGM (P5 binary or P2 plain).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Assembles a cube from per-band PGM images in `dir`, taken in lexicographic
/// filename order and paired with `wavelengths` (which must be increasing).
/// Integer codes are scaled by 1/(2^bits - 1).
HyperCube import_band_stack(const std::filesystem::path& dir,
                            std::span<const double> wavelengths);

}  // namespace hypercolor
