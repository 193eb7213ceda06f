#include "hypercolor/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypercolor/error.hpp"
#include "hypercolor/random.hpp"

namespace hypercolor {

namespace {

constexpr std::uint64_t kSpectrumDomain = 0x53504543ull;
constexpr std::uint64_t kFieldDomain = 0x4649454Cull;
constexpr std::uint64_t kLayoutDomain = 0x4C41594Full;
constexpr std::uint64_t kTextureDomain = 0x54455854ull;

// Sum of a few low-frequency plane waves, rescaled to [0, 1].
class SmoothField {
 public:
  SmoothField(std::uint64_t seed, std::uint64_t index, std::size_t height, std::size_t width)
      : height_(static_cast<double>(height)), width_(static_cast<double>(width)) {
    CounterRng rng(seed, kFieldDomain, index);
    for (auto& wave : waves_) {
      wave.fy = 0.5 + 2.5 * rng.uniform();
      wave.fx = 0.5 + 2.5 * rng.uniform();
      if (rng.uniform() < 0.5) wave.fx = -wave.fx;
      wave.phase = 2.0 * std::numbers::pi * rng.uniform();
      wave.amp = 0.5 + rng.uniform();
      total_ += wave.amp;
    }
  }

  double operator()(std::size_t row, std::size_t col) const {
    const double y = static_cast<double>(row) / height_;
    const double x = static_cast<double>(col) / width_;
    double acc = 0.0;
    for (const auto& wave : waves_) {
      acc += wave.amp * std::cos(2.0 * std::numbers::pi * (wave.fy * y + wave.fx * x) + wave.phase);
    }
    return 0.5 + 0.5 * acc / total_;
  }

 private:
  struct Wave {
    double fy = 0.0, fx = 0.0, phase = 0.0, amp = 0.0;
  };
  double height_;
  double width_;
  std::array<Wave, 3> waves_{};
  double total_ = 0.0;
};

struct Site {
  double row = 0.0;
  double col = 0.0;
  std::size_t material = 0;
};

std::vector<Site> random_sites(std::size_t count, double row0, double col0, double rows,
                               double cols, std::size_t materials, std::uint64_t seed,
                               std::uint64_t stream) {
  CounterRng rng(seed, kLayoutDomain, stream);
  std::vector<Site> sites(count);
  for (std::size_t i = 0; i < count; ++i) {
    sites[i].row = row0 + rows * rng.uniform();
    sites[i].col = col0 + cols * rng.uniform();
    sites[i].material = i < materials ? i : static_cast<std::size_t>(rng.uniform() * materials);
  }
  return sites;
}

// Indices of the nearest and second-nearest sites with their distances.
struct Nearest {
  std::size_t first = 0;
  std::size_t second = 0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Nearest nearest_sites(const std::vector<Site>& sites, double row, double col) {
  Nearest n;
  n.d1 = n.d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double d = std::hypot(sites[i].row - row, sites[i].col - col);
    if (d < n.d1) {
      n.second = n.first;
      n.d2 = n.d1;
      n.first = i;
      n.d1 = d;
    } else if (d < n.d2) {
      n.second = i;
      n.d2 = d;
    }
  }
  if (!std::isfinite(n.d2)) {
    n.second = n.first;
    n.d2 = n.d1;
  }
  return n;
}

std::vector<std::vector<double>> material_spectra(std::span<const double> wavelengths,
                                                  std::size_t count, std::uint64_t seed) {
  std::vector<std::vector<double>> spectra;
  spectra.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    spectra.push_back(smooth_spectrum(wavelengths, mix64(seed) + i));
  }
  return spectra;
}

double texture_noise(std::uint64_t seed, std::size_t pixel) {
  CounterRng rng(seed, kTextureDomain, pixel);
  return 2.0 * rng.uniform() - 1.0;
}

void check_shape(std::size_t height, std::size_t width, std::size_t bands) {
  if (height == 0 || width == 0 || bands == 0) {
    throw ParameterError("synthetic scene needs nonzero height, width and bands");
  }
}

}  // namespace

std::vector<double> linear_wavelengths(std::size_t bands, double low, double high) {
  if (bands == 0) throw ParameterError("need at least one band");
  std::vector<double> wl(bands, low);
  if (bands == 1) return wl;
  for (std::size_t b = 0; b < bands; ++b) {
    wl[b] = low + (high - low) * static_cast<double>(b) / static_cast<double>(bands - 1);
  }
  return wl;
}

std::vector<double> smooth_spectrum(std::span<const double> wavelengths, std::uint64_t seed) {
  CounterRng rng(seed, kSpectrumDomain, 0);
  const double lo = wavelengths.front();
  const double span = std::max(wavelengths.back() - lo, 1.0);
  const double base = 0.05 + 0.3 * rng.uniform();
  const double slope = 0.6 * (rng.uniform() - 0.5);
  const std::size_t bumps = 1 + static_cast<std::size_t>(3.0 * rng.uniform());
  struct Bump {
    double center, width, height;
  };
  std::vector<Bump> shape(bumps);
  for (auto& b : shape) {
    b.center = lo + span * (-0.1 + 1.2 * rng.uniform());
    b.width = span * (0.06 + 0.2 * rng.uniform());
    b.height = 0.2 + 0.8 * rng.uniform();
  }
  std::vector<double> s(wavelengths.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = (wavelengths[i] - lo) / span;
    double v = base + slope * (x - 0.5);
    for (const auto& b : shape) {
      const double z = (wavelengths[i] - b.center) / b.width;
      v += b.height * std::exp(-0.5 * z * z);
    }
    s[i] = std::max(v, 0.01);
  }
  const double peak = *std::ranges::max_element(s);
  const double target = 0.3 + 0.65 * rng.uniform();
  for (auto& v : s) v *= target / peak;
  return s;
}

HyperCube constant_scene(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                         std::span<const double> spectrum) {
  if (spectrum.size() != wavelengths.size()) {
    throw ParameterError("spectrum length does not match the wavelength axis");
  }
  HyperCube cube(height, width, std::move(wavelengths));
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    std::ranges::copy(spectrum, cube.spectrum(p).begin());
  }
  return cube;
}

HyperCube rank_k_scene(std::size_t height, std::size_t width, std::size_t bands, std::size_t rank,
                       std::uint64_t seed) {
  check_shape(height, width, bands);
  if (rank == 0 || rank > bands) throw ParameterError("rank must be in [1, bands]");
  const auto wl = linear_wavelengths(bands);
  const auto spectra = material_spectra(wl, rank, seed);
  std::vector<SmoothField> fields;
  for (std::size_t k = 0; k < rank; ++k) fields.emplace_back(seed, k, height, width);
  HyperCube cube(height, width, wl);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      auto out = cube.spectrum(r, c);
      for (std::size_t k = 0; k < rank; ++k) {
        const double a = (0.05 + 0.95 * fields[k](r, c)) / static_cast<double>(rank);
        for (std::size_t b = 0; b < bands; ++b) out[b] += a * spectra[k][b];
      }
    }
  }
  return cube;
}

TwoRegionScene two_region_scene(std::size_t height, std::size_t width, std::size_t bands,
                                std::uint64_t seed) {
  check_shape(height, width, bands);
  TwoRegionScene scene;
  const auto wl = linear_wavelengths(bands);
  // Opposite spectral slopes keep the two regions far apart spectrally.
  scene.left.resize(bands);
  scene.right.resize(bands);
  CounterRng rng(seed, kSpectrumDomain, 1);
  const double tilt = 0.1 * rng.uniform();
  for (std::size_t b = 0; b < bands; ++b) {
    const double x = bands > 1 ? static_cast<double>(b) / static_cast<double>(bands - 1) : 0.5;
    scene.left[b] = 0.2 + (0.6 + tilt) * x;
    scene.right[b] = 0.45 - (0.3 + tilt) * x;
  }
  scene.boundary = width / 2;
  scene.cube = HyperCube(height, width, wl);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto& s = c < scene.boundary ? scene.left : scene.right;
      std::ranges::copy(s, scene.cube.spectrum(r, c).begin());
    }
  }
  return scene;
}

HyperCube natural_scene(std::size_t height, std::size_t width, std::size_t bands,
                        std::uint64_t seed, const NaturalSceneParams& params) {
  check_shape(height, width, bands);
  if (params.materials == 0 || params.cells == 0) {
    throw ParameterError("natural scene needs at least one material and one cell");
  }
  const auto wl = linear_wavelengths(bands);
  const auto spectra = material_spectra(wl, params.materials, seed);
  const auto sites = random_sites(params.cells, 0.0, 0.0, static_cast<double>(height),
                                  static_cast<double>(width), params.materials, seed, 0);
  const SmoothField mix_field(seed, 100, height, width);
  const SmoothField shade_field(seed, 101, height, width);
  const SmoothField tilt_field(seed, 102, height, width);
  HyperCube cube(height, width, wl);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto n = nearest_sites(sites, static_cast<double>(r), static_cast<double>(c));
      const double edge = 0.5 * std::exp(-(n.d2 - n.d1) / 1.5);
      const double w = edge + (1.0 - 2.0 * edge) * params.mixing * mix_field(r, c);
      const auto& s1 = spectra[sites[n.first].material];
      const auto& s2 = spectra[sites[n.second].material];
      const double shade = (1.0 - params.shading) + params.shading * shade_field(r, c);
      const double tex = 1.0 + params.texture * texture_noise(seed, r * width + c);
      const double tilt = 0.3 * (tilt_field(r, c) - 0.5);
      auto out = cube.spectrum(r, c);
      for (std::size_t b = 0; b < bands; ++b) {
        const double x = bands > 1 ? static_cast<double>(b) / static_cast<double>(bands - 1) : 0.5;
        const double v = ((1.0 - w) * s1[b] + w * s2[b]) * shade * tex * (1.0 + tilt * (x - 0.5));
        out[b] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return cube;
}

HyperCube texture_concentrated_scene(std::size_t height, std::size_t width, std::size_t bands,
                                     std::uint64_t seed) {
  check_shape(height, width, bands);
  const auto wl = linear_wavelengths(bands);
  constexpr std::size_t kMaterials = 10;
  const auto spectra = material_spectra(wl, kMaterials + 1, seed);
  const auto& background = spectra[kMaterials];
  const double r0 = 0.25 * static_cast<double>(height);
  const double c0 = 0.45 * static_cast<double>(width);
  const double rows = 0.45 * static_cast<double>(height);
  const double cols = 0.45 * static_cast<double>(width);
  const std::size_t cells = std::max<std::size_t>(kMaterials, height * width / 250);
  const auto sites = random_sites(cells, r0, c0, rows, cols, kMaterials, seed, 1);
  CounterRng brightness_rng(seed, kLayoutDomain, 2);
  std::vector<double> brightness(cells);
  for (auto& b : brightness) b = 0.3 + 0.7 * brightness_rng.uniform();
  const SmoothField shade_field(seed, 200, height, width);

  HyperCube cube(height, width, wl);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double y = static_cast<double>(r);
      const double x = static_cast<double>(c);
      const bool inside = y >= r0 && y < r0 + rows && x >= c0 && x < c0 + cols;
      auto out = cube.spectrum(r, c);
      if (inside) {
        const auto n = nearest_sites(sites, y, x);
        const auto& s = spectra[sites[n.first].material];
        for (std::size_t b = 0; b < bands; ++b) out[b] = brightness[n.first] * s[b];
      } else {
        const double shade = 0.75 + 0.25 * shade_field(r, c);
        for (std::size_t b = 0; b < bands; ++b) out[b] = shade * background[b];
      }
    }
  }
  return cube;
}

BlobScene blob_scene(std::size_t height, std::size_t width, std::size_t bands, double radius,
                     std::uint64_t seed) {
  check_shape(height, width, bands);
  if (!(radius > 0.0)) throw ParameterError("blob radius must be positive");
  BlobScene scene;
  scene.radius = radius;
  const auto wl = linear_wavelengths(bands);
  // Background reflects mostly long wavelengths, the blob mostly short ones.
  std::vector<double> background(bands);
  std::vector<double> blob(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const double x = bands > 1 ? static_cast<double>(b) / static_cast<double>(bands - 1) : 0.5;
    background[b] = 0.15 + 0.6 * x;
    blob[b] = 0.1 + 0.8 * std::exp(-0.5 * std::pow((x - 0.2) / 0.12, 2.0));
  }
  CounterRng rng(seed, kLayoutDomain, 3);
  scene.center_row = static_cast<std::size_t>(
      (0.25 + 0.5 * rng.uniform()) * static_cast<double>(height));
  scene.center_col = static_cast<std::size_t>(
      (0.25 + 0.5 * rng.uniform()) * static_cast<double>(width));
  const SmoothField shade_field(seed, 300, height, width);
  scene.cube = HyperCube(height, width, wl);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double d = std::hypot(static_cast<double>(r) - static_cast<double>(scene.center_row),
                                  static_cast<double>(c) - static_cast<double>(scene.center_col));
      const double shade = 0.8 + 0.2 * shade_field(r, c);
      const auto& s = d <= radius ? blob : background;
      auto out = scene.cube.spectrum(r, c);
      for (std::size_t b = 0; b < bands; ++b) out[b] = shade * s[b];
    }
  }
  return scene;
}

HyperCube make_synthetic(const std::string& kind, std::size_t height, std::size_t width,
                         std::size_t bands, std::uint64_t seed) {
  if (kind == "natural") return natural_scene(height, width, bands, seed);
  if (kind == "two-region") return two_region_scene(height, width, bands, seed).cube;
  if (kind == "texture") return texture_concentrated_scene(height, width, bands, seed);
  if (kind == "blob") return blob_scene(height, width, bands, 6.0, seed).cube;
  if (kind.starts_with("rank")) {
    std::size_t rank = 0;
    try {
      rank = std::stoul(kind.substr(4));
    } catch (const std::exception&) {
      throw ParameterError("bad synthetic kind '" + kind + "'");
    }
    return rank_k_scene(height, width, bands, rank, seed);
  }
  throw ParameterError("unknown synthetic kind '" + kind +
                       "' (natural, rank<k>, two-region, texture, blob)");
}

}  // namespace hypercolor
