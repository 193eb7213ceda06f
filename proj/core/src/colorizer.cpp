#include "hypercolor/colorizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "hypercolor/error.hpp"
#include "hypercolor/parallel.hpp"

namespace hypercolor {

namespace {

constexpr double kKappaClue = 2.0;
constexpr double kKappaFree = 1.0;
constexpr double kRelativeVarianceFloor = 1e-8;

void require_same_shape(const GuideImage& guide, std::size_t height, std::size_t width) {
  if (guide.height() != height || guide.width() != width) {
    throw ParameterError("guide is " + std::to_string(guide.height()) + "x" +
                         std::to_string(guide.width()) + " but clues are " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
}

std::vector<NeighborWeight> weights_with_floor(const GuideImage& guide, std::size_t row,
                                               std::size_t col, double floor) {
  const double var = std::max(patch_variance(guide, row, col), floor);
  const double centre = guide.at(row, col);
  std::vector<NeighborWeight> out;
  out.reserve(8);
  double total = 0.0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const auto r = static_cast<std::ptrdiff_t>(row) + dr;
      const auto c = static_cast<std::ptrdiff_t>(col) + dc;
      if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(guide.height()) ||
          c >= static_cast<std::ptrdiff_t>(guide.width())) {
        continue;
      }
      const double diff = guide.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) - centre;
      const double w = std::exp(-diff * diff / (2.0 * var));
      out.push_back({{static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)}, w});
      total += w;
    }
  }
  if (total > 0.0) {
    for (auto& nw : out) nw.weight /= total;
  } else {
    for (auto& nw : out) nw.weight = 1.0 / static_cast<double>(out.size());
  }
  return out;
}

}  // namespace

double patch_variance(const GuideImage& guide, std::size_t row, std::size_t col) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  const std::size_t r0 = row > 0 ? row - 1 : 0;
  const std::size_t c0 = col > 0 ? col - 1 : 0;
  const std::size_t r1 = std::min(guide.height() - 1, row + 1);
  const std::size_t c1 = std::min(guide.width() - 1, col + 1);
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t c = c0; c <= c1; ++c) {
      sum += guide.at(r, c);
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t c = c0; c <= c1; ++c) {
      const double d = guide.at(r, c) - mean;
      sum_sq += d * d;
    }
  }
  return sum_sq / static_cast<double>(n);
}

double affinity_variance_floor(const GuideImage& guide) {
  if (guide.pixels() == 0) return 1.0;
  const auto [lo, hi] = std::ranges::minmax(guide.data());
  const double floor = kRelativeVarianceFloor * (hi - lo) * (hi - lo);
  // Flat guide: every difference is zero, any positive value gives uniform weights.
  return floor > 0.0 ? floor : 1.0;
}

std::vector<NeighborWeight> affinity_weights(const GuideImage& guide, std::size_t row,
                                             std::size_t col) {
  if (row >= guide.height() || col >= guide.width()) throw ParameterError("pixel out of range");
  return weights_with_floor(guide, row, col, affinity_variance_floor(guide));
}

ChannelSamples edge_filter(const ChannelSamples& clues, const GuideImage& zeta, std::size_t window) {
  require_same_shape(zeta, clues.height, clues.width);
  if (window % 2 == 0) throw ParameterError("edge filter window must be odd");
  const std::size_t w = clues.width;
  const std::size_t h = clues.height;
  std::vector<std::int64_t> index(h * w, -1);
  for (std::size_t i = 0; i < clues.count(); ++i) {
    index[clues.coords[i].row * w + clues.coords[i].col] = static_cast<std::int64_t>(i);
  }
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  ChannelSamples out = clues;
  std::vector<double> mean(clues.channels);
  for (std::size_t i = 0; i < clues.count(); ++i) {
    const auto r = static_cast<std::ptrdiff_t>(clues.coords[i].row);
    const auto c = static_cast<std::ptrdiff_t>(clues.coords[i].col);
    std::ranges::fill(mean, 0.0);
    std::size_t neighbours = 0;
    for (std::ptrdiff_t rr = std::max<std::ptrdiff_t>(0, r - half);
         rr <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(h) - 1, r + half); ++rr) {
      for (std::ptrdiff_t cc = std::max<std::ptrdiff_t>(0, c - half);
           cc <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(w) - 1, c + half); ++cc) {
        const std::int64_t j = index[static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc)];
        if (j < 0 || static_cast<std::size_t>(j) == i) continue;
        const auto s = clues.sample(static_cast<std::size_t>(j));
        for (std::size_t b = 0; b < clues.channels; ++b) mean[b] += s[b];
        ++neighbours;
      }
    }
    if (neighbours == 0) continue;
    const double z = std::clamp(zeta.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)), 0.0, 1.0);
    const auto own = clues.sample(i);
    auto dst = out.sample(i);
    for (std::size_t b = 0; b < clues.channels; ++b) {
      dst[b] = z * own[b] + (1.0 - z) * mean[b] / static_cast<double>(neighbours);
    }
  }
  return out;
}

ClueSet edge_filter(const ClueSet& clues, const GuideImage& guide, const EdgeFilterOptions& options) {
  require_same_shape(guide, clues.height(), clues.width());
  const GuideImage zeta = edge_weight_map(guide, options.edges);
  return with_spectra(clues, edge_filter(clues.samples(), zeta, options.window));
}

AffinitySystem build_system(const GuideImage& guide, const ChannelSamples& clues) {
  require_same_shape(guide, clues.height, clues.width);
  guide.validate();
  if (clues.count() == 0) throw NumericalError("affinity system is singular: no clues");

  AffinitySystem sys;
  sys.height = guide.height();
  sys.width = guide.width();
  sys.channels = clues.channels;
  const std::size_t n = sys.unknowns();
  sys.is_clue.assign(n, 0);
  for (const PixelIndex& p : clues.coords) sys.is_clue[p.row * sys.width + p.col] = 1;

  const double floor = affinity_variance_floor(guide);
  SparseMatrix& a = sys.matrix;
  a.rows = n;
  a.row_ptr.assign(1, 0);
  a.cols.reserve(n * 9);
  a.values.reserve(n * 9);
  for (std::size_t r = 0; r < sys.height; ++r) {
    for (std::size_t c = 0; c < sys.width; ++c) {
      const std::size_t self = r * sys.width + c;
      const auto neighbours = weights_with_floor(guide, r, c, floor);
      bool diagonal_done = false;
      // Neighbours arrive in row-major order; slot the diagonal in between.
      for (const NeighborWeight& nw : neighbours) {
        const std::size_t col = nw.pixel.row * sys.width + nw.pixel.col;
        if (!diagonal_done && col > self) {
          a.cols.push_back(static_cast<std::uint32_t>(self));
          a.values.push_back(sys.is_clue[self] ? kKappaClue : kKappaFree);
          diagonal_done = true;
        }
        a.cols.push_back(static_cast<std::uint32_t>(col));
        a.values.push_back(-nw.weight);
      }
      if (!diagonal_done) {
        a.cols.push_back(static_cast<std::uint32_t>(self));
        a.values.push_back(sys.is_clue[self] ? kKappaClue : kKappaFree);
      }
      a.row_ptr.push_back(a.values.size());
    }
  }

  sys.rhs.assign(n * sys.channels, 0.0);
  for (std::size_t i = 0; i < clues.count(); ++i) {
    const std::size_t pixel = clues.coords[i].row * sys.width + clues.coords[i].col;
    const auto s = clues.sample(i);
    for (std::size_t ch = 0; ch < sys.channels; ++ch) sys.rhs[ch * n + pixel] = s[ch];
  }
  return sys;
}

AffinitySystem build_system(const GuideImage& guide, const ClueSet& clues) {
  return build_system(guide, clues.samples());
}

ChannelImage solve(const AffinitySystem& system, const SolveOptions& options,
                   std::vector<ChannelSolveStats>* stats) {
  const std::size_t n = system.unknowns();
  const std::size_t k = system.channels;
  ChannelImage out(system.height, system.width, k);
  std::vector<ChannelSolveStats> local(k);

  if (options.kind == SolverKind::dense) {
    const auto x = solve_dense(system.matrix, system.rhs);
    for (std::size_t ch = 0; ch < k; ++ch) {
      for (std::size_t p = 0; p < n; ++p) out.values[p * k + ch] = x[ch * n + p];
    }
  } else {
    std::size_t clue_count = 0;
    for (auto c : system.is_clue) clue_count += c;
    std::vector<std::vector<double>> solutions(k);
    parallel_for(k, options.workers, [&](std::size_t ch) {
      const auto b = system.rhs_channel(ch);
      // A constant field at the clue mean zeroes every non-clue residual.
      double mean = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        if (system.is_clue[p]) mean += b[p];
      }
      mean /= static_cast<double>(std::max<std::size_t>(1, clue_count));
      std::vector<double> x(n, mean);
      const SolveStats s = solve_bicgstab(system.matrix, b, x, options.iterative);
      local[ch] = {s.iterations, s.residual};
      solutions[ch] = std::move(x);
    });
    for (std::size_t ch = 0; ch < k; ++ch) {
      for (std::size_t p = 0; p < n; ++p) out.values[p * k + ch] = solutions[ch][p];
    }
  }
  if (stats) *stats = std::move(local);
  return out;
}

std::vector<double> rescale_weights(std::size_t bands, const RescaleOptions& options) {
  const SpectralResponse s_g = options.guide_response.value_or(SpectralResponse::flat(bands));
  const SpectralResponse s_h = options.spectral_response.value_or(SpectralResponse::flat(bands));
  if (s_g.size() != bands || s_h.size() != bands) {
    throw ParameterError("spectral response length does not match band count");
  }
  std::vector<double> q(bands, 0.0);
  for (std::size_t b = 0; b < bands; ++b) {
    if (s_g[b] == 0.0) continue;
    if (s_h[b] <= 0.0) {
      throw ParameterError("spectral camera response is zero in a band the guide sees");
    }
    q[b] = s_g[b] / (static_cast<double>(bands) * s_h[b]);
  }
  return q;
}

ChannelImage luminance_rescale(const ChannelImage& spectra, const GuideImage& guide,
                               const RescaleOptions& options,
                               std::vector<PixelIndex>* degenerate) {
  require_same_shape(guide, spectra.height, spectra.width);
  const std::size_t l = spectra.channels;
  const auto q = rescale_weights(l, options);
  ChannelImage out = spectra;
  const std::size_t pixels = spectra.height * spectra.width;
  if (degenerate) degenerate->clear();

  if (options.mode == RescaleMode::per_pixel) {
    for (std::size_t p = 0; p < pixels; ++p) {
      const auto h = spectra.pixel(p);
      double denom = 0.0;
      for (std::size_t b = 0; b < l; ++b) denom += std::abs(h[b]) * q[b];
      if (denom < kRescaleEpsilon) {
        if (degenerate) {
          degenerate->push_back({static_cast<std::uint32_t>(p / spectra.width),
                                 static_cast<std::uint32_t>(p % spectra.width)});
        }
        continue;
      }
      const double scale = options.alpha * guide.data()[p] / denom;
      auto dst = out.pixel(p);
      for (std::size_t b = 0; b < l; ++b) dst[b] = scale * h[b];
    }
  } else {
    std::vector<double> denom(l, 0.0);
    for (std::size_t p = 0; p < pixels; ++p) {
      const auto h = spectra.pixel(p);
      for (std::size_t b = 0; b < l; ++b) denom[b] += std::abs(h[b]) * q[b];
    }
    for (std::size_t p = 0; p < pixels; ++p) {
      auto dst = out.pixel(p);
      for (std::size_t b = 0; b < l; ++b) {
        if (denom[b] >= kRescaleEpsilon) dst[b] *= options.alpha * guide.data()[p] / denom[b];
      }
    }
  }
  return out;
}

HyperCube luminance_rescale(const HyperCube& cube, const GuideImage& guide,
                            const RescaleOptions& options, std::vector<PixelIndex>* degenerate) {
  ChannelImage img(cube.height(), cube.width(), cube.bands());
  std::ranges::copy(cube.data(), img.values.begin());
  ChannelImage scaled = luminance_rescale(img, guide, options, degenerate);
  return HyperCube(cube.height(), cube.width(),
                   std::vector<double>(cube.wavelengths().begin(), cube.wavelengths().end()),
                   std::move(scaled.values));
}

ChannelImage colorize_unclamped(const GuideImage& guide, const ClueSet& clues,
                                const ColorizeOptions& options, ColorizeReport* report) {
  const auto start = std::chrono::steady_clock::now();
  require_same_shape(guide, clues.height(), clues.width());
  guide.validate();

  ChannelSamples samples = clues.samples();
  if (options.edge_filter) {
    const GuideImage zeta = edge_weight_map(guide, options.edge.edges);
    samples = edge_filter(samples, zeta, options.edge.window);
  }

  std::optional<SpectralBasis> basis;
  if (options.basis) {
    if (options.basis->bands() != clues.bands()) {
      throw ParameterError("basis has " + std::to_string(options.basis->bands()) +
                           " bands, clues have " + std::to_string(clues.bands()));
    }
    basis = options.dims == 0 ? *options.basis : options.basis->truncated(options.dims);
    samples = project(samples, *basis);
  }

  const AffinitySystem system = build_system(guide, samples);
  std::vector<ChannelSolveStats> stats;
  ChannelImage solved = solve(system, options.solve, &stats);
  if (basis) solved = unproject(solved, *basis);

  std::vector<PixelIndex> degenerate;
  ChannelImage result = luminance_rescale(solved, guide, options.rescale, &degenerate);

  if (report) {
    report->channels = system.channels;
    report->solves = std::move(stats);
    report->degenerate_pixels = std::move(degenerate);
    report->wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return result;
}

HyperCube colorize(const GuideImage& guide, const ClueSet& clues, const ColorizeOptions& options,
                   ColorizeReport* report) {
  ChannelImage result = colorize_unclamped(guide, clues, options, report);
  for (double& v : result.values) v = std::max(v, 0.0);
  return HyperCube(result.height, result.width,
                   std::vector<double>(clues.wavelengths().begin(), clues.wavelengths().end()),
                   std::move(result.values));
}

}  // namespace hypercolor
