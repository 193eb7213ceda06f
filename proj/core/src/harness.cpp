#include "hypercolor/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "hypercolor/error.hpp"
#include "hypercolor/io.hpp"
#include "hypercolor/parallel.hpp"

namespace hypercolor {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

nlohmann::ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw FormatError("expected a number in sweep result JSON");
}

// Clamped cube over the clue wavelength axis.
HyperCube to_cube(ChannelImage image, std::span<const double> wavelengths) {
  for (double& v : image.values) v = std::max(v, 0.0);
  return HyperCube(image.height, image.width,
                   std::vector<double>(wavelengths.begin(), wavelengths.end()),
                   std::move(image.values));
}

ChannelImage leading_channels(const ChannelImage& image, std::size_t p) {
  ChannelImage out(image.height, image.width, p);
  for (std::size_t i = 0; i < image.height * image.width; ++i) {
    const auto src = image.pixel(i);
    std::copy_n(src.begin(), p, out.pixel(i).begin());
  }
  return out;
}

auto row_key(const SweepRow& r) {
  return std::tie(r.image, r.pattern, r.rate, r.t_exposure, r.dim);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::size_t> sorted_unique(std::span<const std::size_t> dims) {
  std::vector<std::size_t> v(dims.begin(), dims.end());
  std::ranges::sort(v);
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

MetricReport finish_metrics(const HyperCube& recon, const HyperCube& truth, double wall_ms,
                            bool timing) {
  return report(recon, truth, timing ? wall_ms : 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Points

SpectralResponse PointSpec::guide_spectral_response(std::span<const double> wavelengths) const {
  if (guide_response == "flat") return SpectralResponse::flat(wavelengths.size());
  if (guide_response == "visible-flat") return SpectralResponse::visible_flat(wavelengths);
  throw ParameterError("unknown guide response '" + guide_response + "'");
}

ColorizeOptions PointSpec::colorize_options(std::span<const double> wavelengths) const {
  ColorizeOptions options;
  options.edge_filter = edge_filter;
  options.solve.workers = workers;
  options.rescale.guide_response = guide_spectral_response(wavelengths);
  return options;
}

Acquisition acquire(const HyperCube& truth, const PointSpec& spec, const GuideImage* captured) {
  spec.plan.validate();
  spec.noise.validate();
  Acquisition a;
  if (captured) {
    if (captured->height() != truth.height() || captured->width() != truth.width()) {
      throw ParameterError("captured guide does not match the cube dimensions");
    }
    a.guide = *captured;
  } else {
    const auto response = spec.guide_spectral_response(truth.wavelengths());
    NoiseParams guide_noise = spec.noise;
    if (spec.guide_t > 0.0) guide_noise.t = spec.guide_t;
    if (!spec.noisy_guide) guide_noise.t = std::numeric_limits<double>::infinity();
    a.guide = simulate_guide(truth, guide_noise, response, spec.workers);
  }
  a.mask = make_mask(spec.plan, truth.height(), truth.width(), &a.guide);
  a.clues = simulate_clues(truth, a.mask, spec.noise, spec.workers);
  return a;
}

MultiDimReconstruction reconstruct_dims(const Acquisition& acquisition,
                                        const SpectralBasis& basis,
                                        std::span<const std::size_t> dims,
                                        const ColorizeOptions& options) {
  const auto start = Clock::now();
  const auto wanted = sorted_unique(dims);
  if (wanted.empty()) throw ParameterError("no dimensions requested");
  if (wanted.front() == 0 || wanted.back() > basis.dims()) {
    throw ParameterError("dimensions must lie in [1, " + std::to_string(basis.dims()) + "]");
  }
  const ClueSet& clues = acquisition.clues;
  if (basis.bands() != clues.bands()) throw ParameterError("basis and clues differ in band count");

  ChannelSamples samples = clues.samples();
  if (options.edge_filter) {
    const GuideImage zeta = edge_weight_map(acquisition.guide, options.edge.edges);
    samples = edge_filter(samples, zeta, options.edge.window);
  }
  const SpectralBasis widest = basis.truncated(wanted.back());
  const AffinitySystem system = build_system(acquisition.guide, project(samples, widest));
  std::vector<ChannelSolveStats> stats;
  const ChannelImage coefficients = solve(system, options.solve, &stats);

  MultiDimReconstruction out;
  out.dims = wanted;
  out.report.channels = system.channels;
  out.report.solves = std::move(stats);
  for (std::size_t p : wanted) {
    const ChannelImage spectra =
        unproject(leading_channels(coefficients, p), basis.truncated(p));
    std::vector<PixelIndex> degenerate;
    ChannelImage rescaled =
        luminance_rescale(spectra, acquisition.guide, options.rescale, &degenerate);
    if (p == wanted.back()) out.report.degenerate_pixels = std::move(degenerate);
    out.cubes.push_back(to_cube(std::move(rescaled), clues.wavelengths()));
  }
  out.report.wall_ms = elapsed_ms(start);
  return out;
}

PointResult run_point(const HyperCube& truth, const PointSpec& spec, const DimensionChoice& dims,
                      const GuideImage* captured) {
  PointResult result;
  result.acquisition = acquire(truth, spec, captured);
  ColorizeOptions options = spec.colorize_options(truth.wavelengths());
  if (!dims.basis) {
    result.dims = truth.bands();
    result.dims_source = "bands";
  } else {
    const SpectralBasis& basis = *dims.basis;
    if (dims.model) {
      result.curve = variance_curve(result.acquisition.clues, basis);
      result.dims = std::min(predict_dimension(*dims.model, *result.curve), basis.dims());
      result.dims_source = "auto";
    } else if (dims.fixed > 0) {
      if (dims.fixed > basis.dims()) {
        throw ParameterError("requested " + std::to_string(dims.fixed) + " dims but the basis has " +
                             std::to_string(basis.dims()));
      }
      result.dims = dims.fixed;
      result.dims_source = "fixed";
    } else {
      result.dims = basis.dims();
      result.dims_source = "all";
    }
    options.basis = basis;
    options.dims = result.dims;
  }
  result.recon = colorize(result.acquisition.guide, result.acquisition.clues, options,
                          &result.colorize);
  result.metrics = finish_metrics(result.recon, truth, result.colorize.wall_ms, spec.timing);
  if (!spec.timing) result.colorize.wall_ms = 0.0;
  return result;
}

// ---------------------------------------------------------------------------
// Sweep results

bool BudgetDistribution::conserves_budget(double relative_tolerance) const {
  return std::abs(exposure_sum - total_time) <= relative_tolerance * std::abs(total_time);
}

void SweepResult::finalize() {
  std::ranges::stable_sort(rows, [](const SweepRow& a, const SweepRow& b) {
    return row_key(a) < row_key(b);
  });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (row_key(rows[i - 1]) == row_key(rows[i])) {
      throw ParameterError("duplicate sweep point for image '" + rows[i].image + "'");
    }
  }
  std::ranges::stable_sort(best_dims, [](const BestDim& a, const BestDim& b) {
    return std::tie(a.image, a.t_exposure) < std::tie(b.image, b.t_exposure);
  });
  std::ranges::stable_sort(curves, [](const CurveRecord& a, const CurveRecord& b) {
    return std::tie(a.image, a.t_exposure) < std::tie(b.image, b.t_exposure);
  });
  std::ranges::stable_sort(distributions,
                           [](const BudgetDistribution& a, const BudgetDistribution& b) {
                             return std::tie(a.image, a.ratio) < std::tie(b.image, b.ratio);
                           });
}

std::string csv_row(const SweepRow& row) {
  const MetricReport& m = row.metrics;
  std::string s = csv_field(row.image) + "," + csv_field(row.pattern) + "," +
                  format_number(row.rate) + "," + format_number(row.t_exposure) + "," +
                  std::to_string(row.dim);
  for (double v : {m.psnr, m.ssim, m.gfc, m.ssv, m.emd, m.wall_ms}) s += "," + format_number(v);
  return s;
}

std::string SweepResult::to_csv() const {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : rows) out += csv_row(row) + "\n";
  return out;
}

MetricReport metric_report_from_json(const nlohmann::json& j) {
  MetricReport m;
  m.psnr = number_from_json(j.at("psnr"));
  m.ssim = number_from_json(j.at("ssim"));
  m.gfc = number_from_json(j.at("gfc"));
  m.ssv = number_from_json(j.at("ssv"));
  m.emd = number_from_json(j.at("emd"));
  m.wall_ms = number_from_json(j.at("wall_ms"));
  m.pixels = j.value("pixels", std::size_t{0});
  m.gfc_skipped = j.value("gfc_skipped", std::size_t{0});
  m.ssv_skipped = j.value("ssv_skipped", std::size_t{0});
  m.emd_skipped = j.value("emd_skipped", std::size_t{0});
  return m;
}

nlohmann::ordered_json SweepResult::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["seed"] = seed;
  auto& jr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    jr.push_back({{"image", r.image},
                  {"pattern", r.pattern},
                  {"rate", r.rate},
                  {"t_exposure", number_json(r.t_exposure)},
                  {"dim", r.dim},
                  {"metrics", r.metrics.to_json()}});
  }
  if (!best_dims.empty()) {
    auto& jb = j["best_dims"] = nlohmann::ordered_json::array();
    for (const auto& b : best_dims) {
      jb.push_back({{"image", b.image},
                    {"t_exposure", number_json(b.t_exposure)},
                    {"dim", b.dim},
                    {"emd", b.emd}});
    }
  }
  if (!curves.empty()) {
    auto& jc = j["curves"] = nlohmann::ordered_json::array();
    for (const auto& c : curves) {
      jc.push_back({{"image", c.image},
                    {"t_exposure", number_json(c.t_exposure)},
                    {"explained", c.curve.explained},
                    {"elbow_index", c.curve.elbow_index},
                    {"log_min_variance", c.curve.log_min_variance}});
    }
  }
  if (!distributions.empty()) {
    auto& jd = j["distributions"] = nlohmann::ordered_json::array();
    for (const auto& d : distributions) {
      jd.push_back({{"image", d.image},
                    {"ratio", d.ratio},
                    {"samples", d.samples},
                    {"t_per_sample", d.t_per_sample},
                    {"total_time", d.total_time},
                    {"exposure_sum", d.exposure_sum},
                    {"bin_edges", d.bin_edges},
                    {"counts", d.counts},
                    {"mean_emd", d.mean_emd},
                    {"skipped", d.skipped}});
    }
  }
  return j;
}

SweepResult SweepResult::from_json(const nlohmann::json& j) {
  SweepResult s;
  try {
    s.kind = j.at("kind").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& r : j.at("rows")) {
      SweepRow row;
      row.image = r.at("image").get<std::string>();
      row.pattern = r.at("pattern").get<std::string>();
      row.rate = r.at("rate").get<double>();
      row.t_exposure = number_from_json(r.at("t_exposure"));
      row.dim = r.at("dim").get<std::size_t>();
      row.metrics = metric_report_from_json(r.at("metrics"));
      s.rows.push_back(std::move(row));
    }
    for (const auto& b : j.value("best_dims", nlohmann::json::array())) {
      s.best_dims.push_back({b.at("image").get<std::string>(), number_from_json(b.at("t_exposure")),
                             b.at("dim").get<std::size_t>(), b.at("emd").get<double>()});
    }
    for (const auto& c : j.value("curves", nlohmann::json::array())) {
      CurveRecord rec;
      rec.image = c.at("image").get<std::string>();
      rec.t_exposure = number_from_json(c.at("t_exposure"));
      rec.curve.explained = c.at("explained").get<std::vector<double>>();
      rec.curve.elbow_index = c.at("elbow_index").get<std::size_t>();
      rec.curve.log_min_variance = c.at("log_min_variance").get<double>();
      s.curves.push_back(std::move(rec));
    }
    for (const auto& d : j.value("distributions", nlohmann::json::array())) {
      BudgetDistribution dist;
      dist.image = d.at("image").get<std::string>();
      dist.ratio = d.at("ratio").get<double>();
      dist.samples = d.at("samples").get<std::size_t>();
      dist.t_per_sample = d.at("t_per_sample").get<double>();
      dist.total_time = d.at("total_time").get<double>();
      dist.exposure_sum = d.at("exposure_sum").get<double>();
      dist.bin_edges = d.at("bin_edges").get<std::vector<double>>();
      dist.counts = d.at("counts").get<std::vector<std::size_t>>();
      dist.mean_emd = d.at("mean_emd").get<double>();
      dist.skipped = d.at("skipped").get<std::size_t>();
      s.distributions.push_back(std::move(dist));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed sweep result: ") + e.what());
  }
  return s;
}

void SweepResult::save(const std::filesystem::path& dir, const std::string& stem) const {
  std::filesystem::create_directories(dir);
  write_text(dir / (stem + ".csv"), to_csv());
  write_text(dir / (stem + ".json"), to_json().dump(2) + "\n");
}

SweepResult SweepResult::load(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open " + json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(json_path.string() + ": " + e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Experiments

SweepResult grid_search_dimension(const HyperCube& truth, const std::string& image,
                                  const PointSpec& base, std::span<const double> t_values,
                                  std::span<const std::size_t> dims, const SpectralBasis& basis) {
  if (t_values.empty()) throw ParameterError("grid search needs at least one exposure");
  const auto wanted = sorted_unique(dims);
  if (wanted.size() != dims.size()) throw ParameterError("grid search dims contain duplicates");

  struct PerExposure {
    std::vector<SweepRow> rows;
    BestDim best;
    CurveRecord curve;
  };
  std::vector<PerExposure> results(t_values.size());
  // Exposures run in the pool; the inner solves stay single threaded so the
  // pool is not oversubscribed.
  const std::size_t outer = t_values.size() > 1 ? base.workers : 1;
  parallel_for(t_values.size(), outer, [&](std::size_t i) {
    PointSpec spec = base;
    spec.noise.t = t_values[i];
    if (t_values.size() > 1) spec.workers = 1;
    const Acquisition acq = acquire(truth, spec);
    const auto recon = reconstruct_dims(acq, basis, wanted, spec.colorize_options(truth.wavelengths()));
    PerExposure& out = results[i];
    out.curve = {image, t_values[i], variance_curve(acq.clues, basis)};
    out.best = {image, t_values[i], 0, std::numeric_limits<double>::infinity()};
    // Per-dim wall time is not separable from the shared solve.
    const double wall = recon.report.wall_ms;
    for (std::size_t k = 0; k < recon.dims.size(); ++k) {
      SweepRow row{image, std::string(to_string(spec.plan.pattern)), spec.plan.rate, t_values[i],
                   recon.dims[k], finish_metrics(recon.cubes[k], truth, wall, spec.timing)};
      if (row.metrics.emd < out.best.emd - kDimTieTolerance) {
        out.best.dim = row.dim;
        out.best.emd = row.metrics.emd;
      }
      out.rows.push_back(std::move(row));
    }
  });

  SweepResult result;
  result.kind = "dimension";
  result.seed = base.noise.seed;
  for (auto& r : results) {
    for (auto& row : r.rows) result.rows.push_back(std::move(row));
    result.best_dims.push_back(r.best);
    result.curves.push_back(std::move(r.curve));
  }
  result.finalize();
  return result;
}

nlohmann::ordered_json TrainingResult::diagnostics() const {
  nlohmann::ordered_json j;
  j["model"] = model.to_json();
  j["training_rmse"] = rmse;
  auto& s = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& d : samples) {
    s.push_back({{"elbow", d.features.elbow},
                 {"log_min_variance", d.features.log_min_variance},
                 {"best_dim", d.best_dim},
                 {"predicted", model.evaluate(d.features)}});
  }
  return j;
}

TrainingResult train_dimension_model(std::span<const NamedCube> cubes, const PointSpec& base,
                                     std::span<const double> t_values,
                                     std::span<const std::size_t> dims) {
  if (cubes.empty()) throw ParameterError("training needs at least one cube");
  TrainingResult out;
  out.sweeps.kind = "dimension";
  out.sweeps.seed = base.noise.seed;
  std::size_t max_dim = 0;
  for (const auto& named : cubes) {
    const std::vector<HyperCube> one{named.cube};
    const SpectralBasis basis = learn_basis(one, named.cube.bands(), base.workers);
    max_dim = std::max(max_dim, named.cube.bands());
    SweepResult sweep = grid_search_dimension(named.cube, named.name, base, t_values, dims, basis);
    for (std::size_t i = 0; i < sweep.best_dims.size(); ++i) {
      const auto& best = sweep.best_dims[i];
      const auto& curve = sweep.curves[i];
      out.samples.push_back({features_of(curve.curve), static_cast<double>(best.dim)});
    }
    for (auto& r : sweep.rows) out.sweeps.rows.push_back(std::move(r));
    for (auto& b : sweep.best_dims) out.sweeps.best_dims.push_back(std::move(b));
    for (auto& c : sweep.curves) out.sweeps.curves.push_back(std::move(c));
  }
  out.sweeps.finalize();
  const std::size_t dims_cap = dims.empty() ? max_dim : *std::ranges::max_element(dims);
  out.model = fit_dimension_model(out.samples, std::min(max_dim, dims_cap));
  out.rmse = training_rmse(out.model, out.samples);
  return out;
}

SweepResult time_budget_sweep(const HyperCube& truth, const std::string& image,
                              const PointSpec& base, double total_time,
                              std::span<const double> ratios, const DimensionChoice& dims,
                              std::size_t bins) {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw ParameterError("total time must be positive and finite");
  }
  if (ratios.empty()) throw ParameterError("budget sweep needs at least one ratio");
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  const double pixels = static_cast<double>(truth.pixels());

  struct PerRatio {
    PointResult point;
    std::vector<double> emd;
    double t = 0.0;
  };
  std::vector<PerRatio> runs(ratios.size());
  const std::size_t outer = ratios.size() > 1 ? base.workers : 1;
  parallel_for(ratios.size(), outer, [&](std::size_t i) {
    PointSpec spec = base;
    if (ratios.size() > 1) spec.workers = 1;
    spec.plan.rate = ratios[i];
    spec.guide_t = total_time / pixels;
    // The sample count fixes the per-sample exposure, so the mask comes
    // first; make_mask is deterministic so acquire() reproduces it.
    GuideImage guide;
    {
      NoiseParams gn = spec.noise;
      gn.t = spec.noisy_guide ? spec.guide_t : std::numeric_limits<double>::infinity();
      guide = simulate_guide(truth, gn, spec.guide_spectral_response(truth.wavelengths()),
                             spec.workers);
    }
    const std::size_t count = make_mask(spec.plan, truth.height(), truth.width(), &guide).count();
    if (count == 0) throw ParameterError("sampling ratio yields no samples");
    spec.noise.t = total_time / static_cast<double>(count);
    runs[i].t = spec.noise.t;
    runs[i].point = run_point(truth, spec, dims, &guide);
    runs[i].emd = emd_per_pixel(runs[i].point.recon, truth);
  });

  double top = 0.0;
  for (const auto& r : runs) {
    for (double v : r.emd) {
      if (!std::isnan(v)) top = std::max(top, v);
    }
  }
  if (top <= 0.0) top = 1.0;

  SweepResult result;
  result.kind = "budget";
  result.seed = base.noise.seed;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const PerRatio& r = runs[i];
    BudgetDistribution d;
    d.image = image;
    d.ratio = ratios[i];
    d.samples = r.point.acquisition.mask.count();
    d.t_per_sample = r.t;
    d.total_time = total_time;
    const std::vector<double> exposures(d.samples, r.t);
    d.exposure_sum = pairwise_sum(exposures);
    d.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
      d.bin_edges[b] = top * static_cast<double>(b) / static_cast<double>(bins);
    }
    d.counts.assign(bins, 0);
    for (double v : r.emd) {
      if (std::isnan(v)) {
        ++d.skipped;
        continue;
      }
      const auto b = std::min(bins - 1, static_cast<std::size_t>(v / top * static_cast<double>(bins)));
      ++d.counts[b];
    }
    d.mean_emd = r.point.metrics.emd;
    result.distributions.push_back(std::move(d));
    result.rows.push_back({image, std::string(to_string(base.plan.pattern)), ratios[i], r.t,
                           r.point.dims, r.point.metrics});
  }
  result.finalize();
  return result;
}

SweepResult compare_sampling(const HyperCube& truth, const std::string& image,
                             const PointSpec& base, std::span<const SamplingPattern> patterns,
                             const DimensionChoice& dims) {
  if (patterns.empty()) throw ParameterError("no sampling patterns given");
  std::vector<SweepRow> rows(patterns.size());
  const std::size_t outer = patterns.size() > 1 ? base.workers : 1;
  parallel_for(patterns.size(), outer, [&](std::size_t i) {
    PointSpec spec = base;
    if (patterns.size() > 1) spec.workers = 1;
    spec.plan.pattern = patterns[i];
    const PointResult point = run_point(truth, spec, dims);
    rows[i] = {image, std::string(to_string(patterns[i])), spec.plan.rate, spec.noise.t,
               point.dims, point.metrics};
  });
  SweepResult result;
  result.kind = "sampling";
  result.seed = base.noise.seed;
  result.rows = std::move(rows);
  result.finalize();
  return result;
}

// ---------------------------------------------------------------------------
// Configured runs

std::optional<SpectralBasis> configured_basis(const ExperimentConfig& config,
                                              const HyperCube& truth) {
  switch (config.basis) {
    case BasisSource::none:
      return std::nullopt;
    case BasisSource::file: {
      SpectralBasis b = read_basis(config.basis_path);
      if (b.bands() != truth.bands()) {
        throw ConfigError("basis " + config.basis_path.string() + " has " +
                          std::to_string(b.bands()) + " bands, the cube has " +
                          std::to_string(truth.bands()));
      }
      return b;
    }
    case BasisSource::truth: {
      const std::vector<HyperCube> one{truth};
      return learn_basis(one, truth.bands(), config.workers);
    }
  }
  return std::nullopt;
}

PointSpec configured_point(const ExperimentConfig& config, SamplingPattern pattern, double t) {
  PointSpec spec;
  spec.plan.pattern = pattern;
  spec.plan.rate = config.rate;
  spec.plan.alpha = config.alpha;
  spec.plan.seed = config.seed;
  spec.noise = config.noise;
  spec.noise.t = t;
  spec.noise.seed = config.seed;
  spec.noisy_guide = config.noisy_guide;
  spec.guide_response = config.guide_response;
  spec.edge_filter = config.edge_filter;
  spec.timing = config.timing;
  spec.workers = config.workers;
  return spec;
}

PipelineOutput run_pipeline(const ExperimentConfig& config) {
  config.validate();
  const SceneSource& scene = config.scenes.front();
  const HyperCube truth = scene.load();
  std::optional<GuideImage> captured;
  if (!config.guide_path.empty()) captured = read_guide(config.guide_path);

  DimensionChoice choice;
  choice.basis = configured_basis(config, truth);
  if (config.dims_mode == DimsMode::fixed) choice.fixed = config.dims.front();
  if (config.dims_mode == DimsMode::automatic) {
    choice.model = read_dimension_model(config.dim_model_path);
  }

  const PointSpec spec = configured_point(config, config.patterns.front(), config.t_values.front());
  PipelineOutput out;
  out.point = run_point(truth, spec, choice, captured ? &*captured : nullptr);

  const auto metrics_json = out.point.metrics.to_json();
  nlohmann::ordered_json selected;
  for (const auto& name : config.metrics) selected[name] = metrics_json.at(name);
  double max_residual = 0.0;
  std::size_t max_iterations = 0;
  for (const auto& s : out.point.colorize.solves) {
    max_residual = std::max(max_residual, s.residual);
    max_iterations = std::max(max_iterations, s.iterations);
  }
  auto& rep = out.report;
  rep["image"] = scene.name();
  rep["pattern"] = to_string(spec.plan.pattern);
  rep["rate"] = spec.plan.rate;
  rep["t_exposure"] = number_json(spec.noise.t);
  rep["seed"] = config.seed;
  rep["samples"] = out.point.acquisition.mask.count();
  rep["dim"] = out.point.dims;
  rep["dim_source"] = out.point.dims_source;
  if (out.point.curve) {
    rep["variance_curve"] = {{"explained", out.point.curve->explained},
                             {"elbow_index", out.point.curve->elbow_index},
                             {"log_min_variance", out.point.curve->log_min_variance}};
  }
  rep["metrics"] = selected;
  rep["skipped"] = {{"gfc", out.point.metrics.gfc_skipped},
                    {"ssv", out.point.metrics.ssv_skipped},
                    {"emd", out.point.metrics.emd_skipped}};
  rep["wall_ms"] = out.point.metrics.wall_ms;
  rep["solver"] = {{"channels", out.point.colorize.channels},
                   {"max_iterations", max_iterations},
                   {"max_residual", max_residual}};
  rep["degenerate_pixels"] = out.point.colorize.degenerate_pixels.size();

  const auto& dir = config.output_dir;
  const bool created_dir = !std::filesystem::exists(dir);
  try {
    std::filesystem::create_directories(dir);
    out.artifacts.push_back(dir / "recon.hsc");
    write_cube(out.point.recon, out.artifacts.back());
    out.artifacts.push_back(dir / "mask.pbm");
    write_mask(out.point.acquisition.mask, out.artifacts.back());
    out.artifacts.push_back(dir / "report.json");
    write_text(out.artifacts.back(), rep.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    for (const auto& p : out.artifacts) std::filesystem::remove(p, ec);
    if (created_dir) std::filesystem::remove(dir, ec);
    throw;
  }
  return out;
}

}  // namespace hypercolor
