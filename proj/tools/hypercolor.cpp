// hypercolor: command line front end for the reconstruction library.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypercolor/colorizer.hpp"
#include "hypercolor/config.hpp"
#include "hypercolor/cube.hpp"
#include "hypercolor/error.hpp"
#include "hypercolor/harness.hpp"
#include "hypercolor/io.hpp"
#include "hypercolor/metrics.hpp"
#include "hypercolor/noise.hpp"
#include "hypercolor/sampling.hpp"
#include "hypercolor/subspace.hpp"
#include "hypercolor/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hypercolor;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// "400:700:31" (inclusive range) or "400,410,420".
std::vector<double> parse_wavelengths(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0.0;
    double hi = 0.0;
    unsigned long count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lu", &lo, &hi, &count) != 3 || count == 0) {
      throw ParameterError("wavelengths: expected low:high:count, got '" + text + "'");
    }
    return linear_wavelengths(count, lo, hi);
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParameterError("wavelengths: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ParameterError("wavelengths: empty list");
  return out;
}

// "128x96" -> height 128, width 96.
std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  unsigned long h = 0;
  unsigned long w = 0;
  if (std::sscanf(text.c_str(), "%lux%lu", &h, &w) != 2 || h == 0 || w == 0) {
    throw ParameterError("size: expected HEIGHTxWIDTH, got '" + text + "'");
  }
  return {h, w};
}

double parse_exposure(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw ParameterError("exposure: cannot parse '" + text + "'");
  }
}

void write_json(const nlohmann::ordered_json& j, const fs::path& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

SpectralResponse response_for(const std::string& name, std::span<const double> wavelengths) {
  if (name == "visible-flat") return SpectralResponse::visible_flat(wavelengths);
  if (name == "flat") return SpectralResponse::flat(wavelengths.size());
  throw ParameterError("response must be visible-flat or flat");
}

ExperimentConfig config_from(const fs::path& path, const std::optional<std::uint64_t>& seed,
                             const fs::path& out) {
  ExperimentConfig c = load_config(path);
  if (seed) c.seed = *seed;
  if (!out.empty()) c.output_dir = out;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral reconstruction from a grayscale guide and sparse spectral clues"};
  app.require_subcommand(1);
  std::function<void()> action;

  // convert -------------------------------------------------------------
  auto* convert = app.add_subcommand("convert", "Import, synthesize and convert data files");
  convert->require_subcommand(1);

  struct {
    fs::path dir, out, cube, clues, mask;
    std::string wavelengths, kind = "natural", size = "128x128", response = "visible-flat";
    std::size_t bands = 31;
    std::uint64_t seed = 0;
  } cv;

  auto* stack = convert->add_subcommand("band-stack", "Directory of per-band PGM files to HSC1");
  stack->add_option("--dir", cv.dir, "Directory of .pgm files, one per band")->required();
  stack->add_option("--wavelengths", cv.wavelengths, "low:high:count or comma list (nm)")->required();
  stack->add_option("--out", cv.out, "Output cube")->required();
  stack->callback([&] {
    action = [&] { write_cube(import_band_stack(cv.dir, parse_wavelengths(cv.wavelengths)), cv.out); };
  });

  auto* guide_cmd = convert->add_subcommand("guide", "Render a noiseless guide image from a cube");
  guide_cmd->add_option("--cube", cv.cube)->required();
  guide_cmd->add_option("--response", cv.response, "visible-flat or flat");
  guide_cmd->add_option("--out", cv.out, "Output 16-bit PGM (sidecar JSON written alongside)")->required();
  guide_cmd->callback([&] {
    action = [&] {
      const HyperCube cube = read_cube(cv.cube);
      write_guide(make_guide(cube, response_for(cv.response, cube.wavelengths())), cv.out);
    };
  });

  auto* synth = convert->add_subcommand("synthetic", "Generate a synthetic ground-truth cube");
  synth->add_option("--kind", cv.kind, "natural, rank<k>, two-region, texture, blob");
  synth->add_option("--size", cv.size, "HEIGHTxWIDTH");
  synth->add_option("--bands", cv.bands);
  synth->add_option("--seed", cv.seed);
  synth->add_option("--out", cv.out)->required();
  synth->callback([&] {
    action = [&] {
      const auto [h, w] = parse_size(cv.size);
      write_cube(make_synthetic(cv.kind, h, w, cv.bands, cv.seed), cv.out);
    };
  });

  auto* c2c = convert->add_subcommand("clues-to-cube", "Dense masked cube from a clue file");
  c2c->add_option("--clues", cv.clues)->required();
  c2c->add_option("--out", cv.out)->required();
  c2c->callback([&] { action = [&] { write_cube(clues_to_cube(read_clues(cv.clues)), cv.out); }; });

  auto* cube2c = convert->add_subcommand("cube-to-clues", "Clue file from a cube and a mask");
  cube2c->add_option("--cube", cv.cube)->required();
  cube2c->add_option("--mask", cv.mask)->required();
  cube2c->add_option("--out", cv.out)->required();
  cube2c->callback([&] {
    action = [&] { write_clues(cube_to_clues(read_cube(cv.cube), read_mask(cv.mask)), cv.out); };
  });

  // simulate ------------------------------------------------------------
  struct {
    fs::path cube, mask, out, guide;
    NoiseParams noise;
    std::string t = "1e-4", guide_t, response = "visible-flat";
    std::size_t workers = 0;
  } sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate noisy clues (and optionally a guide)");
  simulate->add_option("--cube", sim.cube)->required();
  simulate->add_option("--mask", sim.mask)->required();
  simulate->add_option("--rho", sim.noise.rho, "Photons per unit radiance per second");
  simulate->add_option("--t", sim.t, "Exposure per measurement in seconds, or inf");
  simulate->add_option("--mu", sim.noise.mu, "Read-noise mean (counts)");
  simulate->add_option("--sigma", sim.noise.sigma, "Read-noise std (counts)");
  simulate->add_option("--seed", sim.noise.seed);
  simulate->add_option("--out", sim.out, "Output clue file")->required();
  simulate->add_option("--guide", sim.guide, "Also write a simulated guide PGM");
  simulate->add_option("--guide-t", sim.guide_t, "Guide exposure (default: --t)");
  simulate->add_option("--guide-response", sim.response);
  simulate->add_option("--workers", sim.workers);
  simulate->callback([&] {
    action = [&] {
      sim.noise.t = parse_exposure(sim.t);
      const HyperCube cube = read_cube(sim.cube);
      write_clues(simulate_clues(cube, read_mask(sim.mask), sim.noise, sim.workers), sim.out);
      if (!sim.guide.empty()) {
        NoiseParams g = sim.noise;
        if (!sim.guide_t.empty()) g.t = parse_exposure(sim.guide_t);
        write_guide(simulate_guide(cube, g, response_for(sim.response, cube.wavelengths()), sim.workers),
                    sim.guide);
      }
    };
  });

  // sample --------------------------------------------------------------
  struct {
    std::string pattern = "uniform-whisk", size;
    SamplingPlan plan;
    fs::path guide, out;
  } smp;
  auto* sample = app.add_subcommand("sample", "Generate a sampling mask");
  sample->add_option("--pattern", smp.pattern,
                     "random, uniform-push, uniform-whisk, guided-push, guided-whisk");
  sample->add_option("--rate", smp.plan.rate, "Fraction of pixels in (0, 1]");
  sample->add_option("--alpha", smp.plan.alpha, "Corner/level feature mix for guided patterns");
  sample->add_option("--seed", smp.plan.seed);
  sample->add_option("--guide", smp.guide, "Guide PGM (required for guided patterns)");
  sample->add_option("--size", smp.size, "HEIGHTxWIDTH when no guide is given");
  sample->add_option("--out", smp.out, "Output PBM")->required();
  sample->callback([&] {
    action = [&] {
      smp.plan.pattern = parse_sampling_pattern(smp.pattern);
      std::optional<GuideImage> guide;
      std::size_t h = 0;
      std::size_t w = 0;
      if (!smp.guide.empty()) {
        guide = read_guide(smp.guide);
        h = guide->height();
        w = guide->width();
      } else if (!smp.size.empty()) {
        std::tie(h, w) = parse_size(smp.size);
      } else {
        throw ParameterError("sample: give --guide or --size");
      }
      write_mask(make_mask(smp.plan, h, w, guide ? &*guide : nullptr), smp.out);
    };
  });

  // basis ---------------------------------------------------------------
  struct {
    std::vector<fs::path> cubes;
    fs::path cube, basis, out;
    std::size_t p = 0;
    std::size_t workers = 0;
  } bs;
  auto* basis_cmd = app.add_subcommand("basis", "Learn or apply a spectral basis");
  basis_cmd->require_subcommand(1);
  auto* learn = basis_cmd->add_subcommand("learn", "Learn an orthonormal basis from cubes");
  learn->add_option("--cube", bs.cubes, "Training cube(s)")->required();
  learn->add_option("--p", bs.p, "Basis size (default: all bands)");
  learn->add_option("--workers", bs.workers);
  learn->add_option("--out", bs.out)->required();
  learn->callback([&] {
    action = [&] {
      std::vector<HyperCube> cubes;
      for (const auto& path : bs.cubes) cubes.push_back(read_cube(path));
      const std::size_t p = bs.p == 0 ? cubes.front().bands() : bs.p;
      SpectralBasis basis = learn_basis(cubes, p, bs.workers);
      basis.source = bs.cubes.front().filename().string();
      write_basis(basis, bs.out);
    };
  });
  auto* proj = basis_cmd->add_subcommand("project", "Rank-p approximation of a cube");
  proj->add_option("--basis", bs.basis)->required();
  proj->add_option("--cube", bs.cube)->required();
  proj->add_option("--p", bs.p, "Dimensions to keep (default: all)");
  proj->add_option("--out", bs.out)->required();
  proj->callback([&] {
    action = [&] {
      SpectralBasis basis = read_basis(bs.basis);
      if (bs.p > 0) basis = basis.truncated(bs.p);
      write_cube(rank_approximation(read_cube(bs.cube), basis), bs.out);
    };
  });

  // estimate-dim --------------------------------------------------------
  struct {
    fs::path clues, basis, model, out;
  } ed;
  auto* estimate = app.add_subcommand("estimate-dim", "Variance curve, elbow and predicted dimension");
  estimate->add_option("--clues", ed.clues)->required();
  estimate->add_option("--basis", ed.basis)->required();
  estimate->add_option("--model", ed.model, "Dimension model JSON");
  estimate->add_option("--out", ed.out, "Output JSON (default stdout)");
  estimate->callback([&] {
    action = [&] {
      const VarianceCurve curve = variance_curve(read_clues(ed.clues), read_basis(ed.basis));
      nlohmann::ordered_json j{{"explained", curve.explained},
                               {"elbow_index", curve.elbow_index},
                               {"log_min_variance", curve.log_min_variance}};
      if (!ed.model.empty()) {
        j["predicted_dim"] = predict_dimension(read_dimension_model(ed.model), curve);
      }
      write_json(j, ed.out);
    };
  });

  // colorize ------------------------------------------------------------
  struct {
    fs::path guide, clues, basis, out, report, auto_dim;
    std::size_t dims = 0;
    bool no_edge_filter = false;
    std::string edge_filter = "on";
    double canny_lo = CannyParams{}.low_pct, canny_hi = CannyParams{}.high_pct;
    std::string solver = "iterative", response = "visible-flat", rescale = "per-pixel";
    double tolerance = SolverOptions{}.tolerance;
    std::size_t max_iterations = SolverOptions{}.max_iterations;
    std::size_t workers = 0;
  } col;
  auto* colorize_cmd = app.add_subcommand("colorize", "Propagate clues through the guide");
  colorize_cmd->add_option("--guide", col.guide)->required();
  colorize_cmd->add_option("--clues", col.clues)->required();
  colorize_cmd->add_option("--basis", col.basis, "Colorize in this spectral basis");
  auto* dims_opt =
      colorize_cmd->add_option("--dims,--dim", col.dims, "Basis vectors to use (default: all)");
  colorize_cmd->add_option("--auto-dim", col.auto_dim, "Dimension model JSON; predicts --dim")
      ->excludes(dims_opt);
  colorize_cmd->add_option("--edge-filter", col.edge_filter, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  colorize_cmd->add_flag("--no-edge-filter", col.no_edge_filter, "Same as --edge-filter off");
  colorize_cmd->add_option("--canny-lo-pct", col.canny_lo, "Hysteresis low threshold percentile");
  colorize_cmd->add_option("--canny-hi-pct", col.canny_hi, "Hysteresis high threshold percentile");
  colorize_cmd->add_option("--solver", col.solver, "iterative or dense");
  colorize_cmd->add_option("--tolerance", col.tolerance, "Relative residual target");
  colorize_cmd->add_option("--max-iterations", col.max_iterations);
  colorize_cmd->add_option("--guide-response", col.response, "visible-flat or flat");
  colorize_cmd->add_option("--rescale", col.rescale, "per-pixel or per-image");
  colorize_cmd->add_option("--workers", col.workers);
  colorize_cmd->add_option("--report", col.report, "Write solver statistics JSON");
  colorize_cmd->add_option("--out", col.out)->required();
  colorize_cmd->callback([&] {
    action = [&] {
      const GuideImage guide = read_guide(col.guide);
      const ClueSet clues = read_clues(col.clues);
      ColorizeOptions options;
      options.edge_filter = !col.no_edge_filter && col.edge_filter == "on";
      options.edge.edges.canny.low_pct = col.canny_lo;
      options.edge.edges.canny.high_pct = col.canny_hi;
      if (!col.basis.empty()) options.basis = read_basis(col.basis);
      options.dims = col.dims;
      std::optional<VarianceCurve> curve;
      if (!col.auto_dim.empty()) {
        if (!options.basis) throw ParameterError("--auto-dim requires --basis");
        curve = variance_curve(clues, *options.basis);
        options.dims = predict_dimension(read_dimension_model(col.auto_dim), *curve);
      }
      if (col.solver == "dense") {
        options.solve.kind = SolverKind::dense;
      } else if (col.solver != "iterative") {
        throw ParameterError("solver must be iterative or dense");
      }
      options.solve.iterative.tolerance = col.tolerance;
      options.solve.iterative.max_iterations = col.max_iterations;
      options.solve.workers = col.workers;
      options.rescale.guide_response = response_for(col.response, clues.wavelengths());
      if (col.rescale == "per-image") {
        options.rescale.mode = RescaleMode::per_image;
      } else if (col.rescale != "per-pixel") {
        throw ParameterError("rescale must be per-pixel or per-image");
      }
      ColorizeReport report;
      write_cube(colorize(guide, clues, options, &report), col.out);
      if (!col.report.empty()) {
        nlohmann::ordered_json j;
        j["channels"] = report.channels;
        if (curve) {
          j["dim"] = options.dims;
          j["elbow_index"] = curve->elbow_index;
          j["log_min_variance"] = curve->log_min_variance;
        }
        auto& s = j["solves"] = nlohmann::ordered_json::array();
        for (const auto& st : report.solves) {
          s.push_back({{"iterations", st.iterations}, {"residual", st.residual}});
        }
        j["degenerate_pixels"] = report.degenerate_pixels.size();
        j["wall_ms"] = report.wall_ms;
        write_json(j, col.report);
      }
    };
  });

  // metrics -------------------------------------------------------------
  struct {
    fs::path recon, truth, out, csv;
    std::string image, pattern = "-", t = "0";
    double rate = 0.0;
    std::size_t dim = 0;
    double wall_ms = 0.0;
  } mt;
  auto* metrics_cmd = app.add_subcommand("metrics", "Score a reconstruction against ground truth");
  metrics_cmd->add_option("--recon", mt.recon)->required();
  metrics_cmd->add_option("--truth", mt.truth)->required();
  metrics_cmd->add_option("--out", mt.out, "Report JSON (default stdout)");
  metrics_cmd->add_option("--csv-row", mt.csv, "Append a row to this CSV (header written if new)");
  metrics_cmd->add_option("--image", mt.image, "CSV image column (default: truth file stem)");
  metrics_cmd->add_option("--pattern", mt.pattern, "CSV pattern column");
  metrics_cmd->add_option("--rate", mt.rate, "CSV rate column");
  metrics_cmd->add_option("--t", mt.t, "CSV t_exposure column");
  metrics_cmd->add_option("--dim", mt.dim, "CSV dim column (default: bands)");
  metrics_cmd->add_option("--wall-ms", mt.wall_ms, "CSV wall_ms column");
  metrics_cmd->callback([&] {
    action = [&] {
      const HyperCube recon = read_cube(mt.recon);
      const HyperCube truth = read_cube(mt.truth);
      const MetricReport r = report(recon, truth, mt.wall_ms);
      write_json(r.to_json(), mt.out);
      if (!mt.csv.empty()) {
        const bool fresh = !fs::exists(mt.csv) || fs::file_size(mt.csv) == 0;
        std::ofstream out(mt.csv, std::ios::app);
        if (!out) throw IoError("cannot open " + mt.csv.string());
        if (fresh) out << kCsvHeader << "\n";
        SweepRow row{mt.image.empty() ? mt.truth.stem().string() : mt.image, mt.pattern, mt.rate,
                     parse_exposure(mt.t), mt.dim == 0 ? truth.bands() : mt.dim, r};
        out << csv_row(row) << "\n";
      }
    };
  });

  // configured experiments ----------------------------------------------
  struct {
    fs::path config, out, result;
    std::optional<std::uint64_t> seed;
    std::string kind;
  } ex;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", ex.config, "Experiment JSON")->required();
    cmd->add_option("--seed", ex.seed, "Override the configured seed");
    cmd->add_option("--out", ex.out, "Override the output directory");
  };

  auto* pipeline = app.add_subcommand("pipeline", "Guide, sampling, clues, colorization and metrics");
  add_config(pipeline);
  pipeline->callback([&] {
    action = [&] {
      const auto out = run_pipeline(config_from(ex.config, ex.seed, ex.out));
      std::cout << out.report.dump(2) << "\n";
    };
  });

  auto* sweep_dim = app.add_subcommand("sweep-dim", "Grid search over exposures x dimensions");
  add_config(sweep_dim);
  sweep_dim->callback([&] {
    action = [&] {
      const ExperimentConfig c = config_from(ex.config, ex.seed, ex.out);
      if (c.dims_mode != DimsMode::fixed) throw ConfigError("sweep-dim needs an explicit dims list");
      if (c.basis == BasisSource::none) throw ConfigError("sweep-dim needs a basis");
      SweepResult all;
      all.kind = "dimension";
      all.seed = c.seed;
      for (const auto& scene : c.scenes) {
        const HyperCube truth = scene.load();
        const auto basis = configured_basis(c, truth);
        auto r = grid_search_dimension(truth, scene.name(),
                                       configured_point(c, c.patterns.front(), c.t_values.front()),
                                       c.t_values, c.dims, *basis);
        for (auto& row : r.rows) all.rows.push_back(std::move(row));
        for (auto& b : r.best_dims) all.best_dims.push_back(std::move(b));
        for (auto& cu : r.curves) all.curves.push_back(std::move(cu));
      }
      all.finalize();
      all.save(c.output_dir, "sweep_dim");
      std::cout << all.to_csv();
    };
  });

  auto* sweep_budget = app.add_subcommand("sweep-budget", "Fixed total exposure over sampling ratios");
  add_config(sweep_budget);
  sweep_budget->callback([&] {
    action = [&] {
      const ExperimentConfig c = config_from(ex.config, ex.seed, ex.out);
      if (c.ratios.empty()) throw ConfigError("sweep-budget needs budget.ratios and budget.total_time");
      SweepResult all;
      all.kind = "budget";
      all.seed = c.seed;
      for (const auto& scene : c.scenes) {
        const HyperCube truth = scene.load();
        DimensionChoice choice;
        choice.basis = configured_basis(c, truth);
        if (c.dims_mode == DimsMode::fixed) choice.fixed = c.dims.front();
        if (c.dims_mode == DimsMode::automatic) choice.model = read_dimension_model(c.dim_model_path);
        auto r = time_budget_sweep(truth, scene.name(),
                                   configured_point(c, c.patterns.front(), c.t_values.front()),
                                   c.total_time, c.ratios, choice);
        for (auto& row : r.rows) all.rows.push_back(std::move(row));
        for (auto& d : r.distributions) all.distributions.push_back(std::move(d));
      }
      all.finalize();
      all.save(c.output_dir, "sweep_budget");
      std::cout << all.to_csv();
    };
  });

  auto* compare = app.add_subcommand("compare-sampling", "All sampling patterns at one rate");
  add_config(compare);
  compare->callback([&] {
    action = [&] {
      const ExperimentConfig c = config_from(ex.config, ex.seed, ex.out);
      SweepResult all;
      all.kind = "sampling";
      all.seed = c.seed;
      for (const auto& scene : c.scenes) {
        const HyperCube truth = scene.load();
        DimensionChoice choice;
        choice.basis = configured_basis(c, truth);
        if (c.dims_mode == DimsMode::fixed) choice.fixed = c.dims.front();
        if (c.dims_mode == DimsMode::automatic) choice.model = read_dimension_model(c.dim_model_path);
        for (double t : c.t_values) {
          auto r = compare_sampling(truth, scene.name(), configured_point(c, c.patterns.front(), t),
                                    c.patterns, choice);
          for (auto& row : r.rows) all.rows.push_back(std::move(row));
        }
      }
      all.finalize();
      all.save(c.output_dir, "compare_sampling");
      std::cout << all.to_csv();
    };
  });

  fs::path model_out;
  auto* train = app.add_subcommand("train-dim-model", "Fit the dimension predictor on grid searches");
  add_config(train);
  train->add_option("--model", model_out, "Model JSON (default: <output_dir>/dim_model.json)");
  train->callback([&] {
    action = [&] {
      const ExperimentConfig c = config_from(ex.config, ex.seed, ex.out);
      if (c.dims_mode != DimsMode::fixed) throw ConfigError("train-dim-model needs an explicit dims list");
      std::vector<NamedCube> cubes;
      for (const auto& scene : c.scenes) cubes.push_back({scene.name(), scene.load()});
      const TrainingResult r = train_dimension_model(
          cubes, configured_point(c, c.patterns.front(), c.t_values.front()), c.t_values, c.dims);
      fs::create_directories(c.output_dir);
      write_dimension_model(r.model, model_out.empty() ? c.output_dir / "dim_model.json" : model_out);
      write_json(r.diagnostics(), c.output_dir / "dim_model_training.json");
      r.sweeps.save(c.output_dir, "dim_model_sweeps");
      std::cout << r.diagnostics().dump(2) << "\n";
    };
  });

  auto* plot = app.add_subcommand("export-plotdata", "Tidy CSVs for plotting a sweep result");
  plot->add_option("--result", ex.result, "Sweep result JSON")->required();
  plot->add_option("--kind", ex.kind, "variance, dimension or budget")->required();
  plot->add_option("--out", ex.out, "Output directory")->required();
  plot->callback([&] {
    action = [&] {
      for (const auto& p : export_plotdata(SweepResult::load(ex.result), parse_plot_kind(ex.kind), ex.out)) {
        std::cout << p.string() << "\n";
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (action) action();
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "hypercolor: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "hypercolor: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "hypercolor: " << e.what() << "\n";
    return 1;
  }
}
