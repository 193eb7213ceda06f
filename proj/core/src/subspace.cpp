#include "hypercolor/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "binary_io.hpp"
#include "hypercolor/error.hpp"
#include "hypercolor/parallel.hpp"

namespace hypercolor {

namespace {

// Gram accumulation block: partial sums are reduced in block order, so the
// result does not depend on the worker count.
constexpr std::size_t kGramBlockPixels = 4096;

constexpr std::size_t kMinCluesForVariance = 8;

// Stands in for log10(0) on exactly-zero variances.
constexpr double kVarianceFloor = 1e-300;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

}  // namespace

SpectralBasis SpectralBasis::truncated(std::size_t p) const {
  if (p == 0 || p > dims()) {
    throw ParameterError("cannot truncate a " + std::to_string(dims()) + "-D basis to " +
                         std::to_string(p));
  }
  SpectralBasis out;
  out.wavelengths = wavelengths;
  out.vectors = vectors.leftCols(static_cast<Eigen::Index>(p));
  out.singular_values = singular_values.head(static_cast<Eigen::Index>(p));
  out.source = source;
  return out;
}

SpectralBasis learn_basis(std::span<const HyperCube> cubes, std::size_t p, std::size_t workers) {
  if (cubes.empty()) throw ParameterError("no training cubes");
  const std::size_t l = cubes.front().bands();
  if (p == 0 || p > l) {
    throw ParameterError("basis size p=" + std::to_string(p) + " must be in [1, " +
                         std::to_string(l) + "]");
  }
  for (const HyperCube& c : cubes) {
    if (!std::ranges::equal(c.wavelengths(), cubes.front().wavelengths())) {
      throw ParameterError("training cubes do not share a wavelength axis");
    }
  }

  struct Block {
    std::size_t cube;
    std::size_t first;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    for (std::size_t first = 0; first < cubes[k].pixels(); first += kGramBlockPixels) {
      blocks.push_back({k, first, std::min(kGramBlockPixels, cubes[k].pixels() - first)});
    }
  }
  std::vector<Eigen::MatrixXd> partial(blocks.size());
  const auto L = static_cast<Eigen::Index>(l);
  parallel_for(blocks.size(), workers, [&](std::size_t i) {
    const Block& b = blocks[i];
    const Eigen::Map<const RowMatrix> x(cubes[b.cube].data().data() + b.first * l,
                                        static_cast<Eigen::Index>(b.count), L);
    partial[i] = Eigen::MatrixXd::Zero(L, L);
    partial[i].selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  });
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(L, L);
  for (const auto& g : partial) gram += g;
  gram = gram.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  SpectralBasis basis;
  basis.wavelengths.assign(cubes.front().wavelengths().begin(), cubes.front().wavelengths().end());
  const auto P = static_cast<Eigen::Index>(p);
  basis.vectors.resize(L, P);
  basis.singular_values.resize(P);
  for (Eigen::Index j = 0; j < P; ++j) {
    const Eigen::Index src = L - 1 - j;
    basis.vectors.col(j) = eig.eigenvectors().col(src);
    basis.singular_values(j) = std::sqrt(std::max(0.0, eig.eigenvalues()(src)));
  }
  fix_signs(basis.vectors);
  return basis;
}

void write_basis(const SpectralBasis& basis, const std::filesystem::path& path) {
  detail::LeWriter out;
  out.magic("HSB1");
  out.put_u32(basis.bands(), "bands");
  out.put_u32(basis.dims(), "dims");
  for (double w : basis.wavelengths) out.put(w);
  for (Eigen::Index j = 0; j < basis.singular_values.size(); ++j) out.put(basis.singular_values(j));
  for (Eigen::Index j = 0; j < basis.vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < basis.vectors.rows(); ++i) out.put(basis.vectors(i, j));
  }
  out.save(path);
}

SpectralBasis read_basis(const std::filesystem::path& path) {
  detail::LeReader in(path);
  in.expect_magic("HSB1");
  const auto l = in.get<std::uint32_t>();
  const auto p = in.get<std::uint32_t>();
  if (p > l || l == 0 || p == 0) throw FormatError("'" + path.string() + "': bad basis shape");
  in.require(std::uint64_t{l} + p + std::uint64_t{l} * p, sizeof(double), "basis payload");
  SpectralBasis basis;
  basis.wavelengths.resize(l);
  for (auto& w : basis.wavelengths) w = in.get<double>();
  basis.singular_values.resize(p);
  for (std::uint32_t j = 0; j < p; ++j) basis.singular_values(j) = in.get<double>();
  basis.vectors.resize(l, p);
  for (std::uint32_t j = 0; j < p; ++j) {
    for (std::uint32_t i = 0; i < l; ++i) basis.vectors(i, j) = in.get<double>();
  }
  in.expect_end();
  basis.source = path.filename().string();
  return basis;
}

ChannelImage project(const HyperCube& cube, const SpectralBasis& basis) {
  if (cube.bands() != basis.bands()) throw ParameterError("basis/cube band count mismatch");
  const auto l = static_cast<Eigen::Index>(cube.bands());
  const auto p = static_cast<Eigen::Index>(basis.dims());
  ChannelImage out(cube.height(), cube.width(), basis.dims());
  const Eigen::Map<const RowMatrix> x(cube.data().data(), static_cast<Eigen::Index>(cube.pixels()), l);
  Eigen::Map<RowMatrix> y(out.values.data(), static_cast<Eigen::Index>(cube.pixels()), p);
  y.noalias() = x * basis.vectors;
  return out;
}

ChannelSamples project(const ChannelSamples& samples, const SpectralBasis& basis) {
  if (samples.channels != basis.bands()) throw ParameterError("basis/clue band count mismatch");
  ChannelSamples out;
  out.height = samples.height;
  out.width = samples.width;
  out.channels = basis.dims();
  out.coords = samples.coords;
  out.values.resize(samples.count() * basis.dims());
  const Eigen::Map<const RowMatrix> x(samples.values.data(), static_cast<Eigen::Index>(samples.count()),
                                      static_cast<Eigen::Index>(samples.channels));
  Eigen::Map<RowMatrix> y(out.values.data(), static_cast<Eigen::Index>(samples.count()),
                          static_cast<Eigen::Index>(basis.dims()));
  y.noalias() = x * basis.vectors;
  return out;
}

ChannelSamples project(const ClueSet& clues, const SpectralBasis& basis) {
  return project(clues.samples(), basis);
}

ChannelImage unproject(const ChannelImage& coefficients, const SpectralBasis& basis) {
  if (coefficients.channels != basis.dims()) {
    throw ParameterError("coefficient count does not match basis dimension");
  }
  const auto pixels = static_cast<Eigen::Index>(coefficients.height * coefficients.width);
  ChannelImage out(coefficients.height, coefficients.width, basis.bands());
  const Eigen::Map<const RowMatrix> c(coefficients.values.data(), pixels,
                                      static_cast<Eigen::Index>(basis.dims()));
  Eigen::Map<RowMatrix> y(out.values.data(), pixels, static_cast<Eigen::Index>(basis.bands()));
  y.noalias() = c * basis.vectors.transpose();
  return out;
}

HyperCube rank_approximation(const HyperCube& cube, const SpectralBasis& basis) {
  ChannelImage approx = unproject(project(cube, basis), basis);
  return HyperCube(cube.height(), cube.width(),
                   std::vector<double>(cube.wavelengths().begin(), cube.wavelengths().end()),
                   std::move(approx.values));
}

std::size_t kneedle_elbow(std::span<const double> explained) {
  const std::size_t l = explained.size();
  if (l < 3) return 1;
  std::vector<double> y(l);
  for (std::size_t k = 0; k < l; ++k) y[k] = std::log10(std::max(explained[k], kVarianceFloor));
  const auto [lo, hi] = std::ranges::minmax(y);
  if (!(hi > lo)) return 1;
  for (double& v : y) v = (v - lo) / (hi - lo);

  const double first = y.front();
  const double last = y.back();
  std::size_t best = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < l; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(l - 1);
    const double gap = (first + (last - first) * x) - y[k];
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return std::clamp<std::size_t>(best, 1, l);
}

VarianceCurve variance_curve(const ClueSet& clues, const SpectralBasis& basis) {
  if (clues.count() < kMinCluesForVariance) {
    throw ParameterError("variance curve needs at least 8 clues, got " +
                         std::to_string(clues.count()));
  }
  const ChannelSamples coeffs = project(clues, basis);
  const auto n = static_cast<Eigen::Index>(coeffs.count());
  const Eigen::Map<const RowMatrix> c(coeffs.values.data(), n, static_cast<Eigen::Index>(coeffs.channels));
  const Eigen::RowVectorXd mean = c.colwise().mean();
  const Eigen::RowVectorXd var =
      (c.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1);

  VarianceCurve curve;
  curve.explained.assign(var.data(), var.data() + var.size());
  curve.elbow_index = kneedle_elbow(curve.explained);
  curve.log_min_variance =
      std::log10(std::max(*std::ranges::min_element(curve.explained), kVarianceFloor));
  return curve;
}

double DimensionModel::evaluate(const DimensionFeatures& f) const noexcept {
  const double e = f.elbow;
  const double v = f.log_min_variance;
  const auto& c = coefficients;
  return c[0] + c[1] * e + c[2] * v + c[3] * e * e + c[4] * v * v + c[5] * e * v;
}

nlohmann::ordered_json DimensionModel::to_json() const {
  return {{"intercept", coefficients[0]},
          {"elbow", coefficients[1]},
          {"log_min_variance", coefficients[2]},
          {"elbow_sq", coefficients[3]},
          {"log_min_variance_sq", coefficients[4]},
          {"elbow_x_log_min_variance", coefficients[5]},
          {"min_dim", min_dim},
          {"max_dim", max_dim}};
}

DimensionModel DimensionModel::from_json(const nlohmann::json& j) {
  DimensionModel m;
  try {
    m.coefficients = {j.at("intercept").get<double>(),
                      j.at("elbow").get<double>(),
                      j.at("log_min_variance").get<double>(),
                      j.at("elbow_sq").get<double>(),
                      j.at("log_min_variance_sq").get<double>(),
                      j.at("elbow_x_log_min_variance").get<double>()};
    m.min_dim = j.value("min_dim", std::size_t{2});
    m.max_dim = j.at("max_dim").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dimension model: ") + e.what());
  }
  if (m.min_dim < 1 || m.max_dim < m.min_dim) throw FormatError("dimension model: bad clamp bounds");
  return m;
}

DimensionModel fit_dimension_model(std::span<const DimensionSample> training, std::size_t max_dim) {
  if (training.size() < 6) {
    throw ParameterError("dimension model needs at least 6 training pairs, got " +
                         std::to_string(training.size()));
  }
  if (max_dim < 2) throw ParameterError("max_dim must be >= 2");
  const auto n = static_cast<Eigen::Index>(training.size());
  Eigen::MatrixXd design(n, 6);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = training[static_cast<std::size_t>(i)].features.elbow;
    const double v = training[static_cast<std::size_t>(i)].features.log_min_variance;
    design.row(i) << 1.0, e, v, e * e, v * v, e * v;
    target(i) = training[static_cast<std::size_t>(i)].best_dim;
  }
  // Minimum-norm least squares: repeated features leave the design rank
  // deficient and must still give a usable predictor.
  const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
  DimensionModel model;
  for (int k = 0; k < 6; ++k) model.coefficients[static_cast<std::size_t>(k)] = coef(k);
  model.min_dim = 2;
  model.max_dim = max_dim;
  return model;
}

double training_rmse(const DimensionModel& model, std::span<const DimensionSample> training) {
  if (training.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : training) {
    const double r = model.evaluate(s.features) - s.best_dim;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(training.size()));
}

std::size_t predict_dimension(const DimensionModel& model, const DimensionFeatures& features) {
  const double raw = model.evaluate(features);
  const double lo = static_cast<double>(model.min_dim);
  const double hi = static_cast<double>(model.max_dim);
  if (std::isnan(raw)) return model.min_dim;
  return static_cast<std::size_t>(std::clamp(std::round(raw), lo, hi));
}

std::size_t predict_dimension(const DimensionModel& model, const VarianceCurve& curve) {
  DimensionModel bounded = model;
  bounded.max_dim = std::max(model.min_dim, std::min(model.max_dim, curve.explained.size()));
  return predict_dimension(bounded, features_of(curve));
}

void write_dimension_model(const DimensionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << model.to_json().dump(2) << '\n';
}

DimensionModel read_dimension_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return DimensionModel::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace hypercolor
