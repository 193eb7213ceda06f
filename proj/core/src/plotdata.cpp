#include <fstream>

#include "hypercolor/error.hpp"
#include "hypercolor/harness.hpp"

namespace hypercolor {

namespace {

std::string n(double v) { return format_number(v); }

PlotTable variance_table(const SweepResult& result) {
  if (result.curves.empty()) throw ParameterError("sweep result holds no variance curves");
  std::string s = "image,t_exposure,component,explained,elbow_index,log_min_variance\n";
  for (const auto& c : result.curves) {
    for (std::size_t k = 0; k < c.curve.explained.size(); ++k) {
      s += c.image + "," + n(c.t_exposure) + "," + std::to_string(k + 1) + "," +
           n(c.curve.explained[k]) + "," + std::to_string(c.curve.elbow_index) + "," +
           n(c.curve.log_min_variance) + "\n";
    }
  }
  return {"variance.csv", std::move(s)};
}

std::vector<PlotTable> dimension_tables(const SweepResult& result) {
  if (result.rows.empty()) throw ParameterError("sweep result holds no rows");
  std::string s = "image,t_exposure,dim,emd,psnr,best\n";
  for (const auto& r : result.rows) {
    bool best = false;
    for (const auto& b : result.best_dims) {
      if (b.image == r.image && b.t_exposure == r.t_exposure && b.dim == r.dim) best = true;
    }
    s += r.image + "," + n(r.t_exposure) + "," + std::to_string(r.dim) + "," + n(r.metrics.emd) +
         "," + n(r.metrics.psnr) + "," + (best ? "1" : "0") + "\n";
  }
  std::string b = "image,t_exposure,best_dim,emd\n";
  for (const auto& d : result.best_dims) {
    b += d.image + "," + n(d.t_exposure) + "," + std::to_string(d.dim) + "," + n(d.emd) + "\n";
  }
  return {{"dimension.csv", std::move(s)}, {"best_dims.csv", std::move(b)}};
}

std::vector<PlotTable> budget_tables(const SweepResult& result) {
  if (result.distributions.empty()) throw ParameterError("sweep result holds no distributions");
  std::string h = "image,ratio,samples,t_per_sample,bin_low,bin_high,count\n";
  std::string s = "image,ratio,samples,t_per_sample,total_time,exposure_sum,mean_emd,skipped\n";
  for (const auto& d : result.distributions) {
    const std::string head = d.image + "," + n(d.ratio) + "," + std::to_string(d.samples) + "," +
                             n(d.t_per_sample) + ",";
    for (std::size_t b = 0; b < d.counts.size(); ++b) {
      h += head + n(d.bin_edges[b]) + "," + n(d.bin_edges[b + 1]) + "," +
           std::to_string(d.counts[b]) + "\n";
    }
    s += head + n(d.total_time) + "," + n(d.exposure_sum) + "," + n(d.mean_emd) + "," +
         std::to_string(d.skipped) + "\n";
  }
  return {{"budget_hist.csv", std::move(h)}, {"budget_summary.csv", std::move(s)}};
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "variance") return PlotKind::variance;
  if (name == "dimension") return PlotKind::dimension;
  if (name == "budget") return PlotKind::budget;
  throw ParameterError("unknown plot kind '" + name + "' (variance, dimension, budget)");
}

std::vector<PlotTable> plot_tables(const SweepResult& result, PlotKind kind) {
  switch (kind) {
    case PlotKind::variance: return {variance_table(result)};
    case PlotKind::dimension: return dimension_tables(result);
    case PlotKind::budget: return budget_tables(result);
  }
  return {};
}

std::vector<std::filesystem::path> export_plotdata(const SweepResult& result, PlotKind kind,
                                                   const std::filesystem::path& dir) {
  const auto tables = plot_tables(result, kind);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& t : tables) {
    const auto path = dir / t.filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << t.content;
    if (!out) throw IoError("failed writing " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace hypercolor
