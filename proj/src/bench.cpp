#include "mrcae/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "mrcae/errors.hpp"
#include "mrcae/io.hpp"

namespace mrcae {

namespace {

const char* kVariantColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b"};

struct LogAxis {
  double lo = 0.0, hi = 1.0;

  void fit(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

std::string svg_chart(const std::vector<BenchCurve>& curves, const std::string& title,
                      const std::string& x_label, bool x_is_params) {
  const double width = 720, height = 480, margin = 60;
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      const double xv = double(x_is_params ? p.params : p.encoding_size);
      if (xv > 0) {
        x_lo = std::min(x_lo, std::log10(xv));
        x_hi = std::max(x_hi, std::log10(xv));
      }
      if (p.val_global_total > 0) {
        y_lo = std::min(y_lo, std::log10(p.val_global_total));
        y_hi = std::max(y_hi, std::log10(p.val_global_total));
      }
    }
  }
  if (x_lo > x_hi) (x_lo = 0), (x_hi = 1);
  if (y_lo > y_hi) (y_lo = -1), (y_hi = 0);
  if (x_hi - x_lo < 1e-9) x_hi = x_lo + 1;
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1;
  auto map_x = [&](double lg) {
    return margin + (lg - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
  };
  auto map_y = [&](double lg) {
    return height - margin - (lg - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
  };
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  s << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
    << title << "</text>\n";
  s << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
    << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  s << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
    << height - margin << "\" stroke=\"black\"/>\n";
  s << "  <text x=\"" << width / 2 << "\" y=\"" << height - 16
    << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << " (log10)</text>\n";
  s << "  <text x=\"18\" y=\"" << height / 2
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 " << height / 2
    << ")\">validation global loss (log10)</text>\n";
  std::size_t ci = 0;
  for (const auto& c : curves) {
    const char* color = kVariantColors[ci % 6];
    std::ostringstream pts;
    for (const auto& p : c.points) {
      const double xv = double(x_is_params ? p.params : p.encoding_size);
      const double yv = p.val_global_total;
      if (xv <= 0 || yv <= 0) continue;
      pts << io::fmt_double(map_x(std::log10(xv))) << ','
          << io::fmt_double(map_y(std::log10(yv))) << ' ';
    }
    s << "  <polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "  <text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16 * double(ci + 1)
      << "\" font-size=\"12\" fill=\"" << color << "\" text-anchor=\"end\">" << c.variant
      << "</text>\n";
    ++ci;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

const char* to_string(VariantKind k) {
  switch (k) {
    case VariantKind::pr: return "pr";
    case VariantKind::dense: return "dense";
    case VariantKind::pr_relu: return "pr_relu";
    case VariantKind::dense_relu: return "dense_relu";
  }
  return "pr";
}

VariantKind variant_from_string(const std::string& s) {
  if (s == "pr") return VariantKind::pr;
  if (s == "dense") return VariantKind::dense;
  if (s == "pr_relu") return VariantKind::pr_relu;
  if (s == "dense_relu") return VariantKind::dense_relu;
  throw ConfigError("unknown variant: " + s + " (expected pr, dense, pr_relu, dense_relu)");
}

std::vector<VariantResult> run_benchmark(const DataPyramid& pyramid,
                                         const std::vector<VariantSpec>& variants) {
  if (variants.empty()) throw ConfigError("run_benchmark: empty variant list");
  std::vector<VariantResult> results;
  std::uint64_t index = 0;
  for (const auto& spec : variants) {
    if (spec.cfg.schedule.automatic) {
      throw ConfigError("run_benchmark needs an explicit widen schedule so all variants share "
                        "one topology");
    }
    VariantResult result;
    result.kind = spec.kind;
    result.curve.variant = to_string(spec.kind);
    TrainConfig cfg = spec.cfg;
    cfg.dense_masks = spec.kind == VariantKind::dense || spec.kind == VariantKind::dense_relu;
    cfg.activation = (spec.kind == VariantKind::pr_relu || spec.kind == VariantKind::dense_relu)
                         ? Activation::relu
                         : Activation::linear;
    cfg.seed = derive_seed(spec.cfg.seed, index);
    const auto start = std::chrono::steady_clock::now();
    try {
      auto [model, history] = progressive_train(pyramid, cfg);
      result.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      for (std::int64_t phase = 0; phase < history.phase_count(); ++phase) {
        const HistoryRow& end = history.phase_end(phase);
        BenchPoint p;
        p.params = end.params;
        p.encoding_size = end.encoding;
        p.val_global_total = end.val_global.total;
        p.val_global_mse = end.val_global.mse_part;
        p.val_global_max = end.val_global.max_part;
        p.variant = result.curve.variant;
        p.level = end.level;
        p.phase = phase;
        result.curve.points.push_back(std::move(p));
      }
      result.model = std::move(model);
      result.history = std::move(history);
    } catch (const std::exception& e) {
      result.error = e.what();
    }
    results.push_back(std::move(result));
    ++index;
  }
  return results;
}

void emit_report(const std::vector<BenchCurve>& curves, const std::string& out_dir) {
  if (curves.empty()) throw ConfigError("emit_report: no curves to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  std::ostringstream csv;
  csv << "params,encoding_size,val_global_total,val_global_mse,val_global_max,variant,level,"
         "phase\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      csv << p.params << ',' << p.encoding_size << ',' << io::fmt_double(p.val_global_total)
          << ',' << io::fmt_double(p.val_global_mse) << ',' << io::fmt_double(p.val_global_max)
          << ',' << p.variant << ',' << p.level << ',' << p.phase << '\n';
    }
  }
  io::write_text_file(out_dir + "/bench.csv", csv.str());
  io::write_text_file(out_dir + "/error_vs_params.svg",
                      svg_chart(curves, "validation error vs parameters", "parameters", true));
  io::write_text_file(
      out_dir + "/error_vs_encoding.svg",
      svg_chart(curves, "validation error vs encoding size", "encoding size", false));
}

std::string emit_training_curve(const TrainHistory& history, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  const double width = 720, height = 480, margin = 60;
  double y_lo = 1e300, y_hi = -1e300;
  std::int64_t count = 0;
  for (const auto& r : history.rows) {
    if (r.val_global.total > 0) {
      y_lo = std::min(y_lo, std::log10(r.val_global.total));
      y_hi = std::max(y_hi, std::log10(r.val_global.total));
    }
    ++count;
  }
  if (y_lo > y_hi) (y_lo = -1), (y_hi = 0);
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1;
  auto map_x = [&](double i) {
    return margin + i / double(std::max<std::int64_t>(count - 1, 1)) * (width - 2 * margin);
  };
  auto map_y = [&](double lg) {
    return height - margin - (lg - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
  };
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  s << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       "validation global loss over training</text>\n";
  s << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
    << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  s << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
    << height - margin << "\" stroke=\"black\"/>\n";
  std::ostringstream pts;
  std::int64_t i = 0;
  for (const auto& r : history.rows) {
    if (r.val_global.total > 0) {
      pts << io::fmt_double(map_x(double(i))) << ','
          << io::fmt_double(map_y(std::log10(r.val_global.total))) << ' ';
    }
    // growth events mark phase boundaries
    if (r.op != "epoch") {
      s << "  <line x1=\"" << io::fmt_double(map_x(double(i))) << "\" y1=\"" << margin
        << "\" x2=\"" << io::fmt_double(map_x(double(i))) << "\" y2=\"" << height - margin
        << "\" stroke=\"#cccccc\" stroke-dasharray=\"4\"/>\n";
    }
    ++i;
  }
  s << "  <polyline points=\"" << pts.str()
    << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  s << "</svg>\n";
  const std::string path = out_dir + "/training_curve.svg";
  io::write_text_file(path, s.str());
  return path;
}

}  // namespace mrcae
