#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrcae/trainer.hpp"

namespace mrcae {

/// The intra-framework comparison axes: adaptive masks on/off and the
/// rectifier on/off. All variants in one benchmark share the same growth
/// schedule so their parameter curves are architecture-matched.
enum class VariantKind { pr, dense, pr_relu, dense_relu };

const char* to_string(VariantKind k);
VariantKind variant_from_string(const std::string& s);

struct VariantSpec {
  VariantKind kind = VariantKind::pr;
  TrainConfig cfg;  // shared base; kind-specific overrides applied per run
};

struct BenchPoint {
  std::int64_t params = 0;
  std::int64_t encoding_size = 0;
  double val_global_total = 0.0;
  double val_global_mse = 0.0;
  double val_global_max = 0.0;
  std::string variant;
  std::int64_t level = 0;
  std::int64_t phase = 0;
};

struct BenchCurve {
  std::string variant;
  std::vector<BenchPoint> points;  // one per growth phase, in phase order
};

struct VariantResult {
  VariantKind kind = VariantKind::pr;
  BenchCurve curve;
  std::optional<MrCaeModel> model;  // absent when the variant failed
  TrainHistory history;
  double wall_ms = 0.0;
  std::string error;  // nonempty when training aborted
};

/// Trains every variant through the shared schedule; a failing variant is
/// recorded with its error and does not abort the others. Requires an
/// explicit widen schedule so the curves stay architecture-matched.
std::vector<VariantResult> run_benchmark(const DataPyramid& pyramid,
                                         const std::vector<VariantSpec>& variants);

/// Writes bench.csv plus log-log SVG charts error_vs_params.svg and
/// error_vs_encoding.svg, one polyline per variant.
void emit_report(const std::vector<BenchCurve>& curves, const std::string& out_dir);

/// Training-curve SVG (log-scaled validation global error over epochs) for
/// the `report` command; returns the written path.
std::string emit_training_curve(const TrainHistory& history, const std::string& out_dir);

}  // namespace mrcae
