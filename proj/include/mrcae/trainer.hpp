#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrcae/datasets.hpp"
#include "mrcae/loss.hpp"
#include "mrcae/model.hpp"

namespace mrcae {

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

/// One bias-corrected adaptive-moment update. State starts at zero moments,
/// step 0; arrays are updated in place.
void adam_step(std::span<double> weights, std::span<const double> grads, AdamState& state,
               const AdamParams& params);

/// Plateau rule, checked every `window` epochs: stop when the relative
/// decrease of the tracked loss over the window just completed falls below
/// `threshold`.
class EarlyStop {
 public:
  explicit EarlyStop(std::int64_t window = 10, double threshold = 1e-3)
      : window_(window), threshold_(threshold) {}

  /// Feed the loss of the epoch that just finished; true means stop now.
  bool should_stop(double loss);

 private:
  std::int64_t window_;
  double threshold_;
  std::int64_t count_ = 0;
  double window_start_ = 0.0;
};

struct WidenSchedule {
  bool automatic = true;                // widen while the residual mask is nonempty
  std::vector<std::int64_t> counts;     // explicit per-level group counts otherwise
};

struct TrainConfig {
  double omega = 0.5;
  std::vector<double> eps_per_level;    // empty: eps_tau * Var(level data)
  double eps_tau = 0.01;
  std::int64_t max_epochs = 500;
  AdamParams adam;
  std::int64_t batch = 0;               // snapshots per step; 0 = full batch
  std::int64_t group_channels = 4;
  std::int64_t max_groups = 8;
  WidenSchedule schedule;
  double init_noise = 0.01;
  std::uint64_t seed = 0;
  bool freeze_lower = false;            // ablation: only train the newest level
  Activation activation = Activation::linear;
  bool dense_masks = false;             // ablation: widen with all-ones masks
};

void validate(const TrainConfig& cfg);

/// One history row: either a growth event (op deepen/widen, epoch 0) or a
/// training epoch (op epoch). Loss columns are evaluated at that moment.
struct HistoryRow {
  std::int64_t level = 0;
  std::int64_t phase = 0;
  std::string op;
  std::int64_t epoch = 0;
  LossValue train;
  LossValue val;
  LossValue val_global;
  std::int64_t params = 0;
  std::int64_t encoding = 0;
  std::int64_t mask_active = -1;  // widen rows: active cells of the applied mask
  double wall_ms = 0.0;
};

struct TrainHistory {
  std::vector<HistoryRow> rows;

  std::string to_csv() const;
  /// Final row of the given phase (the state the phase ended in).
  const HistoryRow& phase_end(std::int64_t phase) const;
  /// Final row of the given level across all its phases.
  const HistoryRow& level_end(std::int64_t level) const;
  std::int64_t phase_count() const;
};

struct PhaseData {
  const SnapshotTensor& train;
  const SnapshotTensor& val;
  const SnapshotTensor& finest_val;
  std::int64_t level = 0;
  std::int64_t phase = 0;
};

/// Optimizer state for every parameter array, in parameter_arrays order.
/// progressive_train keeps it warm across phases: arrays appended by growth
/// start from fresh zero-moment state, existing arrays keep their moments,
/// so training continues smoothly through a growth event.
struct Optimizer {
  std::vector<AdamState> states;

  /// Grows (or initializes) the state list to match the model's arrays.
  void sync(const MrCaeModel& model);
};

/// Runs up to cfg.max_epochs of gradient descent on the level objective,
/// stopping early on plateau. Appends one row per epoch. A null optimizer
/// trains with fresh state.
void train_phase(MrCaeModel& model, const PhaseData& data, const TrainConfig& cfg,
                 TrainHistory& history, Optimizer* optimizer = nullptr);

/// The progressive outer loop: per level, deepen + train, then widen + train
/// while capacity is still warranted (or per the explicit schedule).
std::pair<MrCaeModel, TrainHistory> progressive_train(const DataPyramid& pyramid,
                                                      const TrainConfig& cfg);

/// Population variance of all values; backs the default mask tolerance.
double value_variance(const SnapshotTensor& t);

/// The residual-driven widening mask for the model's top level (all-ones when
/// dense is set).
SpatialMask widen_mask(const MrCaeModel& model, const SnapshotTensor& level_train, double eps,
                       bool dense);

}  // namespace mrcae
