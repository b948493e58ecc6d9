#pragma once

#include <cstdint>

#include "mrcae/tensor.hpp"

namespace mrcae {

class MrCaeModel;

/// Weighted reconstruction objective: total = omega * mse + (1-omega) * max,
/// where mse averages squared residuals over all pixels and snapshots and
/// max takes the worst per-pixel time-mean squared residual.
struct LossValue {
  double total = 0.0;
  double mse_part = 0.0;
  double max_part = 0.0;
  double omega = 0.0;
};

LossValue level_loss(const SnapshotTensor& data, const SnapshotTensor& recon, double omega);

/// Subgradient of level_loss w.r.t. the reconstruction. The max term flows
/// only through the argmax pixel; ties break toward the lowest flat index.
SnapshotTensor level_loss_backward(const SnapshotTensor& data, const SnapshotTensor& recon,
                                   double omega);

/// Cross-resolution progress metric: decimate the finest data down to level
/// k, reconstruct through the model, prolong back up with the fixed bilinear
/// operator, and evaluate level_loss against the finest data. Evaluation
/// only; never differentiated.
LossValue global_loss(const MrCaeModel& model, std::int64_t level, const SnapshotTensor& finest,
                      double omega);

}  // namespace mrcae
