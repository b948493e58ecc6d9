#include "mrcae/loss.hpp"

#include "mrcae/conv.hpp"
#include "mrcae/errors.hpp"
#include "mrcae/model.hpp"

namespace mrcae {

namespace {

void require_loss_inputs(const SnapshotTensor& data, const SnapshotTensor& recon, double omega,
                         const char* where) {
  require_same_dims(data.dims(), recon.dims(), where);
  if (data.channels() != 1) {
    throw ShapeError(std::string(where) + " expects single-channel data, got " +
                     data.dims().str());
  }
  if (omega < 0.0 || omega > 1.0) {
    throw ConfigError(std::string(where) + ": omega must lie in [0,1]");
  }
}

}  // namespace

LossValue level_loss(const SnapshotTensor& data, const SnapshotTensor& recon, double omega) {
  require_loss_inputs(data, recon, omega, "level_loss");
  const std::int64_t T = data.snapshots(), H = data.rows(), W = data.cols();
  const ScalarField per_pixel = reduce_time_mean_sq(data, recon);
  double mse = 0.0;
  double worst = 0.0;
  for (std::int64_t i = 0; i < H; ++i) {
    for (std::int64_t j = 0; j < W; ++j) {
      const double m = per_pixel(i, j);
      mse += m;
      if (m > worst) worst = m;
    }
  }
  mse /= double(H * W);
  LossValue out;
  out.mse_part = mse;
  out.max_part = worst;
  out.omega = omega;
  out.total = omega * out.mse_part + (1.0 - omega) * out.max_part;
  (void)T;
  return out;
}

SnapshotTensor level_loss_backward(const SnapshotTensor& data, const SnapshotTensor& recon,
                                   double omega) {
  require_loss_inputs(data, recon, omega, "level_loss_backward");
  const std::int64_t T = data.snapshots(), H = data.rows(), W = data.cols();
  const ScalarField per_pixel = reduce_time_mean_sq(data, recon);
  std::int64_t arg_i = 0, arg_j = 0;
  double worst = per_pixel(0, 0);
  for (std::int64_t i = 0; i < H; ++i) {
    for (std::int64_t j = 0; j < W; ++j) {
      if (per_pixel(i, j) > worst) {
        worst = per_pixel(i, j);
        arg_i = i;
        arg_j = j;
      }
    }
  }
  SnapshotTensor grad(data.dims());
  const double mse_scale = omega * 2.0 / double(T * H * W);
  const double max_scale = (1.0 - omega) * 2.0 / double(T);
  for (std::int64_t t = 0; t < T; ++t) {
    for (std::int64_t i = 0; i < H; ++i) {
      for (std::int64_t j = 0; j < W; ++j) {
        const double r = recon(t, 0, i, j) - data(t, 0, i, j);
        double g = mse_scale * r;
        if (i == arg_i && j == arg_j) g += max_scale * r;
        grad(t, 0, i, j) = g;
      }
    }
  }
  return grad;
}

LossValue global_loss(const MrCaeModel& model, std::int64_t level, const SnapshotTensor& finest,
                      double omega) {
  if (level < 0 || level >= model.levels_grown()) {
    throw ConfigError("global_loss: level " + std::to_string(level) +
                      " out of range (grown: " + std::to_string(model.levels_grown()) + ")");
  }
  const Dims4 fd = finest.dims();
  if (fd.h != model.finest_rows() || fd.w != model.finest_cols() || fd.c != 1) {
    throw ShapeError("global_loss: finest data " + fd.str() + " does not match model finest (" +
                     std::to_string(model.finest_rows()) + "," +
                     std::to_string(model.finest_cols()) + ")");
  }
  const std::int64_t hops = model.n_levels() - 1 - level;
  SnapshotTensor view = finest;
  for (std::int64_t s = 0; s < hops; ++s) view = decimate(view);
  SnapshotTensor recon = model.forward(view, level);
  for (std::int64_t s = 0; s < hops; ++s) recon = bilinear_upsample(recon);
  return level_loss(finest, recon, omega);
}

}  // namespace mrcae
