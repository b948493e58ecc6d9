#include "mrcae/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mrcae/errors.hpp"
#include "mrcae/io.hpp"

namespace mrcae {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void adam_step(std::span<double> weights, std::span<const double> grads, AdamState& state,
               const AdamParams& params) {
  if (weights.size() != grads.size()) {
    throw ShapeError("adam_step: weight/gradient size mismatch");
  }
  if (state.m.empty()) {
    state.m.assign(weights.size(), 0.0);
    state.v.assign(weights.size(), 0.0);
  }
  if (state.m.size() != weights.size()) {
    throw ShapeError("adam_step: state size mismatch");
  }
  state.step += 1;
  const double corr1 = 1.0 - std::pow(params.beta1, double(state.step));
  const double corr2 = 1.0 - std::pow(params.beta2, double(state.step));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grads[i];
    state.m[i] = params.beta1 * state.m[i] + (1.0 - params.beta1) * g;
    state.v[i] = params.beta2 * state.v[i] + (1.0 - params.beta2) * g * g;
    const double mhat = state.m[i] / corr1;
    const double vhat = state.v[i] / corr2;
    weights[i] -= params.lr * mhat / (std::sqrt(vhat) + params.eps);
  }
}

bool EarlyStop::should_stop(double loss) {
  if (count_ == 0) window_start_ = loss;
  ++count_;
  if (count_ <= window_ || (count_ - 1) % window_ != 0) return false;
  const double before = window_start_;
  window_start_ = loss;
  if (before <= 0.0) return true;  // already at the floor
  return (before - loss) / before < threshold_;
}

void validate(const TrainConfig& cfg) {
  if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (cfg.omega < 0.0 || cfg.omega > 1.0) throw ConfigError("omega must lie in [0,1]");
  if (cfg.adam.lr <= 0.0) throw ConfigError("learning rate must be > 0");
  if (cfg.group_channels < 1) throw ConfigError("group_channels must be >= 1");
  if (cfg.max_groups < 0) throw ConfigError("max_groups must be >= 0");
  if (cfg.init_noise < 0.0) throw ConfigError("init_noise must be >= 0");
  if (cfg.eps_tau < 0.0) throw ConfigError("eps_tau must be >= 0");
  for (double e : cfg.eps_per_level) {
    if (e < 0.0) throw ConfigError("mask tolerances must be >= 0");
  }
  if (!cfg.schedule.automatic) {
    for (auto c : cfg.schedule.counts) {
      if (c < 0) throw ConfigError("widen schedule counts must be >= 0");
    }
  }
}

std::string TrainHistory::to_csv() const {
  std::ostringstream out;
  out << "level,phase,op,epoch,train_total,train_mse,train_max,val_total,"
         "val_global_total,val_global_mse,val_global_max,params,encoding_size,wall_ms\n";
  for (const auto& r : rows) {
    out << r.level << ',' << r.phase << ',' << r.op << ',' << r.epoch << ','
        << io::fmt_double(r.train.total) << ',' << io::fmt_double(r.train.mse_part) << ','
        << io::fmt_double(r.train.max_part) << ',' << io::fmt_double(r.val.total) << ','
        << io::fmt_double(r.val_global.total) << ',' << io::fmt_double(r.val_global.mse_part)
        << ',' << io::fmt_double(r.val_global.max_part) << ',' << r.params << ',' << r.encoding
        << ',' << io::fmt_double(r.wall_ms) << '\n';
  }
  return out.str();
}

const HistoryRow& TrainHistory::phase_end(std::int64_t phase) const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->phase == phase) return *it;
  }
  throw ConfigError("phase " + std::to_string(phase) + " not present in history");
}

const HistoryRow& TrainHistory::level_end(std::int64_t level) const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->level == level) return *it;
  }
  throw ConfigError("level " + std::to_string(level) + " not present in history");
}

std::int64_t TrainHistory::phase_count() const {
  std::int64_t n = 0;
  for (const auto& r : rows) {
    if (r.op != "epoch") ++n;
  }
  return n;
}

double value_variance(const SnapshotTensor& t) {
  const double* p = t.data();
  const std::int64_t n = t.size();
  double mean = 0.0;
  for (std::int64_t i = 0; i < n; ++i) mean += p[i];
  mean /= double(n);
  double var = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = p[i] - mean;
    var += d * d;
  }
  return var / double(n);
}

SpatialMask widen_mask(const MrCaeModel& model, const SnapshotTensor& level_train, double eps,
                       bool dense) {
  const std::int64_t top = model.levels_grown() - 1;
  if (dense) {
    return SpatialMask::ones((model.level(top).rows - 1) / 2, (model.level(top).cols - 1) / 2);
  }
  const SnapshotTensor recon = model.forward(level_train, top);
  return compute_mask(level_train, recon, eps);
}

namespace {

struct Measured {
  LossValue train;
  LossValue val;
  LossValue val_global;
};

Measured measure(const MrCaeModel& model, const PhaseData& d, const TrainConfig& cfg) {
  Measured m;
  m.train = level_loss(d.train, model.forward(d.train, d.level), cfg.omega);
  m.val = level_loss(d.val, model.forward(d.val, d.level), cfg.omega);
  m.val_global = global_loss(model, d.level, d.finest_val, cfg.omega);
  return m;
}

HistoryRow make_row(const MrCaeModel& model, const PhaseData& d, const char* op) {
  HistoryRow row;
  row.level = d.level;
  row.phase = d.phase;
  row.op = op;
  row.params = model.count_params();
  row.encoding = model.encoding_size();
  return row;
}

void append_growth_row(const MrCaeModel& model, const PhaseData& d, const TrainConfig& cfg,
                       TrainHistory& history, const char* op, std::int64_t mask_active,
                       Clock::time_point start) {
  HistoryRow row = make_row(model, d, op);
  const Measured m = measure(model, d, cfg);
  row.train = m.train;
  row.val = m.val;
  row.val_global = m.val_global;
  row.mask_active = mask_active;
  row.wall_ms = ms_since(start);
  history.rows.push_back(std::move(row));
}

}  // namespace

void Optimizer::sync(const MrCaeModel& model) {
  states.resize(parameter_arrays(model).size());
}

void train_phase(MrCaeModel& model, const PhaseData& data, const TrainConfig& cfg,
                 TrainHistory& history, Optimizer* optimizer) {
  validate(cfg);
  if (model.levels_grown() <= data.level) {
    throw ConfigError("train_phase: model not grown to level " + std::to_string(data.level));
  }
  const std::int64_t T = data.train.snapshots();
  const bool full_batch = cfg.batch <= 0 || cfg.batch >= T;
  const std::int64_t top = model.levels_grown() - 1;

  auto refs = parameter_arrays(model);
  Optimizer local;
  Optimizer& opt = optimizer ? *optimizer : local;
  opt.sync(model);
  std::vector<AdamState>& states = opt.states;
  EarlyStop stopper;
  Rng batch_rng(derive_seed(cfg.seed, 0x6261746368ull + std::uint64_t(data.phase)));

  std::vector<std::int64_t> order(static_cast<std::size_t>(T));
  for (std::int64_t i = 0; i < T; ++i) order[std::size_t(i)] = i;

  for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto start = Clock::now();
    LossValue train_loss;
    if (full_batch) {
      ForwardTrace trace = forward_trace(model, data.train, data.level);
      // Full-batch epochs report the loss the gradient was computed at.
      train_loss = level_loss(data.train, trace.output(), cfg.omega);
      const SnapshotTensor grad = level_loss_backward(data.train, trace.output(), cfg.omega);
      const ModelGradients grads = backward(model, trace, grad);
      auto grefs = gradient_arrays(grads);
      for (std::size_t a = 0; a < refs.size(); ++a) {
        if (cfg.freeze_lower && refs[a].level != top) continue;
        adam_step(*refs[a].values, *grefs[a].values, states[a], cfg.adam);
      }
    } else {
      for (std::int64_t i = T - 1; i >= 1; --i) {
        const auto j = std::int64_t(batch_rng.below(std::uint64_t(i + 1)));
        std::swap(order[std::size_t(i)], order[std::size_t(j)]);
      }
      for (std::int64_t begin = 0; begin < T; begin += cfg.batch) {
        const std::int64_t end = std::min(begin + cfg.batch, T);
        const std::span<const std::int64_t> slice(order.data() + begin, std::size_t(end - begin));
        const SnapshotTensor batch = gather_snapshots(data.train, slice);
        ForwardTrace trace = forward_trace(model, batch, data.level);
        const SnapshotTensor grad = level_loss_backward(batch, trace.output(), cfg.omega);
        const ModelGradients grads = backward(model, trace, grad);
        auto grefs = gradient_arrays(grads);
        for (std::size_t a = 0; a < refs.size(); ++a) {
          if (cfg.freeze_lower && refs[a].level != top) continue;
          adam_step(*refs[a].values, *grefs[a].values, states[a], cfg.adam);
        }
      }
      train_loss = level_loss(data.train, model.forward(data.train, data.level), cfg.omega);
    }
    if (!std::isfinite(train_loss.total)) {
      throw TrainError("training loss became non-finite at level " + std::to_string(data.level) +
                       " phase " + std::to_string(data.phase) + " epoch " +
                       std::to_string(epoch) + "; lower the learning rate");
    }

    HistoryRow row = make_row(model, data, "epoch");
    row.epoch = epoch;
    row.train = train_loss;
    row.val = level_loss(data.val, model.forward(data.val, data.level), cfg.omega);
    row.val_global = global_loss(model, data.level, data.finest_val, cfg.omega);
    row.wall_ms = ms_since(start);
    history.rows.push_back(std::move(row));

    if (stopper.should_stop(train_loss.total)) break;
  }
}

std::pair<MrCaeModel, TrainHistory> progressive_train(const DataPyramid& pyramid,
                                                      const TrainConfig& cfg) {
  validate(cfg);
  const std::int64_t n = pyramid.n_levels();
  if (!cfg.schedule.automatic && std::int64_t(cfg.schedule.counts.size()) != n) {
    throw ConfigError("widen schedule lists " + std::to_string(cfg.schedule.counts.size()) +
                      " levels, pyramid has " + std::to_string(n));
  }
  if (!cfg.eps_per_level.empty() && std::int64_t(cfg.eps_per_level.size()) != n) {
    throw ConfigError("eps_per_level lists " + std::to_string(cfg.eps_per_level.size()) +
                      " levels, pyramid has " + std::to_string(n));
  }
  const Dims4 fd = pyramid.finest().dims();
  MrCaeModel model(fd.h, fd.w, n, cfg.activation);
  model.meta.seed = cfg.seed;
  TrainHistory history;
  Rng growth_rng(cfg.seed);

  const SnapshotTensor finest_val = gather_snapshots(pyramid.finest(), pyramid.val_idx);
  Optimizer optimizer;
  std::int64_t phase = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const SnapshotTensor level_train = gather_snapshots(pyramid.levels[std::size_t(k)],
                                                        pyramid.train_idx);
    const SnapshotTensor level_val = gather_snapshots(pyramid.levels[std::size_t(k)],
                                                      pyramid.val_idx);
    const double eps = cfg.eps_per_level.empty()
                           ? cfg.eps_tau * value_variance(pyramid.levels[std::size_t(k)])
                           : cfg.eps_per_level[std::size_t(k)];

    auto start = Clock::now();
    model.deepen(cfg.init_noise, growth_rng);
    PhaseData data{level_train, level_val, finest_val, k, phase};
    append_growth_row(model, data, cfg, history, "deepen", -1, start);
    train_phase(model, data, cfg, history, &optimizer);
    ++phase;

    std::int64_t widened = 0;
    while (true) {
      if (!cfg.schedule.automatic) {
        if (widened >= cfg.schedule.counts[std::size_t(k)]) break;
      } else if (widened >= cfg.max_groups) {
        break;
      }
      start = Clock::now();
      const SpatialMask mask = widen_mask(model, level_train, eps, cfg.dense_masks);
      if (cfg.schedule.automatic && mask.active_count() == 0) break;
      model.widen(mask, cfg.group_channels, cfg.init_noise, growth_rng);
      ++widened;
      PhaseData wdata{level_train, level_val, finest_val, k, phase};
      append_growth_row(model, wdata, cfg, history, "widen", mask.active_count(), start);
      train_phase(model, wdata, cfg, history, &optimizer);
      ++phase;
    }
  }
  return {std::move(model), std::move(history)};
}

}  // namespace mrcae
