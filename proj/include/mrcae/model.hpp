#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrcae/conv.hpp"
#include "mrcae/mask.hpp"
#include "mrcae/rng.hpp"
#include "mrcae/tensor.hpp"

namespace mrcae {

enum class Activation { linear, relu };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// One masked widening pathway: a 1->g conv to the coarse grid, the frozen
/// spatial mask, the (model-wide) optional activation, and a g->1 deconv
/// back to level resolution. Pathways are independent of one another.
struct WideningGroup {
  ConvKernel conv;      // 1 -> g
  DeconvKernel deconv;  // g -> 1
  SpatialMask mask;

  std::int64_t channels() const { return conv.c_out; }
};

/// One rung of the hierarchy: the deepening conv/deconv pair wrapping the
/// coarser network, plus this level's widening groups in creation order.
struct LevelBlock {
  ConvKernel deepen_conv;      // 1 -> 1
  DeconvKernel deepen_deconv;  // 1 -> 1
  std::vector<WideningGroup> groups;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
};

/// Sparse latent representation: the innermost field produced by the
/// composed deepening convs, plus each group's masked features restricted to
/// active mask positions. Values are ordered snapshot-major, then channel,
/// then active position in mask row-major order.
struct Encoding {
  struct GroupCode {
    std::int64_t level = 0;
    std::int64_t group = 0;
    std::int64_t channels = 0;
    std::int64_t active = 0;
    std::vector<double> values;  // T * channels * active
  };
  std::int64_t level = 0;  // level the input lived at
  SnapshotTensor innermost;
  std::vector<GroupCode> groups;

  /// Stored values per snapshot (innermost pixels + masked features).
  std::int64_t size_per_snapshot() const;
};

struct ModelMeta {
  std::string config_json;  // resolved run configuration, embedded verbatim
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// The progressively grown multi-resolution autoencoder. Level 0 is the
/// coarsest; growth appends levels (deepen) and pathways (widen) without
/// ever touching existing weights.
class MrCaeModel {
 public:
  MrCaeModel(std::int64_t finest_rows, std::int64_t finest_cols, std::int64_t n_levels,
             Activation activation = Activation::linear);

  // growth
  void deepen(double init_noise, Rng& rng);
  void widen(const SpatialMask& mask, std::int64_t channels, double init_noise, Rng& rng);

  // inference
  SnapshotTensor forward(const SnapshotTensor& x, std::int64_t level) const;
  Encoding encode(const SnapshotTensor& x) const;
  SnapshotTensor decode(const Encoding& e) const;

  // accounting
  std::int64_t count_params() const;
  std::int64_t encoding_size() const;

  // structure
  std::int64_t n_levels() const { return n_levels_; }
  std::int64_t levels_grown() const { return std::int64_t(levels_.size()); }
  std::int64_t finest_rows() const { return finest_rows_; }
  std::int64_t finest_cols() const { return finest_cols_; }
  Activation activation() const { return activation_; }
  const LevelBlock& level(std::int64_t k) const { return levels_[std::size_t(k)]; }
  LevelBlock& level(std::int64_t k) { return levels_[std::size_t(k)]; }

  /// Spatial dims at level k; k = -1 addresses the innermost grid one
  /// halving below the coarsest level.
  std::int64_t level_rows(std::int64_t k) const;
  std::int64_t level_cols(std::int64_t k) const;

  // persistence
  void save_checkpoint(const std::string& path) const;
  static MrCaeModel load_checkpoint(const std::string& path);

  ModelMeta meta;

 private:
  std::int64_t finest_rows_ = 0;
  std::int64_t finest_cols_ = 0;
  std::int64_t n_levels_ = 0;
  Activation activation_ = Activation::linear;
  std::vector<LevelBlock> levels_;
};

// ---------------------------------------------------------------------------
// Training support: forward pass with recorded intermediates and the exact
// reverse-mode gradients of every trainable array.

struct KernelGrads {
  std::vector<double> w;
  std::vector<double> b;
};

struct GroupGrads {
  KernelGrads conv;
  KernelGrads deconv;
};

struct LevelGrads {
  KernelGrads deepen_conv;
  KernelGrads deepen_deconv;
  std::vector<GroupGrads> groups;
};

struct ModelGradients {
  std::vector<LevelGrads> levels;
};

struct GroupTrace {
  SnapshotTensor masked;     // after the mask, before activation
  SnapshotTensor activated;  // only populated for relu models
};

struct ForwardTrace {
  std::int64_t level = 0;
  // x[m+1] is the representation entering level m (x[0] the innermost);
  // y[m+1] is the reconstruction leaving level m (y[0] == x[0]).
  std::vector<SnapshotTensor> x;
  std::vector<SnapshotTensor> y;
  std::vector<std::vector<GroupTrace>> groups;  // [level][group]

  const SnapshotTensor& output() const { return y.back(); }
};

ForwardTrace forward_trace(const MrCaeModel& model, const SnapshotTensor& x, std::int64_t level);
ModelGradients backward(const MrCaeModel& model, const ForwardTrace& trace,
                        const SnapshotTensor& grad_out);

/// Deterministic walk over every trainable array, tagged with its level.
/// Checkpoint blobs, the optimizer, and the growth-invariance tests all use
/// this one ordering.
struct ParamRef {
  std::int64_t level = 0;
  std::vector<double>* values = nullptr;
};

struct ConstParamRef {
  std::int64_t level = 0;
  const std::vector<double>* values = nullptr;
};

std::vector<ParamRef> parameter_arrays(MrCaeModel& model);
std::vector<ConstParamRef> parameter_arrays(const MrCaeModel& model);
std::vector<ConstParamRef> gradient_arrays(const ModelGradients& grads);

bool is_pow2_minus1(std::int64_t n);

}  // namespace mrcae
