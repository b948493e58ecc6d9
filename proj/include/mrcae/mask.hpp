#pragma once

#include <cstdint>
#include <vector>

#include "mrcae/tensor.hpp"

namespace mrcae {

/// Binary field at the coarse (feature) resolution marking where a widening
/// group is active. Immutable once computed; it defines the sparse encoding
/// layout, so it persists into checkpoints.
class SpatialMask {
 public:
  SpatialMask() = default;
  SpatialMask(std::int64_t h, std::int64_t w);

  static SpatialMask ones(std::int64_t h, std::int64_t w);

  std::int64_t rows() const { return h_; }
  std::int64_t cols() const { return w_; }
  bool at(std::int64_t i, std::int64_t j) const { return on_[std::size_t(i * w_ + j)] != 0; }
  void set(std::int64_t i, std::int64_t j, bool v) { on_[std::size_t(i * w_ + j)] = v ? 1 : 0; }

  std::int64_t active_count() const;

  /// Run lengths of alternating 0/1 spans in row-major order, starting with
  /// the zero span (possibly length 0). Used by the checkpoint format.
  std::vector<std::uint32_t> run_lengths() const;
  static SpatialMask from_run_lengths(std::int64_t h, std::int64_t w,
                                      const std::vector<std::uint32_t>& runs);

  bool operator==(const SpatialMask&) const = default;

 private:
  std::int64_t h_ = 0;
  std::int64_t w_ = 0;
  std::vector<std::uint8_t> on_;
};

/// Threshold rule: per-pixel time-mean squared residual, locally averaged
/// down to the feature grid, then marked active where >= eps.
SpatialMask compute_mask(const SnapshotTensor& data, const SnapshotTensor& recon, double eps);

/// Pointwise gating, mask broadcast over snapshots and channels. Inactive
/// positions are written as exact +0.0.
SnapshotTensor apply_mask(const SnapshotTensor& features, const SpatialMask& mask);

}  // namespace mrcae
