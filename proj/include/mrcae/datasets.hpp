#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrcae/tensor.hpp"

namespace mrcae {

inline constexpr double kPi = 3.14159265358979323846;

/// Two stationary spatial modes driven by slow/fast cosines. Rows sample the
/// y axis, columns the x axis; grids and times are inclusive linspaces.
struct TwoModesParams {
  std::int64_t nx = 127;
  std::int64_t ny = 127;
  std::int64_t nt = 500;
  double omega0 = 0.5;
  double omega1 = 4.0;
  double sigma0 = 10.0;
  double sigma1 = 0.25;
  double x_min = -5.0, x_max = 5.0;
  double y_min = -5.0, y_max = 5.0;
  double t_min = 0.0, t_max = 8.0 * kPi;
};

/// Same construction with the narrow mode's center drifting along the
/// diagonal, (3 - t/2, -3 + t/2).
struct DriftingModesParams {
  std::int64_t nx = 127;
  std::int64_t ny = 127;
  std::int64_t nt = 500;
  double omega0 = 0.5;
  double omega1 = 4.0;
  double sigma0 = 10.0;
  double sigma1 = 0.25;
  double v = 1.0;  // accepted and recorded in provenance; the field formula does not use it
  double x_min = -5.0, x_max = 5.0;
  double y_min = -5.0, y_max = 5.0;
  double t_min = 0.0, t_max = 4.0 * kPi;
};

SnapshotTensor gen_two_modes(const TwoModesParams& p);
SnapshotTensor gen_drifting_modes(const DriftingModesParams& p);

/// The resolution hierarchy: levels[0] coarsest, levels[n-1] == finest, with
/// levels[k-1] == decimate(levels[k]) exactly. One shuffled 70/20/10 split is
/// shared across all levels.
struct DataPyramid {
  std::vector<SnapshotTensor> levels;
  std::vector<std::int64_t> train_idx;
  std::vector<std::int64_t> val_idx;
  std::vector<std::int64_t> test_idx;
  std::uint64_t seed = 0;
  std::string provenance;

  std::int64_t n_levels() const { return std::int64_t(levels.size()); }
  const SnapshotTensor& finest() const { return levels.back(); }
};

DataPyramid build_pyramid(const SnapshotTensor& finest, std::int64_t n_levels,
                          std::uint64_t seed);

/// Copies the listed snapshots into a new tensor, preserving order.
SnapshotTensor gather_snapshots(const SnapshotTensor& t, std::span<const std::int64_t> idx);

/// Single-channel snapshot stacks on disk: magic, version, dims, row-major
/// float64 payload, trailing CRC32.
void write_data(const SnapshotTensor& t, const std::string& path);
SnapshotTensor read_data(const std::string& path);

/// Approximate bilinear resize for ingesting externally sized data; not part
/// of the reconstruction pipeline.
SnapshotTensor resize_bilinear(const SnapshotTensor& t, std::int64_t new_h, std::int64_t new_w);

}  // namespace mrcae
