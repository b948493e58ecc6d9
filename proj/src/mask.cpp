#include "mrcae/mask.hpp"

#include "mrcae/conv.hpp"
#include "mrcae/errors.hpp"

namespace mrcae {

SpatialMask::SpatialMask(std::int64_t h, std::int64_t w) : h_(h), w_(w) {
  if (h < 1 || w < 1) throw ShapeError("SpatialMask dims must be >= 1");
  on_.assign(std::size_t(h * w), 0);
}

SpatialMask SpatialMask::ones(std::int64_t h, std::int64_t w) {
  SpatialMask m(h, w);
  for (auto& v : m.on_) v = 1;
  return m;
}

std::int64_t SpatialMask::active_count() const {
  std::int64_t n = 0;
  for (auto v : on_) n += v;
  return n;
}

std::vector<std::uint32_t> SpatialMask::run_lengths() const {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t len = 0;
  for (auto v : on_) {
    if (v == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = v;
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

SpatialMask SpatialMask::from_run_lengths(std::int64_t h, std::int64_t w,
                                          const std::vector<std::uint32_t>& runs) {
  SpatialMask m(h, w);
  std::size_t pos = 0;
  std::uint8_t current = 0;
  for (auto len : runs) {
    if (pos + len > m.on_.size()) throw FormatError("mask run lengths exceed mask size");
    for (std::uint32_t i = 0; i < len; ++i) m.on_[pos++] = current;
    current = current ? 0 : 1;
  }
  if (pos != m.on_.size()) throw FormatError("mask run lengths do not cover mask");
  return m;
}

SpatialMask compute_mask(const SnapshotTensor& data, const SnapshotTensor& recon, double eps) {
  if (eps < 0.0) throw ConfigError("mask tolerance must be >= 0");
  const ScalarField residual = reduce_time_mean_sq(data, recon);
  const ScalarField averaged = local_average_downsample(residual);
  SpatialMask mask(averaged.rows(), averaged.cols());
  for (std::int64_t i = 0; i < averaged.rows(); ++i) {
    for (std::int64_t j = 0; j < averaged.cols(); ++j) {
      mask.set(i, j, averaged(i, j) >= eps);
    }
  }
  return mask;
}

SnapshotTensor apply_mask(const SnapshotTensor& features, const SpatialMask& mask) {
  const Dims4 d = features.dims();
  if (d.h != mask.rows() || d.w != mask.cols()) {
    throw ShapeError("apply_mask: features " + d.str() + " vs mask (" +
                     std::to_string(mask.rows()) + "," + std::to_string(mask.cols()) + ")");
  }
  SnapshotTensor out(d);
  for (std::int64_t t = 0; t < d.t; ++t) {
    for (std::int64_t c = 0; c < d.c; ++c) {
      for (std::int64_t i = 0; i < d.h; ++i) {
        for (std::int64_t j = 0; j < d.w; ++j) {
          out(t, c, i, j) = mask.at(i, j) ? features(t, c, i, j) : 0.0;
        }
      }
    }
  }
  return out;
}

}  // namespace mrcae
