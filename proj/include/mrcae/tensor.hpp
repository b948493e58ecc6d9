#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrcae/errors.hpp"

namespace mrcae {

struct Dims4 {
  std::int64_t t = 0;  // snapshot count
  std::int64_t c = 0;  // channel count
  std::int64_t h = 0;  // rows
  std::int64_t w = 0;  // cols
  bool operator==(const Dims4&) const = default;
  std::int64_t count() const { return t * c * h * w; }
  std::string str() const;
};

/// Row-major flat index of (t,c,i,j): ((t*C + c)*H + i)*W + j.
inline std::int64_t flat_index(const Dims4& d, std::int64_t t, std::int64_t c,
                               std::int64_t i, std::int64_t j) {
  return ((t * d.c + c) * d.h + i) * d.w + j;
}

struct Index4 {
  std::int64_t t, c, i, j;
  bool operator==(const Index4&) const = default;
};

inline Index4 unflat_index(const Dims4& d, std::int64_t flat) {
  Index4 ix{};
  ix.j = flat % d.w;
  flat /= d.w;
  ix.i = flat % d.h;
  flat /= d.h;
  ix.c = flat % d.c;
  ix.t = flat / d.c;
  return ix;
}

/// A stack of T snapshots of C channels of H x W doubles, row-major with the
/// column axis fastest. The unit of training data at one resolution level.
class SnapshotTensor {
 public:
  SnapshotTensor() = default;
  SnapshotTensor(std::int64_t t, std::int64_t c, std::int64_t h, std::int64_t w);
  explicit SnapshotTensor(const Dims4& d) : SnapshotTensor(d.t, d.c, d.h, d.w) {}

  const Dims4& dims() const { return dims_; }
  std::int64_t snapshots() const { return dims_.t; }
  std::int64_t channels() const { return dims_.c; }
  std::int64_t rows() const { return dims_.h; }
  std::int64_t cols() const { return dims_.w; }
  std::int64_t size() const { return std::int64_t(v_.size()); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  double& operator()(std::int64_t t, std::int64_t c, std::int64_t i, std::int64_t j) {
    return v_[std::size_t(flat_index(dims_, t, c, i, j))];
  }
  const double& operator()(std::int64_t t, std::int64_t c, std::int64_t i, std::int64_t j) const {
    return v_[std::size_t(flat_index(dims_, t, c, i, j))];
  }
  double& operator[](std::int64_t flat) { return v_[std::size_t(flat)]; }
  double operator[](std::int64_t flat) const { return v_[std::size_t(flat)]; }

  bool operator==(const SnapshotTensor& o) const = default;

 private:
  Dims4 dims_{};
  std::vector<double> v_;
};

/// A single H x W field of doubles (per-pixel residual maps, pre-threshold
/// mask statistics).
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::int64_t h, std::int64_t w);

  std::int64_t rows() const { return h_; }
  std::int64_t cols() const { return w_; }
  std::int64_t size() const { return std::int64_t(v_.size()); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  double& operator()(std::int64_t i, std::int64_t j) { return v_[std::size_t(i * w_ + j)]; }
  double operator()(std::int64_t i, std::int64_t j) const { return v_[std::size_t(i * w_ + j)]; }

  bool operator==(const ScalarField& o) const = default;

 private:
  std::int64_t h_ = 0;
  std::int64_t w_ = 0;
  std::vector<double> v_;
};

enum class ElementwiseOp { add, sub, mul };

SnapshotTensor elementwise(const SnapshotTensor& a, const SnapshotTensor& b, ElementwiseOp op);

SnapshotTensor zeros_like(const SnapshotTensor& t);

/// Per-pixel mean squared residual along the time axis:
/// out[i,j] = (sum_t (data - recon)^2) / T. Inputs must be single-channel.
ScalarField reduce_time_mean_sq(const SnapshotTensor& data, const SnapshotTensor& recon);

void require_same_dims(const Dims4& a, const Dims4& b, const char* where);

double max_abs(const SnapshotTensor& t);
bool all_finite(const SnapshotTensor& t);

}  // namespace mrcae
