#include "mrcae/tensor.hpp"

#include <cmath>
#include <cstdio>

namespace mrcae {

std::string Dims4::str() const {
  char buf[80];
  std::snprintf(buf, sizeof buf, "(%lld,%lld,%lld,%lld)", (long long)t, (long long)c,
                (long long)h, (long long)w);
  return buf;
}

SnapshotTensor::SnapshotTensor(std::int64_t t, std::int64_t c, std::int64_t h, std::int64_t w)
    : dims_{t, c, h, w} {
  if (t < 1 || c < 1 || h < 1 || w < 1) {
    throw ShapeError("SnapshotTensor dims must all be >= 1, got " + dims_.str());
  }
  v_.assign(std::size_t(dims_.count()), 0.0);
}

ScalarField::ScalarField(std::int64_t h, std::int64_t w) : h_(h), w_(w) {
  if (h < 1 || w < 1) throw ShapeError("ScalarField dims must be >= 1");
  v_.assign(std::size_t(h * w), 0.0);
}

void require_same_dims(const Dims4& a, const Dims4& b, const char* where) {
  if (!(a == b)) {
    throw ShapeError(std::string(where) + ": dimension mismatch " + a.str() + " vs " + b.str());
  }
}

SnapshotTensor elementwise(const SnapshotTensor& a, const SnapshotTensor& b, ElementwiseOp op) {
  require_same_dims(a.dims(), b.dims(), "elementwise");
  SnapshotTensor out(a.dims());
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  const std::int64_t n = a.size();
  switch (op) {
    case ElementwiseOp::add:
      for (std::int64_t i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
      break;
    case ElementwiseOp::sub:
      for (std::int64_t i = 0; i < n; ++i) po[i] = pa[i] - pb[i];
      break;
    case ElementwiseOp::mul:
      for (std::int64_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
      break;
  }
  return out;
}

SnapshotTensor zeros_like(const SnapshotTensor& t) { return SnapshotTensor(t.dims()); }

ScalarField reduce_time_mean_sq(const SnapshotTensor& data, const SnapshotTensor& recon) {
  require_same_dims(data.dims(), recon.dims(), "reduce_time_mean_sq");
  if (data.channels() != 1) {
    throw ShapeError("reduce_time_mean_sq expects single-channel input, got " +
                     data.dims().str());
  }
  const std::int64_t T = data.snapshots(), H = data.rows(), W = data.cols();
  ScalarField out(H, W);
  for (std::int64_t i = 0; i < H; ++i) {
    for (std::int64_t j = 0; j < W; ++j) {
      double sum = 0.0;
      for (std::int64_t t = 0; t < T; ++t) {
        const double r = data(t, 0, i, j) - recon(t, 0, i, j);
        sum += r * r;
      }
      out(i, j) = sum / double(T);
    }
  }
  return out;
}

double max_abs(const SnapshotTensor& t) {
  double m = 0.0;
  const double* p = t.data();
  for (std::int64_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

bool all_finite(const SnapshotTensor& t) {
  const double* p = t.data();
  for (std::int64_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

}  // namespace mrcae
