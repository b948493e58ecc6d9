#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "mrcae/conv.hpp"
#include "mrcae/rng.hpp"
#include "mrcae/tensor.hpp"

namespace testutil {

using mrcae::ConvKernel;
using mrcae::DeconvKernel;
using mrcae::Rng;
using mrcae::SnapshotTensor;

inline SnapshotTensor random_tensor(std::int64_t t, std::int64_t c, std::int64_t h,
                                    std::int64_t w, Rng& rng, double lo = -1.0,
                                    double hi = 1.0) {
  SnapshotTensor out(t, c, h, w);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = rng.uniform(lo, hi);
  return out;
}

inline void randomize_kernel(ConvKernel& k, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& v : k.w) v = rng.uniform(lo, hi);
  for (auto& v : k.b) v = rng.uniform(lo, hi);
}

inline void randomize_kernel(DeconvKernel& k, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& v : k.w) v = rng.uniform(lo, hi);
  for (auto& v : k.b) v = rng.uniform(lo, hi);
}

inline double inner(const SnapshotTensor& a, const SnapshotTensor& b) {
  double s = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double rel_err(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1.0});
  return std::abs(analytic - numeric) / scale;
}

inline bool bitwise_equal(const SnapshotTensor& a, const SnapshotTensor& b) {
  if (!(a.dims() == b.dims())) return false;
  return std::memcmp(a.data(), b.data(), std::size_t(a.size()) * sizeof(double)) == 0;
}

// --- independent straight-line reference operators (test-only oracles) ----

inline SnapshotTensor naive_conv(const SnapshotTensor& x, const ConvKernel& k) {
  const auto d = x.dims();
  const std::int64_t ho = (d.h - 3) / 2 + 1, wo = (d.w - 3) / 2 + 1;
  SnapshotTensor out(d.t, k.c_out, ho, wo);
  for (std::int64_t t = 0; t < d.t; ++t)
    for (std::int64_t o = 0; o < k.c_out; ++o)
      for (std::int64_t i = 0; i < ho; ++i)
        for (std::int64_t j = 0; j < wo; ++j) {
          double acc = k.b[std::size_t(o)];
          for (std::int64_t c = 0; c < k.c_in; ++c)
            for (std::int64_t u = 0; u < 3; ++u)
              for (std::int64_t v = 0; v < 3; ++v)
                acc += k.wat(o, c, u, v) * x(t, c, 2 * i + u, 2 * j + v);
          out(t, o, i, j) = acc;
        }
  return out;
}

inline SnapshotTensor naive_deconv(const SnapshotTensor& x, const DeconvKernel& k) {
  const auto d = x.dims();
  SnapshotTensor out(d.t, k.c_out, 2 * d.h + 1, 2 * d.w + 1);
  for (std::int64_t t = 0; t < d.t; ++t)
    for (std::int64_t o = 0; o < k.c_out; ++o)
      for (std::int64_t r = 0; r < 2 * d.h + 1; ++r)
        for (std::int64_t s = 0; s < 2 * d.w + 1; ++s) {
          double acc = k.b[std::size_t(o)];
          for (std::int64_t c = 0; c < k.c_in; ++c)
            for (std::int64_t u = 0; u < 3; ++u)
              for (std::int64_t v = 0; v < 3; ++v) {
                const std::int64_t i2 = r - u, j2 = s - v;
                if (i2 < 0 || j2 < 0 || i2 % 2 != 0 || j2 % 2 != 0) continue;
                const std::int64_t i = i2 / 2, j = j2 / 2;
                if (i >= d.h || j >= d.w) continue;
                acc += k.wat(c, o, u, v) * x(t, c, i, j);
              }
          out(t, o, r, s) = acc;
        }
  return out;
}

}  // namespace testutil
