#pragma once

#include <cstdint>
#include <vector>

#include "mrcae/rng.hpp"
#include "mrcae/tensor.hpp"

namespace mrcae {

/// Trainable 3x3 stride-2 convolution weights, layout (C_out, C_in, 3, 3)
/// plus one bias per output channel. The spatial size is fixed by the
/// architecture; only channel counts vary.
struct ConvKernel {
  std::int64_t c_out = 0;
  std::int64_t c_in = 0;
  std::vector<double> w;  // c_out * c_in * 9, row-major (o, c, u, v)
  std::vector<double> b;  // c_out

  ConvKernel() = default;
  ConvKernel(std::int64_t out_channels, std::int64_t in_channels);

  double& wat(std::int64_t o, std::int64_t c, std::int64_t u, std::int64_t v) {
    return w[std::size_t(((o * c_in + c) * 3 + u) * 3 + v)];
  }
  double wat(std::int64_t o, std::int64_t c, std::int64_t u, std::int64_t v) const {
    return w[std::size_t(((o * c_in + c) * 3 + u) * 3 + v)];
  }
};

/// Trainable 3x3 stride-2 transposed convolution, layout (C_in, C_out, 3, 3).
struct DeconvKernel {
  std::int64_t c_in = 0;
  std::int64_t c_out = 0;
  std::vector<double> w;  // c_in * c_out * 9, row-major (c, o, u, v)
  std::vector<double> b;  // c_out

  DeconvKernel() = default;
  DeconvKernel(std::int64_t in_channels, std::int64_t out_channels);

  double& wat(std::int64_t c, std::int64_t o, std::int64_t u, std::int64_t v) {
    return w[std::size_t(((c * c_out + o) * 3 + u) * 3 + v)];
  }
  double wat(std::int64_t c, std::int64_t o, std::int64_t u, std::int64_t v) const {
    return w[std::size_t(((c * c_out + o) * 3 + u) * 3 + v)];
  }
};

struct ConvGrad {
  SnapshotTensor x;       // gradient w.r.t. the input
  std::vector<double> w;  // gradient w.r.t. the weights, kernel layout
  std::vector<double> b;  // gradient w.r.t. the biases
};

/// out[t,o,i,j] = b[o] + sum_{c,u,v} w[o,c,u,v] * x[t,c,2i+u,2j+v].
/// Requires odd H,W >= 3; maps (2^p-1, 2^q-1) -> (2^{p-1}-1, 2^{q-1}-1).
SnapshotTensor conv2d_forward(const SnapshotTensor& x, const ConvKernel& k);
ConvGrad conv2d_backward(const SnapshotTensor& x, const ConvKernel& k,
                         const SnapshotTensor& grad_out);

/// out[t,o,r,s] = b[o] + sum over r=2i+u, s=2j+v of w[c,o,u,v] * x[t,c,i,j];
/// output is (2H+1, 2W+1). Adjoint of conv2d_forward's linear part.
SnapshotTensor deconv2d_forward(const SnapshotTensor& x, const DeconvKernel& k);
ConvGrad deconv2d_backward(const SnapshotTensor& x, const DeconvKernel& k,
                           const SnapshotTensor& grad_out);

/// Fixed bilinear prolongation: deconv2d_forward with the exact interpolation
/// stencil, zero bias. Single-channel only.
SnapshotTensor bilinear_upsample(const SnapshotTensor& x);

/// 3x3 windowed mean at the stride-2 window centers (2i+1, 2j+1), so the
/// output grid coincides with conv2d_forward feature positions.
ScalarField local_average_downsample(const ScalarField& f);

/// Restriction: odd-index subsampling, out[t,0,i,j] = f[t,0,2i+1,2j+1].
SnapshotTensor decimate(const SnapshotTensor& f);

SnapshotTensor relu(const SnapshotTensor& x);
SnapshotTensor relu_backward(const SnapshotTensor& x, const SnapshotTensor& grad_out);

/// The center-pick restriction stencil (single 1 at the window center) with
/// optional uniform noise on the weights; biases stay zero. Noise-free, it
/// reproduces decimate exactly.
ConvKernel center_pick_kernel(double noise_scale = 0.0, Rng* rng = nullptr);

/// The 3x3 interpolation stencil [[1/4,1/2,1/4],[1/2,1,1/2],[1/4,1/2,1/4]]
/// with optional uniform noise. Noise-free, it reproduces bilinear_upsample.
DeconvKernel bilinear_kernel(double noise_scale = 0.0, Rng* rng = nullptr);

}  // namespace mrcae
