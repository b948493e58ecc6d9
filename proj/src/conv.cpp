#include "mrcae/conv.hpp"

#include <cmath>

namespace mrcae {

namespace {

void require_conv_input(const Dims4& d, const char* where) {
  if (d.h < 3 || d.w < 3 || d.h % 2 == 0 || d.w % 2 == 0) {
    throw ShapeError(std::string(where) + ": spatial dims must be odd and >= 3, got " + d.str());
  }
}

constexpr double kBilinearStencil[9] = {0.25, 0.5, 0.25, 0.5, 1.0, 0.5, 0.25, 0.5, 0.25};

}  // namespace

ConvKernel::ConvKernel(std::int64_t out_channels, std::int64_t in_channels)
    : c_out(out_channels), c_in(in_channels) {
  if (c_out < 1 || c_in < 1) throw ShapeError("ConvKernel channel counts must be >= 1");
  w.assign(std::size_t(c_out * c_in * 9), 0.0);
  b.assign(std::size_t(c_out), 0.0);
}

DeconvKernel::DeconvKernel(std::int64_t in_channels, std::int64_t out_channels)
    : c_in(in_channels), c_out(out_channels) {
  if (c_out < 1 || c_in < 1) throw ShapeError("DeconvKernel channel counts must be >= 1");
  w.assign(std::size_t(c_in * c_out * 9), 0.0);
  b.assign(std::size_t(c_out), 0.0);
}

SnapshotTensor conv2d_forward(const SnapshotTensor& x, const ConvKernel& k) {
  const Dims4 d = x.dims();
  require_conv_input(d, "conv2d_forward");
  if (d.c != k.c_in) {
    throw ShapeError("conv2d_forward: input has " + std::to_string(d.c) +
                     " channels, kernel expects " + std::to_string(k.c_in));
  }
  const std::int64_t Ho = (d.h - 3) / 2 + 1, Wo = (d.w - 3) / 2 + 1;
  SnapshotTensor out(d.t, k.c_out, Ho, Wo);
  for (std::int64_t t = 0; t < d.t; ++t) {
    for (std::int64_t o = 0; o < k.c_out; ++o) {
      const double bias = k.b[std::size_t(o)];
      for (std::int64_t i = 0; i < Ho; ++i) {
        for (std::int64_t j = 0; j < Wo; ++j) {
          double acc = bias;
          for (std::int64_t c = 0; c < k.c_in; ++c) {
            const double* wk = &k.w[std::size_t((o * k.c_in + c) * 9)];
            const double* row0 = &x(t, c, 2 * i, 2 * j);
            const double* row1 = row0 + d.w;
            const double* row2 = row1 + d.w;
            acc += wk[0] * row0[0] + wk[1] * row0[1] + wk[2] * row0[2] +
                   wk[3] * row1[0] + wk[4] * row1[1] + wk[5] * row1[2] +
                   wk[6] * row2[0] + wk[7] * row2[1] + wk[8] * row2[2];
          }
          out(t, o, i, j) = acc;
        }
      }
    }
  }
  return out;
}

ConvGrad conv2d_backward(const SnapshotTensor& x, const ConvKernel& k,
                         const SnapshotTensor& grad_out) {
  const Dims4 d = x.dims();
  require_conv_input(d, "conv2d_backward");
  const std::int64_t Ho = (d.h - 3) / 2 + 1, Wo = (d.w - 3) / 2 + 1;
  const Dims4 expect{d.t, k.c_out, Ho, Wo};
  require_same_dims(grad_out.dims(), expect, "conv2d_backward(grad_out)");
  ConvGrad g;
  g.x = SnapshotTensor(d);
  g.w.assign(k.w.size(), 0.0);
  g.b.assign(k.b.size(), 0.0);
  for (std::int64_t t = 0; t < d.t; ++t) {
    for (std::int64_t o = 0; o < k.c_out; ++o) {
      for (std::int64_t i = 0; i < Ho; ++i) {
        for (std::int64_t j = 0; j < Wo; ++j) {
          const double go = grad_out(t, o, i, j);
          g.b[std::size_t(o)] += go;
          for (std::int64_t c = 0; c < k.c_in; ++c) {
            const double* wk = &k.w[std::size_t((o * k.c_in + c) * 9)];
            double* gw = &g.w[std::size_t((o * k.c_in + c) * 9)];
            for (std::int64_t u = 0; u < 3; ++u) {
              const double* xr = &x(t, c, 2 * i + u, 2 * j);
              double* gxr = &g.x(t, c, 2 * i + u, 2 * j);
              for (std::int64_t v = 0; v < 3; ++v) {
                gw[3 * u + v] += go * xr[v];
                gxr[v] += wk[3 * u + v] * go;
              }
            }
          }
        }
      }
    }
  }
  return g;
}

SnapshotTensor deconv2d_forward(const SnapshotTensor& x, const DeconvKernel& k) {
  const Dims4 d = x.dims();
  if (d.c != k.c_in) {
    throw ShapeError("deconv2d_forward: input has " + std::to_string(d.c) +
                     " channels, kernel expects " + std::to_string(k.c_in));
  }
  const std::int64_t Ho = 2 * d.h + 1, Wo = 2 * d.w + 1;
  SnapshotTensor out(d.t, k.c_out, Ho, Wo);
  for (std::int64_t t = 0; t < d.t; ++t) {
    for (std::int64_t o = 0; o < k.c_out; ++o) {
      const double bias = k.b[std::size_t(o)];
      double* po = &out(t, o, 0, 0);
      for (std::int64_t n = 0; n < Ho * Wo; ++n) po[n] = bias;
    }
    for (std::int64_t c = 0; c < k.c_in; ++c) {
      for (std::int64_t i = 0; i < d.h; ++i) {
        for (std::int64_t j = 0; j < d.w; ++j) {
          const double xv = x(t, c, i, j);
          for (std::int64_t o = 0; o < k.c_out; ++o) {
            const double* wk = &k.w[std::size_t((c * k.c_out + o) * 9)];
            for (std::int64_t u = 0; u < 3; ++u) {
              double* orow = &out(t, o, 2 * i + u, 2 * j);
              orow[0] += wk[3 * u] * xv;
              orow[1] += wk[3 * u + 1] * xv;
              orow[2] += wk[3 * u + 2] * xv;
            }
          }
        }
      }
    }
  }
  return out;
}

ConvGrad deconv2d_backward(const SnapshotTensor& x, const DeconvKernel& k,
                           const SnapshotTensor& grad_out) {
  const Dims4 d = x.dims();
  const Dims4 expect{d.t, k.c_out, 2 * d.h + 1, 2 * d.w + 1};
  require_same_dims(grad_out.dims(), expect, "deconv2d_backward(grad_out)");
  ConvGrad g;
  g.x = SnapshotTensor(d);
  g.w.assign(k.w.size(), 0.0);
  g.b.assign(k.b.size(), 0.0);
  for (std::int64_t t = 0; t < d.t; ++t) {
    for (std::int64_t o = 0; o < k.c_out; ++o) {
      const double* po = &grad_out(t, o, 0, 0);
      double acc = 0.0;
      for (std::int64_t n = 0; n < expect.h * expect.w; ++n) acc += po[n];
      g.b[std::size_t(o)] += acc;
    }
    for (std::int64_t c = 0; c < k.c_in; ++c) {
      for (std::int64_t i = 0; i < d.h; ++i) {
        for (std::int64_t j = 0; j < d.w; ++j) {
          const double xv = x(t, c, i, j);
          double gx = 0.0;
          for (std::int64_t o = 0; o < k.c_out; ++o) {
            const double* wk = &k.w[std::size_t((c * k.c_out + o) * 9)];
            double* gw = &g.w[std::size_t((c * k.c_out + o) * 9)];
            for (std::int64_t u = 0; u < 3; ++u) {
              const double* grow = &grad_out(t, o, 2 * i + u, 2 * j);
              for (std::int64_t v = 0; v < 3; ++v) {
                gx += wk[3 * u + v] * grow[v];
                gw[3 * u + v] += xv * grow[v];
              }
            }
          }
          g.x(t, c, i, j) = g.x(t, c, i, j) + gx;
        }
      }
    }
  }
  return g;
}

SnapshotTensor bilinear_upsample(const SnapshotTensor& x) {
  if (x.channels() != 1) {
    throw ShapeError("bilinear_upsample expects single-channel input, got " + x.dims().str());
  }
  static const DeconvKernel stencil = bilinear_kernel();
  return deconv2d_forward(x, stencil);
}

ScalarField local_average_downsample(const ScalarField& f) {
  const std::int64_t H = f.rows(), W = f.cols();
  if (H < 3 || W < 3 || H % 2 == 0 || W % 2 == 0) {
    throw ShapeError("local_average_downsample: dims must be odd and >= 3");
  }
  const std::int64_t Ho = (H - 1) / 2, Wo = (W - 1) / 2;
  ScalarField out(Ho, Wo);
  for (std::int64_t i = 0; i < Ho; ++i) {
    for (std::int64_t j = 0; j < Wo; ++j) {
      double sum = 0.0;
      for (std::int64_t u = 0; u < 3; ++u) {
        for (std::int64_t v = 0; v < 3; ++v) {
          sum += f(2 * i + u, 2 * j + v);
        }
      }
      out(i, j) = sum / 9.0;
    }
  }
  return out;
}

SnapshotTensor decimate(const SnapshotTensor& f) {
  const Dims4 d = f.dims();
  if (d.c != 1) throw ShapeError("decimate expects single-channel input, got " + d.str());
  require_conv_input(d, "decimate");
  const std::int64_t Ho = (d.h - 1) / 2, Wo = (d.w - 1) / 2;
  SnapshotTensor out(d.t, 1, Ho, Wo);
  for (std::int64_t t = 0; t < d.t; ++t) {
    for (std::int64_t i = 0; i < Ho; ++i) {
      for (std::int64_t j = 0; j < Wo; ++j) {
        out(t, 0, i, j) = f(t, 0, 2 * i + 1, 2 * j + 1);
      }
    }
  }
  return out;
}

SnapshotTensor relu(const SnapshotTensor& x) {
  SnapshotTensor out(x.dims());
  const double* px = x.data();
  double* po = out.data();
  for (std::int64_t i = 0; i < x.size(); ++i) po[i] = px[i] > 0.0 ? px[i] : 0.0;
  return out;
}

SnapshotTensor relu_backward(const SnapshotTensor& x, const SnapshotTensor& grad_out) {
  require_same_dims(x.dims(), grad_out.dims(), "relu_backward");
  SnapshotTensor out(x.dims());
  const double* px = x.data();
  const double* pg = grad_out.data();
  double* po = out.data();
  for (std::int64_t i = 0; i < x.size(); ++i) po[i] = px[i] > 0.0 ? pg[i] : 0.0;
  return out;
}

ConvKernel center_pick_kernel(double noise_scale, Rng* rng) {
  ConvKernel k(1, 1);
  k.w[4] = 1.0;
  if (noise_scale > 0.0 && rng != nullptr) {
    for (auto& v : k.w) v += rng->uniform(-noise_scale, noise_scale);
  }
  return k;
}

DeconvKernel bilinear_kernel(double noise_scale, Rng* rng) {
  DeconvKernel k(1, 1);
  for (int i = 0; i < 9; ++i) k.w[std::size_t(i)] = kBilinearStencil[i];
  if (noise_scale > 0.0 && rng != nullptr) {
    for (auto& v : k.w) v += rng->uniform(-noise_scale, noise_scale);
  }
  return k;
}

}  // namespace mrcae
