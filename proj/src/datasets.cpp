#include "mrcae/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mrcae/conv.hpp"
#include "mrcae/errors.hpp"
#include "mrcae/io.hpp"
#include "mrcae/model.hpp"
#include "mrcae/rng.hpp"

namespace mrcae {

namespace {

constexpr char kMagic[] = "MRCAE-DATA";  // 10 chars + NUL, 11 bytes on disk
constexpr std::uint16_t kVersion = 1;

double lerp_point(double lo, double hi, std::int64_t i, std::int64_t n) {
  if (n <= 1) return lo;
  return lo + (hi - lo) * double(i) / double(n - 1);
}

void require_grid(std::int64_t nx, std::int64_t ny, std::int64_t nt) {
  if (!is_pow2_minus1(nx) || !is_pow2_minus1(ny)) {
    throw ConfigError("generator grid dims must be of the form 2^p-1, got (" +
                      std::to_string(nx) + "," + std::to_string(ny) + ")");
  }
  if (nt < 1) throw ConfigError("generator needs nt >= 1");
}

double slow_mode(double x, double y, double sigma0) {
  return std::cosh((x + 1.0) / sigma0) * std::cosh((y - 1.0) / sigma0);
}

double bump(double x, double y, double cx, double cy, double sigma1) {
  const double dx = x - cx, dy = y - cy;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma1 * sigma1)) /
         std::sqrt(2.0 * kPi * sigma1);
}

}  // namespace

SnapshotTensor gen_two_modes(const TwoModesParams& p) {
  require_grid(p.nx, p.ny, p.nt);
  SnapshotTensor out(p.nt, 1, p.ny, p.nx);
  for (std::int64_t t = 0; t < p.nt; ++t) {
    const double tv = lerp_point(p.t_min, p.t_max, t, p.nt);
    const double slow = std::cos(p.omega0 * tv);
    const double fast = std::cos(p.omega1 * tv + kPi / 4.0);
    for (std::int64_t i = 0; i < p.ny; ++i) {
      const double y = lerp_point(p.y_min, p.y_max, i, p.ny);
      for (std::int64_t j = 0; j < p.nx; ++j) {
        const double x = lerp_point(p.x_min, p.x_max, j, p.nx);
        out(t, 0, i, j) =
            slow_mode(x, y, p.sigma0) * slow + bump(x, y, 1.0, -1.0, p.sigma1) * fast;
      }
    }
  }
  return out;
}

SnapshotTensor gen_drifting_modes(const DriftingModesParams& p) {
  require_grid(p.nx, p.ny, p.nt);
  SnapshotTensor out(p.nt, 1, p.ny, p.nx);
  for (std::int64_t t = 0; t < p.nt; ++t) {
    const double tv = lerp_point(p.t_min, p.t_max, t, p.nt);
    const double slow = std::cos(p.omega0 * tv);
    const double fast = std::cos(p.omega1 * tv + kPi / 4.0);
    const double cx = 3.0 - 0.5 * tv;
    const double cy = -3.0 + 0.5 * tv;
    for (std::int64_t i = 0; i < p.ny; ++i) {
      const double y = lerp_point(p.y_min, p.y_max, i, p.ny);
      for (std::int64_t j = 0; j < p.nx; ++j) {
        const double x = lerp_point(p.x_min, p.x_max, j, p.nx);
        out(t, 0, i, j) =
            slow_mode(x, y, p.sigma0) * slow + bump(x, y, cx, cy, p.sigma1) * fast;
      }
    }
  }
  return out;
}

DataPyramid build_pyramid(const SnapshotTensor& finest, std::int64_t n_levels,
                          std::uint64_t seed) {
  const Dims4 d = finest.dims();
  if (d.c != 1) throw ConfigError("build_pyramid expects single-channel data");
  if (!is_pow2_minus1(d.h) || !is_pow2_minus1(d.w)) {
    throw ConfigError("build_pyramid: finest dims must be 2^p-1, got " + d.str());
  }
  if (n_levels < 1 || ((d.h + 1) >> n_levels) < 2 || ((d.w + 1) >> n_levels) < 2) {
    throw ConfigError("build_pyramid: finest dims " + d.str() + " cannot support " +
                      std::to_string(n_levels) + " levels");
  }
  DataPyramid p;
  p.seed = seed;
  p.levels.resize(std::size_t(n_levels));
  p.levels[std::size_t(n_levels - 1)] = finest;
  for (std::int64_t k = n_levels - 2; k >= 0; --k) {
    p.levels[std::size_t(k)] = decimate(p.levels[std::size_t(k + 1)]);
  }
  // One Fisher-Yates shuffle drives the split; a snapshot lands in the same
  // split at every resolution.
  const std::int64_t T = d.t;
  std::vector<std::int64_t> perm(static_cast<std::size_t>(T));
  for (std::int64_t i = 0; i < T; ++i) perm[std::size_t(i)] = i;
  Rng rng(seed);
  for (std::int64_t i = T - 1; i >= 1; --i) {
    const auto j = std::int64_t(rng.below(std::uint64_t(i + 1)));
    std::swap(perm[std::size_t(i)], perm[std::size_t(j)]);
  }
  const std::int64_t n_train = std::int64_t(0.7 * double(T));
  const std::int64_t n_val = std::int64_t(0.2 * double(T));
  p.train_idx.assign(perm.begin(), perm.begin() + n_train);
  p.val_idx.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  p.test_idx.assign(perm.begin() + n_train + n_val, perm.end());
  return p;
}

SnapshotTensor gather_snapshots(const SnapshotTensor& t, std::span<const std::int64_t> idx) {
  if (idx.empty()) throw ConfigError("gather_snapshots: empty index list");
  const Dims4 d = t.dims();
  SnapshotTensor out(std::int64_t(idx.size()), d.c, d.h, d.w);
  const std::int64_t stride = d.c * d.h * d.w;
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const std::int64_t s = idx[n];
    if (s < 0 || s >= d.t) throw ConfigError("gather_snapshots: index out of range");
    std::memcpy(out.data() + std::int64_t(n) * stride, t.data() + s * stride,
                std::size_t(stride) * sizeof(double));
  }
  return out;
}

void write_data(const SnapshotTensor& t, const std::string& path) {
  if (t.channels() != 1) throw ConfigError("data files hold single-channel stacks");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(std::size_t(t.size()) * 8 + 32);
  bytes.insert(bytes.end(), kMagic, kMagic + 10);
  bytes.push_back(0);
  io::put_u16(bytes, kVersion);
  io::put_u32(bytes, std::uint32_t(t.snapshots()));
  io::put_u32(bytes, std::uint32_t(t.rows()));
  io::put_u32(bytes, std::uint32_t(t.cols()));
  const double* p = t.data();
  for (std::int64_t i = 0; i < t.size(); ++i) io::put_f64(bytes, p[i]);
  io::put_u32(bytes, io::crc32(bytes.data(), bytes.size()));
  io::write_file(path, bytes);
}

SnapshotTensor read_data(const std::string& path) {
  const auto bytes = io::read_file(path);
  if (bytes.size() < 11 + 2 + 12 + 4) throw TruncatedError("data file too short: " + path);
  if (std::memcmp(bytes.data(), kMagic, 10) != 0 || bytes[10] != 0) {
    throw FormatError("not a data file (bad magic): " + path);
  }
  io::ByteReader r(bytes);
  r.raw(11);
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw VersionError("unsupported data file version " + std::to_string(version));
  }
  const std::uint32_t T = r.u32(), H = r.u32(), W = r.u32();
  if (T < 1 || H < 1 || W < 1) throw FormatError("data file header has zero dims");
  const std::uint64_t count = std::uint64_t(T) * H * W;
  if (count > (bytes.size() - r.pos()) / 8) {
    throw TruncatedError("data file payload exceeds file size");
  }
  if (r.pos() + count * 8 + 4 != bytes.size()) {
    throw FormatError("data file header dims inconsistent with payload length");
  }
  const std::uint32_t want = io::crc32(bytes.data(), bytes.size() - 4);
  std::uint32_t got = 0;
  for (int i = 0; i < 4; ++i) got |= std::uint32_t(bytes[bytes.size() - 4 + i]) << (8 * i);
  if (want != got) throw ChecksumError("data file checksum mismatch: " + path);
  SnapshotTensor out(std::int64_t(T), 1, std::int64_t(H), std::int64_t(W));
  double* p = out.data();
  for (std::uint64_t i = 0; i < count; ++i) p[i] = r.f64();
  return out;
}

SnapshotTensor resize_bilinear(const SnapshotTensor& t, std::int64_t new_h, std::int64_t new_w) {
  const Dims4 d = t.dims();
  if (new_h < 1 || new_w < 1) throw ConfigError("resize_bilinear: target dims must be >= 1");
  SnapshotTensor out(d.t, d.c, new_h, new_w);
  for (std::int64_t tt = 0; tt < d.t; ++tt) {
    for (std::int64_t c = 0; c < d.c; ++c) {
      for (std::int64_t i = 0; i < new_h; ++i) {
        const double fi = new_h == 1 ? 0.0 : double(i) * double(d.h - 1) / double(new_h - 1);
        const auto i0 = std::int64_t(fi);
        const std::int64_t i1 = std::min(i0 + 1, d.h - 1);
        const double ai = fi - double(i0);
        for (std::int64_t j = 0; j < new_w; ++j) {
          const double fj = new_w == 1 ? 0.0 : double(j) * double(d.w - 1) / double(new_w - 1);
          const auto j0 = std::int64_t(fj);
          const std::int64_t j1 = std::min(j0 + 1, d.w - 1);
          const double aj = fj - double(j0);
          out(tt, c, i, j) = (1.0 - ai) * ((1.0 - aj) * t(tt, c, i0, j0) + aj * t(tt, c, i0, j1)) +
                             ai * ((1.0 - aj) * t(tt, c, i1, j0) + aj * t(tt, c, i1, j1));
        }
      }
    }
  }
  return out;
}

}  // namespace mrcae
