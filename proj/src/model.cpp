#include "mrcae/model.hpp"

#include <json.hpp>

#include "mrcae/errors.hpp"
#include "mrcae/io.hpp"

namespace mrcae {

using nlohmann::json;

namespace {

constexpr char kMagic[] = "MRCAE-CKPT";  // 10 chars + NUL, 11 bytes on disk
constexpr std::uint16_t kVersion = 1;

void add_in_place(SnapshotTensor& a, const SnapshotTensor& b) {
  require_same_dims(a.dims(), b.dims(), "add_in_place");
  double* pa = a.data();
  const double* pb = b.data();
  for (std::int64_t i = 0; i < a.size(); ++i) pa[i] += pb[i];
}

}  // namespace

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "linear"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  throw ConfigError("unknown activation: " + s);
}

bool is_pow2_minus1(std::int64_t n) {
  if (n < 1) return false;
  const std::uint64_t m = std::uint64_t(n) + 1;
  return (m & (m - 1)) == 0;
}

std::int64_t Encoding::size_per_snapshot() const {
  std::int64_t n = innermost.rows() * innermost.cols();
  for (const auto& g : groups) n += g.channels * g.active;
  return n;
}

MrCaeModel::MrCaeModel(std::int64_t finest_rows, std::int64_t finest_cols, std::int64_t n_levels,
                       Activation activation)
    : finest_rows_(finest_rows),
      finest_cols_(finest_cols),
      n_levels_(n_levels),
      activation_(activation) {
  if (n_levels < 1) throw ConfigError("level count must be >= 1");
  if (!is_pow2_minus1(finest_rows) || !is_pow2_minus1(finest_cols)) {
    throw ConfigError("finest dims must be of the form 2^p-1, got (" +
                      std::to_string(finest_rows) + "," + std::to_string(finest_cols) + ")");
  }
  // The innermost grid after n_levels halvings must still be nonempty.
  if (((finest_rows + 1) >> n_levels) < 2 || ((finest_cols + 1) >> n_levels) < 2) {
    throw ConfigError("finest dims (" + std::to_string(finest_rows) + "," +
                      std::to_string(finest_cols) + ") cannot support " +
                      std::to_string(n_levels) + " levels");
  }
}

std::int64_t MrCaeModel::level_rows(std::int64_t k) const {
  return ((finest_rows_ + 1) >> (n_levels_ - 1 - k)) - 1;
}

std::int64_t MrCaeModel::level_cols(std::int64_t k) const {
  return ((finest_cols_ + 1) >> (n_levels_ - 1 - k)) - 1;
}

void MrCaeModel::deepen(double init_noise, Rng& rng) {
  if (levels_grown() >= n_levels_) {
    throw GrowthError("deepen: all " + std::to_string(n_levels_) + " levels already grown");
  }
  const std::int64_t k = levels_grown();
  LevelBlock block;
  block.deepen_conv = center_pick_kernel(init_noise, &rng);
  block.deepen_deconv = bilinear_kernel(init_noise, &rng);
  block.rows = level_rows(k);
  block.cols = level_cols(k);
  levels_.push_back(std::move(block));
}

void MrCaeModel::widen(const SpatialMask& mask, std::int64_t channels, double init_noise,
                       Rng& rng) {
  if (levels_.empty()) throw GrowthError("widen: no level grown yet");
  if (channels < 1) throw ConfigError("widen: channel count must be >= 1");
  LevelBlock& top = levels_.back();
  const std::int64_t hc = (top.rows - 1) / 2, wc = (top.cols - 1) / 2;
  if (mask.rows() != hc || mask.cols() != wc) {
    throw ShapeError("widen: mask (" + std::to_string(mask.rows()) + "," +
                     std::to_string(mask.cols()) + ") does not match feature grid (" +
                     std::to_string(hc) + "," + std::to_string(wc) + ")");
  }
  WideningGroup group;
  group.conv = ConvKernel(channels, 1);
  group.deconv = DeconvKernel(channels, 1);
  group.mask = mask;
  if (init_noise > 0.0) {
    for (auto& v : group.conv.w) v = rng.uniform(-init_noise, init_noise);
    for (auto& v : group.deconv.w) v = rng.uniform(-init_noise, init_noise);
  }
  top.groups.push_back(std::move(group));
}

SnapshotTensor MrCaeModel::forward(const SnapshotTensor& x, std::int64_t level) const {
  // Forward is literally decode(encode(x)): the autoencoder split cannot
  // change the arithmetic.
  if (level < 0 || level >= levels_grown()) {
    throw ConfigError("forward: level " + std::to_string(level) + " out of range (grown: " +
                      std::to_string(levels_grown()) + ")");
  }
  const LevelBlock& block = levels_[std::size_t(level)];
  if (x.channels() != 1 || x.rows() != block.rows || x.cols() != block.cols) {
    throw ShapeError("forward: input " + x.dims().str() + " does not match level " +
                     std::to_string(level) + " dims (" + std::to_string(block.rows) + "," +
                     std::to_string(block.cols) + ")");
  }
  ForwardTrace trace = forward_trace(*this, x, level);
  return trace.output();
}

Encoding MrCaeModel::encode(const SnapshotTensor& x) const {
  if (levels_.empty()) throw GrowthError("encode: model has no grown levels");
  const std::int64_t top = levels_grown() - 1;
  const LevelBlock& block = levels_.back();
  if (x.channels() != 1 || x.rows() != block.rows || x.cols() != block.cols) {
    throw ShapeError("encode: input " + x.dims().str() + " does not match top level dims (" +
                     std::to_string(block.rows) + "," + std::to_string(block.cols) + ")");
  }
  Encoding e;
  e.level = top;
  // Downward chain of deepening convs, gathering masked group features at
  // every level on the way.
  std::vector<SnapshotTensor> reps(std::size_t(top + 1));
  reps[std::size_t(top)] = x;
  for (std::int64_t m = top; m >= 0; --m) {
    const LevelBlock& lb = levels_[std::size_t(m)];
    const SnapshotTensor& xm = reps[std::size_t(m)];
    for (std::int64_t j = 0; j < std::int64_t(lb.groups.size()); ++j) {
      const WideningGroup& g = lb.groups[std::size_t(j)];
      SnapshotTensor feat = apply_mask(conv2d_forward(xm, g.conv), g.mask);
      if (activation_ == Activation::relu) feat = relu(feat);
      Encoding::GroupCode code;
      code.level = m;
      code.group = j;
      code.channels = g.channels();
      code.active = g.mask.active_count();
      code.values.reserve(std::size_t(feat.snapshots() * code.channels * code.active));
      for (std::int64_t t = 0; t < feat.snapshots(); ++t) {
        for (std::int64_t c = 0; c < code.channels; ++c) {
          for (std::int64_t i = 0; i < feat.rows(); ++i) {
            for (std::int64_t jj = 0; jj < feat.cols(); ++jj) {
              if (g.mask.at(i, jj)) code.values.push_back(feat(t, c, i, jj));
            }
          }
        }
      }
      e.groups.push_back(std::move(code));
    }
    SnapshotTensor next = conv2d_forward(xm, lb.deepen_conv);
    if (m == 0) {
      e.innermost = std::move(next);
    } else {
      reps[std::size_t(m - 1)] = std::move(next);
    }
  }
  return e;
}

SnapshotTensor MrCaeModel::decode(const Encoding& e) const {
  if (levels_.empty()) throw GrowthError("decode: model has no grown levels");
  if (e.level != levels_grown() - 1) {
    throw TopologyError("decode: encoding is for level " + std::to_string(e.level) +
                        ", model top level is " + std::to_string(levels_grown() - 1));
  }
  const std::int64_t T = e.innermost.snapshots();
  if (e.innermost.channels() != 1 || e.innermost.rows() != level_rows(-1) ||
      e.innermost.cols() != level_cols(-1)) {
    throw TopologyError("decode: innermost dims " + e.innermost.dims().str() +
                        " do not match model innermost grid");
  }
  // Index the group codes and validate the layout against the model.
  std::size_t expected_groups = 0;
  for (const auto& lb : levels_) expected_groups += lb.groups.size();
  if (e.groups.size() != expected_groups) {
    throw TopologyError("decode: encoding has " + std::to_string(e.groups.size()) +
                        " group codes, model has " + std::to_string(expected_groups));
  }
  std::vector<std::vector<const Encoding::GroupCode*>> codes(levels_.size());
  for (std::size_t m = 0; m < levels_.size(); ++m) {
    codes[m].assign(levels_[m].groups.size(), nullptr);
  }
  for (const auto& code : e.groups) {
    if (code.level < 0 || code.level >= levels_grown() ||
        code.group >= std::int64_t(levels_[std::size_t(code.level)].groups.size())) {
      throw TopologyError("decode: encoding group key (" + std::to_string(code.level) + "," +
                          std::to_string(code.group) + ") not present in model");
    }
    const WideningGroup& g = levels_[std::size_t(code.level)].groups[std::size_t(code.group)];
    if (code.channels != g.channels() || code.active != g.mask.active_count() ||
        std::int64_t(code.values.size()) != T * code.channels * code.active) {
      throw TopologyError("decode: group (" + std::to_string(code.level) + "," +
                          std::to_string(code.group) + ") layout does not match model mask");
    }
    codes[std::size_t(code.level)][std::size_t(code.group)] = &code;
  }

  SnapshotTensor y = e.innermost;
  for (std::int64_t m = 0; m < levels_grown(); ++m) {
    const LevelBlock& lb = levels_[std::size_t(m)];
    y = deconv2d_forward(y, lb.deepen_deconv);
    for (std::int64_t j = 0; j < std::int64_t(lb.groups.size()); ++j) {
      const WideningGroup& g = lb.groups[std::size_t(j)];
      const Encoding::GroupCode& code = *codes[std::size_t(m)][std::size_t(j)];
      const std::int64_t hc = g.mask.rows(), wc = g.mask.cols();
      SnapshotTensor feat(T, g.channels(), hc, wc);
      std::size_t pos = 0;
      for (std::int64_t t = 0; t < T; ++t) {
        for (std::int64_t c = 0; c < g.channels(); ++c) {
          for (std::int64_t i = 0; i < hc; ++i) {
            for (std::int64_t jj = 0; jj < wc; ++jj) {
              if (g.mask.at(i, jj)) feat(t, c, i, jj) = code.values[pos++];
            }
          }
        }
      }
      add_in_place(y, deconv2d_forward(feat, g.deconv));
    }
  }
  return y;
}

std::int64_t MrCaeModel::count_params() const {
  std::int64_t n = 0;
  for (const auto& lb : levels_) {
    n += std::int64_t(lb.deepen_conv.w.size() + lb.deepen_conv.b.size());
    n += std::int64_t(lb.deepen_deconv.w.size() + lb.deepen_deconv.b.size());
    for (const auto& g : lb.groups) {
      n += std::int64_t(g.conv.w.size() + g.conv.b.size());
      n += std::int64_t(g.deconv.w.size() + g.deconv.b.size());
    }
  }
  return n;
}

std::int64_t MrCaeModel::encoding_size() const {
  if (levels_.empty()) throw GrowthError("encoding_size: model has no grown levels");
  std::int64_t n = level_rows(-1) * level_cols(-1);
  for (const auto& lb : levels_) {
    for (const auto& g : lb.groups) n += g.channels() * g.mask.active_count();
  }
  return n;
}

// ---------------------------------------------------------------------------
// Training forward/backward

ForwardTrace forward_trace(const MrCaeModel& model, const SnapshotTensor& x, std::int64_t level) {
  if (level < 0 || level >= model.levels_grown()) {
    throw ConfigError("forward_trace: level " + std::to_string(level) + " out of range");
  }
  const LevelBlock& top = model.level(level);
  if (x.channels() != 1 || x.rows() != top.rows || x.cols() != top.cols) {
    throw ShapeError("forward_trace: input " + x.dims().str() + " does not match level " +
                     std::to_string(level));
  }
  const bool use_relu = model.activation() == Activation::relu;
  ForwardTrace trace;
  trace.level = level;
  trace.x.resize(std::size_t(level + 2));
  trace.y.resize(std::size_t(level + 2));
  trace.groups.resize(std::size_t(level + 1));

  trace.x[std::size_t(level + 1)] = x;
  for (std::int64_t m = level; m >= 0; --m) {
    trace.x[std::size_t(m)] =
        conv2d_forward(trace.x[std::size_t(m + 1)], model.level(m).deepen_conv);
  }
  trace.y[0] = trace.x[0];
  for (std::int64_t m = 0; m <= level; ++m) {
    const LevelBlock& lb = model.level(m);
    SnapshotTensor y = deconv2d_forward(trace.y[std::size_t(m)], lb.deepen_deconv);
    auto& gts = trace.groups[std::size_t(m)];
    gts.resize(lb.groups.size());
    for (std::size_t j = 0; j < lb.groups.size(); ++j) {
      const WideningGroup& g = lb.groups[j];
      GroupTrace& gt = gts[j];
      gt.masked = apply_mask(conv2d_forward(trace.x[std::size_t(m + 1)], g.conv), g.mask);
      const SnapshotTensor* feat = &gt.masked;
      if (use_relu) {
        gt.activated = relu(gt.masked);
        feat = &gt.activated;
      }
      add_in_place(y, deconv2d_forward(*feat, g.deconv));
    }
    trace.y[std::size_t(m + 1)] = std::move(y);
  }
  return trace;
}

ModelGradients backward(const MrCaeModel& model, const ForwardTrace& trace,
                        const SnapshotTensor& grad_out) {
  const std::int64_t level = trace.level;
  require_same_dims(grad_out.dims(), trace.output().dims(), "backward(grad_out)");
  const bool use_relu = model.activation() == Activation::relu;

  ModelGradients grads;
  grads.levels.resize(std::size_t(level + 1));
  // Direct gradient contributions to each level input from that level's
  // widening groups; the deepening chain contribution is added on the way up.
  std::vector<SnapshotTensor> gx_direct(std::size_t(level + 2));

  SnapshotTensor gy = grad_out;
  for (std::int64_t m = level; m >= 0; --m) {
    const LevelBlock& lb = model.level(m);
    LevelGrads& lg = grads.levels[std::size_t(m)];
    lg.groups.resize(lb.groups.size());
    SnapshotTensor gx_m(trace.x[std::size_t(m + 1)].dims());
    for (std::size_t j = 0; j < lb.groups.size(); ++j) {
      const WideningGroup& g = lb.groups[j];
      const GroupTrace& gt = trace.groups[std::size_t(m)][j];
      const SnapshotTensor& deconv_in = use_relu ? gt.activated : gt.masked;
      ConvGrad dg = deconv2d_backward(deconv_in, g.deconv, gy);
      lg.groups[j].deconv.w = std::move(dg.w);
      lg.groups[j].deconv.b = std::move(dg.b);
      SnapshotTensor g_masked =
          use_relu ? relu_backward(gt.masked, dg.x) : std::move(dg.x);
      SnapshotTensor g_feat = apply_mask(g_masked, g.mask);
      ConvGrad cg = conv2d_backward(trace.x[std::size_t(m + 1)], g.conv, g_feat);
      lg.groups[j].conv.w = std::move(cg.w);
      lg.groups[j].conv.b = std::move(cg.b);
      add_in_place(gx_m, cg.x);
    }
    gx_direct[std::size_t(m + 1)] = std::move(gx_m);
    ConvGrad dd = deconv2d_backward(trace.y[std::size_t(m)], lb.deepen_deconv, gy);
    lg.deepen_deconv.w = std::move(dd.w);
    lg.deepen_deconv.b = std::move(dd.b);
    gy = std::move(dd.x);
  }

  // gy now holds the gradient at the innermost representation; walk the
  // deepening convs back up to the input.
  SnapshotTensor gx = std::move(gy);
  for (std::int64_t m = 0; m <= level; ++m) {
    const LevelBlock& lb = model.level(m);
    ConvGrad cg = conv2d_backward(trace.x[std::size_t(m + 1)], lb.deepen_conv, gx);
    grads.levels[std::size_t(m)].deepen_conv.w = std::move(cg.w);
    grads.levels[std::size_t(m)].deepen_conv.b = std::move(cg.b);
    gx = std::move(cg.x);
    add_in_place(gx, gx_direct[std::size_t(m + 1)]);
  }
  return grads;
}

std::vector<ParamRef> parameter_arrays(MrCaeModel& model) {
  std::vector<ParamRef> refs;
  for (std::int64_t k = 0; k < model.levels_grown(); ++k) {
    LevelBlock& lb = model.level(k);
    refs.push_back({k, &lb.deepen_conv.w});
    refs.push_back({k, &lb.deepen_conv.b});
    refs.push_back({k, &lb.deepen_deconv.w});
    refs.push_back({k, &lb.deepen_deconv.b});
    for (auto& g : lb.groups) {
      refs.push_back({k, &g.conv.w});
      refs.push_back({k, &g.conv.b});
      refs.push_back({k, &g.deconv.w});
      refs.push_back({k, &g.deconv.b});
    }
  }
  return refs;
}

std::vector<ConstParamRef> parameter_arrays(const MrCaeModel& model) {
  std::vector<ConstParamRef> refs;
  for (std::int64_t k = 0; k < model.levels_grown(); ++k) {
    const LevelBlock& lb = model.level(k);
    refs.push_back({k, &lb.deepen_conv.w});
    refs.push_back({k, &lb.deepen_conv.b});
    refs.push_back({k, &lb.deepen_deconv.w});
    refs.push_back({k, &lb.deepen_deconv.b});
    for (const auto& g : lb.groups) {
      refs.push_back({k, &g.conv.w});
      refs.push_back({k, &g.conv.b});
      refs.push_back({k, &g.deconv.w});
      refs.push_back({k, &g.deconv.b});
    }
  }
  return refs;
}

std::vector<ConstParamRef> gradient_arrays(const ModelGradients& grads) {
  std::vector<ConstParamRef> refs;
  for (std::int64_t k = 0; k < std::int64_t(grads.levels.size()); ++k) {
    const LevelGrads& lg = grads.levels[std::size_t(k)];
    refs.push_back({k, &lg.deepen_conv.w});
    refs.push_back({k, &lg.deepen_conv.b});
    refs.push_back({k, &lg.deepen_deconv.w});
    refs.push_back({k, &lg.deepen_deconv.b});
    for (const auto& g : lg.groups) {
      refs.push_back({k, &g.conv.w});
      refs.push_back({k, &g.conv.b});
      refs.push_back({k, &g.deconv.w});
      refs.push_back({k, &g.deconv.b});
    }
  }
  return refs;
}

// ---------------------------------------------------------------------------
// Checkpoint format: magic, version, JSON manifest, weight blob in
// parameter_arrays order, trailing CRC32 over all preceding bytes.

void MrCaeModel::save_checkpoint(const std::string& path) const {
  json manifest;
  manifest["format"] = "mrcae-checkpoint";
  manifest["n_levels"] = n_levels_;
  manifest["finest_h"] = finest_rows_;
  manifest["finest_w"] = finest_cols_;
  manifest["activation"] = to_string(activation_);
  json jlevels = json::array();
  for (const auto& lb : levels_) {
    json jgroups = json::array();
    for (const auto& g : lb.groups) {
      const auto runs = g.mask.run_lengths();
      std::vector<std::uint8_t> run_bytes;
      for (auto r : runs) io::put_u32(run_bytes, r);
      jgroups.push_back({{"channels", g.channels()},
                         {"mask_h", g.mask.rows()},
                         {"mask_w", g.mask.cols()},
                         {"mask_active", g.mask.active_count()},
                         {"mask_runs", io::base64_encode(run_bytes.data(), run_bytes.size())}});
    }
    jlevels.push_back({{"groups", jgroups}});
  }
  manifest["levels"] = jlevels;
  manifest["meta"] = {{"config_json", meta.config_json},
                      {"config_hash", meta.config_hash},
                      {"seed", meta.seed}};

  std::vector<std::uint8_t> bytes;
  bytes.insert(bytes.end(), kMagic, kMagic + 10);
  bytes.push_back(0);
  io::put_u16(bytes, kVersion);
  const std::string mtext = manifest.dump();
  io::put_u32(bytes, std::uint32_t(mtext.size()));
  bytes.insert(bytes.end(), mtext.begin(), mtext.end());

  std::uint64_t n_weights = 0;
  const auto refs = parameter_arrays(*this);
  for (const auto& r : refs) n_weights += r.values->size();
  io::put_u64(bytes, n_weights);
  for (const auto& r : refs) {
    for (double v : *r.values) io::put_f64(bytes, v);
  }
  io::put_u32(bytes, io::crc32(bytes.data(), bytes.size()));
  io::write_file(path, bytes);
}

MrCaeModel MrCaeModel::load_checkpoint(const std::string& path) {
  const auto bytes = io::read_file(path);
  if (bytes.size() < 11 + 2 + 4 + 8 + 4) throw TruncatedError("checkpoint too short: " + path);
  if (std::memcmp(bytes.data(), kMagic, 10) != 0 || bytes[10] != 0) {
    throw FormatError("not a checkpoint file (bad magic): " + path);
  }
  io::ByteReader r(bytes);
  r.raw(11);
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t mlen = r.u32();
  if (r.pos() + mlen + 8 + 4 > bytes.size()) {
    throw TruncatedError("checkpoint manifest exceeds file size");
  }
  const auto mraw = r.raw(mlen);
  const std::uint64_t n_weights = r.u64();
  if (n_weights > (bytes.size() - r.pos()) / 8) {
    throw TruncatedError("checkpoint weight blob exceeds file size");
  }
  if (r.pos() + n_weights * 8 + 4 != bytes.size()) {
    throw FormatError("checkpoint has trailing or missing bytes");
  }
  const std::uint32_t want = io::crc32(bytes.data(), bytes.size() - 4);
  std::uint32_t got = 0;
  for (int i = 0; i < 4; ++i) got |= std::uint32_t(bytes[bytes.size() - 4 + i]) << (8 * i);
  if (want != got) throw ChecksumError("checkpoint checksum mismatch: " + path);

  json manifest;
  try {
    manifest = json::parse(mraw.begin(), mraw.end());
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint manifest is not valid JSON: ") + e.what());
  }
  try {
    if (manifest.at("format").get<std::string>() != "mrcae-checkpoint") {
      throw FormatError("manifest format tag mismatch");
    }
    MrCaeModel model(manifest.at("finest_h").get<std::int64_t>(),
                     manifest.at("finest_w").get<std::int64_t>(),
                     manifest.at("n_levels").get<std::int64_t>(),
                     activation_from_string(manifest.at("activation").get<std::string>()));
    model.meta.config_json = manifest.at("meta").at("config_json").get<std::string>();
    model.meta.config_hash = manifest.at("meta").at("config_hash").get<std::string>();
    model.meta.seed = manifest.at("meta").at("seed").get<std::uint64_t>();
    Rng no_rng(0);
    for (const auto& jl : manifest.at("levels")) {
      model.deepen(0.0, no_rng);
      LevelBlock& lb = model.levels_.back();
      for (const auto& jg : jl.at("groups")) {
        const std::int64_t hc = jg.at("mask_h").get<std::int64_t>();
        const std::int64_t wc = jg.at("mask_w").get<std::int64_t>();
        const auto run_bytes = io::base64_decode(jg.at("mask_runs").get<std::string>());
        if (run_bytes.size() % 4 != 0) throw FormatError("mask run block truncated");
        std::vector<std::uint32_t> runs(run_bytes.size() / 4);
        for (std::size_t i = 0; i < runs.size(); ++i) {
          std::uint32_t v = 0;
          for (int b = 0; b < 4; ++b) v |= std::uint32_t(run_bytes[4 * i + b]) << (8 * b);
          runs[i] = v;
        }
        SpatialMask mask = SpatialMask::from_run_lengths(hc, wc, runs);
        if (mask.active_count() != jg.at("mask_active").get<std::int64_t>()) {
          throw FormatError("mask active count disagrees with run-length bitmap");
        }
        model.widen(mask, jg.at("channels").get<std::int64_t>(), 0.0, no_rng);
      }
      (void)lb;
    }
    std::uint64_t expected = 0;
    auto refs = parameter_arrays(model);
    for (const auto& ref : refs) expected += ref.values->size();
    if (expected != n_weights) {
      throw FormatError("weight count does not match manifest topology");
    }
    io::ByteReader wr(bytes);
    wr.raw(11 + 2 + 4 + mlen + 8);
    for (auto& ref : refs) {
      for (auto& v : *ref.values) v = wr.f64();
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint manifest missing fields: ") + e.what());
  }
}

}  // namespace mrcae
