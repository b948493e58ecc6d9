// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; doctest assertions carry the details.
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mrcae/bench.hpp"
#include "mrcae/cli.hpp"
#include "mrcae/io.hpp"

using namespace mrcae;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const char* id, bool pass) {
  std::printf("ACCEPTANCE %-52s %s\n", id, pass ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK(pass);
}

constexpr double kFdStep = 1e-6;
constexpr double kFdTol = 1e-6;

bool fd_ok(double analytic, double up, double dn) {
  const double numeric = (up - dn) / (2 * kFdStep);
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1.0});
  return std::abs(analytic - numeric) / scale <= kFdTol;
}

// ---------------------------------------------------------------------------
// Shared desk-scale run for criteria 5-7: two oscillatory modes at 63x63,
// 200 snapshots, 3 levels, schedule 1/2/3, g=4, omega=0.5, fixed seed.

struct BigRun {
  DataPyramid pyramid;
  std::vector<VariantResult> results;  // [0]=pr, [1]=dense
  double pr_wall_s = 0.0;
};

TrainConfig big_run_config() {
  TrainConfig cfg;
  cfg.omega = 0.5;
  cfg.max_epochs = 4000;
  cfg.adam.lr = 1e-3;
  cfg.batch = 5;
  cfg.schedule.automatic = false;
  cfg.schedule.counts = {1, 2, 3};
  cfg.group_channels = 4;
  cfg.init_noise = 0.01;
  cfg.seed = 13;
  return cfg;
}

const BigRun& big_run() {
  static const BigRun run = [] {
    BigRun r;
    TwoModesParams p;
    p.nx = 63;
    p.ny = 63;
    p.nt = 200;
    r.pyramid = build_pyramid(gen_two_modes(p), 3, 13);
    const TrainConfig cfg = big_run_config();
    r.results = run_benchmark(r.pyramid, {{VariantKind::pr, cfg}, {VariantKind::dense, cfg}});
    r.pr_wall_s = r.results[0].wall_ms / 1000.0;
    return r;
  }();
  return run;
}

SpatialMask acceptance_oracle_mask(const SnapshotTensor& data, const SnapshotTensor& recon,
                                   double eps) {
  const std::int64_t T = data.snapshots(), H = data.rows(), W = data.cols();
  std::vector<double> mean_sq(std::size_t(H * W));
  for (std::int64_t i = 0; i < H; ++i)
    for (std::int64_t j = 0; j < W; ++j) {
      double s = 0.0;
      for (std::int64_t t = 0; t < T; ++t) {
        const double d = data(t, 0, i, j) - recon(t, 0, i, j);
        s += d * d;
      }
      mean_sq[std::size_t(i * W + j)] = s / double(T);
    }
  SpatialMask m((H - 1) / 2, (W - 1) / 2);
  for (std::int64_t i = 0; i < m.rows(); ++i)
    for (std::int64_t j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::int64_t u = 0; u < 3; ++u)
        for (std::int64_t v = 0; v < 3; ++v)
          s += mean_sq[std::size_t((2 * i + u) * W + 2 * j + v)];
      m.set(i, j, s / 9.0 >= eps);
    }
  return m;
}

int run_shell(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

std::string strip_wall_column(const std::string& csv) {
  std::string out;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string::npos) end = csv.size();
    const std::string line = csv.substr(start, end - start);
    out += line.substr(0, line.rfind(','));
    out += '\n';
    start = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("criterion 1: analytic gradients match finite differences") {
  const auto start = Clock::now();
  Rng rng(1001);
  bool ok = true;
  for (int rep = 0; rep < 25; ++rep) {
    const std::int64_t T = 1 + std::int64_t(rng.below(3));
    const std::int64_t C = 1 + std::int64_t(rng.below(2));
    const std::int64_t H = rng.below(2) == 0 ? 5 : 7;
    const std::int64_t W = rng.below(2) == 0 ? 5 : 7;
    const std::int64_t C_out = 1 + std::int64_t(rng.below(2));

    // conv
    {
      const SnapshotTensor x = random_tensor(T, C, H, W, rng);
      ConvKernel k(C_out, C);
      randomize_kernel(k, rng);
      SnapshotTensor out = conv2d_forward(x, k);
      const SnapshotTensor cot =
          random_tensor(out.dims().t, out.dims().c, out.dims().h, out.dims().w, rng);
      const ConvGrad g = conv2d_backward(x, k, cot);
      SnapshotTensor xp = x;
      for (std::int64_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + kFdStep;
        const double up = inner(conv2d_forward(xp, k), cot);
        xp[i] = x[i] - kFdStep;
        const double dn = inner(conv2d_forward(xp, k), cot);
        xp[i] = x[i];
        ok = ok && fd_ok(g.x[i], up, dn);
      }
      ConvKernel kp = k;
      for (std::size_t i = 0; i < k.w.size(); ++i) {
        kp.w[i] = k.w[i] + kFdStep;
        const double up = inner(conv2d_forward(x, kp), cot);
        kp.w[i] = k.w[i] - kFdStep;
        const double dn = inner(conv2d_forward(x, kp), cot);
        kp.w[i] = k.w[i];
        ok = ok && fd_ok(g.w[i], up, dn);
      }
      for (std::size_t i = 0; i < k.b.size(); ++i) {
        kp.b[i] = k.b[i] + kFdStep;
        const double up = inner(conv2d_forward(x, kp), cot);
        kp.b[i] = k.b[i] - kFdStep;
        const double dn = inner(conv2d_forward(x, kp), cot);
        kp.b[i] = k.b[i];
        ok = ok && fd_ok(g.b[i], up, dn);
      }
    }
    // deconv
    {
      const SnapshotTensor x = random_tensor(T, C, 3, 3, rng);
      DeconvKernel k(C, C_out);
      randomize_kernel(k, rng);
      SnapshotTensor out = deconv2d_forward(x, k);
      const SnapshotTensor cot =
          random_tensor(out.dims().t, out.dims().c, out.dims().h, out.dims().w, rng);
      const ConvGrad g = deconv2d_backward(x, k, cot);
      SnapshotTensor xp = x;
      for (std::int64_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + kFdStep;
        const double up = inner(deconv2d_forward(xp, k), cot);
        xp[i] = x[i] - kFdStep;
        const double dn = inner(deconv2d_forward(xp, k), cot);
        xp[i] = x[i];
        ok = ok && fd_ok(g.x[i], up, dn);
      }
      DeconvKernel kp = k;
      for (std::size_t i = 0; i < k.w.size(); ++i) {
        kp.w[i] = k.w[i] + kFdStep;
        const double up = inner(deconv2d_forward(x, kp), cot);
        kp.w[i] = k.w[i] - kFdStep;
        const double dn = inner(deconv2d_forward(x, kp), cot);
        kp.w[i] = k.w[i];
        ok = ok && fd_ok(g.w[i], up, dn);
      }
      for (std::size_t i = 0; i < k.b.size(); ++i) {
        kp.b[i] = k.b[i] + kFdStep;
        const double up = inner(deconv2d_forward(x, kp), cot);
        kp.b[i] = k.b[i] - kFdStep;
        const double dn = inner(deconv2d_forward(x, kp), cot);
        kp.b[i] = k.b[i];
        ok = ok && fd_ok(g.b[i], up, dn);
      }
    }
    // relu, away from the kink
    {
      SnapshotTensor x = random_tensor(T, C, H, W, rng);
      for (std::int64_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) <= 1e-3) x[i] += x[i] < 0 ? -1e-3 : 1e-3;
      }
      const SnapshotTensor cot = random_tensor(T, C, H, W, rng);
      const SnapshotTensor g = relu_backward(x, cot);
      for (std::int64_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + kFdStep;
        const double up = inner(relu(x), cot);
        x[i] = keep - kFdStep;
        const double dn = inner(relu(x), cot);
        x[i] = keep;
        ok = ok && fd_ok(g[i], up, dn);
      }
    }
    // level loss, with a clear argmax gap for the max term
    {
      const double omega = rep % 3 == 0 ? 0.0 : (rep % 3 == 1 ? 0.5 : 1.0);
      const SnapshotTensor data = random_tensor(T, 1, H, W, rng, -0.3, 0.3);
      SnapshotTensor recon = random_tensor(T, 1, H, W, rng, -0.3, 0.3);
      const std::int64_t gi = std::int64_t(rng.below(std::uint64_t(H)));
      const std::int64_t gj = std::int64_t(rng.below(std::uint64_t(W)));
      for (std::int64_t t = 0; t < T; ++t) recon(t, 0, gi, gj) = data(t, 0, gi, gj) + 1.5;
      const SnapshotTensor g = level_loss_backward(data, recon, omega);
      for (std::int64_t i = 0; i < recon.size(); ++i) {
        const double keep = recon[i];
        recon[i] = keep + kFdStep;
        const double up = level_loss(data, recon, omega).total;
        recon[i] = keep - kFdStep;
        const double dn = level_loss(data, recon, omega).total;
        recon[i] = keep;
        ok = ok && fd_ok(g[i], up, dn);
      }
    }
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 30.0;
  std::printf("  (criterion 1 ran in %.1f s)\n", elapsed);
  report("1 gradient correctness vs finite differences", ok);
}

TEST_CASE("criterion 2: noise-free deepening preserves the global metric") {
  const auto start = Clock::now();
  TwoModesParams p;
  p.nx = 63;
  p.ny = 63;
  p.nt = 40;
  const DataPyramid pyr = build_pyramid(gen_two_modes(p), 3, 202);
  const SnapshotTensor finest_val = gather_snapshots(pyr.finest(), pyr.val_idx);

  TrainConfig cfg;
  cfg.max_epochs = 8;
  cfg.init_noise = 0.0;
  cfg.seed = 202;
  MrCaeModel model(63, 63, 3);
  Rng rng(cfg.seed);
  TrainHistory history;

  bool ok = true;
  model.deepen(0.0, rng);
  for (std::int64_t k = 1; k < 3; ++k) {
    // train the current top level so the wrapped network is nontrivial
    const SnapshotTensor train = gather_snapshots(pyr.levels[std::size_t(k - 1)], pyr.train_idx);
    const SnapshotTensor val = gather_snapshots(pyr.levels[std::size_t(k - 1)], pyr.val_idx);
    train_phase(model, PhaseData{train, val, finest_val, k - 1, k - 1}, cfg, history);
    const double before = global_loss(model, k - 1, finest_val, cfg.omega).total;
    model.deepen(0.0, rng);
    const double after = global_loss(model, k, finest_val, cfg.omega).total;
    std::printf("  (deepen %lld: |before-after| = %.3e)\n", (long long)k,
                std::abs(before - after));
    ok = ok && std::abs(before - after) <= 1e-12;
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 10.0;
  std::printf("  (criterion 2 ran in %.1f s)\n", elapsed);
  report("2 transfer invariance of eps=0 deepening", ok);
}

TEST_CASE("criterion 3: linear models satisfy affine superposition") {
  Rng rng(3003);
  MrCaeModel model(31, 31, 2);
  Rng grow(303);
  bool ok = true;
  int pairs = 0;
  const auto check_stage = [&](std::int64_t level, int reps) {
    const std::int64_t n = model.level(level).rows;
    for (int rep = 0; rep < reps; ++rep, ++pairs) {
      const SnapshotTensor x = random_tensor(2, 1, n, n, rng);
      const SnapshotTensor y = random_tensor(2, 1, n, n, rng);
      SnapshotTensor xy(2, 1, n, n);
      for (std::int64_t i = 0; i < xy.size(); ++i) xy[i] = x[i] + y[i];
      const SnapshotTensor f0 = model.forward(SnapshotTensor(2, 1, n, n), level);
      const SnapshotTensor fx = model.forward(x, level);
      const SnapshotTensor fy = model.forward(y, level);
      const SnapshotTensor fxy = model.forward(xy, level);
      double worst = 0.0;
      for (std::int64_t i = 0; i < fxy.size(); ++i) {
        worst = std::max(worst, std::abs(fxy[i] - f0[i] - (fx[i] - f0[i]) - (fy[i] - f0[i])));
      }
      ok = ok && worst <= 1e-10 * std::max({max_abs(x), max_abs(y), 1.0});
    }
  };
  model.deepen(0.05, grow);
  check_stage(0, 3);
  SpatialMask m0(7, 7);
  for (std::int64_t i = 0; i < 7; ++i)
    for (std::int64_t j = 0; j < 7; ++j) m0.set(i, j, (i * 7 + j) % 3 != 0);
  model.widen(m0, 4, 0.05, grow);
  check_stage(0, 3);
  model.deepen(0.05, grow);
  check_stage(1, 2);
  model.widen(SpatialMask::ones(15, 15), 3, 0.05, grow);
  check_stage(1, 2);
  report("3 affine superposition across growth stages", ok && pairs == 10);
}

TEST_CASE("criterion 4: compute_mask equals the per-cell oracle bit-for-bit") {
  Rng rng(4004);
  bool ok = true;
  for (int rep = 0; rep < 20; ++rep) {
    const SnapshotTensor data = random_tensor(3, 1, 15, 15, rng);
    const SnapshotTensor recon = random_tensor(3, 1, 15, 15, rng);
    const ScalarField avg = local_average_downsample(reduce_time_mean_sq(data, recon));
    std::vector<double> cells(std::size_t(avg.size()));
    for (std::int64_t i = 0; i < avg.size(); ++i) cells[std::size_t(i)] = avg.data()[i];
    std::sort(cells.begin(), cells.end());
    const double tie = cells[rng.below(cells.size())];  // exact-threshold tie
    const double tolerances[5] = {0.0, cells.front(), cells[cells.size() / 2], cells.back(),
                                  tie};
    for (double eps : tolerances) {
      const SpatialMask got = compute_mask(data, recon, eps);
      const SpatialMask want = acceptance_oracle_mask(data, recon, eps);
      ok = ok && got == want;
    }
  }
  report("4 mask oracle equivalence incl. exact ties", ok);
}

TEST_CASE("criterion 5: desk-scale toy regression") {
  const BigRun& run = big_run();
  REQUIRE(run.results[0].error.empty());
  const TrainHistory& hist = run.results[0].history;

  const double after_level0_deepen = hist.phase_end(0).val_global.total;
  const double final_loss = hist.level_end(2).val_global.total;
  const bool a = final_loss * 10.0 <= after_level0_deepen;
  std::printf("  (5a: after level-0 deepen %.4e, final %.4e, ratio %.1fx)\n",
              after_level0_deepen, final_loss, after_level0_deepen / final_loss);
  report("5a final global loss >=10x below level-0 phase", a);

  const double l0 = hist.level_end(0).val_global.total;
  const double l1 = hist.level_end(1).val_global.total;
  const double l2 = hist.level_end(2).val_global.total;
  std::printf("  (5b: end-of-level losses %.4e -> %.4e -> %.4e)\n", l0, l1, l2);
  report("5b end-of-level global loss non-increasing", l1 <= l0 && l2 <= l1);

  std::printf("  (5c: PR training wall clock %.1f s)\n", run.pr_wall_s);
  report("5c desk-scale run under 10 minutes", run.pr_wall_s < 600.0);
}

TEST_CASE("criterion 6: the last mask localizes the fast bump") {
  const BigRun& run = big_run();
  REQUIRE(run.results[0].error.empty());
  const MrCaeModel& model = *run.results[0].model;
  REQUIRE(model.level(2).groups.size() == 3);
  const SpatialMask& mask = model.level(2).groups.back().mask;
  // mask cell (i,j) sits at the finest pixel (2i+1, 2j+1); rows sample y,
  // columns x, on the inclusive [-5,5] grid of 63 points
  std::int64_t active = 0, near = 0;
  for (std::int64_t i = 0; i < mask.rows(); ++i) {
    for (std::int64_t j = 0; j < mask.cols(); ++j) {
      if (!mask.at(i, j)) continue;
      ++active;
      const double y = -5.0 + 10.0 * double(2 * i + 1) / 62.0;
      const double x = -5.0 + 10.0 * double(2 * j + 1) / 62.0;
      if (std::hypot(x - 1.0, y + 1.0) <= 1.5) ++near;
    }
  }
  std::printf("  (6: %lld of %lld active cells within 1.5 units of (1,-1))\n", (long long)near,
              (long long)active);
  report("6 mask localization at the bump center",
         active > 0 && double(near) >= 0.8 * double(active));
}

TEST_CASE("criterion 7: sparse encoding beats the dense ablation") {
  const BigRun& run = big_run();
  REQUIRE(run.results[0].error.empty());
  REQUIRE(run.results[1].error.empty());
  const auto& pr = run.results[0].curve.points;
  const auto& dense = run.results[1].curve.points;
  bool params_match = pr.size() == dense.size();
  for (std::size_t i = 0; params_match && i < pr.size(); ++i) {
    params_match = pr[i].params == dense[i].params;
  }
  report("7a architecture-matched parameter curves", params_match);
  const std::int64_t pr_final = pr.back().encoding_size;
  const std::int64_t dense_final = dense.back().encoding_size;
  std::printf("  (7b: final encoding sizes pr %lld vs dense %lld)\n", (long long)pr_final,
              (long long)dense_final);
  report("7b PR encoding strictly smaller at the final checkpoint", pr_final < dense_final);
}

TEST_CASE("criterion 8: counting formulas agree with structure walks") {
  Rng rng(8008);
  bool ok = true;
  for (int rep = 0; rep < 10; ++rep) {
    const std::int64_t n_levels = 1 + std::int64_t(rng.below(3));
    MrCaeModel model(63, 63, n_levels);
    Rng grow(900 + std::uint64_t(rep));
    std::int64_t closed = 0;
    for (std::int64_t k = 0; k < n_levels; ++k) {
      model.deepen(0.02, grow);
      closed += 20;
      const std::int64_t hc = (model.level(k).rows - 1) / 2;
      const std::int64_t n_groups = std::int64_t(rng.below(3));
      for (std::int64_t gi = 0; gi < n_groups; ++gi) {
        const std::int64_t g = 1 + std::int64_t(rng.below(5));
        SpatialMask mask(hc, hc);
        for (std::int64_t i = 0; i < hc; ++i)
          for (std::int64_t j = 0; j < hc; ++j) mask.set(i, j, rng.below(3) != 0);
        model.widen(mask, g, 0.02, grow);
        closed += 19 * g + 1;
      }
    }
    std::int64_t walked = 0;
    for (const auto& ref : parameter_arrays(model)) walked += std::int64_t(ref.values->size());
    ok = ok && model.count_params() == closed && model.count_params() == walked;

    // encoding size against the actual encode() payload
    const std::int64_t top_n = model.level(model.levels_grown() - 1).rows;
    const SnapshotTensor probe = random_tensor(2, 1, top_n, top_n, rng);
    const Encoding e = model.encode(probe);
    std::int64_t payload = e.innermost.rows() * e.innermost.cols();
    for (const auto& code : e.groups) payload += std::int64_t(code.values.size()) / 2;  // T=2
    ok = ok && payload == model.encoding_size() && e.size_per_snapshot() == payload;
  }
  report("8 parameter and encoding-size accounting", ok);
}

TEST_CASE("criterion 9: formats round-trip and corruption is always caught") {
  Rng rng(9009);
  const fs::path dir = fs::temp_directory_path() / "mrcae_acceptance_fuzz";
  fs::create_directories(dir);
  const std::string data_path = (dir / "fuzz.mrd").string();
  const std::string ckpt_path = (dir / "fuzz.ckpt").string();

  const SnapshotTensor data = random_tensor(4, 1, 15, 15, rng);
  write_data(data, data_path);
  bool ok = bitwise_equal(read_data(data_path), data);

  MrCaeModel model(15, 15, 1);
  Rng grow(909);
  model.deepen(0.05, grow);
  SpatialMask mask(7, 7);
  for (std::int64_t i = 0; i < 7; ++i)
    for (std::int64_t j = 0; j < 7; ++j) mask.set(i, j, rng.below(2) == 0);
  model.widen(mask, 3, 0.05, grow);
  model.meta.config_json = "{}";
  model.save_checkpoint(ckpt_path);
  {
    const MrCaeModel back = MrCaeModel::load_checkpoint(ckpt_path);
    const SnapshotTensor probe = random_tensor(2, 1, 15, 15, rng);
    ok = ok && bitwise_equal(back.forward(probe, 0), model.forward(probe, 0));
  }

  const auto data_bytes = io::read_file(data_path);
  const auto ckpt_bytes = io::read_file(ckpt_path);
  int caught = 0;
  for (int i = 0; i < 50; ++i) {
    const bool pick_data = i % 2 == 0;
    auto bytes = pick_data ? data_bytes : ckpt_bytes;
    const std::size_t pos = bytes.size() == 0 ? 0 : rng.below(bytes.size());
    const auto flip = std::uint8_t(1 + rng.below(255));
    bytes[pos] ^= flip;
    const std::string path = (dir / "corrupt.bin").string();
    io::write_file(path, bytes);
    try {
      if (pick_data) {
        (void)read_data(path);
      } else {
        (void)MrCaeModel::load_checkpoint(path);
      }
      // silent acceptance of corrupted bytes is the one unacceptable outcome
    } catch (const IoError&) {
      ++caught;
    }
  }
  std::printf("  (9: %d of 50 corruptions rejected)\n", caught);
  fs::remove_all(dir);
  report("9 format round-trips and fuzzed corruption", ok && caught == 50);
}

TEST_CASE("criterion 10: repeated cmd_train runs are byte-identical") {
  const fs::path base = fs::temp_directory_path() / "mrcae_acceptance_det";
  fs::remove_all(base);
  fs::create_directories(base / "a");
  fs::create_directories(base / "b");

  // identical relative arguments inside sibling directories keep the echoed
  // configuration byte-identical too
  {
    TwoModesParams p;
    p.nx = 31;
    p.ny = 31;
    p.nt = 20;
    write_data(gen_two_modes(p), (base / "d.mrd").string());
  }
  const std::string args =
      " train --data ../d.mrd --levels 2 --groups 1,1 --epochs 6 --g 2 --seed 7 "
      "--checkpoint m.ckpt --metrics m.csv > log.txt 2>&1";
  const int rc_a = run_shell("cd " + (base / "a").string() + " && " MRCAE_CLI_BIN + args);
  const int rc_b = run_shell("cd " + (base / "b").string() + " && " MRCAE_CLI_BIN + args);
  bool ok = rc_a == 0 && rc_b == 0;

  const auto ckpt_a = io::read_file((base / "a" / "m.ckpt").string());
  const auto ckpt_b = io::read_file((base / "b" / "m.ckpt").string());
  ok = ok && ckpt_a == ckpt_b;

  const std::string csv_a = io::read_text_file((base / "a" / "m.csv").string());
  const std::string csv_b = io::read_text_file((base / "b" / "m.csv").string());
  ok = ok && strip_wall_column(csv_a) == strip_wall_column(csv_b);
  fs::remove_all(base);
  report("10 deterministic train artifacts", ok);
}
