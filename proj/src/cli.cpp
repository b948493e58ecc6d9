#include "mrcae/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "mrcae/errors.hpp"
#include "mrcae/io.hpp"

namespace mrcae::cli {

using nlohmann::json;

namespace {

std::string crc_hex(const std::vector<std::uint8_t>& bytes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", io::crc32(bytes.data(), bytes.size()));
  return buf;
}

json train_config_to_json(const TrainConfig& cfg) {
  json j;
  j["omega"] = cfg.omega;
  j["eps_per_level"] = cfg.eps_per_level;
  j["eps_tau"] = cfg.eps_tau;
  j["max_epochs"] = cfg.max_epochs;
  j["learning_rate"] = cfg.adam.lr;
  j["beta1"] = cfg.adam.beta1;
  j["beta2"] = cfg.adam.beta2;
  j["adam_epsilon"] = cfg.adam.eps;
  j["batch"] = cfg.batch;
  j["group_channels"] = cfg.group_channels;
  j["max_groups"] = cfg.max_groups;
  if (cfg.schedule.automatic) {
    j["widen_schedule"] = "auto";
  } else {
    j["widen_schedule"] = cfg.schedule.counts;
  }
  j["init_noise"] = cfg.init_noise;
  j["seed"] = cfg.seed;
  j["freeze_lower"] = cfg.freeze_lower;
  j["activation"] = to_string(cfg.activation);
  j["dense_masks"] = cfg.dense_masks;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.omega = j.at("omega").get<double>();
  cfg.eps_per_level = j.at("eps_per_level").get<std::vector<double>>();
  cfg.eps_tau = j.at("eps_tau").get<double>();
  cfg.max_epochs = j.at("max_epochs").get<std::int64_t>();
  cfg.adam.lr = j.at("learning_rate").get<double>();
  cfg.adam.beta1 = j.at("beta1").get<double>();
  cfg.adam.beta2 = j.at("beta2").get<double>();
  cfg.adam.eps = j.at("adam_epsilon").get<double>();
  cfg.batch = j.at("batch").get<std::int64_t>();
  cfg.group_channels = j.at("group_channels").get<std::int64_t>();
  cfg.max_groups = j.at("max_groups").get<std::int64_t>();
  if (j.at("widen_schedule").is_string()) {
    cfg.schedule.automatic = true;
  } else {
    cfg.schedule.automatic = false;
    cfg.schedule.counts = j.at("widen_schedule").get<std::vector<std::int64_t>>();
  }
  cfg.init_noise = j.at("init_noise").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.freeze_lower = j.at("freeze_lower").get<bool>();
  cfg.activation = activation_from_string(j.at("activation").get<std::string>());
  cfg.dense_masks = j.at("dense_masks").get<bool>();
  return cfg;
}

void write_provenance(const std::string& path, const json& j) {
  io::write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::int64_t> split_indices(const DataPyramid& p, const std::string& split) {
  if (split == "train") return p.train_idx;
  if (split == "val") return p.val_idx;
  if (split == "test") return p.test_idx;
  if (split == "all") {
    std::vector<std::int64_t> all(std::size_t(p.finest().snapshots()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = std::int64_t(i);
    return all;
  }
  throw ConfigError("unknown split: " + split + " (expected train, val, test, all)");
}

}  // namespace

std::string train_config_to_json_text(const TrainConfig& cfg) {
  return train_config_to_json(cfg).dump();
}

TrainConfig train_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    if (j.contains("train")) j = j.at("train");
    return train_config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cannot parse train config JSON: ") + e.what());
  }
}

void cmd_gen(const GenOptions& o) {
  SnapshotTensor data;
  json params;
  if (o.example == "modes2") {
    TwoModesParams p;
    p.nx = o.nx;
    p.ny = o.ny;
    p.nt = o.nt;
    p.omega0 = o.omega0;
    p.omega1 = o.omega1;
    p.sigma0 = o.sigma0;
    p.sigma1 = o.sigma1;
    p.t_min = o.t_min;
    if (o.t_max >= 0.0) p.t_max = o.t_max;
    data = gen_two_modes(p);
    params = {{"omega0", p.omega0}, {"omega1", p.omega1}, {"sigma0", p.sigma0},
              {"sigma1", p.sigma1}, {"t_min", p.t_min},   {"t_max", p.t_max}};
  } else if (o.example == "modes2-drift") {
    DriftingModesParams p;
    p.nx = o.nx;
    p.ny = o.ny;
    p.nt = o.nt;
    p.omega0 = o.omega0;
    p.omega1 = o.omega1;
    p.sigma0 = o.sigma0;
    p.sigma1 = o.sigma1;
    p.v = o.v;
    p.t_min = o.t_min;
    if (o.t_max >= 0.0) p.t_max = o.t_max;
    data = gen_drifting_modes(p);
    params = {{"omega0", p.omega0}, {"omega1", p.omega1}, {"sigma0", p.sigma0},
              {"sigma1", p.sigma1}, {"v", p.v},           {"t_min", p.t_min},
              {"t_max", p.t_max}};
  } else {
    throw ConfigError("unknown example: " + o.example + " (expected modes2, modes2-drift)");
  }
  write_data(data, o.out_path);
  const auto bytes = io::read_file(o.out_path);
  json prov = {{"command", "gen"},
               {"example", o.example},
               {"out", o.out_path},
               {"nx", o.nx},
               {"ny", o.ny},
               {"nt", o.nt},
               {"params", params}};
  write_provenance(o.out_path + ".provenance.json", prov);
  std::printf("wrote %s: %lld snapshots of %lldx%lld, crc32 %s\n", o.out_path.c_str(),
              (long long)data.snapshots(), (long long)data.rows(), (long long)data.cols(),
              crc_hex(bytes).c_str());
}

void cmd_train(const TrainOptions& o) {
  validate(o.cfg);
  const SnapshotTensor data = read_data(o.data_path);
  const DataPyramid pyramid = build_pyramid(data, o.levels, o.cfg.seed);

  json prov = {{"command", "train"},
               {"data", o.data_path},
               {"levels", o.levels},
               {"checkpoint", o.checkpoint_path},
               {"metrics", o.metrics_path},
               {"train", train_config_to_json(o.cfg)}};
  const std::string prov_text = prov.dump();

  auto [model, history] = progressive_train(pyramid, o.cfg);
  model.meta.config_json = prov_text;
  model.meta.config_hash = crc_hex(std::vector<std::uint8_t>(prov_text.begin(), prov_text.end()));
  model.meta.seed = o.cfg.seed;
  model.save_checkpoint(o.checkpoint_path);
  io::write_text_file(o.metrics_path, history.to_csv());
  write_provenance(o.metrics_path + ".provenance.json", prov);

  const HistoryRow& last = history.rows.back();
  std::printf("trained %lld levels, %lld phases, %lld params, encoding %lld values/snapshot\n",
              (long long)model.levels_grown(), (long long)history.phase_count(),
              (long long)model.count_params(), (long long)model.encoding_size());
  std::printf("final val global loss: total %s mse %s max %s\n",
              io::fmt_double(last.val_global.total).c_str(),
              io::fmt_double(last.val_global.mse_part).c_str(),
              io::fmt_double(last.val_global.max_part).c_str());
  std::printf("checkpoint %s, metrics %s\n", o.checkpoint_path.c_str(), o.metrics_path.c_str());
}

void cmd_eval(const EvalOptions& o) {
  const MrCaeModel model = MrCaeModel::load_checkpoint(o.checkpoint_path);
  const SnapshotTensor data = read_data(o.data_path);
  if (data.rows() != model.finest_rows() || data.cols() != model.finest_cols()) {
    throw ShapeError("eval: data " + data.dims().str() + " does not match model finest grid (" +
                     std::to_string(model.finest_rows()) + "," +
                     std::to_string(model.finest_cols()) + ")");
  }
  double omega = o.omega;
  std::uint64_t seed = o.has_seed_override ? o.seed_override : model.meta.seed;
  if (omega < 0.0) {
    omega = 0.5;
    if (!model.meta.config_json.empty()) {
      omega = train_config_from_json_text(model.meta.config_json).omega;
    }
  }
  const DataPyramid pyramid = build_pyramid(data, model.n_levels(), seed);
  const auto idx = split_indices(pyramid, o.split);
  const SnapshotTensor finest = gather_snapshots(pyramid.finest(), idx);
  std::printf("split %s: %lld snapshots, omega %s\n", o.split.c_str(), (long long)idx.size(),
              io::fmt_double(omega).c_str());
  const std::int64_t lo = o.level >= 0 ? o.level : 0;
  const std::int64_t hi = o.level >= 0 ? o.level : model.levels_grown() - 1;
  for (std::int64_t k = lo; k <= hi; ++k) {
    const LossValue gl = global_loss(model, k, finest, omega);
    std::printf("level %lld: total %s mse %s max %s\n", (long long)k,
                io::fmt_double(gl.total).c_str(), io::fmt_double(gl.mse_part).c_str(),
                io::fmt_double(gl.max_part).c_str());
    if (!o.dump_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(o.dump_dir, ec);
      if (ec) throw IoError("cannot create dump directory " + o.dump_dir);
      SnapshotTensor view = finest;
      for (std::int64_t s = 0; s < model.n_levels() - 1 - k; ++s) view = decimate(view);
      SnapshotTensor recon = model.forward(view, k);
      for (std::int64_t s = 0; s < model.n_levels() - 1 - k; ++s) recon = bilinear_upsample(recon);
      write_data(recon, o.dump_dir + "/recon_level" + std::to_string(k) + ".mrd");
      const ScalarField residual = reduce_time_mean_sq(finest, recon);
      SnapshotTensor heat(1, 1, residual.rows(), residual.cols());
      for (std::int64_t i = 0; i < residual.rows(); ++i) {
        for (std::int64_t j = 0; j < residual.cols(); ++j) heat(0, 0, i, j) = residual(i, j);
      }
      write_data(heat, o.dump_dir + "/residual_level" + std::to_string(k) + ".mrd");
    }
  }
}

void cmd_bench(const BenchOptions& o) {
  if (o.variants.empty()) throw ConfigError("bench: variant list is empty");
  validate(o.cfg);
  const SnapshotTensor data = read_data(o.data_path);
  const DataPyramid pyramid = build_pyramid(data, o.levels, o.cfg.seed);
  std::vector<VariantSpec> specs;
  for (const auto& name : o.variants) {
    specs.push_back({variant_from_string(name), o.cfg});
  }
  const auto results = run_benchmark(pyramid, specs);
  std::vector<BenchCurve> curves;
  bool any_ok = false;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      std::fprintf(stderr, "variant %s failed: %s\n", to_string(r.kind), r.error.c_str());
      continue;
    }
    any_ok = true;
    std::printf("variant %s: %zu checkpoints, %.1f s\n", to_string(r.kind),
                r.curve.points.size(), r.wall_ms / 1000.0);
    curves.push_back(r.curve);
  }
  if (!any_ok) throw TrainError("all benchmark variants failed");
  emit_report(curves, o.out_dir);
  json prov = {{"command", "bench"},
               {"data", o.data_path},
               {"levels", o.levels},
               {"variants", o.variants},
               {"out_dir", o.out_dir},
               {"train", train_config_to_json(o.cfg)}};
  write_provenance(o.out_dir + "/provenance.json", prov);
  std::printf("report written to %s\n", o.out_dir.c_str());
}

void cmd_report(const ReportOptions& o) {
  const std::string text = io::read_text_file(o.metrics_path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("metrics CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 14 || header[0] != "level" || header[8] != "val_global_total") {
    throw FormatError("unrecognized metrics CSV header");
  }
  TrainHistory history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw FormatError("metrics CSV row has wrong field count");
    HistoryRow row;
    row.level = std::strtoll(f[0].c_str(), nullptr, 10);
    row.phase = std::strtoll(f[1].c_str(), nullptr, 10);
    row.op = f[2];
    row.epoch = std::strtoll(f[3].c_str(), nullptr, 10);
    row.val_global.total = std::strtod(f[8].c_str(), nullptr);
    row.val_global.mse_part = std::strtod(f[9].c_str(), nullptr);
    row.val_global.max_part = std::strtod(f[10].c_str(), nullptr);
    history.rows.push_back(std::move(row));
  }
  if (history.rows.empty()) throw FormatError("metrics CSV has no rows");
  const std::string path = emit_training_curve(history, o.out_dir);
  std::printf("wrote %s\n", path.c_str());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"multi-resolution convolutional autoencoder toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file; sections name subcommands, flags win");

  GenOptions gen;
  auto* cgen = app.add_subcommand("gen", "generate a synthetic dataset");
  cgen->add_option("--example", gen.example, "dataset family")
      ->check(CLI::IsMember({"modes2", "modes2-drift"}));
  cgen->add_option("--out", gen.out_path, "output data file");
  cgen->add_option("--nx", gen.nx, "grid points along x (2^p-1)");
  cgen->add_option("--ny", gen.ny, "grid points along y (2^q-1)");
  cgen->add_option("--nt", gen.nt, "snapshot count");
  cgen->add_option("--omega0", gen.omega0, "slow temporal frequency");
  cgen->add_option("--omega1", gen.omega1, "fast temporal frequency");
  cgen->add_option("--sigma0", gen.sigma0, "broad mode length scale");
  cgen->add_option("--sigma1", gen.sigma1, "narrow mode length scale");
  cgen->add_option("--v", gen.v, "drift parameter (recorded only)");
  cgen->add_option("--t-min", gen.t_min, "start of the sampled time interval");
  cgen->add_option("--t-max", gen.t_max, "end of the sampled time interval");

  TrainOptions train;
  std::vector<std::int64_t> groups;
  bool auto_widen = false, use_relu = false;
  auto* ctrain = app.add_subcommand("train", "progressively train a model");
  ctrain->add_option("--data", train.data_path, "input data file")->required();
  ctrain->add_option("--checkpoint", train.checkpoint_path, "output checkpoint");
  ctrain->add_option("--metrics", train.metrics_path, "output metrics CSV");
  ctrain->add_option("--levels", train.levels, "number of resolution levels");
  ctrain->add_option("--groups", groups, "explicit widen counts per level")->delimiter(',');
  ctrain->add_flag("--auto-widen", auto_widen, "widen while the residual mask is nonempty");
  ctrain->add_option("--omega", train.cfg.omega, "loss weight between mse and max terms");
  ctrain->add_option("--eps", train.cfg.eps_per_level, "mask tolerance per level")
      ->delimiter(',');
  ctrain->add_option("--eps-tau", train.cfg.eps_tau,
                     "mask tolerance as a fraction of the level variance");
  ctrain->add_option("--epochs", train.cfg.max_epochs, "max epochs per phase");
  ctrain->add_option("--lr", train.cfg.adam.lr, "learning rate");
  ctrain->add_option("--beta1", train.cfg.adam.beta1, "first moment decay");
  ctrain->add_option("--beta2", train.cfg.adam.beta2, "second moment decay");
  ctrain->add_option("--adam-eps", train.cfg.adam.eps, "optimizer epsilon");
  ctrain->add_option("--batch", train.cfg.batch, "snapshots per step (0 = full batch)");
  ctrain->add_option("--g", train.cfg.group_channels, "channels per widening group");
  ctrain->add_option("--max-groups", train.cfg.max_groups, "widening cap per level");
  ctrain->add_option("--init-noise", train.cfg.init_noise, "growth init noise scale");
  ctrain->add_option("--seed", train.cfg.seed, "run seed");
  ctrain->add_flag("--relu", use_relu, "use the rectifier after widening convs");
  ctrain->add_flag("--freeze-lower", train.cfg.freeze_lower, "train only the newest level");
  ctrain->add_flag("--dense-masks", train.cfg.dense_masks, "widen with all-ones masks");

  EvalOptions eval;
  std::int64_t eval_seed = -1;
  auto* ceval = app.add_subcommand("eval", "evaluate a checkpoint against data");
  ceval->add_option("--checkpoint", eval.checkpoint_path, "checkpoint file")->required();
  ceval->add_option("--data", eval.data_path, "data file")->required();
  ceval->add_option("--split", eval.split, "snapshot split to evaluate")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  ceval->add_option("--omega", eval.omega, "loss weight override");
  ceval->add_option("--level", eval.level, "evaluate one level only");
  ceval->add_option("--seed", eval_seed, "split seed override");
  ceval->add_option("--dump-recon", eval.dump_dir, "write reconstructions + residual maps here");

  BenchOptions bench;
  std::vector<std::int64_t> bench_groups;
  auto* cbench = app.add_subcommand("bench", "compare variants on one schedule");
  cbench->add_option("--data", bench.data_path, "input data file")->required();
  cbench->add_option("--out-dir", bench.out_dir, "report directory");
  cbench->add_option("--levels", bench.levels, "number of resolution levels");
  cbench->add_option("--variants", bench.variants, "comma list: pr,dense,pr_relu,dense_relu")
      ->delimiter(',')
      ->required();
  cbench->add_option("--groups", bench_groups, "explicit widen counts per level")
      ->delimiter(',')
      ->required();
  cbench->add_option("--omega", bench.cfg.omega, "loss weight");
  cbench->add_option("--eps", bench.cfg.eps_per_level, "mask tolerance per level")
      ->delimiter(',');
  cbench->add_option("--eps-tau", bench.cfg.eps_tau, "mask tolerance fraction");
  cbench->add_option("--epochs", bench.cfg.max_epochs, "max epochs per phase");
  cbench->add_option("--lr", bench.cfg.adam.lr, "learning rate");
  cbench->add_option("--batch", bench.cfg.batch, "snapshots per step (0 = full batch)");
  cbench->add_option("--g", bench.cfg.group_channels, "channels per widening group");
  cbench->add_option("--init-noise", bench.cfg.init_noise, "growth init noise scale");
  cbench->add_option("--seed", bench.cfg.seed, "base seed");

  ReportOptions report;
  auto* creport = app.add_subcommand("report", "render a training-curve chart");
  creport->add_option("--metrics", report.metrics_path, "metrics CSV from train")->required();
  creport->add_option("--out", report.out_dir, "output directory");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cgen->parsed()) {
      cmd_gen(gen);
    } else if (ctrain->parsed()) {
      if (!groups.empty() && auto_widen) {
        throw ConfigError("--groups and --auto-widen are mutually exclusive");
      }
      if (!groups.empty()) {
        train.cfg.schedule.automatic = false;
        train.cfg.schedule.counts = groups;
      }
      if (use_relu) train.cfg.activation = Activation::relu;
      cmd_train(train);
    } else if (ceval->parsed()) {
      if (eval_seed >= 0) {
        eval.has_seed_override = true;
        eval.seed_override = std::uint64_t(eval_seed);
      }
      cmd_eval(eval);
    } else if (cbench->parsed()) {
      bench.cfg.schedule.automatic = false;
      bench.cfg.schedule.counts = bench_groups;
      cmd_bench(bench);
    } else if (creport->parsed()) {
      cmd_report(report);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace mrcae::cli
