#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrcae/bench.hpp"
#include "mrcae/trainer.hpp"

namespace mrcae::cli {

struct GenOptions {
  std::string example = "modes2";
  std::string out_path = "data.mrd";
  std::int64_t nx = 127;
  std::int64_t ny = 127;
  std::int64_t nt = 500;
  double omega0 = 0.5;
  double omega1 = 4.0;
  double sigma0 = 10.0;
  double sigma1 = 0.25;
  double v = 1.0;
  double t_min = 0.0;
  double t_max = -1.0;  // negative: per-example default
};

struct TrainOptions {
  std::string data_path;
  std::string checkpoint_path = "model.ckpt";
  std::string metrics_path = "metrics.csv";
  std::int64_t levels = 3;
  TrainConfig cfg;
};

struct EvalOptions {
  std::string checkpoint_path;
  std::string data_path;
  std::string split = "val";  // train / val / test / all
  std::string dump_dir;       // nonempty: write reconstructions + residual maps
  double omega = -1.0;        // negative: from checkpoint config
  std::int64_t level = -1;    // negative: all grown levels
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
};

struct BenchOptions {
  std::string data_path;
  std::string out_dir = "bench_out";
  std::int64_t levels = 3;
  std::vector<std::string> variants;
  TrainConfig cfg;
};

struct ReportOptions {
  std::string metrics_path;
  std::string out_dir = "plots";
};

// Subcommand bodies; they throw on failure and run_cli maps exceptions to
// exit codes (0 success, 1 runtime failure, 2 usage/config error).
void cmd_gen(const GenOptions& o);
void cmd_train(const TrainOptions& o);
void cmd_eval(const EvalOptions& o);
void cmd_bench(const BenchOptions& o);
void cmd_report(const ReportOptions& o);

int run_cli(int argc, const char* const* argv);

std::string train_config_to_json_text(const TrainConfig& cfg);
TrainConfig train_config_from_json_text(const std::string& text);

}  // namespace mrcae::cli
