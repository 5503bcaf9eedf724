// bihlab: forward / verify / probe / reconstruct / stability / report
#include <omp.h>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "bih/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral data and probe reconstruction for perturbed bi-harmonic operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, snapshot;
  int threads = 0;
  long long seed = -1;
  app.add_option("--config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--eigsnapshot", snapshot, "snapshot base path; <path>.1.bin and <path>.2.bin");
  app.add_option("--threads", threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (overrides config)")->check(CLI::NonNegativeNumber);

  using Fn = bih::Status (*)(const bih::RunConfig&, const bih::PipelineOptions&);
  const std::pair<const char*, Fn> stages[] = {
      {"forward", bih::run_forward},         {"verify", bih::run_verify},       {"probe", bih::run_probe},
      {"reconstruct", bih::run_reconstruct}, {"stability", bih::run_stability}, {"report", bih::run_report},
  };
  for (const auto& [name, fn] : stages) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(bih::Status::config);
  }

  try {
    bih::RunConfig cfg = bih::load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    omp_set_num_threads(cfg.threads);

    bih::PipelineOptions opt;
    opt.eigsnapshot = snapshot;
    opt.parallel = cfg.threads > 1;
    for (const auto& [name, fn] : stages) {
      if (app.got_subcommand(name)) {
        const bih::Status s = fn(cfg, opt);
        return static_cast<int>(s);
      }
    }
  } catch (const bih::Error& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(e.status);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(bih::Status::solver);
  }
  return 0;
}
