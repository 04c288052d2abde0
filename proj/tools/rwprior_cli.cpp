#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "rwprior/config.hpp"
#include "rwprior/conv.hpp"
#include "rwprior/experiment.hpp"
#include "rwprior/presets.hpp"

using namespace rwprior;

namespace {

void print_summary(const ExperimentSummary& s) {
  for (const CellSummary& c : s.cells) {
    std::cout << c.config_label << ": psnr " << c.psnr_mean << " +- " << c.psnr_std << ", ssim " << c.ssim_mean
              << " +- " << c.ssim_std;
    if (c.delta_psnr) std::cout << ", dpsnr " << *c.delta_psnr;
    if (c.aborted) std::cout << ", aborted " << c.aborted << "/" << c.runs;
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-weight loss prior experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  std::vector<std::string> presets;
  std::vector<std::uint64_t> seeds;
  std::size_t jobs = 1;
  int threads = 1;
  bool dump = false, verbose = false;

  CLI::App* run = app.add_subcommand("run", "Train every cell x seed of a config");
  run->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--preset", presets, "Preset applied over the config (repeatable, applied in order)");
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--seed", seeds, "Seed list (overrides seeds and MANIFOLD_LOSS_SEED)");
  run->add_option("--jobs", jobs, "Concurrent training runs")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "OpenMP threads per convolution kernel")->check(CLI::PositiveNumber);
  run->add_flag("--dump-images", dump, "Write PGM samples of the first validation image");
  run->add_flag("-v,--verbose", verbose, "Log every epoch to stderr");

  CLI::App* an = app.add_subcommand("analyze", "Rebuild summary.json from CSV results");
  an->add_option("--in", in_dir, "Results directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (an->parsed()) {
      const ExperimentSummary s = analyze_directory(in_dir);
      print_summary(s);
      return s.aborted_runs() ? 1 : 0;
    }
    ExperimentConfig cfg = apply_seed_env(load_config(config_path), std::getenv("MANIFOLD_LOSS_SEED"));
    for (const std::string& p : presets) apply_preset(cfg, p);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    set_kernel_threads(threads);
    const ExperimentSummary s = run_experiment(cfg, {jobs, dump, !verbose});
    print_summary(s);
    std::cout << "results written to " << cfg.output_dir << "\n";
    return s.aborted_runs() ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
