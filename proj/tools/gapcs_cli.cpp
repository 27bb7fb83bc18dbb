// Experiment CLI: synthetic sweeps, noise estimation, theory reports,
// patch-DCT image reconstruction and SVG rendering of the emitted CSVs.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "gapcs/csv.hpp"
#include "gapcs/experiments.hpp"
#include "gapcs/image_cs.hpp"
#include "gapcs/pgm.hpp"
#include "gapcs/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

struct CommonFlags {
  gapcs::ExperimentSpec spec;
  std::string matrix = "gaussian";
  double snr_db = 60.0;
  bool noisy_flag_given = false;
};

void add_common_options(CLI::App* cmd, CommonFlags& flags) {
  flags.spec.workers = default_workers();
  cmd->set_config("--config", "", "flat key=value file mirroring the flags");
  cmd->add_option("--m", flags.spec.m, "measurement count M")
      ->capture_default_str();
  cmd->add_option("--n", flags.spec.n, "signal length N")
      ->capture_default_str();
  cmd->add_option("--k", flags.spec.k, "true sparsity K")
      ->capture_default_str();
  cmd->add_option("--mstar", flags.spec.m_star,
                  "support budget m* (default: K; noise-est: 4K)");
  cmd->add_option("--alpha", flags.spec.alphas, "step-size(s)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--snr-db", flags.snr_db, "SNR of the noisy condition (dB)")
      ->capture_default_str();
  cmd->add_option("--matrix", flags.matrix, "sensing matrix kind")
      ->check(CLI::IsMember({"gaussian", "binary"}))
      ->capture_default_str();
  cmd->add_option("--seeds", flags.spec.seeds, "seeds (comma separated)")
      ->delimiter(',');
  cmd->add_option("--out", flags.spec.output_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--workers", flags.spec.workers, "concurrent runs")
      ->capture_default_str();
  cmd->add_option("--max-iters", flags.spec.max_iters, "iteration cap")
      ->capture_default_str();
}

gapcs::ExperimentSpec finish_spec(const CommonFlags& flags) {
  gapcs::ExperimentSpec spec = flags.spec;
  spec.matrix_kind = flags.matrix == "binary" ? gapcs::MatrixKind::Binary
                                              : gapcs::MatrixKind::Gaussian;
  spec.snr_db = flags.snr_db;
  return spec;
}

int report_outcome(const gapcs::ExperimentOutcome& outcome) {
  for (const auto& file : outcome.files) {
    std::cout << "wrote " << file.string() << '\n';
  }
  if (outcome.failures > 0) {
    std::cout << outcome.failures
              << " run(s) flagged as failures; see the CSVs\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressive-sensing solver bench (projection vs thresholding)"};
  app.require_subcommand(1);

  CommonFlags convergence_flags, mstar_flags, k_flags, noise_flags,
      theory_flags;

  auto* convergence =
      app.add_subcommand("convergence", "error-vs-iteration traces");
  add_common_options(convergence, convergence_flags);

  auto* mstar = app.add_subcommand("mstar-sweep", "sweep the support budget");
  add_common_options(mstar, mstar_flags);
  mstar
      ->add_option("--mstar-values", mstar_flags.spec.m_star_values,
                   "sweep points")
      ->delimiter(',');

  auto* ksweep = app.add_subcommand("k-sweep", "sweep the true sparsity");
  add_common_options(ksweep, k_flags);
  ksweep->add_option("--k-values", k_flags.spec.k_values, "sweep points")
      ->delimiter(',');

  auto* noise =
      app.add_subcommand("noise-est", "noise estimation from the residual");
  add_common_options(noise, noise_flags);
  noise->add_option("--stds", noise_flags.spec.noise_stds, "noise std levels")
      ->delimiter(',');

  auto* theory = app.add_subcommand(
      "theory-grid", "rate-constant grid and certification report");
  add_common_options(theory, theory_flags);
  theory->add_option("--points", theory_flags.spec.grid_points, "grid size")
      ->capture_default_str();
  theory
      ->add_option("--grid-seed", theory_flags.spec.grid_seed,
                   "grid sampling seed")
      ->capture_default_str();

  auto* image =
      app.add_subcommand("image", "patch-DCT image compressive sensing");
  std::string image_path;
  gapcs::ImageCsSpec image_spec;
  double image_snr = 0.0;
  fs::path image_out = "out";
  image->set_config("--config", "", "flat key=value file mirroring the flags");
  image->add_option("--image", image_path,
                    "input PGM (P5); omit for a built-in test pattern");
  image->add_option("--rate", image_spec.measurement_rate, "measurement rate")
      ->capture_default_str();
  image->add_option("--patch", image_spec.patch_size, "patch size")
      ->capture_default_str();
  image->add_option("--stride", image_spec.stride, "patch stride")
      ->capture_default_str();
  image->add_option("--alpha", image_spec.alpha, "step-size")
      ->capture_default_str();
  image
      ->add_option("--mstar-frac", image_spec.m_star_fraction,
                   "kept fraction of patch coefficients")
      ->capture_default_str();
  auto* image_snr_opt =
      image->add_option("--snr-db", image_snr, "measurement SNR (dB)");
  image->add_option("--seed", image_spec.seed, "seed")->capture_default_str();
  image->add_option("--iters", image_spec.max_iters, "iteration cap")
      ->capture_default_str();
  image->add_option("--out", image_out, "output directory")
      ->capture_default_str();

  auto* plot = app.add_subcommand("plot", "render CSVs to SVG");
  fs::path plot_csv_dir = "out";
  fs::path plot_out_dir = "out";
  plot->add_option("--csv-dir", plot_csv_dir, "directory with experiment CSVs")
      ->capture_default_str();
  plot->add_option("--out", plot_out_dir, "output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (convergence->parsed()) {
      return report_outcome(
          gapcs::run_convergence_experiment(finish_spec(convergence_flags)));
    }
    if (mstar->parsed()) {
      return report_outcome(gapcs::run_mstar_sweep(finish_spec(mstar_flags)));
    }
    if (ksweep->parsed()) {
      return report_outcome(gapcs::run_k_sweep(finish_spec(k_flags)));
    }
    if (noise->parsed()) {
      return report_outcome(
          gapcs::run_noise_estimation(finish_spec(noise_flags)));
    }
    if (theory->parsed()) {
      return report_outcome(gapcs::run_theory_grid(finish_spec(theory_flags)));
    }
    if (image->parsed()) {
      image_spec.image = image_path.empty() ? gapcs::make_demo_image(64, 64)
                                            : gapcs::load_pgm(image_path);
      if (!image_snr_opt->empty()) image_spec.snr_db = image_snr;
      fs::create_directories(image_out);
      gapcs::save_pgm(image_spec.image, image_out / "image_input.pgm");

      image_spec.algorithm = gapcs::Algorithm::Gap;
      const auto gap = gapcs::run_image_cs(image_spec);
      image_spec.algorithm = gapcs::Algorithm::Ait;
      const auto ait = gapcs::run_image_cs(image_spec);
      gapcs::save_pgm(gap.reconstruction, image_out / "image_recon_gap.pgm");
      gapcs::save_pgm(ait.reconstruction, image_out / "image_recon_ait.pgm");

      gapcs::CsvWriter csv(image_out / "image_trace.csv");
      csv.row({"iter", "psnr_gap", "psnr_ait", "err_gap", "err_ait"});
      const std::size_t rows =
          std::max(gap.psnr_trace.size(), ait.psnr_trace.size());
      for (std::size_t t = 0; t < rows; ++t) {
        csv.row({gapcs::CsvWriter::cell(t + 1),
                 t < gap.psnr_trace.size()
                     ? gapcs::CsvWriter::cell(gap.psnr_trace[t])
                     : std::string(),
                 t < ait.psnr_trace.size()
                     ? gapcs::CsvWriter::cell(ait.psnr_trace[t])
                     : std::string(),
                 t + 1 < gap.err_trace.size()
                     ? gapcs::CsvWriter::cell(gap.err_trace[t + 1])
                     : std::string(),
                 t + 1 < ait.err_trace.size()
                     ? gapcs::CsvWriter::cell(ait.err_trace[t + 1])
                     : std::string()});
      }
      std::cout << "wrote " << (image_out / "image_trace.csv").string() << '\n'
                << "final PSNR: projection " << gap.psnr_trace.back()
                << " dB, thresholding " << ait.psnr_trace.back() << " dB\n";
      const bool diverged =
          gap.stop_reason == gapcs::StopReason::Diverged ||
          ait.stop_reason == gapcs::StopReason::Diverged;
      return diverged ? 1 : 0;
    }
    if (plot->parsed()) {
      const auto files = gapcs::render_plots(plot_csv_dir, plot_out_dir);
      for (const auto& file : files) std::cout << "wrote " << file.string() << '\n';
      return 0;
    }
  } catch (const gapcs::DomainError& e) {
    std::cerr << "invalid arguments: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
