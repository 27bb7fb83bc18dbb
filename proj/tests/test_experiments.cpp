#include "gapcs/experiments.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gapcs/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

gapcs::ExperimentSpec tiny_spec(const std::string& dir_tag) {
  gapcs::ExperimentSpec spec;
  spec.m = 40;
  spec.n = 64;
  spec.k = 3;
  spec.alphas = {1.0};
  spec.seeds = {1, 2};
  spec.max_iters = 200;
  spec.output_dir = fs::temp_directory_path() / ("gapcs_exp_" + dir_tag);
  fs::remove_all(spec.output_dir);
  return spec;
}

TEST(ValidateSpec, RejectsBadGeometry) {
  auto spec = tiny_spec("validate");
  spec.m = 64;
  EXPECT_THROW(gapcs::validate_spec(spec), gapcs::DomainError);
  spec = tiny_spec("validate2");
  spec.seeds.clear();
  EXPECT_THROW(gapcs::validate_spec(spec), gapcs::DomainError);
}

TEST(ParallelFor, MatchesSerialAndPropagatesErrors) {
  std::vector<int> serial(100), threaded(100);
  gapcs::parallel_for(100, 1, [&](int i) { serial[i] = i * i; });
  gapcs::parallel_for(100, 4, [&](int i) { threaded[i] = i * i; });
  EXPECT_EQ(serial, threaded);
  EXPECT_THROW(gapcs::parallel_for(10, 4,
                                   [](int i) {
                                     if (i == 7) throw gapcs::DomainError("x");
                                   }),
               gapcs::DomainError);
}

TEST(ConvergenceRuns, ProducesExpectedGridAndConverges) {
  const auto spec = tiny_spec("conv");
  const auto runs = gapcs::convergence_runs(spec);
  EXPECT_EQ(runs.size(), 2u * 1u * 2u * 2u);
  for (const auto& run : runs) {
    EXPECT_LT(run.max_consistency_residual, 1e-9);
    EXPECT_LE(run.max_support_size, spec.k);
    if (run.algorithm == gapcs::Algorithm::Gap && !run.noisy) {
      EXPECT_GT(run.iters_to_target, 0);
      EXPECT_LT(run.final_err, 1e-8);
    }
    if (run.noisy) {
      EXPECT_TRUE(std::isfinite(run.plateau_err));
    }
  }
}

TEST(ConvergenceRuns, WorkerCountDoesNotChangeResults) {
  auto spec = tiny_spec("conv_workers");
  spec.workers = 1;
  const auto serial = gapcs::convergence_runs(spec);
  spec.workers = 4;
  const auto threaded = gapcs::convergence_runs(spec);
  ASSERT_EQ(serial.size(), threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].err_w, threaded[i].err_w);
  }
}

TEST(ConvergenceExperiment, WritesReproducibleCsvs) {
  auto spec = tiny_spec("conv_csv_a");
  const auto first = gapcs::run_convergence_experiment(spec);
  EXPECT_FALSE(first.files.empty());
  auto spec2 = tiny_spec("conv_csv_b");
  const auto second = gapcs::run_convergence_experiment(spec2);
  ASSERT_EQ(first.files.size(), second.files.size());
  for (std::size_t i = 0; i < first.files.size(); ++i) {
    EXPECT_EQ(slurp(first.files[i]), slurp(second.files[i]))
        << first.files[i];
  }
  const auto table = gapcs::CsvTable::load(spec.output_dir /
                                           "convergence_summary.csv");
  EXPECT_EQ(table.rows.size(), 8u);
  EXPECT_GE(table.column_index("iters_to_1e-8"), 0);
}

TEST(MstarSweep, LabelsBudgetBelowK) {
  auto spec = tiny_spec("mstar");
  spec.seeds = {1, 2, 3};
  spec.m_star_values = {2, 3, 6};
  const auto runs = gapcs::mstar_sweep_runs(spec);
  EXPECT_EQ(runs.size(), 3u * 2u * 2u * 3u);
  for (const auto& run : runs) {
    EXPECT_EQ(run.budget_below_k, run.m_star < spec.k);
    EXPECT_EQ(run.success,
              run.final_err <
                  (run.noisy ? gapcs::kNoisySuccessErr
                             : gapcs::kNoiselessSuccessErr));
    // below-budget runs cannot reach the tight noiseless threshold (the
    // loose noisy one can admit lucky 2-sparse approximations)
    if (run.budget_below_k && !run.noisy) EXPECT_FALSE(run.success);
    if (run.algorithm == gapcs::Algorithm::Gap && run.m_star == spec.k &&
        !run.noisy) {
      EXPECT_TRUE(run.success);
    }
  }
  const auto outcome = gapcs::run_mstar_sweep(spec);
  EXPECT_GT(outcome.failures, 0);  // the m* < K points fail by construction
  const auto table = gapcs::CsvTable::load(spec.output_dir / "mstar_sweep.csv");
  EXPECT_EQ(table.rows.size(), runs.size());
}

TEST(KSweep, RecoversAtModestSparsity) {
  auto spec = tiny_spec("ksweep");
  spec.seeds = {1, 2, 3};
  spec.k_values = {2, 4};
  const auto runs = gapcs::k_sweep_runs(spec);
  EXPECT_EQ(runs.size(), 2u * 2u * 2u * 3u);
  for (const auto& run : runs) {
    EXPECT_EQ(run.m_star, run.k);
    if (run.algorithm == gapcs::Algorithm::Gap && !run.noisy) {
      EXPECT_TRUE(run.success) << "k=" << run.k << " seed=" << run.seed;
    }
  }
}

TEST(NoiseEstimation, TracksSigmaAtBenchGeometry) {
  gapcs::ExperimentSpec spec;
  spec.seeds = {1, 2, 3, 4, 5};
  spec.noise_stds = {1e-2};
  spec.output_dir = fs::temp_directory_path() / "gapcs_exp_noise";
  fs::remove_all(spec.output_dir);
  const auto runs = gapcs::noise_estimation_runs(spec);
  ASSERT_EQ(runs.size(), 5u);
  std::vector<double> rels;
  for (const auto& run : runs) {
    EXPECT_EQ(run.m_star, 80);  // 4K default
    rels.push_back(std::abs(run.est_std - run.sigma) / run.sigma);
  }
  EXPECT_LT(gapcs::median(rels), 0.15);
  const auto outcome = gapcs::run_noise_estimation(spec);
  EXPECT_EQ(outcome.failures, 0);
}

TEST(TheoryGrid, OrderingHoldsEverywhere) {
  const auto rows = gapcs::theory_grid_rows(1000, 7);
  ASSERT_EQ(rows.size(), 1000u);
  for (const auto& row : rows) EXPECT_TRUE(row.order_ok);
}

TEST(TheoryGrid, WritesGridAndCertifyReport) {
  auto spec = tiny_spec("grid");
  spec.m = 8;
  spec.n = 16;
  spec.k = 1;
  spec.m_star = 1;
  spec.grid_points = 50;
  const auto outcome = gapcs::run_theory_grid(spec);
  EXPECT_EQ(outcome.failures, 0);
  const auto grid = gapcs::CsvTable::load(spec.output_dir / "theory_grid.csv");
  EXPECT_EQ(grid.rows.size(), 50u);
  const std::string text = slurp(spec.output_dir / "theory_report.txt");
  EXPECT_NE(text.find("exact"), std::string::npos);
  EXPECT_NE(text.find("gap_noiseless"), std::string::npos);
  const auto json =
      nlohmann::json::parse(slurp(spec.output_dir / "theory_report.json"));
  EXPECT_EQ(json.size(), 6u);  // 2 projection + 4 AIT records
  EXPECT_EQ(json[0]["delta_source"], "exact");
}

TEST(RenderPlots, DeterministicSvgs) {
  auto spec = tiny_spec("plots");
  spec.seeds = {1, 2, 3};
  gapcs::run_convergence_experiment(spec);
  spec.m_star_values = {3, 6};
  gapcs::run_mstar_sweep(spec);
  gapcs::ExperimentSpec noise_spec = spec;
  noise_spec.m = 300;
  noise_spec.n = 512;
  noise_spec.k = 20;
  noise_spec.seeds = {1, 2};
  noise_spec.noise_stds = {1e-2};
  gapcs::run_noise_estimation(noise_spec);

  const auto out_dir = spec.output_dir / "svg";
  const auto files = gapcs::render_plots(spec.output_dir, out_dir);
  EXPECT_GE(files.size(), 4u);  // two convergence conditions, sweep, scatter
  std::vector<std::string> contents;
  for (const auto& file : files) contents.push_back(slurp(file));
  const auto out_dir2 = spec.output_dir / "svg2";
  const auto files2 = gapcs::render_plots(spec.output_dir, out_dir2);
  ASSERT_EQ(files.size(), files2.size());
  for (std::size_t i = 0; i < files2.size(); ++i) {
    EXPECT_EQ(contents[i], slurp(files2[i]));
  }
}

TEST(RenderPlots, EmptyCsvRaisesAndWritesNothing) {
  const auto dir = fs::temp_directory_path() / "gapcs_exp_emptycsv";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "mstar_sweep.csv")
      << "m_star,algorithm,condition,seed,k,m_star2,final_err,iterations,"
         "stop_reason,success,budget_below_k\n";
  const auto out = dir / "svg";
  EXPECT_THROW(gapcs::render_plots(dir, out), gapcs::ParseError);
  EXPECT_FALSE(fs::exists(out / "mstar_sweep.svg"));
}

TEST(RenderPlots, MalformedCsvRaises) {
  const auto dir = fs::temp_directory_path() / "gapcs_exp_badcsv";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "noise_est.csv")
      << "true_std,seed,m_star,estimated_std,rel_error,final_err,iterations\n"
         "0.1,1,80,bogus,0,0,10\n";
  EXPECT_THROW(gapcs::render_plots(dir, dir / "svg"), gapcs::ParseError);
}

}  // namespace
