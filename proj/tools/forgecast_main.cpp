#include "forgecast/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path) {
  const forgecast::ExperimentConfig cfg = forgecast::load_config(config_path);
  const forgecast::ExperimentArtifacts artifacts = forgecast::run_experiment(cfg);
  std::cout << forgecast::format_table_text(artifacts.table);
  std::cout << "artifacts written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_gen(const std::string& kind, std::uint64_t seed, const std::string& out_path,
            forgecast::Index length, double noise_sd) {
  forgecast::SeriesSpec spec;
  spec.kind = forgecast::dgp_from_string(kind);
  spec.length = length;
  spec.noise_sd = noise_sd;
  spec.validate();
  const forgecast::RawSeries series = forgecast::generate(spec, seed);
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot write " + out_path);
  }
  out << "t,y,theta_t,regime\n";
  char buf[40];
  for (std::size_t i = 0; i < series.y.size(); ++i) {
    out << (i + 1) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", series.y[i]);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", series.theta[i]);
    out << buf << ',' << series.regime[i] << '\n';
  }
  std::cout << "wrote " << series.y.size() << " observations to " << out_path << "\n";
  return 0;
}

int cmd_table(const std::string& runs_path, const std::string& out_path, double alpha) {
  const auto results = forgecast::read_runs_csv(runs_path);
  const forgecast::ExperimentTable table = forgecast::build_table(results, alpha);
  std::cout << forgecast::format_table_text(table);
  if (!out_path.empty()) {
    forgecast::write_table_csv(table, out_path);
    std::cout << "table written to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forgecast: time-series prediction under distribution shift via "
               "learned forgetting mechanisms"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "JSON experiment config")->required();

  std::string gen_kind = "stat";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  forgecast::Index gen_length = 3000;
  double gen_noise = 0.05;
  auto* gen = app.add_subcommand("gen", "dump a synthetic series to CSV");
  gen->add_option("--kind", gen_kind,
                  "dgp kind: fixed_regime|random_walk|random_regime|stat")->required();
  gen->add_option("--seed", gen_seed, "rng seed")->required();
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--length", gen_length, "series length (default 3000)");
  gen->add_option("--noise-sd", gen_noise, "noise standard deviation (default 0.05)");

  std::string table_runs;
  std::string table_out;
  double table_alpha = 0.05;
  auto* table = app.add_subcommand("table", "rebuild a result table from runs.csv");
  table->add_option("--runs", table_runs, "long-format runs CSV")->required();
  table->add_option("--out", table_out, "optional table CSV output path");
  table->add_option("--alpha", table_alpha, "significance level (default 0.05)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (gen->parsed()) return cmd_gen(gen_kind, gen_seed, gen_out, gen_length, gen_noise);
    if (table->parsed()) return cmd_table(table_runs, table_out, table_alpha);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
