// Command line front-end: structure learning, experiment runs, synthetic
// data and energy tables.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rcef/cli.hpp"
#include "rcef/config.hpp"

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return in;
}

// Writes to a buffer first so a failing command leaves no partial file.
void write_out(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

rcef::ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed,
                                   std::optional<std::size_t> threads) {
  rcef::ExperimentConfig config;
  if (!path.empty()) {
    auto in = open_in(path);
    config = rcef::read_experiment_config(in);
  }
  if (seed) {
    config.seed = *seed;
    config.sync.seed = *seed;
  }
  if (threads) config.threads = *threads;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integer exponential family models learned across simulated devices"};
  app.require_subcommand(1);

  std::string config_path, dataset_path, structure_path, out_path = "-";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;

  auto* structure = app.add_subcommand("structure", "learn a Chow-Liu tree and encoder from a CSV holdout");
  structure->add_option("--config", config_path, "key-value experiment config")->required()->check(CLI::ExistingFile);
  structure->add_option("--dataset", dataset_path, "input CSV")->required()->check(CLI::ExistingFile);
  structure->add_option("--out", out_path, "structure file ('-' for stdout)");
  structure->add_option("--seed", seed, "overrides the config seed");

  auto* run = app.add_subcommand("run", "simulate learners and write per-round results");
  run->add_option("--config", config_path, "key-value experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--dataset", dataset_path, "input CSV")->required()->check(CLI::ExistingFile);
  run->add_option("--structure", structure_path, "structure file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_path, "results CSV ('-' for stdout)");
  run->add_option("--seed", seed, "overrides the config seed");
  run->add_option("--threads", threads, "worker threads for the learner phase")->check(CLI::PositiveNumber);

  std::string theta_path;
  int k = 3;
  std::size_t n = 1000;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "sample a dataset from an integer tree model");
  synth->add_option("--structure", structure_path, "structure file")->required()->check(CLI::ExistingFile);
  synth->add_option("--theta", theta_path, "whitespace separated parameters")->required()->check(CLI::ExistingFile);
  synth->add_option("--k", k, "parameter bits")->check(CLI::Range(1, 16));
  synth->add_option("--n", n, "number of rows");
  synth->add_option("--seed", synth_seed, "sampling seed");
  synth->add_option("--out", out_path, "output CSV ('-' for stdout)");

  std::string params_path, preset;
  double m_min = 1, m_max = 64, m_step = 1;
  auto* energy = app.add_subcommand("energy", "central versus parallel energy over a range of learner counts");
  auto* params_opt = energy->add_option("--params", params_path, "key-value energy parameters")->check(CLI::ExistingFile);
  energy->add_option("--preset", preset, "named parameter set (3g-wh, 3g-kwh)")->excludes(params_opt);
  energy->add_option("--m-min", m_min, "smallest learner count")->check(CLI::PositiveNumber);
  energy->add_option("--m-max", m_max, "largest learner count")->check(CLI::PositiveNumber);
  energy->add_option("--m-step", m_step, "learner count increment")->check(CLI::PositiveNumber);
  energy->add_option("--out", out_path, "CSV file; the table is printed either way");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rcef::kExitOk : rcef::kExitUsage;
  }

  try {
    std::ostringstream out;
    if (structure->parsed()) {
      const auto config = load_config(config_path, seed, std::nullopt);
      auto csv = open_in(dataset_path);
      rcef::cmd_structure(config, csv, out);
      write_out(out_path, out.str());
    } else if (run->parsed()) {
      const auto config = load_config(config_path, seed, threads);
      auto csv = open_in(dataset_path);
      auto st = open_in(structure_path);
      const auto records = rcef::cmd_run(config, csv, st, out);
      write_out(out_path, out.str());
      const auto total = records.empty() ? 0 : records.back().bytes_up + records.back().bytes_down;
      const double err = records.empty() || records.back().cum_samples == 0
                             ? 0.0
                             : static_cast<double>(records.back().cum_errors) /
                                   static_cast<double>(records.back().cum_samples);
      std::cerr << "run " << rcef::run_id(config) << ": rounds=" << records.size()
                << " final_error_rate=" << rcef::format_double(err) << " total_bytes=" << total << '\n';
    } else if (synth->parsed()) {
      auto st = open_in(structure_path);
      auto th = open_in(theta_path);
      rcef::cmd_synth(st, th, k, n, synth_seed, out);
      write_out(out_path, out.str());
    } else if (energy->parsed()) {
      rcef::EnergyParams params;
      if (!params_path.empty()) {
        auto in = open_in(params_path);
        params = rcef::read_energy_params(in);
      } else {
        params = rcef::energy_preset(preset.empty() ? "3g-wh" : preset);
      }
      if (m_max < m_min) throw std::invalid_argument("--m-max is below --m-min");
      std::vector<double> ms;
      for (double m = m_min; m <= m_max; m += m_step) ms.push_back(m);
      const auto rows = rcef::cmd_energy(params, ms, out);
      if (out_path != "-") write_out(out_path, out.str());
      std::printf("%8s %14s %14s %10s\n", "m", "e_c [Wh]", "e_p [Wh]", "ratio");
      for (const auto& r : rows) std::printf("%8g %14.6e %14.6e %10.4f\n", r.m, r.e_c, r.e_p, r.ratio);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rcef::exit_code_for(e);
  }
  return rcef::kExitOk;
}
