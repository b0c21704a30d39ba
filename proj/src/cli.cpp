#include "rcef/cli.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rcef/config.hpp"
#include "rcef/dataset.hpp"
#include "rcef/graph.hpp"

namespace rcef {

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const std::invalid_argument*>(&error) || dynamic_cast<const std::out_of_range*>(&error) ||
      dynamic_cast<const std::length_error*>(&error) || dynamic_cast<const std::runtime_error*>(&error))
    return kExitData;
  return kExitInternal;
}

std::string run_id(const ExperimentConfig& config) {
  std::ostringstream normalized;
  write_experiment_config(normalized, config);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : normalized.str()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::to_string(config.seed) + "-" + hex;
}

namespace {

EncoderOptions encoder_options(const ExperimentConfig& config) {
  if (config.label.empty()) throw std::invalid_argument("config does not name a label column");
  EncoderOptions opt;
  opt.label = config.label;
  opt.bins = config.bins;
  opt.max_discrete_levels = config.max_discrete_levels;
  opt.numeric = config.numeric_columns;
  opt.categorical = config.categorical_columns;
  return opt;
}

}  // namespace

void cmd_structure(const ExperimentConfig& config, std::istream& csv, std::ostream& out) {
  config.validate();
  const auto options = encoder_options(config);
  const auto table = read_csv(csv);
  table.column(options.label);
  const std::span<const std::vector<std::string>> rows(table.rows);
  const auto holdout = split_holdout(rows, config.holdout_size, config.seed).first;
  const DataEncoder encoder(table, holdout, options);
  const auto encoded = encoder.encode(table.header, holdout);
  const auto tree = chow_liu(encoded, encoder.specs());
  encoder.write(out);
  write_structure(out, tree);
}

std::vector<RoundRecord> cmd_run(const ExperimentConfig& config, std::istream& csv, std::istream& structure,
                                 std::ostream& out) {
  config.validate();
  std::stringstream text;
  text << structure.rdbuf();
  const auto encoder = DataEncoder::read(text);
  text.clear();
  text.seekg(0);
  auto graph = std::make_shared<const StructureGraph>(read_structure(text));
  if (auto problem = validate_tree(*graph)) throw std::invalid_argument("structure is not a tree: " + *problem);

  const auto specs = encoder.specs();
  if (specs.size() != graph->variables.size())
    throw std::invalid_argument("structure has " + std::to_string(graph->variables.size()) +
                                " variables but its encoder describes " + std::to_string(specs.size()));
  for (std::size_t v = 0; v < specs.size(); ++v) {
    const auto& a = specs[v];
    const auto& b = graph->variables[v];
    if (a.name != b.name || a.arity != b.arity || a.role != b.role)
      throw std::invalid_argument("structure variable " + std::to_string(v) + " ('" + b.name +
                                  "') does not match its encoder");
  }

  const auto table = read_csv(csv);
  const std::span<const std::vector<std::string>> rows(table.rows);
  const auto stream_rows = split_holdout(rows, config.holdout_size, config.seed).second;
  const auto stream = encoder.encode(table.header, stream_rows);
  auto records = run(config, graph, stream);
  write_results_csv(out, records);
  return records;
}

std::vector<std::int64_t> read_theta(std::istream& in) {
  std::vector<std::int64_t> theta;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    for (std::string tok; fields >> tok;) theta.push_back(parse_int("theta", tok));
  }
  return theta;
}

void cmd_synth(std::istream& structure, std::istream& theta, int k, std::size_t n, std::uint64_t seed,
               std::ostream& out) {
  auto graph = std::make_shared<const StructureGraph>(read_structure(structure));
  const IntParams params(graph, k, read_theta(theta));
  Dataset data{graph->variables, synth_tree_data(params, n, seed)};
  write_dataset_csv(out, data);
}

std::vector<ScalingRow> cmd_energy(const EnergyParams& params, std::span<const double> m_values, std::ostream& out) {
  auto rows = scaling_curves(params, m_values);
  write_scaling_csv(out, rows);
  return rows;
}

}  // namespace rcef
