#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rcef/dataset.hpp"
#include "rcef/graph.hpp"
#include "rcef/intmodel.hpp"
#include "rcef/sync.hpp"

namespace rcef {

enum class ModelKind { Integer, Float };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

struct ExperimentConfig {
  std::size_t m = 16;        // learners
  int k = 3;                 // parameter bits
  std::size_t bs = 10;       // samples per learner per round
  int o = 1;                 // optimization budget per round
  SyncConfig sync;           // protocol, schedule, b, delta
  int bins = 10;
  std::size_t holdout_size = 10000;
  std::uint64_t seed = 1;
  std::size_t rounds = 1000;
  ModelKind model_kind = ModelKind::Integer;
  double learning_rate = 0.5;  // float learners only
  std::size_t threads = 1;
  ByteCosts costs;
  int float_param_bits = 32;   // wire width of a real-valued parameter

  // Dataset ingestion.
  std::string label;
  int max_discrete_levels = 20;
  std::vector<std::string> numeric_columns;
  std::vector<std::string> categorical_columns;

  void validate() const;
};

/// Flat key-value config. Keys: m, k, bs, b, delta, o, protocol, schedule,
/// bins, holdout_size, seed, sync_seed, rounds, model_kind, learning_rate,
/// threads, header_bytes, count_bytes, total_bytes, float_param_bits, label,
/// max_discrete_levels, numeric, categorical (comma separated lists).
ExperimentConfig read_experiment_config(std::istream& in);
void write_experiment_config(std::ostream& out, const ExperimentConfig& config);

struct RoundRecord {
  std::size_t t = 0;
  std::uint64_t cum_errors = 0;
  std::uint64_t cum_samples = 0;
  std::uint64_t cum_loss = 0;  // cumulative 0/1 loss over all learners
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::uint64_t violations = 0;
  std::uint64_t full_syncs = 0;
  std::uint64_t partial_syncs = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

/// Snapshot handed to RunHooks::on_round after the synchronization phase.
struct RoundView {
  std::size_t t = 0;
  std::span<const std::vector<Assignment>> batches;          // this round's batch per learner
  std::span<const std::vector<std::int64_t>> int_thetas;     // integer models (empty for float runs)
  std::span<const std::vector<double>> real_thetas;          // float models (empty for integer runs)
  const DataSummary* coordinator_summary = nullptr;          // merged summary, if the protocol keeps one
  bool full_sync = false;
  bool partial_sync = false;
  const CommLedger* ledger = nullptr;
};

struct RunHooks {
  std::function<void(const RoundView&)> on_round;
};

/// Round-based prequential simulation on an already discretized stream.
/// The stream is partitioned across m learners; each round every learner
/// predicts its fresh batch, adds it to its summary, fits, and then the
/// protocol synchronizes. Ends early when any learner runs out of data.
std::vector<RoundRecord> run(const ExperimentConfig& config, std::shared_ptr<const StructureGraph> structure,
                             std::span<const Assignment> stream, const RunHooks& hooks = {});

/// Holdout split, Chow-Liu structure on the holdout, then run() on the rest.
struct PipelineResult {
  std::shared_ptr<const StructureGraph> structure;
  std::vector<RoundRecord> records;
};
PipelineResult run_pipeline(const ExperimentConfig& config, const Dataset& data, const RunHooks& hooks = {});

/// Header `t,cum_errors,cum_samples,bytes_up,bytes_down,violations,full_syncs,partial_syncs`,
/// one row per round, then a `#` summary line.
void write_results_csv(std::ostream& out, std::span<const RoundRecord> records);

/// Error rate over rounds (from, to] using the cumulative counters.
double window_error_rate(std::span<const RoundRecord> records, std::size_t from, std::size_t to);

/// Error rate over the last `fraction` of the rounds.
double tail_error_rate(std::span<const RoundRecord> records, double fraction = 0.25);

/// n samples by exact ancestral sampling from the integer model (root 0
/// first, then each child from its conditional given the parent).
std::vector<Assignment> synth_tree_data(const IntParams& theta_true, std::size_t n, std::uint64_t seed);

}  // namespace rcef
