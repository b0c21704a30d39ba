#include "rcef/simulator.hpp"

#include <exception>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "rcef/config.hpp"
#include "rcef/inference.hpp"
#include "rcef/learning.hpp"

namespace rcef {

std::string to_string(ModelKind kind) { return kind == ModelKind::Integer ? "integer" : "float"; }

ModelKind parse_model_kind(const std::string& text) {
  if (text == "integer" || text == "int") return ModelKind::Integer;
  if (text == "float" || text == "real") return ModelKind::Float;
  throw std::invalid_argument("unknown model kind '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (bs < 1) throw std::invalid_argument("bs must be at least 1");
  if (bins < 2) throw std::invalid_argument("bins must be at least 2");
  if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  if (o < 0) throw std::invalid_argument("optimization budget must be nonnegative");
  if (k < 1 || k > kMaxWordSize) throw std::invalid_argument("k out of range");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be nonnegative");
  if (float_param_bits < 1 || float_param_bits > 64) throw std::invalid_argument("float_param_bits out of range");
  sync.validate();
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) out += (out.empty() ? "" : ",") + i;
  return out;
}

}  // namespace

ExperimentConfig read_experiment_config(std::istream& in) {
  const auto kv = read_key_values(in);
  ExperimentConfig c;
  bool sync_seed_given = false;
  auto to_size = [](const std::string& key, const std::string& value) {
    const auto v = parse_int(key, value);
    if (v < 0) throw std::invalid_argument("'" + key + "' must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  for (const auto& [key, value] : kv) {
    if (key == "m") c.m = to_size(key, value);
    else if (key == "k") c.k = static_cast<int>(parse_int(key, value));
    else if (key == "bs") c.bs = to_size(key, value);
    else if (key == "b") c.sync.period = static_cast<int>(parse_int(key, value));
    else if (key == "delta") c.sync.delta = parse_int(key, value);
    else if (key == "o") c.o = static_cast<int>(parse_int(key, value));
    else if (key == "protocol") c.sync.protocol = parse_protocol(value);
    else if (key == "schedule") c.sync.schedule = parse_schedule(value);
    else if (key == "bins") c.bins = static_cast<int>(parse_int(key, value));
    else if (key == "holdout_size") c.holdout_size = to_size(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_size(key, value));
    else if (key == "sync_seed") {
      c.sync.seed = static_cast<std::uint64_t>(to_size(key, value));
      sync_seed_given = true;
    }
    else if (key == "rounds") c.rounds = to_size(key, value);
    else if (key == "model_kind") c.model_kind = parse_model_kind(value);
    else if (key == "learning_rate") c.learning_rate = parse_double(key, value);
    else if (key == "threads") c.threads = to_size(key, value);
    else if (key == "header_bytes") c.costs.header = to_size(key, value);
    else if (key == "count_bytes") c.costs.count_bytes = to_size(key, value);
    else if (key == "total_bytes") c.costs.total_bytes = to_size(key, value);
    else if (key == "float_param_bits") c.float_param_bits = static_cast<int>(parse_int(key, value));
    else if (key == "label") c.label = value;
    else if (key == "max_discrete_levels") c.max_discrete_levels = static_cast<int>(parse_int(key, value));
    else if (key == "numeric") c.numeric_columns = split_list(value);
    else if (key == "categorical") c.categorical_columns = split_list(value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  if (!sync_seed_given) c.sync.seed = c.seed;
  c.validate();
  return c;
}

void write_experiment_config(std::ostream& out, const ExperimentConfig& c) {
  out << "m = " << c.m << "\nk = " << c.k << "\nbs = " << c.bs << "\nb = " << c.sync.period
      << "\ndelta = " << c.sync.delta << "\no = " << c.o << "\nprotocol = " << to_string(c.sync.protocol)
      << "\nschedule = " << to_string(c.sync.schedule) << "\nbins = " << c.bins
      << "\nholdout_size = " << c.holdout_size << "\nseed = " << c.seed << "\nsync_seed = " << c.sync.seed
      << "\nrounds = " << c.rounds << "\nmodel_kind = " << to_string(c.model_kind)
      << "\nlearning_rate = " << format_double(c.learning_rate) << "\nthreads = " << c.threads
      << "\nheader_bytes = " << c.costs.header << "\ncount_bytes = " << c.costs.count_bytes
      << "\ntotal_bytes = " << c.costs.total_bytes << "\nfloat_param_bits = " << c.float_param_bits << '\n';
  if (!c.label.empty()) out << "label = " << c.label << '\n';
  out << "max_discrete_levels = " << c.max_discrete_levels << '\n';
  if (!c.numeric_columns.empty()) out << "numeric = " << join_list(c.numeric_columns) << '\n';
  if (!c.categorical_columns.empty()) out << "categorical = " << join_list(c.categorical_columns) << '\n';
}

namespace {

constexpr std::uint64_t kPartitionSalt = 0x9E3779B97F4A7C15ull;

template <typename T>
struct Learner {
  std::vector<Assignment> data;
  std::size_t cursor = 0;
  std::vector<T> model;
  DataSummary base;   // merged summary last received from the coordinator
  DataSummary local;  // own samples not yet sent anywhere
  std::uint64_t errors = 0;

  DataSummary training_summary() const {
    if (base.n == 0) return local;
    const std::vector<DataSummary> parts{base, local};
    return merge_summaries(parts);
  }
};

template <typename T>
class Simulation {
 public:
  Simulation(const ExperimentConfig& config, std::shared_ptr<const StructureGraph> structure,
             std::span<const Assignment> stream, const RunHooks& hooks)
      : cfg_(config),
        structure_(std::move(structure)),
        hooks_(hooks),
        d_(model_dimension(*structure_)),
        label_(structure_->label_index()),
        rng_(config.sync.seed) {
    auto parts = partition_horizontal(stream, cfg_.m, cfg_.seed ^ kPartitionSalt);
    learners_.resize(cfg_.m);
    for (std::size_t i = 0; i < cfg_.m; ++i) {
      learners_[i].data = std::move(parts[i]);
      learners_[i].model.assign(d_, T{});
      learners_[i].base = DataSummary(d_);
      learners_[i].local = DataSummary(d_);
    }
    global_summary_ = DataSummary(d_);
    global_model_.assign(d_, T{});
    coordinator_.r.assign(d_, T{});
    coordinator_.m = cfg_.m;
  }

  std::vector<RoundRecord> execute() {
    std::vector<RoundRecord> records;
    RoundRecord rec;
    for (std::size_t t = 1; t <= cfg_.rounds; ++t) {
      bool enough = true;
      for (const auto& l : learners_) enough = enough && l.cursor + cfg_.bs <= l.data.size();
      if (!enough) break;

      local_phase();
      for (auto& l : learners_) {
        rec.cum_errors += l.errors;
        rec.cum_samples += cfg_.bs;
      }
      rec.cum_loss = rec.cum_errors;

      full_sync_ = partial_sync_ = false;
      sync_phase(t, rec);
      rec.t = t;
      rec.bytes_up = ledger_.bytes_up;
      rec.bytes_down = ledger_.bytes_down;
      records.push_back(rec);
      if (hooks_.on_round) notify(t);
      for (auto& l : learners_) l.cursor += cfg_.bs;
    }
    return records;
  }

 private:
  int bits_per_param() const { return std::is_integral_v<T> ? cfg_.k : cfg_.float_param_bits; }
  bool centralized() const { return cfg_.sync.protocol == Protocol::Centralized; }

  int predict_one(const std::vector<T>& model, const Assignment& x) const {
    if constexpr (std::is_integral_v<T>) {
      return predict(IntParams(structure_, cfg_.k, model), x);
    } else {
      return float_predict(*structure_, model, x);
    }
  }

  std::vector<T> fit_model(std::vector<T> model, const DataSummary& summary) const {
    if (summary.n == 0 || cfg_.o == 0) return model;
    if constexpr (std::is_integral_v<T>) {
      LearnerState state{IntParams(structure_, cfg_.k, std::move(model)), summary, 0};
      return fit(std::move(state), cfg_.o).params.theta();
    } else {
      FloatLearnerState state{structure_, std::move(model), summary, cfg_.learning_rate};
      return float_fit(std::move(state), cfg_.o).params_real;
    }
  }

  void local_step(Learner<T>& l) const {
    const std::span<const Assignment> batch(l.data.data() + l.cursor, cfg_.bs);
    l.errors = 0;
    // Predict every sample before it can influence the model.
    for (const auto& x : batch) {
      if (predict_one(l.model, x) != x[label_]) ++l.errors;
    }
    l.local = accumulate(std::move(l.local), batch, *structure_);
    if (!centralized()) l.model = fit_model(std::move(l.model), l.training_summary());
  }

  void local_phase() {
    const std::size_t workers = std::min(cfg_.threads, learners_.size());
    if (workers <= 1) {
      for (auto& l : learners_) local_step(l);
      return;
    }
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < learners_.size(); i += workers) local_step(learners_[i]);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  void charge(Payload p, std::size_t recipients) {
    ledger_ = account(ledger_, cfg_.sync.protocol, p, d_, bits_per_param(), recipients, cfg_.costs);
  }

  // Upload of learner i's model (and for the naive protocol its summary delta).
  std::vector<T> collect(std::size_t i) {
    auto& l = learners_[i];
    charge(Payload::Theta, 1);
    if (cfg_.sync.protocol == Protocol::Naive) {
      charge(Payload::Summary, 1);
      absorb(l);
    }
    return l.model;
  }

  void absorb(Learner<T>& l) {
    const std::vector<DataSummary> parts{global_summary_, l.local};
    global_summary_ = merge_summaries(parts);
    l.local = DataSummary(d_);
  }

  void deliver(std::span<const std::size_t> members, const std::vector<T>& average) {
    charge(Payload::Broadcast, members.size());
    if (cfg_.sync.protocol == Protocol::Naive) charge(Payload::SummaryBroadcast, members.size());
    for (auto i : members) {
      learners_[i].model = average;
      if (cfg_.sync.protocol == Protocol::Naive) learners_[i].base = global_summary_;
    }
  }

  void sync_phase(std::size_t t, RoundRecord& rec) {
    const auto protocol = cfg_.sync.protocol;
    if (protocol == Protocol::None) return;
    if (t % static_cast<std::size_t>(cfg_.sync.period) != 0) return;

    std::vector<std::size_t> everyone(cfg_.m);
    for (std::size_t i = 0; i < cfg_.m; ++i) everyone[i] = i;

    if (protocol == Protocol::Centralized) {
      for (auto& l : learners_) {
        charge(Payload::Summary, 1);
        absorb(l);
      }
      global_model_ = fit_model(std::move(global_model_), global_summary_);
      charge(Payload::Broadcast, cfg_.m);
      for (auto& l : learners_) l.model = global_model_;
      ++rec.full_syncs;
      full_sync_ = true;
      return;
    }

    if (cfg_.sync.schedule == ScheduleKind::Periodic) {
      std::vector<std::vector<T>> models;
      models.reserve(cfg_.m);
      for (std::size_t i = 0; i < cfg_.m; ++i) models.push_back(collect(i));
      auto average = periodic_sync<T>(models);
      deliver(everyone, average);
      coordinator_.r = std::move(average);
      coordinator_.v = 0;
      ++rec.full_syncs;
      full_sync_ = true;
      return;
    }

    const T delta = static_cast<T>(cfg_.sync.delta);
    std::vector<std::size_t> violators;
    for (std::size_t i = 0; i < cfg_.m; ++i) {
      if (local_condition<T>(learners_[i].model, coordinator_.r, delta)) violators.push_back(i);
    }
    rec.violations += violators.size();
    if (violators.empty()) return;
    auto res = resolve_violation<T>(coordinator_, violators, delta, [this](std::size_t i) { return collect(i); }, rng_);
    deliver(res.members, res.average);
    if (res.full) {
      ++rec.full_syncs;
      full_sync_ = true;
    } else {
      ++rec.partial_syncs;
      partial_sync_ = true;
    }
  }

  void notify(std::size_t t) {
    std::vector<std::vector<Assignment>> batches;
    std::vector<std::vector<T>> models;
    for (const auto& l : learners_) {
      batches.emplace_back(l.data.begin() + static_cast<std::ptrdiff_t>(l.cursor),
                           l.data.begin() + static_cast<std::ptrdiff_t>(l.cursor + cfg_.bs));
      models.push_back(l.model);
    }
    RoundView view;
    view.t = t;
    view.batches = batches;
    if constexpr (std::is_integral_v<T>) {
      view.int_thetas = models;
    } else {
      view.real_thetas = models;
    }
    const bool keeps_summary = cfg_.sync.protocol == Protocol::Centralized || cfg_.sync.protocol == Protocol::Naive;
    view.coordinator_summary = keeps_summary ? &global_summary_ : nullptr;
    view.full_sync = full_sync_;
    view.partial_sync = partial_sync_;
    view.ledger = &ledger_;
    hooks_.on_round(view);
  }

  const ExperimentConfig& cfg_;
  std::shared_ptr<const StructureGraph> structure_;
  const RunHooks& hooks_;
  std::size_t d_;
  std::size_t label_;
  Rng rng_;
  std::vector<Learner<T>> learners_;
  DataSummary global_summary_;
  std::vector<T> global_model_;
  BasicCoordinator<T> coordinator_;
  CommLedger ledger_;
  bool full_sync_ = false;
  bool partial_sync_ = false;
};

}  // namespace

std::vector<RoundRecord> run(const ExperimentConfig& config, std::shared_ptr<const StructureGraph> structure,
                             std::span<const Assignment> stream, const RunHooks& hooks) {
  config.validate();
  if (!structure) throw std::invalid_argument("run needs a structure");
  if (auto problem = validate_tree(*structure)) throw std::invalid_argument("structure is not a tree: " + *problem);
  for (const auto& x : stream) check_assignment(x, *structure);
  if (config.model_kind == ModelKind::Integer) {
    return Simulation<std::int64_t>(config, std::move(structure), stream, hooks).execute();
  }
  return Simulation<double>(config, std::move(structure), stream, hooks).execute();
}

PipelineResult run_pipeline(const ExperimentConfig& config, const Dataset& data, const RunHooks& hooks) {
  check_rows(data);
  const std::span<const Assignment> rows(data.rows);
  auto [holdout, stream] = split_holdout(rows, config.holdout_size, config.seed);
  PipelineResult out;
  out.structure = std::make_shared<const StructureGraph>(chow_liu(holdout, data.specs));
  out.records = run(config, out.structure, stream, hooks);
  return out;
}

double window_error_rate(std::span<const RoundRecord> records, std::size_t from, std::size_t to) {
  if (to > records.size() || from >= to) throw std::invalid_argument("bad round window");
  const auto errors_before = from == 0 ? 0 : records[from - 1].cum_errors;
  const auto samples_before = from == 0 ? 0 : records[from - 1].cum_samples;
  const auto samples = records[to - 1].cum_samples - samples_before;
  if (samples == 0) return 0.0;
  return static_cast<double>(records[to - 1].cum_errors - errors_before) / static_cast<double>(samples);
}

double tail_error_rate(std::span<const RoundRecord> records, double fraction) {
  if (records.empty()) throw std::invalid_argument("no rounds recorded");
  const auto n = records.size();
  auto tail = static_cast<std::size_t>(static_cast<double>(n) * fraction);
  tail = std::clamp<std::size_t>(tail, 1, n);
  return window_error_rate(records, n - tail, n);
}

void write_results_csv(std::ostream& out, std::span<const RoundRecord> records) {
  out << "t,cum_errors,cum_samples,bytes_up,bytes_down,violations,full_syncs,partial_syncs\n";
  for (const auto& r : records) {
    out << r.t << ',' << r.cum_errors << ',' << r.cum_samples << ',' << r.bytes_up << ',' << r.bytes_down << ','
        << r.violations << ',' << r.full_syncs << ',' << r.partial_syncs << '\n';
  }
  const RoundRecord last = records.empty() ? RoundRecord{} : records.back();
  const double rate = last.cum_samples ? static_cast<double>(last.cum_errors) / static_cast<double>(last.cum_samples) : 0.0;
  out << "# rounds=" << last.t << " error_rate=" << format_double(rate) << " total_bytes=" << (last.bytes_up + last.bytes_down)
      << '\n';
}

std::vector<Assignment> synth_tree_data(const IntParams& theta_true, std::size_t n, std::uint64_t seed) {
  const auto& g = theta_true.structure();
  const RootedTree tree(g);
  const auto weights = subtree_weights(theta_true, Evidence{}, tree);

  // Conditional weights of each child state given each parent state.
  std::vector<std::vector<std::vector<BigInt>>> conditional(g.num_vertices());
  for (auto v : tree.order) {
    for (auto c : tree.children[v]) {
      const auto e = tree.parent_edge[c];
      const bool parent_is_s = g.edges[e].s == v;
      auto& table = conditional[c];
      table.assign(static_cast<std::size_t>(g.arity(v)), std::vector<BigInt>(static_cast<std::size_t>(g.arity(c))));
      for (int xp = 0; xp < g.arity(v); ++xp) {
        for (int xc = 0; xc < g.arity(c); ++xc) {
          const auto th = parent_is_s ? theta_true.edge_param(e, xp, xc) : theta_true.edge_param(e, xc, xp);
          table[static_cast<std::size_t>(xp)][static_cast<std::size_t>(xc)] =
              weights[c][static_cast<std::size_t>(xc)] << static_cast<unsigned>(th);
        }
      }
    }
  }

  Rng rng(seed);
  std::vector<Assignment> rows;
  rows.reserve(n);
  const auto root = tree.order.front();
  for (std::size_t i = 0; i < n; ++i) {
    Assignment x(g.num_vertices(), 0);
    x[root] = static_cast<int>(sample_weighted(rng, weights[root]));
    for (auto v : tree.order) {
      for (auto c : tree.children[v]) x[c] = static_cast<int>(sample_weighted(rng, conditional[c][static_cast<std::size_t>(x[v])]));
    }
    rows.push_back(std::move(x));
  }
  return rows;
}

}  // namespace rcef
