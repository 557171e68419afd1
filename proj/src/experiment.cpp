#include "qrc/experiment.hpp"

#include "qrc/csv.hpp"
#include "qrc/parallel.hpp"
#include "qrc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace qrc {

using nlohmann::json;

std::vector<CellKey> expand_cells(const ExperimentConfig& config) {
  const auto& run = config.run;
  const auto& s = config.sweep;
  auto or_base = [](const auto& list, auto base) { return list.empty() ? std::vector{base} : list; };
  const auto Ws = or_base(s.W, run.model.W);
  const auto hs = or_base(s.h, run.model.h);
  const auto eps = or_base(s.epsilon, run.model.epsilon);
  const auto axes = or_base(s.axes, run.noise.axis);
  const auto ps = or_base(s.p_err, run.noise.p_err);
  const auto encs = or_base(s.encodings, run.encoding);
  const auto obs = or_base(s.observables, config.observables);
  std::vector<CellKey> cells;
  for (double W : Ws)
    for (double h : hs)
      for (double e : eps)
        for (NoiseAxis a : axes)
          for (double p : ps)
            for (Encoding enc : encs)
              for (const auto& o : obs) cells.push_back({W, h, e, a, p, enc, o});
  return cells;
}

NoiseSpec commensurate_noise(const NoiseSpec& noise, int V, double delta_t) {
  if (V < 1) throw Error("multiplex factor must be >= 1");
  if (noise.eta % V == 0) return noise;
  const int eta = (noise.eta / V + 1) * V;
  return noise.with_eta(eta, delta_t);
}

RunConfig cell_run_config(const ExperimentConfig& config, const CellKey& key) {
  RunConfig c = config.run;
  c.model.W = key.W;
  c.model.h = key.h;
  c.model.epsilon = key.epsilon;
  c.noise.axis = key.axis;
  c.noise.p_err = key.p_err;
  c.encoding = key.encoding;
  c.observables = key.observables.build(c.model.n_qubits);
  c.noise = commensurate_noise(c.noise, c.observables.multiplex, c.delta_t);
  c.validate();
  return c;
}

double IpcRealization::odd_sum() const {
  double s = 0.0;
  for (std::size_t d = 0; d < per_degree.size(); d += 2) s += per_degree[d];
  return s;
}

double IpcRealization::odd_threshold_sum() const {
  double s = 0.0;
  for (std::size_t d = 0; d < threshold_sum.size(); d += 2) s += threshold_sum[d];
  return s;
}

std::uint64_t readout_seed(std::uint64_t master, std::uint64_t realization) {
  return derive_seed(master, "readout", realization);
}

CapacityReport ipc_realization(const RunConfig& config, std::span<const double> inputs, const IpcSettings& settings,
                               std::uint64_t master_seed) {
  const auto result = Reservoir(config).run(inputs);
  const auto x = add_readout_noise(result.readout, config.readout_sigma, readout_seed(master_seed, config.realization));
  return total_ipc(x, inputs, settings);
}

namespace {

// Identifies configs whose runs are identical, so repeated cells (e.g. the
// noiseless point of several noise axes) are computed once.
std::string run_key(const RunConfig& c) {
  json j{{"n", c.model.n_qubits}, {"h", c.model.h}, {"W", c.model.W}, {"eps", c.model.epsilon},
         {"seed", c.model.seed}, {"r", c.realization}, {"dt", c.delta_t}, {"washout", c.washout},
         {"length", c.length}, {"enc", to_string(c.encoding)}, {"sigma", c.readout_sigma},
         {"init", to_string(c.initial)}, {"prop", c.propagation == Propagation::dense}};
  j["noise"] = c.noise.active() ? json{to_string(c.noise.axis), c.noise.p_err, c.noise.eta} : json("none");
  j["obs"] = c.observables.column_names();
  return j.dump();
}

IpcRealization summarize_report(const CapacityReport& rep, std::uint64_t realization) {
  IpcRealization r;
  r.realization = realization;
  r.per_degree = rep.per_degree;
  r.threshold_sum = rep.threshold_sum;
  r.total = rep.total;
  r.M = rep.M;
  r.rank = rep.rank;
  r.evaluated = rep.targets.size();
  r.truncated = std::any_of(rep.families.begin(), rep.families.end(),
                            [](const FamilyCutoff& f) { return !f.stopped_by_rule; });
  return r;
}

MeanStderr summarize_by(const std::vector<IpcRealization>& rs, const std::function<double(const IpcRealization&)>& f) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(f(r));
  return summarize(v);
}

IpcCellResult assemble(const RunConfig& config, std::vector<IpcRealization> rs) {
  IpcCellResult out;
  out.config = config;
  out.M = config.observables.output_count();
  const std::size_t dmax = rs.empty() ? 0 : rs.front().per_degree.size();
  for (std::size_t d = 0; d < dmax; ++d) {
    out.per_degree.push_back(summarize_by(rs, [d](const IpcRealization& r) { return r.per_degree[d]; }));
  }
  out.total = summarize_by(rs, [](const IpcRealization& r) { return r.total; });
  out.normalized = summarize_by(rs, [](const IpcRealization& r) { return r.normalized(); });
  out.odd_sum = summarize_by(rs, [](const IpcRealization& r) { return r.odd_sum(); });
  out.odd_threshold_sum = summarize_by(rs, [](const IpcRealization& r) { return r.odd_threshold_sum(); });
  out.realizations = std::move(rs);
  return out;
}

using ReportSink = std::function<void(std::size_t cell, std::size_t realization, const CapacityReport&)>;

std::vector<IpcCellResult> ipc_cells_impl(const std::vector<RunConfig>& configs, std::span<const double> inputs,
                                          const IpcSettings& settings, int n_realizations, std::uint64_t master_seed,
                                          int workers, const ReportSink& sink) {
  if (n_realizations < 1) throw Error("need at least one realization");
  std::vector<std::size_t> unique_of(configs.size());
  std::vector<std::size_t> unique;  // index into configs
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto [it, inserted] = seen.emplace(run_key(configs[i]), unique.size());
    if (inserted) unique.push_back(i);
    unique_of[i] = it->second;
  }
  const auto R = static_cast<std::size_t>(n_realizations);
  std::vector<IpcRealization> slots(unique.size() * R);
  std::mutex sink_mutex;
  parallel_for(slots.size(), workers, [&](std::size_t task) {
    RunConfig c = configs[unique[task / R]];
    c.realization = configs[unique[task / R]].realization + task % R;
    const auto rep = ipc_realization(c, inputs, settings, master_seed);
    slots[task] = summarize_report(rep, c.realization);
    if (sink) {
      std::lock_guard lock(sink_mutex);
      sink(unique[task / R], task % R, rep);
    }
  });
  std::vector<IpcCellResult> out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::size_t u = unique_of[i];
    std::vector<IpcRealization> rs(slots.begin() + static_cast<long>(u * R), slots.begin() + static_cast<long>((u + 1) * R));
    out.push_back(assemble(configs[i], std::move(rs)));
  }
  return out;
}

}  // namespace

std::vector<IpcCellResult> run_ipc_cells(const std::vector<RunConfig>& configs, std::span<const double> inputs,
                                         const IpcSettings& settings, int n_realizations, std::uint64_t master_seed,
                                         int workers) {
  return ipc_cells_impl(configs, inputs, settings, n_realizations, master_seed, workers, {});
}

IpcCellResult run_ipc_cell(const RunConfig& config, std::span<const double> inputs, const IpcSettings& settings,
                           int n_realizations, std::uint64_t master_seed, int workers) {
  return run_ipc_cells({config}, inputs, settings, n_realizations, master_seed, workers).front();
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equal-length samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

namespace {

RunConfig ipc_config(const ExperimentConfig& config, const CellKey& key) {
  RunConfig c = cell_run_config(config, key);
  c.length = 2 * config.ipc_length();
  return c;
}

RunConfig correlation_config(const ExperimentConfig& config, const CellKey& key) {
  RunConfig c = cell_run_config(config, key);
  c.washout = config.correlations.washout;
  c.length = config.correlations.window;
  return c;
}

std::vector<double> ipc_inputs(const ExperimentConfig& config) {
  return draw_inputs(config.run.washout + 2 * config.ipc_length(), config.seed);
}

std::vector<double> correlation_inputs(const ExperimentConfig& config) {
  return draw_inputs(config.correlations.washout + config.correlations.window, config.seed);
}

CorrelationReport cached_correlations(std::map<std::string, CorrelationReport>& cache, const RunConfig& c,
                                      std::span<const double> inputs, int n, int workers, bool negativity) {
  const auto key = run_key(c);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  return cache[key] = stationary_correlations(c, inputs, n, workers, negativity);
}

}  // namespace

JointReport ipc_vs_correlations(const ExperimentConfig& config, int workers) {
  const auto cells = expand_cells(config);
  std::vector<RunConfig> ipc_configs;
  for (const auto& k : cells) ipc_configs.push_back(ipc_config(config, k));
  const auto inputs = ipc_inputs(config);
  auto ipc = run_ipc_cells(ipc_configs, inputs, config.ipc, config.realizations, config.seed, workers);

  const auto cin = correlation_inputs(config);
  std::map<std::string, CorrelationReport> cache;
  JointReport report;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto corr = cached_correlations(cache, correlation_config(config, cells[i]), cin, config.correlations.realizations,
                                    workers, config.correlations.negativity);
    report.rows.push_back({cells[i], std::move(ipc[i]), std::move(corr)});
  }

  std::vector<double> Ws;
  for (const auto& r : report.rows) {
    if (std::find(Ws.begin(), Ws.end(), r.key.W) == Ws.end()) Ws.push_back(r.key.W);
  }
  for (double W : Ws) {
    std::vector<double> itot;
    std::vector<std::vector<double>> measures(CorrelationSnapshot::names().size());
    for (const auto& r : report.rows) {
      if (r.key.W != W) continue;
      itot.push_back(r.ipc.total.mean);
      const auto v = r.correlations.mean.values();
      for (std::size_t m = 0; m < v.size(); ++m) measures[m].push_back(v[m]);
    }
    std::vector<double> rho;
    for (const auto& m : measures) {
      rho.push_back(itot.size() >= 2 ? spearman(m, itot) : std::numeric_limits<double>::quiet_NaN());
    }
    report.spearman_by_W.emplace_back(W, std::move(rho));
  }
  return report;
}

namespace {

class Bundle {
 public:
  Bundle(const ExperimentConfig& config, const RunContext& context) : config_(config) {
    dir_ = !context.out.empty()         ? context.out
           : !config.output.empty()     ? std::filesystem::path(config.output)
                                        : std::filesystem::path("out") / to_string(config.kind);
    std::filesystem::create_directories(dir_);
    workers_ = context.workers;
    start_ = std::chrono::steady_clock::now();
  }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    return out;
  }

  template <typename F>
  auto timed(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    tasks_.push_back({{"name", name}, {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}});
    return result;
  }

  ResultBundle finish() {
    ResultBundle b;
    b.directory = dir_;
    b.files = files_;
    b.manifest = json{
        {"tool", "qrc"},
        {"version", kVersion},
        {"kind", to_string(config_.kind)},
        {"config_hash", config_hash(config_)},
        {"config", to_json(config_)},
        {"seeds", {{"master", config_.seed},
                   {"streams", {"inputs", "disorder", "readout", "readout-noise", "ipc-surrogates"}}}},
        {"workers", workers_},
        {"files", files_},
        {"tasks", tasks_},
        {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()},
    };
    std::ofstream out(dir_ / "manifest.json");
    out << b.manifest.dump(2) << '\n';
    return b;
  }

  int workers() const { return workers_; }

 private:
  const ExperimentConfig& config_;
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  json tasks_ = json::array();
  int workers_ = 1;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> cell_header() {
  return {"W", "h", "epsilon", "encoding", "observables", "V", "axis", "p_err"};
}

std::vector<std::string> cell_fields(const CellKey& k) {
  return {csv::num(k.W), csv::num(k.h), csv::num(k.epsilon), to_string(k.encoding), k.observables.label(),
          csv::num(k.observables.multiplex), to_string(k.axis), csv::num(k.p_err)};
}

template <typename... Parts>
std::vector<std::string> concat(const std::vector<std::string>& a, Parts&&... parts) {
  std::vector<std::string> out = a;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

std::vector<std::string> stat_fields(const MeanStderr& s) {
  return {csv::num(s.mean), csv::num(s.std_error), csv::num(s.stddev)};
}

}  // namespace

ResultBundle run_phase_diagram(const ExperimentConfig& config, const RunContext& context) {
  Bundle bundle(config, context);
  PhaseScanSpec spec;
  spec.h_values = config.phase.h_values;
  spec.W_values = config.phase.W_values;
  spec.n_qubits = config.run.model.n_qubits;
  spec.epsilon = config.run.model.epsilon;
  spec.n_realizations = config.phase.realizations;
  spec.seed = config.seed;
  spec.options = config.phase.gap;
  const auto cells = bundle.timed("gap-ratio", [&] { return phase_scan(spec, bundle.workers()); });
  {
    auto out = bundle.open("phase_gap_ratio.csv");
    csv::write_row(out, {"h", "W", "mean_r", "stderr_r", "n_realizations", "resolve_parity", "edge_trim", "seed"});
    for (const auto& c : cells) {
      csv::write_row(out, {csv::num(c.h), csv::num(c.W), csv::num(c.mean_r), csv::num(c.stderr_r),
                           csv::num(c.n_realizations), config.phase.gap.resolve_parity ? "1" : "0",
                           csv::num(config.phase.gap.edge_trim), csv::num(c.seed)});
    }
  }

  const int R = config.phase.coherence_realizations;
  if (R > 0) {
    const auto inputs = draw_inputs(config.phase.coherence_washout + config.phase.coherence_window, config.seed);
    std::vector<double> per(cells.size() * static_cast<std::size_t>(R));
    bundle.timed("coherence", [&] {
      parallel_for(per.size(), bundle.workers(), [&](std::size_t task) {
        const auto& cell = cells[task / static_cast<std::size_t>(R)];
        RunConfig c = config.run;
        c.model.h = cell.h;
        c.model.W = cell.W;
        c.noise = NoiseSpec{};
        c.washout = config.phase.coherence_washout;
        c.length = config.phase.coherence_window;
        c.propagation = Propagation::dense;
        c.realization = task % static_cast<std::size_t>(R);
        RunOptions options;
        options.state_log = StepWindow{c.washout, c.length};
        const auto result = Reservoir(c).run(inputs, options);
        double acc = 0.0;
        for (const auto& s : result.states) acc += l1_coherence(s.state, true);
        per[task] = acc / static_cast<double>(result.states.size());
      });
      return 0;
    });
    auto out = bundle.open("phase_coherence.csv");
    csv::write_row(out, {"h", "W", "mean_l1_normalized", "stderr", "stddev", "n_realizations", "washout", "window",
                         "seed"});
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto s = summarize(std::span<const double>(per).subspan(i * static_cast<std::size_t>(R), static_cast<std::size_t>(R)));
      csv::write_row(out, {csv::num(cells[i].h), csv::num(cells[i].W), csv::num(s.mean), csv::num(s.std_error),
                           csv::num(s.stddev), csv::num(R), csv::num(config.phase.coherence_washout),
                           csv::num(config.phase.coherence_window), csv::num(config.seed)});
    }
  }
  return bundle.finish();
}

ResultBundle run_correlation_sweep(const ExperimentConfig& config, const RunContext& context) {
  Bundle bundle(config, context);
  const auto cells = expand_cells(config);
  const auto inputs = correlation_inputs(config);
  std::map<std::string, CorrelationReport> cache;
  std::vector<CorrelationReport> reports;
  bundle.timed("correlations", [&] {
    for (const auto& k : cells) {
      reports.push_back(cached_correlations(cache, correlation_config(config, k), inputs,
                                            config.correlations.realizations, bundle.workers(),
                                            config.correlations.negativity));
    }
    return 0;
  });
  auto out = bundle.open("correlations.csv");
  csv::write_row(out, concat(cell_header(), std::vector<std::string>{"measure", "mean", "stderr", "stddev",
                                                                      "n_realizations", "washout", "window", "seed"}));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto mean = reports[i].mean.values();
    const auto se = reports[i].std_error.values();
    const auto sd = reports[i].stddev.values();
    for (std::size_t m = 0; m < mean.size(); ++m) {
      csv::write_row(out, concat(cell_fields(cells[i]),
                                 std::vector<std::string>{CorrelationSnapshot::names()[m], csv::num(mean[m]),
                                                          csv::num(se[m]), csv::num(sd[m]),
                                                          csv::num(reports[i].n_realizations),
                                                          csv::num(reports[i].washout), csv::num(reports[i].window),
                                                          csv::num(config.seed)}));
    }
  }
  return bundle.finish();
}

ResultBundle run_trajectory_dump(const ExperimentConfig& config, const RunContext& context) {
  Bundle bundle(config, context);
  const auto cells = expand_cells(config);
  const auto& t = config.trajectory;
  const auto inputs = draw_inputs(config.run.washout + t.offset + t.count, config.seed);
  const auto R = static_cast<std::size_t>(config.realizations);
  std::vector<std::vector<TrajectoryPoint>> slots(cells.size() * R);
  bundle.timed("trajectories", [&] {
    parallel_for(slots.size(), bundle.workers(), [&](std::size_t task) {
      RunConfig c = cell_run_config(config, cells[task / R]);
      c.length = t.offset + t.count;
      c.realization = task % R;
      RunOptions options;
      options.trajectory = StepWindow{c.washout + t.offset, t.count};
      slots[task] = Reservoir(c).run(inputs, options).trajectory;
    });
    return 0;
  });
  const int n = config.run.model.n_qubits;
  auto out = bundle.open("trajectories.csv");
  csv::write_row(out, concat(cell_header(), std::vector<std::string>{"realization", "step", "substep", "time",
                                                                      "observable", "value", "input"}));
  for (std::size_t task = 0; task < slots.size(); ++task) {
    const auto base = cell_fields(cells[task / R]);
    for (const auto& p : slots[task]) {
      csv::write_row(out, concat(base, std::vector<std::string>{
                                           csv::num(task % R), csv::num(p.step), csv::num(p.substep), csv::num(p.time),
                                           PauliString::on(n, {{p.qubit, Pauli::Z}}).str(), csv::num(p.value),
                                           csv::num(inputs[p.step])}));
    }
  }
  return bundle.finish();
}

namespace {

void write_ipc_tables(Bundle& bundle, const std::vector<CellKey>& cells, const std::vector<IpcCellResult>& results,
                      int d_max) {
  {
    auto out = bundle.open("ipc_summary.csv");
    std::vector<std::string> header = concat(cell_header(), std::vector<std::string>{"eta", "M"});
    for (int d = 1; d <= d_max; ++d) {
      for (const char* s : {"_mean", "_stderr", "_stddev"}) header.push_back("I_" + std::to_string(d) + s);
    }
    for (const char* h : {"residual_mean", "I_tot_mean", "I_tot_stderr", "I_tot_stddev", "normalized_mean",
                          "normalized_stderr", "normalized_stddev", "odd_sum_mean", "odd_threshold_sum_mean",
                          "n_realizations"}) {
      header.emplace_back(h);
    }
    csv::write_row(out, header);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& r = results[i];
      auto row = concat(cell_fields(cells[i]), std::vector<std::string>{csv::num(r.config.noise.eta), csv::num(r.M)});
      for (const auto& d : r.per_degree) row = concat(row, stat_fields(d));
      row.push_back(csv::num(static_cast<double>(r.M) - r.total.mean));
      row = concat(row, stat_fields(r.total), stat_fields(r.normalized));
      row.push_back(csv::num(r.odd_sum.mean));
      row.push_back(csv::num(r.odd_threshold_sum.mean));
      row.push_back(csv::num(r.realizations.size()));
      csv::write_row(out, row);
    }
  }
  auto out = bundle.open("ipc_realizations.csv");
  std::vector<std::string> header = concat(cell_header(), std::vector<std::string>{"realization"});
  for (int d = 1; d <= d_max; ++d) header.push_back("I_" + std::to_string(d));
  for (const char* h : {"I_tot", "M", "normalized", "rank", "evaluated", "truncated"}) header.emplace_back(h);
  csv::write_row(out, header);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& r : results[i].realizations) {
      auto row = concat(cell_fields(cells[i]), std::vector<std::string>{csv::num(r.realization)});
      for (double v : r.per_degree) row.push_back(csv::num(v));
      row = concat(row, std::vector<std::string>{csv::num(r.total), csv::num(r.M), csv::num(r.normalized()),
                                                 csv::num(r.rank), csv::num(r.evaluated), r.truncated ? "1" : "0"});
      csv::write_row(out, row);
    }
  }
}

}  // namespace

ResultBundle run_ipc_experiment(const ExperimentConfig& config, const RunContext& context) {
  Bundle bundle(config, context);
  const auto cells = expand_cells(config);
  std::vector<RunConfig> configs;
  for (const auto& k : cells) configs.push_back(ipc_config(config, k));
  const auto inputs = ipc_inputs(config);
  std::map<std::pair<std::size_t, std::size_t>, std::string> target_tables;
  ReportSink sink;
  if (config.write_targets) {
    sink = [&](std::size_t cell, std::size_t r, const CapacityReport& rep) {
      std::ostringstream s;
      write_capacity_targets_csv(s, rep);
      target_tables[{cell, r}] = s.str();
    };
  }
  const auto results = bundle.timed("ipc", [&] {
    return ipc_cells_impl(configs, inputs, config.ipc, config.realizations, config.seed, bundle.workers(), sink);
  });
  write_ipc_tables(bundle, cells, results, config.ipc.d_max);
  for (const auto& [key, table] : target_tables) {
    auto out = bundle.open("ipc_targets_cell" + std::to_string(key.first) + "_r" + std::to_string(key.second) + ".csv");
    out << table;
  }
  return bundle.finish();
}

ResultBundle run_ipc_vs_correlations(const ExperimentConfig& config, const RunContext& context) {
  Bundle bundle(config, context);
  const auto report = bundle.timed("ipc-vs-correlations", [&] { return ipc_vs_correlations(config, bundle.workers()); });
  const auto& names = CorrelationSnapshot::names();
  {
    auto out = bundle.open("joint.csv");
    std::vector<std::string> header = concat(cell_header(), std::vector<std::string>{
                                                                "I_tot_mean", "I_tot_stderr", "normalized_mean",
                                                                "normalized_stderr"});
    for (const auto& n : names) {
      header.push_back(n + "_mean");
      header.push_back(n + "_stderr");
    }
    header.emplace_back("I_tot_ratio");
    header.emplace_back("N_neg_ratio");
    csv::write_row(out, header);
    for (const auto& row : report.rows) {
      // Ratios against the noiseless row of the same W.
      const JointRow* ref = nullptr;
      for (const auto& r : report.rows) {
        if (r.key.W == row.key.W && r.key.p_err == 0.0) {
          ref = &r;
          break;
        }
      }
      auto fields = concat(cell_fields(row.key), std::vector<std::string>{
                                                     csv::num(row.ipc.total.mean), csv::num(row.ipc.total.std_error),
                                                     csv::num(row.ipc.normalized.mean),
                                                     csv::num(row.ipc.normalized.std_error)});
      const auto mean = row.correlations.mean.values();
      const auto se = row.correlations.std_error.values();
      for (std::size_t m = 0; m < mean.size(); ++m) {
        fields.push_back(csv::num(mean[m]));
        fields.push_back(csv::num(se[m]));
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      fields.push_back(csv::num(ref ? row.ipc.total.mean / ref->ipc.total.mean : nan));
      fields.push_back(csv::num(ref && ref->correlations.mean.N_neg > 0.0
                                    ? row.correlations.mean.N_neg / ref->correlations.mean.N_neg
                                    : nan));
      csv::write_row(out, fields);
    }
  }
  auto out = bundle.open("spearman.csv");
  csv::write_row(out, {"W", "measure", "spearman_vs_I_tot"});
  for (const auto& [W, rho] : report.spearman_by_W) {
    for (std::size_t m = 0; m < rho.size(); ++m) csv::write_row(out, {csv::num(W), names[m], csv::num(rho[m])});
  }
  return bundle.finish();
}

ResultBundle run_stationary_stats(const ExperimentConfig& config, const RunContext& context) {
  Bundle bundle(config, context);
  const auto cells = expand_cells(config);
  const auto inputs = draw_inputs(config.run.washout + config.run.length, config.seed);
  std::vector<std::vector<ObservableStat>> stats;
  bundle.timed("stationary-stats", [&] {
    for (const auto& k : cells) {
      stats.push_back(stationary_observable_stats(cell_run_config(config, k), inputs, config.realizations,
                                                  bundle.workers()));
    }
    return 0;
  });
  auto out = bundle.open("stationary_stats.csv");
  csv::write_row(out, concat(cell_header(), std::vector<std::string>{"observable", "mean_abs", "stderr",
                                                                      "n_realizations", "steps"}));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& s : stats[i]) {
      csv::write_row(out, concat(cell_fields(cells[i]),
                                 std::vector<std::string>{s.observable, csv::num(s.mean_abs), csv::num(s.std_error),
                                                          csv::num(config.realizations), csv::num(config.run.length)}));
    }
  }
  return bundle.finish();
}

ResultBundle run_experiment(const ExperimentConfig& config, const RunContext& context) {
  switch (config.kind) {
    case ExperimentKind::phase_diagram: return run_phase_diagram(config, context);
    case ExperimentKind::correlations: return run_correlation_sweep(config, context);
    case ExperimentKind::trajectories: return run_trajectory_dump(config, context);
    case ExperimentKind::ipc: return run_ipc_experiment(config, context);
    case ExperimentKind::ipc_vs_correlations: return run_ipc_vs_correlations(config, context);
    case ExperimentKind::stationary_stats: return run_stationary_stats(config, context);
  }
  throw Error("unknown experiment kind");
}

}  // namespace qrc
