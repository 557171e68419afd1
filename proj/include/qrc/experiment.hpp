#pragma once

// End-to-end experiment runners. Each runner expands the config's sweep into
// cells, runs independent (cell, realization) tasks through parallel_for, and
// writes long-format CSV tables plus manifest.json into the output directory.
// Tables never contain timings, so reruns of one config are byte-identical.

#include "qrc/config.hpp"
#include "qrc/correlations.hpp"
#include "qrc/ipc.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qrc {

inline constexpr const char* kVersion = "1.0.0";

struct CellKey {
  double W = 0.0;
  double h = 1.0;
  double epsilon = 0.0;
  NoiseAxis axis = NoiseAxis::none;
  double p_err = 0.0;
  Encoding encoding = Encoding::mixed_z;
  ObservableChoice observables;
};

/// Cartesian product of the sweep lists (W, h, epsilon, axis, p_err, encoding,
/// observables, in that nesting order); empty lists use the base config.
std::vector<CellKey> expand_cells(const ExperimentConfig& config);

/// Run config of one cell. A multiplex factor V that does not divide eta
/// raises eta to the next multiple of V at the same physical rate gamma.
RunConfig cell_run_config(const ExperimentConfig& config, const CellKey& key);
NoiseSpec commensurate_noise(const NoiseSpec& noise, int V, double delta_t);

struct IpcRealization {
  std::uint64_t realization = 0;
  std::vector<double> per_degree;
  std::vector<double> threshold_sum;
  double total = 0.0;
  std::size_t M = 0;
  std::size_t rank = 0;
  std::size_t evaluated = 0;
  bool truncated = false;  // some family hit max_delay or the target cap

  double normalized() const { return M == 0 ? 0.0 : total / static_cast<double>(M); }
  double odd_sum() const;
  double odd_threshold_sum() const;
};

struct IpcCellResult {
  CellKey key;
  RunConfig config;
  std::vector<IpcRealization> realizations;
  std::vector<MeanStderr> per_degree;
  MeanStderr total;
  MeanStderr normalized;
  MeanStderr odd_sum;
  MeanStderr odd_threshold_sum;
  std::size_t M = 0;
};

/// Readout-noise seed of a realization, shared by all cells.
std::uint64_t readout_seed(std::uint64_t master, std::uint64_t realization);

/// One realization: run on `inputs` (washout + 2L values), add readout noise,
/// score IPC.
CapacityReport ipc_realization(const RunConfig& config, std::span<const double> inputs, const IpcSettings& settings,
                               std::uint64_t master_seed);

/// IPC averaged over realizations config.realization + r, r < n_realizations.
IpcCellResult run_ipc_cell(const RunConfig& config, std::span<const double> inputs, const IpcSettings& settings,
                           int n_realizations, std::uint64_t master_seed, int workers = 1);

/// Several cells with one shared work queue over (cell, realization).
std::vector<IpcCellResult> run_ipc_cells(const std::vector<RunConfig>& configs, std::span<const double> inputs,
                                         const IpcSettings& settings, int n_realizations, std::uint64_t master_seed,
                                         int workers = 1);

/// Average ranks (ties share their mean rank), then Pearson correlation.
double spearman(std::span<const double> x, std::span<const double> y);

struct JointRow {
  CellKey key;
  IpcCellResult ipc;
  CorrelationReport correlations;
};

struct JointReport {
  std::vector<JointRow> rows;
  // Per W: Spearman rho between each correlation measure and I_tot, axes pooled.
  std::vector<std::pair<double, std::vector<double>>> spearman_by_W;
};

JointReport ipc_vs_correlations(const ExperimentConfig& config, int workers = 1);

struct RunContext {
  int workers = 1;
  std::filesystem::path out;  // overrides config.output when non-empty
};

struct ResultBundle {
  std::filesystem::path directory;
  std::vector<std::string> files;
  nlohmann::json manifest;
};

ResultBundle run_experiment(const ExperimentConfig& config, const RunContext& context);

ResultBundle run_phase_diagram(const ExperimentConfig& config, const RunContext& context);
ResultBundle run_correlation_sweep(const ExperimentConfig& config, const RunContext& context);
ResultBundle run_trajectory_dump(const ExperimentConfig& config, const RunContext& context);
ResultBundle run_ipc_experiment(const ExperimentConfig& config, const RunContext& context);
ResultBundle run_ipc_vs_correlations(const ExperimentConfig& config, const RunContext& context);
ResultBundle run_stationary_stats(const ExperimentConfig& config, const RunContext& context);

}  // namespace qrc
