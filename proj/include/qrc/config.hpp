#pragma once

// Declarative experiment configs (JSON). Every object rejects unknown keys;
// omitted keys take the defaults of the corresponding library structs. See
// README.md for the schema.

#include "qrc/ipc.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/spin_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qrc {

enum class ExperimentKind { phase_diagram, correlations, trajectories, ipc, ipc_vs_correlations, stationary_stats };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct ObservableChoice {
  std::string set = "ZZ";             // named set or "custom"
  std::vector<std::string> strings;   // Pauli strings for "custom"
  int multiplex = 1;

  ObservableSet build(int n_qubits) const;
  std::string label() const;  // "ZZ", "ZZ@V4", ...
};

/// Lists swept as a cartesian product. An empty list means "the base value".
struct SweepAxes {
  std::vector<double> W;
  std::vector<double> h;
  std::vector<double> epsilon;
  std::vector<NoiseAxis> axes;
  std::vector<double> p_err;
  std::vector<Encoding> encodings;
  std::vector<ObservableChoice> observables;
};

struct PhaseSettings {
  std::vector<double> h_values;   // empty: default grid
  std::vector<double> W_values;
  int realizations = 100;
  int coherence_realizations = 10;
  std::size_t coherence_washout = 1000;
  std::size_t coherence_window = 100;
  GapRatioOptions gap;
};

struct CorrelationSettings {
  std::size_t washout = 500;
  std::size_t window = 100;
  bool negativity = true;
  int realizations = 10;
};

struct TrajectorySettings {
  std::size_t offset = 0;  // injections after the washout before the window starts
  std::size_t count = 4;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ipc;
  std::uint64_t seed = 0;
  int realizations = 10;
  std::string scale = "desk";  // desk: L = 10^4, paper: L = 10^5 (IPC kinds)
  std::string output;
  bool write_targets = false;

  RunConfig run;
  ObservableChoice observables;
  IpcSettings ipc;
  SweepAxes sweep;
  PhaseSettings phase;
  CorrelationSettings correlations;
  TrajectorySettings trajectory;

  void validate() const;
  /// Train/test length L for the IPC kinds.
  std::size_t ipc_length() const;
};

/// Throws Error on unknown keys, wrong types or invalid values. `seed` is
/// mandatory unless `seed_override` is given.
ExperimentConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {});

/// Canonical form with every effective value spelled out.
nlohmann::json to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace qrc
