#pragma once

// Erase-and-write reservoir map: at each step the input qubit (qubit 0) is
// replaced by an encoded input state, the register evolves for Delta_T under
// the (noisy) interval map, and observables are read right before the next
// injection.

#include "qrc/linalg.hpp"
#include "qrc/noise.hpp"
#include "qrc/spin_model.hpp"
#include "qrc/transfer.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

enum class Encoding { mixed_z, pure_z, mixed_x, pure_x };

std::string to_string(Encoding encoding);
Encoding parse_encoding(std::string_view text);

/// Bloch components (1, r_x, r_y, r_z) of the encoded state, so that
/// rho_1(s) = (I + r_x X + r_y Y + r_z Z) / 2.
std::array<double, 4> encoding_components(double s, Encoding encoding);

/// mixed_z: diag(1-s, s); pure_z: |eta(s)><eta(s)|, eta = cos(pi s/2)|0> + sin(pi s/2)|1>;
/// mixed_x: (1-s)|-><-| + s|+><+|; pure_x: |xi(s)><xi(s)|, xi = cos(pi s/2)|-> + sin(pi s/2)|+>.
DensityMatrix encode_input(double s, Encoding encoding);

/// rho_1 (x) Tr_0[rho].
DensityMatrix inject_input(const DensityMatrix& rho, const DensityMatrix& rho1);

struct ObservableSet {
  std::string name;
  std::vector<PauliString> observables;
  int multiplex = 1;

  /// Z, ZZ, Z+ZZ, XXXYYXYY, ZZ+ZX, or LOCAL12 (every 1- and 2-local string).
  static ObservableSet named(std::string_view name, int n_qubits, int multiplex = 1);
  static ObservableSet custom(std::vector<PauliString> observables, int multiplex = 1);

  std::size_t size() const { return observables.size(); }
  std::size_t output_count() const { return observables.size() * static_cast<std::size_t>(multiplex); }
  /// "ZZIII" for V = 1, "ZZIII@j/V" block by block otherwise.
  std::vector<std::string> column_names() const;
  void validate(int n_qubits) const;
};

/// Tr[O rho] for each observable (multiplexing ignored).
std::vector<double> measure_observables(const DensityMatrix& rho, const ObservableSet& set);

enum class InitialState { maximally_mixed, all_zero };
enum class Propagation { transfer, dense };

InitialState parse_initial_state(std::string_view text);
std::string to_string(InitialState s);

struct RunConfig {
  ModelParams model;
  std::uint64_t realization = 0;
  double delta_t = 10.0;
  std::size_t washout = 1000;
  std::size_t length = 10000;
  Encoding encoding = Encoding::mixed_z;
  NoiseSpec noise;
  ObservableSet observables = ObservableSet::named("ZZ", 5);
  double readout_sigma = 0.001;
  InitialState initial = InitialState::maximally_mixed;
  Propagation propagation = Propagation::transfer;

  void validate() const;
};

struct ReadoutMatrix {
  std::vector<std::string> columns;
  RealMatrix values;           // rows = steps, cols = observables
  std::size_t first_time = 0;  // row r was measured right before injecting input first_time + r
  bool noisy = false;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  ReadoutMatrix slice_rows(Eigen::Index begin, Eigen::Index count) const;
};

/// Adds i.i.d. N(0, sigma^2) to every entry from the stream ("readout-noise").
ReadoutMatrix add_readout_noise(const ReadoutMatrix& x, double sigma, std::uint64_t seed);

struct StepWindow {
  std::size_t first_step = 0;  // absolute step index (washout included)
  std::size_t count = 0;
  bool contains(std::size_t step) const { return step >= first_step && step < first_step + count; }
};

struct TrajectoryPoint {
  std::size_t step = 0;  // interval following injection of input `step`
  int substep = 0;       // 0 = right after injection, eta = right before the next one
  double time = 0.0;     // (step + substep / eta) * Delta_T
  int qubit = 0;
  double value = 0.0;    // <Z_qubit>
};

struct LoggedState {
  std::size_t step = 0;
  DensityMatrix state;
};

struct RunOptions {
  std::optional<DensityMatrix> initial_state;  // overrides RunConfig::initial
  std::optional<StepWindow> state_log;         // full states right before injection step+1
  std::optional<StepWindow> trajectory;        // sub-step resolved <Z_i>
  bool check_states = false;                   // validate every logged state
};

struct RunResult {
  ReadoutMatrix readout;  // noiseless
  DensityMatrix final_state;
  std::vector<LoggedState> states;
  std::vector<TrajectoryPoint> trajectory;
};

/// A configured reservoir for one Hamiltonian realization. Immutable after
/// construction; run() may be called concurrently.
class Reservoir {
 public:
  Reservoir(const RunConfig& config, HamiltonianRealization hamiltonian);
  explicit Reservoir(const RunConfig& config);  // samples config.model at config.realization

  /// |inputs| must be washout + length; the first `washout` readout rows are
  /// dropped.
  RunResult run(std::span<const double> inputs, const RunOptions& options = {}) const;

  const RunConfig& config() const { return config_; }
  const HamiltonianRealization& hamiltonian() const { return hamiltonian_; }

 private:
  RunResult run_transfer(std::span<const double> inputs, const RunOptions& options) const;
  RunResult run_dense(std::span<const double> inputs, const RunOptions& options) const;
  DensityMatrix initial_state(const RunOptions& options) const;

  RunConfig config_;
  HamiltonianRealization hamiltonian_;
  std::shared_ptr<const TransferPropagator> transfer_;
};

RunResult run_reservoir(const RunConfig& config, std::span<const double> inputs, const RunOptions& options = {});

/// Readout with V samples per interval at k Delta_T + j Delta_T / V.
ReadoutMatrix multiplex_readout(const RunConfig& config, std::span<const double> inputs, int V);

struct ObservableStat {
  std::string observable;
  double mean_abs = 0.0;
  double std_error = 0.0;  // over realizations
};

/// Mean |<O>| over the post-washout steps for every 1- and 2-local Pauli
/// string, averaged over realizations 0..n_realizations-1.
std::vector<ObservableStat> stationary_observable_stats(const RunConfig& config, std::span<const double> inputs,
                                                        int n_realizations = 1, int workers = 1);

}  // namespace qrc
