#pragma once

// Pauli-transfer form of the noisy interval map. For a realization H and a
// noise spec the dissipative step is diagonal in the Pauli basis, so
//
//   T_sub = (D R_{delta_t})^{eta / V}
//
// with R the (orthogonal) transfer matrix of exp(-i H delta_t) and
// D[P,P] = (1 - 2 p_err)^{#qubits where P anticommutes with the flip axis}.
// Checkpoint j (1..V) is T_sub^j: the map from a freshly injected state to
// the state at time j Delta_T / V.

#include "qrc/linalg.hpp"
#include "qrc/noise.hpp"
#include "qrc/spin_model.hpp"

#include <vector>

namespace qrc {

/// Diagonal of the N-qubit flip channel in the Pauli basis.
RealVector flip_channel_diagonal(int n_qubits, NoiseAxis axis, double p);

class TransferPropagator {
 public:
  /// Throws if noise.eta is not a multiple of `checkpoints`.
  TransferPropagator(const HamiltonianRealization& h, double delta_T, const NoiseSpec& noise, int checkpoints = 1);

  int n_qubits() const { return n_qubits_; }
  int checkpoints() const { return static_cast<int>(checkpoints_.size()); }

  /// Map from injection to time j Delta_T / V, j in [1, V].
  const RealMatrix& checkpoint(int j) const { return checkpoints_.at(static_cast<std::size_t>(j - 1)); }

  /// One sub-step of length Delta_T / eta (unitary then channel).
  const RealMatrix& substep() const { return substep_; }
  int substeps_per_interval() const { return eta_; }

 private:
  int n_qubits_;
  int eta_;
  RealMatrix substep_;
  std::vector<RealMatrix> checkpoints_;
};

}  // namespace qrc
