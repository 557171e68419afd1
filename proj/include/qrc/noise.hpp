#pragma once

// Bit-flip / phase-flip decoherence between input injections, implemented as
// a first-order Trotter splitting of
//
//   d rho/dt = -i[H, rho] + gamma sum_i (s_i rho s_i - rho),  s = X or Z,
//
// into eta repetitions of { unitary for delta_t = Delta_T / eta, then the
// single-qubit flip channel with p_err = (1 - exp(-2 gamma delta_t)) / 2 on
// every qubit }.

#include "qrc/linalg.hpp"
#include "qrc/spin_model.hpp"

#include <string>
#include <string_view>

namespace qrc {

enum class NoiseAxis { none, x, z };

std::string to_string(NoiseAxis axis);
NoiseAxis parse_noise_axis(std::string_view text);

struct NoiseSpec {
  NoiseAxis axis = NoiseAxis::none;
  double p_err = 0.0;  // flip probability per sub-step
  int eta = 50;        // sub-steps per input interval

  bool active() const { return axis != NoiseAxis::none && p_err > 0.0; }
  void validate() const;

  /// Same physical rate gamma over `delta_T`, re-expressed for `new_eta`
  /// sub-steps.
  NoiseSpec with_eta(int new_eta, double delta_T) const;
};

double perr_from_gamma(double gamma, double delta_t);
double gamma_from_perr(double p, double delta_t);

/// (1-p) rho + p s_q rho s_q on qubit q.
DensityMatrix apply_flip_channel(const DensityMatrix& rho, NoiseAxis axis, double p, int qubit);
void apply_flip_channel_inplace(ComplexMatrix& rho, int n_qubits, NoiseAxis axis, double p, int qubit);

/// Cached sub-step propagator for one Hamiltonian realization; immutable
/// after construction and safe to share between threads.
class IntervalPropagator {
 public:
  IntervalPropagator(const HamiltonianRealization& h, double delta_T, NoiseSpec noise);

  /// One full interval Delta_T.
  DensityMatrix apply(const DensityMatrix& rho) const;

  /// `count` sub-steps of length Delta_T / eta (unitary then channel). With
  /// inactive noise a sub-step is a plain unitary of that length.
  void apply_substeps(ComplexMatrix& rho, int count) const;

  const NoiseSpec& noise() const { return noise_; }
  double delta_T() const { return delta_T_; }
  int n_qubits() const { return n_qubits_; }

 private:
  int n_qubits_;
  double delta_T_;
  NoiseSpec noise_;
  ComplexMatrix full_step_;  // exp(-i H Delta_T)
  ComplexMatrix sub_step_;   // exp(-i H Delta_T / eta)
};

/// eta x {unitary sub-step, flip channel on qubits 0..N-1}; the plain
/// unitary over delta_T when noise is inactive.
DensityMatrix noisy_interval(const DensityMatrix& rho, const HamiltonianRealization& h, double delta_T,
                             const NoiseSpec& noise);

}  // namespace qrc
