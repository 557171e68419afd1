#pragma once

// Coherence and correlation measures of multi-qubit states, all entropies in
// bits. Delta is full dephasing in the computational basis, pi the product of
// single-qubit marginals.

#include "qrc/linalg.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/spin_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qrc {

/// sum_{i != j} |rho_ij|, optionally divided by 2^N - 1.
double l1_coherence(const DensityMatrix& rho, bool normalized = false);

/// S(Delta rho) - S(rho).
double relative_entropy_coherence(const DensityMatrix& rho);

/// T = sum_i S(rho_i) - S(rho).
double mutual_information(const DensityMatrix& rho);

/// sum_i [S(Delta rho_i) - S(rho_i)].
double local_coherence(const DensityMatrix& rho);

/// Relative entropy to Delta pi rho, evaluated directly as
/// -S(rho) - sum_k rho_kk log2 sigma_kk with sigma_kk the product of marginal
/// populations.
double quantum_hookup(const DensityMatrix& rho);

/// K = T(Delta rho).
double classical_correlations(const DensityMatrix& rho);

/// (||rho^{T_A}||_1 - 1) / 2 for the qubits in `subset_mask` (bit_of convention).
double negativity(const DensityMatrix& rho, std::uint64_t subset_mask);

/// Mean negativity over the 2^{N-1} - 1 bipartitions, each clipped at 0.
double mean_negativity(const DensityMatrix& rho);

struct CorrelationSnapshot {
  double l1 = 0.0;
  double l1_normalized = 0.0;
  double rel = 0.0;     // relative-entropy coherence
  double T = 0.0;
  double M = 0.0;
  double K = 0.0;
  double C_L = 0.0;
  double N_neg = 0.0;

  static const std::vector<std::string>& names();
  std::vector<double> values() const;
  static CorrelationSnapshot from_values(const std::vector<double>& v);
};

CorrelationSnapshot measure_correlations(const DensityMatrix& rho, bool with_negativity = true);

struct CorrelationReport {
  CorrelationSnapshot mean;
  CorrelationSnapshot std_error;  // over realizations
  CorrelationSnapshot stddev;
  int n_realizations = 0;
  std::size_t washout = 0;
  std::size_t window = 0;
};

/// Runs `n_realizations` realizations (config.realization + r) on `inputs`
/// (|inputs| = washout + length) and averages the measures over the last
/// config.length states, then across realizations.
CorrelationReport stationary_correlations(const RunConfig& config, std::span<const double> inputs,
                                          int n_realizations, int workers = 1, bool with_negativity = true);

struct CorrelationSweepSpec {
  RunConfig base;  // washout / length set the window
  std::vector<NoiseAxis> axes{NoiseAxis::x, NoiseAxis::z};
  std::vector<double> p_values{0.0, 0.001, 0.005, 0.01, 0.05};
  int n_realizations = 10;
  std::uint64_t input_seed = 0;
  bool with_negativity = true;
};

struct CorrelationSweepCell {
  NoiseAxis axis = NoiseAxis::none;
  double p_err = 0.0;
  CorrelationReport report;
};

/// Cells axis-major; every cell sees the same input sequence.
std::vector<CorrelationSweepCell> stationary_correlation_sweep(const CorrelationSweepSpec& spec, int workers = 1);

}  // namespace qrc
