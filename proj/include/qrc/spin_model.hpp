#pragma once

// Disordered, fully connected transverse-field Ising reservoir:
//
//   H = sum_{i>j} J_ij X_i X_j + sum_i h_i Z_i + epsilon sum_i X_i
//
// with J_ij ~ U[0,1] and h_i = h + w_i, w_i ~ U[-W, W].

#include "qrc/linalg.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qrc {

struct ModelParams {
  int n_qubits = 5;
  double h = 1.0;
  double W = 0.0;
  double epsilon = 0.0;  // parity-breaking X field
  std::uint64_t seed = 0;

  void validate() const;
};

struct HamiltonianRealization {
  int n_qubits = 0;
  RealMatrix couplings;        // J(i, j) for i > j, zero elsewhere
  std::vector<double> fields;  // h_i
  double epsilon = 0.0;
  ComplexMatrix matrix;
  EigenDecomposition spectrum;
};

/// Realization `index` of the disorder ensemble. Couplings and the unit
/// disorder draws u_i in [-1, 1] come from the stream ("disorder", index)
/// of params.seed, so the same index yields the same J_ij and the same
/// relative field pattern w_i = W u_i for every (h, W).
HamiltonianRealization sample_hamiltonian(const ModelParams& params, std::uint64_t index = 0);

/// Builds H for explicitly given couplings and fields.
HamiltonianRealization make_hamiltonian(const RealMatrix& couplings, std::vector<double> fields,
                                        double epsilon = 0.0);

/// Adjacent-gap ratios min(w_n, w_{n+1}) / max(w_n, w_{n+1}) of an ascending
/// spectrum. Pairs with both gaps below 1e-12 are skipped; if exactly one
/// gap is below 1e-12 the ratio is 0.
std::vector<double> gap_ratios(std::span<const double> ascending);

/// Mean of gap_ratios; throws for fewer than 3 levels.
double gap_ratio_statistic(std::span<const double> ascending);

struct GapRatioOptions {
  // Split the spectrum by the parity P = prod_i Z_i when epsilon == 0.
  bool resolve_parity = true;
  // Ratios dropped at each end of every (sector) spectrum.
  int edge_trim = 2;
};

/// <r> for one realization under the given resolution options.
double realization_gap_ratio(const HamiltonianRealization& h, const GapRatioOptions& options = {});

struct PhaseScanSpec {
  std::vector<double> h_values;
  std::vector<double> W_values;
  int n_qubits = 5;
  double epsilon = 0.0;
  int n_realizations = 100;
  std::uint64_t seed = 0;
  GapRatioOptions options;
};

struct PhaseCell {
  double h = 0.0;
  double W = 0.0;
  double mean_r = 0.0;
  double stderr_r = 0.0;
  int n_realizations = 0;
  std::uint64_t seed = 0;
};

/// Cells are ordered h-major (all W for the first h, then the next h).
std::vector<PhaseCell> phase_scan(const PhaseScanSpec& spec, int workers = 1);

/// Default grid: h in {0.1,...,2.0}, W in {0,0.5,...,10}.
PhaseScanSpec default_phase_grid();

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  double stddev = 0.0;
};

MeanStderr summarize(std::span<const double> values);

}  // namespace qrc
