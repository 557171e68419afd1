#pragma once

// Information processing capacity of a readout matrix. Targets are products
// of Legendre polynomials of past inputs s~ = 2s - 1:
//
//   y_k = prod_i P_{d_i}(s~_{k-i}),  degree d = sum_i d_i.
//
// A linear readout (all columns plus a bias) is fitted on the first half of
// the rows and scored on the second half by C = 1 - MSE / <y^2>.

#include "qrc/linalg.hpp"
#include "qrc/reservoir.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qrc {

/// Legendre polynomial P_d(x) by Bonnet's recursion.
double legendre(int degree, double x);

struct TargetTerm {
  int delay = 1;   // steps into the past, >= 1
  int degree = 1;  // >= 1
  friend bool operator==(const TargetTerm&, const TargetTerm&) = default;
};

struct TargetSpec {
  std::vector<TargetTerm> terms;  // ascending delay

  int degree() const;
  int max_delay() const;
  int min_delay() const;
  /// "1:2,4:1" = P_2 at delay 1 times P_1 at delay 4.
  std::string str() const;
  /// Throws on an empty spec, repeated delays, delay < 1 or degree < 1.
  void validate() const;
  /// Terms sorted by delay.
  static TargetSpec of(std::vector<TargetTerm> terms);
};

/// y_k = prod P_{d_i}(2 s_{k-i} - 1) for every k with full history, i.e.
/// k = max_delay .. |inputs|-1.
std::vector<double> build_target(const TargetSpec& spec, std::span<const double> inputs);

/// Target aligned with readout rows: row r uses inputs[first_time + r - i].
RealVector build_target(const TargetSpec& spec, std::span<const double> inputs, std::size_t first_time,
                        std::size_t rows);

/// Least-squares readout on [X, 1] solved through a thin SVD; singular values
/// below 1e-10 times the largest are dropped.
class LinearReadout {
 public:
  static LinearReadout train(const RealMatrix& x, const RealVector& y, double rcond = 1e-10);
  RealVector predict(const RealMatrix& x) const;
  /// Column weights followed by the bias.
  const RealVector& weights() const { return weights_; }

 private:
  RealVector weights_;
};

/// 1 - MSE / <y^2>, clipped at 0.
double capacity(std::span<const double> prediction, std::span<const double> target);
/// Unclipped.
double raw_capacity(std::span<const double> prediction, std::span<const double> target);

struct IpcSettings {
  int d_max = 6;
  int max_delay_linear = 200;    // degree-1 delays 1..this
  int max_delay = 60;            // largest delay for degree >= 2
  int stop_after = 5;            // consecutive empty delay levels ending a family
  int surrogates = 20;
  int min_shift = 100;
  double sigmas = 3.0;           // retention threshold: mean + sigmas * stddev
  double stop_sigmas = 6.0;      // a level counts as non-empty above mean + stop_sigmas * stddev
  std::size_t max_targets_per_degree = 200000;
  std::uint64_t seed = 0;
  double rcond = 1e-10;

  void validate() const;
};

struct TargetCapacity {
  TargetSpec spec;
  double capacity = 0.0;  // unclipped test capacity
  double threshold = 0.0;
  double surrogate_mean = 0.0;
  double surrogate_std = 0.0;
  bool retained = false;

  double contribution() const { return retained ? capacity : 0.0; }
};

struct FamilyCutoff {
  int degree = 0;
  std::vector<int> partition;  // per-delay degrees, descending
  int last_delay = 0;          // largest max-delay level evaluated
  std::size_t evaluated = 0;
  bool stopped_by_rule = false;  // false: hit max_delay or the per-degree cap
};

struct CapacityReport {
  std::vector<TargetCapacity> targets;
  std::vector<double> per_degree;      // index d-1 for d = 1..d_max
  std::vector<double> threshold_sum;   // per degree, summed over retained targets
  std::vector<std::size_t> evaluated;  // per degree
  std::vector<FamilyCutoff> families;
  double total = 0.0;
  std::size_t M = 0;  // readout columns (bias excluded)
  std::size_t train_rows = 0;
  std::size_t rank = 0;  // numerical rank of the training design matrix
  std::vector<int> shifts;
  IpcSettings settings;

  double normalized() const { return M == 0 ? 0.0 : total / static_cast<double>(M); }
  double residual() const { return static_cast<double>(M) - total; }
  double odd_degree_sum() const;
  double odd_threshold_sum() const;
};

/// Scores batches of targets against one train/test split. The SVD of the
/// training design matrix and the surrogate shifts are shared by all targets.
class CapacityScorer {
 public:
  CapacityScorer(const RealMatrix& x_train, const RealMatrix& x_test, std::vector<int> shifts, double rcond = 1e-10);

  /// Columns of y_train / y_test are targets. Returns one entry per column
  /// (spec left empty; retention decided with `sigmas`).
  std::vector<TargetCapacity> score(const RealMatrix& y_train, const RealMatrix& y_test, double sigmas) const;

  std::size_t rank() const { return static_cast<std::size_t>(u_.cols()); }

 private:
  RealMatrix u_;        // L x r
  RealMatrix w_map_;    // (M+1) x r: V Sigma^-1
  RealMatrix b_test_;   // L x (M+1)
  RealMatrix gram_;     // B_test^T B_test
  std::vector<int> shifts_;
};

/// Cyclic shifts in [min_shift, L - min_shift] from the ("ipc-surrogates") stream.
std::vector<int> draw_surrogate_shifts(std::size_t length, const IpcSettings& settings);

/// `readout` holds 2L rows (train then test) and `inputs` the full input
/// sequence driving the run, so that readout.first_time indexes into it.
CapacityReport total_ipc(const ReadoutMatrix& readout, std::span<const double> inputs, const IpcSettings& settings);

/// One row per evaluated target: spec, degree, capacity, threshold, retained.
void write_capacity_targets_csv(std::ostream& out, const CapacityReport& report);
/// Header plus one summary row: I_1..I_dmax, residual, I_tot, M, normalized.
void write_capacity_summary_csv(std::ostream& out, const CapacityReport& report);

}  // namespace qrc
