#include "qrc/correlations.hpp"

#include "qrc/parallel.hpp"
#include "qrc/rng.hpp"

#include <cmath>

namespace qrc {

namespace {

RealVector populations(const DensityMatrix& rho) {
  return rho.matrix().diagonal().real().cwiseMax(0.0);
}

// Population of |0> on each qubit.
std::vector<double> marginal_zero_populations(const DensityMatrix& rho) {
  const int n = rho.n_qubits();
  const RealVector p = populations(rho);
  std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    for (int q = 0; q < n; ++q) {
      if ((static_cast<std::uint64_t>(k) & bit_of(n, q)) == 0) zero[static_cast<std::size_t>(q)] += p(k);
    }
  }
  return zero;
}

double binary_entropy(double p0) {
  const double v[] = {p0, 1.0 - p0};
  return entropy_bits(std::span<const double>(v));
}

}  // namespace

double l1_coherence(const DensityMatrix& rho, bool normalized) {
  const double total = rho.matrix().cwiseAbs().sum() - rho.matrix().diagonal().cwiseAbs().sum();
  return normalized ? total / static_cast<double>(rho.dim() - 1) : total;
}

double relative_entropy_coherence(const DensityMatrix& rho) {
  return entropy_bits(populations(rho)) - von_neumann_entropy(rho);
}

double mutual_information(const DensityMatrix& rho) {
  double sum = 0.0;
  for (int q = 0; q < rho.n_qubits(); ++q) sum += von_neumann_entropy(single_qubit_marginal(rho, q));
  return sum - von_neumann_entropy(rho);
}

double local_coherence(const DensityMatrix& rho) {
  double sum = 0.0;
  for (int q = 0; q < rho.n_qubits(); ++q) {
    const DensityMatrix m = single_qubit_marginal(rho, q);
    sum += entropy_bits(populations(m)) - von_neumann_entropy(m);
  }
  return sum;
}

double quantum_hookup(const DensityMatrix& rho) {
  const int n = rho.n_qubits();
  const RealVector p = populations(rho);
  const auto zero = marginal_zero_populations(rho);
  double cross = 0.0;  // -sum_k rho_kk log2 sigma_kk
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) < 1e-15) continue;
    double log_sigma = 0.0;
    for (int q = 0; q < n; ++q) {
      const double z = zero[static_cast<std::size_t>(q)];
      log_sigma += std::log2((static_cast<std::uint64_t>(k) & bit_of(n, q)) ? 1.0 - z : z);
    }
    cross -= p(k) * log_sigma;
  }
  return cross - von_neumann_entropy(rho);
}

double classical_correlations(const DensityMatrix& rho) {
  double sum = 0.0;
  for (double z : marginal_zero_populations(rho)) sum += binary_entropy(z);
  return sum - entropy_bits(populations(rho));
}

double negativity(const DensityMatrix& rho, std::uint64_t subset_mask) {
  const RealVector ev = hermitian_eigenvalues(partial_transpose(rho, subset_mask));
  return 0.5 * (ev.cwiseAbs().sum() - 1.0);
}

double mean_negativity(const DensityMatrix& rho) {
  const int n = rho.n_qubits();
  if (n < 2) throw Error("negativity needs at least two qubits");
  // Each unordered bipartition once: the side holding qubit 0.
  const std::uint64_t first = bit_of(n, 0);
  const std::uint64_t rest = first - 1;
  double sum = 0.0;
  int count = 0;
  for (std::uint64_t s = 0; s < rest; ++s) {
    sum += std::max(0.0, negativity(rho, first | s));
    ++count;
  }
  return sum / count;
}

const std::vector<std::string>& CorrelationSnapshot::names() {
  static const std::vector<std::string> n{"C_l1", "C_l1_normalized", "C_rel", "T", "M", "K", "C_L", "N_neg"};
  return n;
}

std::vector<double> CorrelationSnapshot::values() const { return {l1, l1_normalized, rel, T, M, K, C_L, N_neg}; }

CorrelationSnapshot CorrelationSnapshot::from_values(const std::vector<double>& v) {
  if (v.size() != 8) throw Error("expected 8 correlation values");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

CorrelationSnapshot measure_correlations(const DensityMatrix& rho, bool with_negativity) {
  CorrelationSnapshot s;
  s.l1 = l1_coherence(rho);
  s.l1_normalized = l1_coherence(rho, true);
  s.rel = relative_entropy_coherence(rho);
  s.T = mutual_information(rho);
  s.M = quantum_hookup(rho);
  s.K = classical_correlations(rho);
  s.C_L = local_coherence(rho);
  s.N_neg = with_negativity ? mean_negativity(rho) : 0.0;
  return s;
}

namespace {

std::vector<double> window_mean(const RunConfig& config, std::span<const double> inputs, bool with_negativity) {
  RunOptions options;
  options.state_log = StepWindow{config.washout, config.length};
  const auto result = Reservoir(config).run(inputs, options);
  std::vector<double> acc(CorrelationSnapshot::names().size(), 0.0);
  for (const auto& logged : result.states) {
    const auto v = measure_correlations(logged.state, with_negativity).values();
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
  }
  for (double& a : acc) a /= static_cast<double>(result.states.size());
  return acc;
}

CorrelationReport reduce(const std::vector<std::vector<double>>& per_realization, const RunConfig& config) {
  const std::size_t nq = CorrelationSnapshot::names().size();
  std::vector<double> mean(nq), se(nq), sd(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    std::vector<double> column;
    for (const auto& r : per_realization) column.push_back(r[i]);
    const auto s = summarize(column);
    mean[i] = s.mean;
    se[i] = s.std_error;
    sd[i] = s.stddev;
  }
  CorrelationReport report;
  report.mean = CorrelationSnapshot::from_values(mean);
  report.std_error = CorrelationSnapshot::from_values(se);
  report.stddev = CorrelationSnapshot::from_values(sd);
  report.n_realizations = static_cast<int>(per_realization.size());
  report.washout = config.washout;
  report.window = config.length;
  return report;
}

}  // namespace

CorrelationReport stationary_correlations(const RunConfig& config, std::span<const double> inputs,
                                          int n_realizations, int workers, bool with_negativity) {
  if (n_realizations < 1) throw Error("need at least one realization");
  std::vector<std::vector<double>> per(static_cast<std::size_t>(n_realizations));
  parallel_for(per.size(), workers, [&](std::size_t r) {
    RunConfig c = config;
    c.realization = config.realization + r;
    per[r] = window_mean(c, inputs, with_negativity);
  });
  return reduce(per, config);
}

std::vector<CorrelationSweepCell> stationary_correlation_sweep(const CorrelationSweepSpec& spec, int workers) {
  if (spec.n_realizations < 1) throw Error("need at least one realization");
  const auto inputs = draw_inputs(spec.base.washout + spec.base.length, spec.input_seed);
  std::vector<CorrelationSweepCell> cells;
  std::vector<RunConfig> configs;
  for (NoiseAxis axis : spec.axes) {
    for (double p : spec.p_values) {
      RunConfig c = spec.base;
      c.noise.axis = p > 0.0 ? axis : NoiseAxis::none;
      c.noise.p_err = p;
      c.validate();
      cells.push_back({axis, p, {}});
      configs.push_back(c);
    }
  }
  const auto R = static_cast<std::size_t>(spec.n_realizations);
  std::vector<std::vector<double>> per(cells.size() * R);
  parallel_for(per.size(), workers, [&](std::size_t task) {
    RunConfig c = configs[task / R];
    c.realization = spec.base.realization + task % R;
    per[task] = window_mean(c, inputs, spec.with_negativity);
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::vector<std::vector<double>> slice(per.begin() + static_cast<long>(i * R),
                                                 per.begin() + static_cast<long>((i + 1) * R));
    cells[i].report = reduce(slice, configs[i]);
  }
  return cells;
}

}  // namespace qrc
