#include "qrc/spin_model.hpp"

#include "qrc/parallel.hpp"
#include "qrc/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace qrc {

void ModelParams::validate() const {
  if (n_qubits < 2 || n_qubits > kMaxQubits) throw Error("n_qubits must be in [2, 10]");
  if (W < 0.0) throw Error("disorder width W must be non-negative");
  if (!std::isfinite(h) || !std::isfinite(W) || !std::isfinite(epsilon)) throw Error("non-finite model parameter");
}

HamiltonianRealization make_hamiltonian(const RealMatrix& couplings, std::vector<double> fields, double epsilon) {
  const int n = static_cast<int>(fields.size());
  if (n < 1 || n > kMaxQubits) throw Error("unsupported qubit count");
  if (couplings.rows() != n || couplings.cols() != n) throw Error("coupling matrix must be N x N");
  const auto dim = std::uint64_t{1} << n;

  // X_i X_j flips bits i and j; Z_i and X_i act on single bits.
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t bi = bit_of(n, i);
      diag += (b & bi) ? -fields[static_cast<std::size_t>(i)] : fields[static_cast<std::size_t>(i)];
      if (epsilon != 0.0) m(static_cast<Eigen::Index>(b ^ bi), col) += epsilon;
      for (int j = 0; j < i; ++j) {
        const double J = couplings(i, j);
        if (J != 0.0) m(static_cast<Eigen::Index>(b ^ bi ^ bit_of(n, j)), col) += J;
      }
    }
    m(col, col) += diag;
  }

  HamiltonianRealization h;
  h.n_qubits = n;
  h.couplings = couplings.triangularView<Eigen::StrictlyLower>();
  h.fields = std::move(fields);
  h.epsilon = epsilon;
  h.spectrum = hermitian_eigendecomposition(m);
  h.matrix = std::move(m);
  return h;
}

HamiltonianRealization sample_hamiltonian(const ModelParams& params, std::uint64_t index) {
  params.validate();
  const int n = params.n_qubits;
  auto engine = make_engine(params.seed, "disorder", index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);

  RealMatrix couplings = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) couplings(i, j) = unit(engine);
  }
  std::vector<double> fields(static_cast<std::size_t>(n));
  for (auto& f : fields) f = params.h + params.W * symmetric(engine);
  return make_hamiltonian(couplings, std::move(fields), params.epsilon);
}

std::vector<double> gap_ratios(std::span<const double> e) {
  std::vector<double> out;
  if (e.size() < 3) return out;
  out.reserve(e.size() - 2);
  constexpr double kTiny = 1e-12;
  for (std::size_t n = 1; n + 1 < e.size(); ++n) {
    const double a = e[n] - e[n - 1];
    const double b = e[n + 1] - e[n];
    const bool a_small = a < kTiny;
    const bool b_small = b < kTiny;
    if (a_small && b_small) continue;
    if (a_small || b_small) {
      out.push_back(0.0);
      continue;
    }
    out.push_back(std::min(a, b) / std::max(a, b));
  }
  return out;
}

double gap_ratio_statistic(std::span<const double> ascending) {
  if (ascending.size() < 3) throw Error("gap ratio needs at least 3 eigenvalues");
  const auto r = gap_ratios(ascending);
  if (r.empty()) throw Error("spectrum is fully degenerate");
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

namespace {

void append_trimmed(std::vector<double>& pool, std::span<const double> ascending, int trim) {
  auto r = gap_ratios(ascending);
  const auto t = static_cast<std::size_t>(std::max(trim, 0));
  if (r.size() <= 2 * t) return;
  pool.insert(pool.end(), r.begin() + static_cast<std::ptrdiff_t>(t), r.end() - static_cast<std::ptrdiff_t>(t));
}

}  // namespace

double realization_gap_ratio(const HamiltonianRealization& h, const GapRatioOptions& options) {
  std::vector<double> pool;
  if (options.resolve_parity && h.epsilon == 0.0) {
    const Eigen::Index dim = h.matrix.rows();
    for (int parity = 0; parity < 2; ++parity) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index b = 0; b < dim; ++b) {
        if ((std::popcount(static_cast<std::uint64_t>(b)) & 1) == parity) idx.push_back(b);
      }
      const auto k = static_cast<Eigen::Index>(idx.size());
      ComplexMatrix block(k, k);
      for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index r = 0; r < k; ++r) block(r, c) = h.matrix(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      }
      const RealVector e = hermitian_eigenvalues(block);
      append_trimmed(pool, std::span<const double>(e.data(), static_cast<std::size_t>(e.size())), options.edge_trim);
    }
  } else {
    const RealVector& e = h.spectrum.values;
    append_trimmed(pool, std::span<const double>(e.data(), static_cast<std::size_t>(e.size())), options.edge_trim);
  }
  if (pool.empty()) throw Error("no gap ratios left after trimming");
  return std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(pool.size());
}

MeanStderr summarize(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
    out.std_error = out.stddev / std::sqrt(n);
  }
  return out;
}

std::vector<PhaseCell> phase_scan(const PhaseScanSpec& spec, int workers) {
  if (spec.n_realizations < 1) throw Error("phase scan needs at least one realization");
  if (spec.h_values.empty() || spec.W_values.empty()) throw Error("phase scan grid is empty");
  const std::size_t n_cells = spec.h_values.size() * spec.W_values.size();
  const auto n_real = static_cast<std::size_t>(spec.n_realizations);
  std::vector<double> r(n_cells * n_real);

  parallel_for(r.size(), workers, [&](std::size_t task) {
    const std::size_t cell = task / n_real;
    const std::size_t realization = task % n_real;
    ModelParams p;
    p.n_qubits = spec.n_qubits;
    p.h = spec.h_values[cell / spec.W_values.size()];
    p.W = spec.W_values[cell % spec.W_values.size()];
    p.epsilon = spec.epsilon;
    p.seed = spec.seed;
    r[task] = realization_gap_ratio(sample_hamiltonian(p, realization), spec.options);
  });

  std::vector<PhaseCell> cells(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const auto stats = summarize(std::span<const double>(r.data() + c * n_real, n_real));
    cells[c] = {spec.h_values[c / spec.W_values.size()], spec.W_values[c % spec.W_values.size()], stats.mean,
                stats.std_error, spec.n_realizations, spec.seed};
  }
  return cells;
}

PhaseScanSpec default_phase_grid() {
  PhaseScanSpec spec;
  for (int i = 1; i <= 20; ++i) spec.h_values.push_back(0.1 * i);
  for (int i = 0; i <= 20; ++i) spec.W_values.push_back(0.5 * i);
  return spec;
}

}  // namespace qrc
