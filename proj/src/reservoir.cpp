#include "qrc/reservoir.hpp"

#include "qrc/parallel.hpp"
#include "qrc/pauli_basis.hpp"
#include "qrc/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

namespace qrc {

std::string to_string(Encoding encoding) {
  switch (encoding) {
    case Encoding::mixed_z: return "mixed_z";
    case Encoding::pure_z: return "pure_z";
    case Encoding::mixed_x: return "mixed_x";
    case Encoding::pure_x: return "pure_x";
  }
  return "mixed_z";
}

Encoding parse_encoding(std::string_view text) {
  if (text == "mixed_z") return Encoding::mixed_z;
  if (text == "pure_z") return Encoding::pure_z;
  if (text == "mixed_x") return Encoding::mixed_x;
  if (text == "pure_x") return Encoding::pure_x;
  throw Error("unknown encoding '" + std::string(text) + "'");
}

InitialState parse_initial_state(std::string_view text) {
  if (text == "maximally_mixed") return InitialState::maximally_mixed;
  if (text == "all_zero") return InitialState::all_zero;
  throw Error("unknown initial state '" + std::string(text) + "'");
}

std::string to_string(InitialState s) {
  return s == InitialState::all_zero ? "all_zero" : "maximally_mixed";
}

std::array<double, 4> encoding_components(double s, Encoding encoding) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error("input value must lie in [0, 1]");
  const double angle = std::numbers::pi * s;
  switch (encoding) {
    case Encoding::mixed_z: return {1.0, 0.0, 0.0, 1.0 - 2.0 * s};
    case Encoding::pure_z: return {1.0, std::sin(angle), 0.0, std::cos(angle)};
    case Encoding::mixed_x: return {1.0, 2.0 * s - 1.0, 0.0, 0.0};
    case Encoding::pure_x: return {1.0, -std::cos(angle), 0.0, std::sin(angle)};
  }
  throw Error("unknown encoding");
}

DensityMatrix encode_input(double s, Encoding encoding) {
  const auto r = encoding_components(s, encoding);
  ComplexMatrix m(2, 2);
  m << 0.5 * (1.0 + r[3]), 0.5 * Complex{r[1], -r[2]}, 0.5 * Complex{r[1], r[2]}, 0.5 * (1.0 - r[3]);
  return DensityMatrix(std::move(m));
}

DensityMatrix inject_input(const DensityMatrix& rho, const DensityMatrix& rho1) {
  if (rho1.n_qubits() != 1) throw Error("injected state must be a single qubit");
  if (rho.n_qubits() < 2) throw Error("reservoir must have at least two qubits");
  return rho1.tensor(partial_trace(rho, 0));
}

namespace {

std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

// Nearest-neighbour pairs plus (0, 2).
std::vector<std::pair<int, int>> sparse_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  if (n >= 3) pairs.emplace_back(0, 2);
  return pairs;
}

double pauli_expectation(const ComplexMatrix& rho, const PauliString& p) {
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  Complex sum = 0.0;
  for (std::uint64_t r = 0; r < dim; ++r) {
    const Complex v = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ x));
    sum += (std::popcount(z & r) & 1) ? -v : v;
  }
  static constexpr Complex phases[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return (phases[std::popcount(x & z) % 4] * sum).real();
}

}  // namespace

ObservableSet ObservableSet::named(std::string_view name, int n, int multiplex) {
  ObservableSet set;
  set.name = std::string(name);
  set.multiplex = multiplex;
  auto add_single = [&](Pauli p) {
    for (int i = 0; i < n; ++i) set.observables.push_back(PauliString::on(n, {{i, p}}));
  };
  auto add_pairs = [&](const std::vector<std::pair<int, int>>& pairs, Pauli a, Pauli b) {
    for (const auto& [i, j] : pairs) set.observables.push_back(PauliString::on(n, {{i, a}, {j, b}}));
  };
  if (name == "Z") {
    add_single(Pauli::Z);
  } else if (name == "ZZ") {
    add_pairs(all_pairs(n), Pauli::Z, Pauli::Z);
  } else if (name == "Z+ZZ") {
    add_single(Pauli::Z);
    add_pairs(all_pairs(n), Pauli::Z, Pauli::Z);
  } else if (name == "XXXYYXYY" || name == "XX+XY+YX+YY") {
    set.name = "XXXYYXYY";
    for (const auto& [i, j] : all_pairs(n)) {
      for (Pauli a : {Pauli::X, Pauli::Y}) {
        for (Pauli b : {Pauli::X, Pauli::Y}) set.observables.push_back(PauliString::on(n, {{i, a}, {j, b}}));
      }
    }
  } else if (name == "ZZ+ZX") {
    add_pairs(sparse_pairs(n), Pauli::Z, Pauli::Z);
    add_pairs(sparse_pairs(n), Pauli::Z, Pauli::X);
  } else if (name == "LOCAL12") {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) add_single(p);
    for (const auto& [i, j] : all_pairs(n)) {
      for (Pauli a : {Pauli::X, Pauli::Y, Pauli::Z}) {
        for (Pauli b : {Pauli::X, Pauli::Y, Pauli::Z}) set.observables.push_back(PauliString::on(n, {{i, a}, {j, b}}));
      }
    }
  } else {
    throw Error("unknown observable set '" + std::string(name) + "'");
  }
  set.validate(n);
  return set;
}

ObservableSet ObservableSet::custom(std::vector<PauliString> observables, int multiplex) {
  ObservableSet set;
  set.name = "custom";
  set.observables = std::move(observables);
  set.multiplex = multiplex;
  if (set.observables.empty()) throw Error("custom observable set is empty");
  set.validate(set.observables.front().size());
  return set;
}

std::vector<std::string> ObservableSet::column_names() const {
  std::vector<std::string> names;
  names.reserve(output_count());
  for (int j = 1; j <= multiplex; ++j) {
    for (const auto& o : observables) {
      names.push_back(multiplex == 1 ? o.str() : o.str() + "@" + std::to_string(j) + "/" + std::to_string(multiplex));
    }
  }
  return names;
}

void ObservableSet::validate(int n_qubits) const {
  if (observables.empty()) throw Error("observable set is empty");
  if (multiplex < 1) throw Error("multiplex factor must be >= 1");
  for (const auto& o : observables) {
    if (o.size() != n_qubits) throw Error("observable " + o.str() + " does not match the register size");
    if (o.is_identity()) throw Error("identity is not a valid observable");
  }
}

std::vector<double> measure_observables(const DensityMatrix& rho, const ObservableSet& set) {
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& o : set.observables) {
    if (o.size() != rho.n_qubits()) throw Error("observable size does not match the state");
    out.push_back(pauli_expectation(rho.matrix(), o));
  }
  return out;
}

void RunConfig::validate() const {
  model.validate();
  noise.validate();
  observables.validate(model.n_qubits);
  if (!(delta_t > 0.0)) throw Error("delta_t must be positive");
  if (length < 1) throw Error("sequence length must be >= 1");
  if (!(readout_sigma >= 0.0)) throw Error("readout_sigma must be non-negative");
  if (noise.eta % observables.multiplex != 0) {
    throw Error("multiplex factor " + std::to_string(observables.multiplex) + " is not commensurate with eta = " +
                std::to_string(noise.eta));
  }
}

ReadoutMatrix ReadoutMatrix::slice_rows(Eigen::Index begin, Eigen::Index count) const {
  if (begin < 0 || count < 0 || begin + count > rows()) throw Error("row slice out of range");
  ReadoutMatrix out;
  out.columns = columns;
  out.values = values.middleRows(begin, count);
  out.first_time = first_time + static_cast<std::size_t>(begin);
  out.noisy = noisy;
  return out;
}

ReadoutMatrix add_readout_noise(const ReadoutMatrix& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error("readout noise sigma must be non-negative");
  ReadoutMatrix out = x;
  if (sigma == 0.0) return out;
  auto engine = make_engine(seed, "readout-noise");
  std::normal_distribution<double> normal(0.0, sigma);
  // Row-major draw order so the noise of row k does not depend on the column count
  // of later rows.
  for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.values.cols(); ++c) out.values(r, c) += normal(engine);
  }
  out.noisy = true;
  return out;
}

Reservoir::Reservoir(const RunConfig& config, HamiltonianRealization hamiltonian)
    : config_(config), hamiltonian_(std::move(hamiltonian)) {
  config_.validate();
  if (hamiltonian_.n_qubits != config_.model.n_qubits) throw Error("Hamiltonian size does not match the config");
  if (config_.propagation == Propagation::transfer) {
    transfer_ = std::make_shared<const TransferPropagator>(hamiltonian_, config_.delta_t, config_.noise,
                                                           config_.observables.multiplex);
  }
}

Reservoir::Reservoir(const RunConfig& config) : Reservoir(config, sample_hamiltonian(config.model, config.realization)) {}

DensityMatrix Reservoir::initial_state(const RunOptions& options) const {
  if (options.initial_state) {
    if (options.initial_state->n_qubits() != config_.model.n_qubits) throw Error("initial state has the wrong size");
    return *options.initial_state;
  }
  const int n = config_.model.n_qubits;
  return config_.initial == InitialState::all_zero ? DensityMatrix::basis_state(n, 0) : DensityMatrix::maximally_mixed(n);
}

RunResult Reservoir::run(std::span<const double> inputs, const RunOptions& options) const {
  if (inputs.size() != config_.washout + config_.length) {
    throw Error("expected " + std::to_string(config_.washout + config_.length) + " inputs, got " +
                std::to_string(inputs.size()));
  }
  return config_.propagation == Propagation::transfer ? run_transfer(inputs, options) : run_dense(inputs, options);
}

namespace {

ReadoutMatrix empty_readout(const RunConfig& config) {
  ReadoutMatrix readout;
  readout.columns = config.observables.column_names();
  readout.values.resize(static_cast<Eigen::Index>(config.length), static_cast<Eigen::Index>(readout.columns.size()));
  readout.first_time = config.washout + 1;
  return readout;
}

std::vector<int> active_components(Encoding encoding) {
  switch (encoding) {
    case Encoding::mixed_z: return {0, 3};
    case Encoding::mixed_x: return {0, 1};
    case Encoding::pure_z:
    case Encoding::pure_x: return {0, 1, 3};
  }
  return {0, 1, 2, 3};
}

DensityMatrix state_from_coefficients(const RealVector& c) {
  DensityMatrix rho(from_pauli_coefficients(c));
  rho.hermitize();
  return rho;
}

}  // namespace

RunResult Reservoir::run_transfer(std::span<const double> inputs, const RunOptions& options) const {
  const int n = config_.model.n_qubits;
  const Eigen::Index reduced = Eigen::Index{1} << (2 * (n - 1));
  const Eigen::Index full = reduced * 4;
  const auto comps = active_components(config_.encoding);
  const auto n_comps = static_cast<Eigen::Index>(comps.size());
  const Eigen::Index width = n_comps * reduced;
  const int V = config_.observables.multiplex;
  const auto M = static_cast<Eigen::Index>(config_.observables.size());
  const TransferPropagator& tp = *transfer_;

  // Restrict each checkpoint to the active input columns and the rows we read.
  std::vector<RealMatrix> readout_ops(static_cast<std::size_t>(V), RealMatrix(M, width));
  for (int j = 1; j <= V; ++j) {
    const RealMatrix& t = tp.checkpoint(j);
    RealMatrix& op = readout_ops[static_cast<std::size_t>(j - 1)];
    for (Eigen::Index m = 0; m < M; ++m) {
      const auto row = static_cast<Eigen::Index>(config_.observables.observables[static_cast<std::size_t>(m)].index());
      for (Eigen::Index a = 0; a < n_comps; ++a) {
        op.row(m).segment(a * reduced, reduced) = t.row(row).segment(comps[static_cast<std::size_t>(a)] * reduced, reduced);
      }
    }
  }
  const RealMatrix& last = tp.checkpoint(V);
  RealMatrix reduce_op(reduced, width);
  RealMatrix full_op(full, width);
  for (Eigen::Index a = 0; a < n_comps; ++a) {
    reduce_op.middleCols(a * reduced, reduced) = last.block(0, comps[static_cast<std::size_t>(a)] * reduced, reduced, reduced);
    full_op.middleCols(a * reduced, reduced) = last.middleCols(comps[static_cast<std::size_t>(a)] * reduced, reduced);
  }

  std::vector<Eigen::Index> z_rows;
  for (int q = 0; q < n; ++q) z_rows.push_back(static_cast<Eigen::Index>(PauliString::on(n, {{q, Pauli::Z}}).index()));

  RunResult result{empty_readout(config_), DensityMatrix::maximally_mixed(n), {}, {}};
  RealVector sigma = pauli_coefficients(initial_state(options).matrix()).head(reduced);
  RealVector x(width);
  RealVector next(reduced);

  for (std::size_t step = 0; step < inputs.size(); ++step) {
    const auto r = encoding_components(inputs[step], config_.encoding);
    for (Eigen::Index a = 0; a < n_comps; ++a) {
      x.segment(a * reduced, reduced) = r[static_cast<std::size_t>(comps[static_cast<std::size_t>(a)])] * sigma;
    }
    if (step >= config_.washout) {
      const auto row = static_cast<Eigen::Index>(step - config_.washout);
      for (int j = 0; j < V; ++j) {
        result.readout.values.row(row).segment(j * M, M) = (readout_ops[static_cast<std::size_t>(j)] * x).transpose();
      }
    }
    if (options.trajectory && options.trajectory->contains(step)) {
      RealVector c = RealVector::Zero(full);
      for (Eigen::Index a = 0; a < n_comps; ++a) {
        c.segment(comps[static_cast<std::size_t>(a)] * reduced, reduced) = x.segment(a * reduced, reduced);
      }
      const int eta = tp.substeps_per_interval();
      for (int s = 0; s <= eta; ++s) {
        if (s > 0) c = tp.substep() * c;
        for (int q = 0; q < n; ++q) {
          result.trajectory.push_back({step, s, (static_cast<double>(step) + static_cast<double>(s) / eta) * config_.delta_t,
                                       q, c(z_rows[static_cast<std::size_t>(q)])});
        }
      }
    }
    const bool log_state = options.state_log && options.state_log->contains(step);
    if (log_state || step + 1 == inputs.size()) {
      RealVector c = full_op * x;
      DensityMatrix rho = state_from_coefficients(c);
      if (options.check_states && log_state) rho.validate();
      if (log_state) result.states.push_back({step, rho});
      if (step + 1 == inputs.size()) result.final_state = std::move(rho);
    }
    next.noalias() = reduce_op * x;
    sigma.swap(next);
  }
  return result;
}

RunResult Reservoir::run_dense(std::span<const double> inputs, const RunOptions& options) const {
  const int n = config_.model.n_qubits;
  const IntervalPropagator propagator(hamiltonian_, config_.delta_t, config_.noise);
  const int V = config_.observables.multiplex;
  const int eta = config_.noise.eta;
  const auto M = static_cast<Eigen::Index>(config_.observables.size());

  RunResult result{empty_readout(config_), DensityMatrix::maximally_mixed(n), {}, {}};
  DensityMatrix rho = initial_state(options);
  for (std::size_t step = 0; step < inputs.size(); ++step) {
    rho = inject_input(rho, encode_input(inputs[step], config_.encoding));
    const bool record = step >= config_.washout;
    const auto row = record ? static_cast<Eigen::Index>(step - config_.washout) : 0;

    if (options.trajectory && options.trajectory->contains(step)) {
      ComplexMatrix m = rho.matrix();
      for (int s = 0; s <= eta; ++s) {
        if (s > 0) propagator.apply_substeps(m, 1);
        const DensityMatrix snapshot(m);
        for (int q = 0; q < n; ++q) {
          const double z = pauli_expectation(snapshot.matrix(), PauliString::on(n, {{q, Pauli::Z}}));
          result.trajectory.push_back({step, s, (static_cast<double>(step) + static_cast<double>(s) / eta) * config_.delta_t, q, z});
        }
        if (record && s > 0 && s % (eta / V) == 0) {
          const int j = s / (eta / V) - 1;
          const auto values = measure_observables(snapshot, config_.observables);
          for (Eigen::Index k = 0; k < M; ++k) result.readout.values(row, j * M + k) = values[static_cast<std::size_t>(k)];
        }
      }
      rho = DensityMatrix(std::move(m));
    } else if (V == 1) {
      rho = propagator.apply(rho);
      if (record) {
        const auto values = measure_observables(rho, config_.observables);
        for (Eigen::Index k = 0; k < M; ++k) result.readout.values(row, k) = values[static_cast<std::size_t>(k)];
      }
    } else {
      ComplexMatrix m = rho.matrix();
      for (int j = 0; j < V; ++j) {
        propagator.apply_substeps(m, eta / V);
        if (record) {
          const auto values = measure_observables(DensityMatrix(m), config_.observables);
          for (Eigen::Index k = 0; k < M; ++k) result.readout.values(row, j * M + k) = values[static_cast<std::size_t>(k)];
        }
      }
      rho = DensityMatrix(std::move(m));
    }

    if (options.state_log && options.state_log->contains(step)) {
      if (options.check_states) rho.validate();
      result.states.push_back({step, rho});
    }
  }
  result.final_state = rho;
  return result;
}

RunResult run_reservoir(const RunConfig& config, std::span<const double> inputs, const RunOptions& options) {
  return Reservoir(config).run(inputs, options);
}

ReadoutMatrix multiplex_readout(const RunConfig& config, std::span<const double> inputs, int V) {
  RunConfig c = config;
  c.observables.multiplex = V;
  return Reservoir(c).run(inputs).readout;
}

std::vector<ObservableStat> stationary_observable_stats(const RunConfig& config, std::span<const double> inputs,
                                                        int n_realizations, int workers) {
  if (n_realizations < 1) throw Error("need at least one realization");
  RunConfig c = config;
  c.observables = ObservableSet::named("LOCAL12", config.model.n_qubits);
  const auto n_obs = c.observables.size();
  std::vector<std::vector<double>> means(static_cast<std::size_t>(n_realizations));
  parallel_for(means.size(), workers, [&](std::size_t r) {
    RunConfig rc = c;
    rc.realization = config.realization + r;
    const auto readout = Reservoir(rc).run(inputs).readout;
    const RealVector m = readout.values.cwiseAbs().colwise().mean();
    means[r].assign(m.data(), m.data() + m.size());
  });
  std::vector<ObservableStat> stats;
  stats.reserve(n_obs);
  for (std::size_t k = 0; k < n_obs; ++k) {
    std::vector<double> values;
    for (const auto& m : means) values.push_back(m[k]);
    const auto s = summarize(values);
    stats.push_back({c.observables.observables[k].str(), s.mean, s.std_error});
  }
  return stats;
}

}  // namespace qrc
