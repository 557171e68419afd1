#pragma once

// Test-side helpers: random states and operators, explicit Kronecker
// products, and a dense Lindblad integrator used as an oracle.

#include "qrc/linalg.hpp"
#include "qrc/noise.hpp"
#include "qrc/spin_model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace qrc::test {

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix pauli2(char c) {
  ComplexMatrix m(2, 2);
  const Complex i{0, 1};
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1;
  }
  return m;
}

/// Kronecker product of single-qubit Paulis, leftmost letter first.
inline ComplexMatrix pauli_kron(const std::string& letters) {
  ComplexMatrix m = pauli2(letters[0]);
  for (std::size_t k = 1; k < letters.size(); ++k) m = kron(m, pauli2(letters[k]));
  return m;
}

/// Operator `letter` on qubit q of n, identity elsewhere.
inline ComplexMatrix single_site(int n, int q, char letter) {
  std::string s(static_cast<std::size_t>(n), 'I');
  s[static_cast<std::size_t>(q)] = letter;
  return pauli_kron(s);
}

inline ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = Complex{g(rng), g(rng)};
  return a;
}

/// Random mixed state of the given rank (full rank by default).
inline DensityMatrix random_state(int n, std::mt19937_64& rng, Eigen::Index rank = 0) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const ComplexMatrix a = ginibre(dim, rank > 0 ? rank : dim, rng);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(rho);
}

inline DensityMatrix random_pure(int n, std::mt19937_64& rng) { return random_state(n, rng, 1); }

inline ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  const ComplexMatrix a = ginibre(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

/// Hamiltonian built term by term from explicit Kronecker products.
inline ComplexMatrix ising_oracle(const RealMatrix& J, const std::vector<double>& h, double eps) {
  const int n = static_cast<int>(h.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix H = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) H += J(i, j) * single_site(n, i, 'X') * single_site(n, j, 'X');
    H += h[static_cast<std::size_t>(i)] * single_site(n, i, 'Z');
    H += eps * single_site(n, i, 'X');
  }
  return H;
}

/// drho/dt = -i[H, rho] + gamma sum_q (s_q rho s_q - rho), integrated by
/// classical RK4 with a fixed step.
inline ComplexMatrix lindblad_rk4(const ComplexMatrix& H, const ComplexMatrix& rho0, NoiseAxis axis, double gamma,
                                  double t, double step) {
  const int n = qubits_for_dimension(H.rows());
  std::vector<ComplexMatrix> jumps;
  if (axis != NoiseAxis::none) {
    for (int q = 0; q < n; ++q) jumps.push_back(single_site(n, q, axis == NoiseAxis::x ? 'X' : 'Z'));
  }
  const Complex i{0, 1};
  auto f = [&](const ComplexMatrix& r) {
    ComplexMatrix d = -i * (H * r - r * H);
    for (const auto& s : jumps) d += gamma * (s * r * s - r);
    return d;
  };
  ComplexMatrix r = rho0;
  const auto steps = static_cast<long>(std::llround(t / step));
  const double h = t / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) {
    const ComplexMatrix k1 = f(r);
    const ComplexMatrix k2 = f(r + 0.5 * h * k1);
    const ComplexMatrix k3 = f(r + 0.5 * h * k2);
    const ComplexMatrix k4 = f(r + h * k3);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

}  // namespace qrc::test
