#include "qrc/pauli_basis.hpp"

#include <bit>

namespace qrc {

namespace {

constexpr Complex kPhase[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// In-place Walsh-Hadamard transform: out[z] = sum_r (-1)^{popcount(z&r)} in[r].
void walsh_hadamard(std::vector<Complex>& v) {
  const std::size_t n = v.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const Complex a = v[j];
        const Complex b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

// Pauli index from per-qubit x/z masks in basis-index convention.
std::vector<std::uint32_t> index_table(int n) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::uint32_t> table(dim * dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t z = 0; z < dim; ++z) {
      std::uint32_t idx = 0;
      for (int q = 0; q < n; ++q) {
        const std::uint64_t b = bit_of(n, q);
        const bool xb = x & b;
        const bool zb = z & b;
        const std::uint32_t letter = xb ? (zb ? 2u : 1u) : (zb ? 3u : 0u);
        idx = idx * 4 + letter;
      }
      table[x * dim + z] = idx;
    }
  }
  return table;
}

}  // namespace

RealVector pauli_coefficients(const ComplexMatrix& m) {
  const int n = qubits_for_dimension(m.rows());
  const std::size_t dim = std::size_t{1} << n;
  const auto table = index_table(n);
  RealVector out(static_cast<Eigen::Index>(dim * dim));
  std::vector<Complex> w(dim);
  // Tr[P m] = i^{#Y} sum_r (-1)^{z.r} m[r, r^x]
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t r = 0; r < dim; ++r) {
      w[r] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ x));
    }
    walsh_hadamard(w);
    for (std::uint64_t z = 0; z < dim; ++z) {
      const Complex value = kPhase[std::popcount(x & z) % 4] * w[z];
      out(table[x * dim + z]) = value.real();
    }
  }
  return out;
}

ComplexMatrix from_pauli_coefficients(const RealVector& coefficients) {
  const auto size = static_cast<std::uint64_t>(coefficients.size());
  if (!std::has_single_bit(size) || (std::countr_zero(size) % 2) != 0) {
    throw Error("coefficient vector length must be 4^N");
  }
  const int n = std::countr_zero(size) / 2;
  if (n < 1 || n > kMaxQubits) throw Error("unsupported register size");
  const std::size_t dim = std::size_t{1} << n;
  const auto table = index_table(n);
  ComplexMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<Complex> w(dim);
  const double scale = 1.0 / static_cast<double>(dim);
  // P[r, r^x] = i^{#Y} (-1)^{z.(r^x)}
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t z = 0; z < dim; ++z) {
      w[z] = kPhase[std::popcount(x & z) % 4] * coefficients(table[x * dim + z]);
    }
    walsh_hadamard(w);
    for (std::uint64_t r = 0; r < dim; ++r) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ x)) = scale * w[r ^ x];
    }
  }
  return out;
}

RealMatrix transfer_matrix_of_unitary(const ComplexMatrix& unitary) {
  const int n = qubits_for_dimension(unitary.rows());
  const auto dim = static_cast<Eigen::Index>(1) << n;
  const Eigen::Index size = dim * dim;
  RealMatrix out(size, size);
  const ComplexMatrix u_dag = unitary.adjoint();
  ComplexMatrix uq(dim, dim);
  for (Eigen::Index q = 0; q < size; ++q) {
    const PauliString p = PauliString::from_index(n, static_cast<std::uint32_t>(q));
    const std::uint64_t x = p.x_mask();
    const std::uint64_t z = p.z_mask();
    const Complex phase = kPhase[std::popcount(x & z) % 4];
    // (U P)[:, c] = U[:, c ^ x] * P[c ^ x, c]
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto cu = static_cast<std::uint64_t>(c);
      const double sign = (std::popcount(z & cu) & 1) ? -1.0 : 1.0;
      uq.col(c) = unitary.col(static_cast<Eigen::Index>(cu ^ x)) * (phase * sign);
    }
    const ComplexMatrix image = uq * u_dag;
    out.col(q) = pauli_coefficients(image) / static_cast<double>(dim);
  }
  return out;
}

int anticommuting_weight(int n_qubits, std::uint32_t index, Pauli letter) {
  int count = 0;
  for (int q = 0; q < n_qubits; ++q) {
    const auto p = static_cast<Pauli>(index & 3u);
    index >>= 2;
    if (p != Pauli::I && p != letter) ++count;
  }
  return count;
}

}  // namespace qrc
