#include "qrc/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qrc {

int qubits_for_dimension(Eigen::Index dim) {
  if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw Error("dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  if (n > kMaxQubits) {
    throw Error("register of " + std::to_string(n) + " qubits exceeds the supported maximum of " +
                std::to_string(kMaxQubits));
  }
  return n;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() != matrix_.cols()) throw Error("density matrix must be square");
  n_qubits_ = qubits_for_dimension(matrix_.rows());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const auto dim = Eigen::Index{1} << n_qubits;
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis_state(int n_qubits, std::uint64_t index) {
  const auto dim = Eigen::Index{1} << n_qubits;
  if (index >= static_cast<std::uint64_t>(dim)) throw Error("basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw Error("zero state vector");
  const ComplexVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix& other) const {
  const Eigen::Index a = dim();
  const Eigen::Index b = other.dim();
  if (n_qubits_ + other.n_qubits_ > kMaxQubits) throw Error("tensor product exceeds supported size");
  ComplexMatrix out(a * b, a * b);
  for (Eigen::Index j = 0; j < a; ++j) {
    for (Eigen::Index i = 0; i < a; ++i) {
      out.block(i * b, j * b, b, b) = matrix_(i, j) * other.matrix_;
    }
  }
  return DensityMatrix(std::move(out));
}

void DensityMatrix::hermitize() {
  ComplexMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  matrix_ = std::move(h);
}

StateDiagnostics DensityMatrix::diagnostics() const {
  StateDiagnostics d;
  d.trace_error = std::abs(matrix_.trace() - Complex{1.0, 0.0});
  d.hermiticity_error = max_abs(matrix_ - matrix_.adjoint());
  const ComplexMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues()(0);
  return d;
}

void DensityMatrix::validate(double trace_tol, double herm_tol, double eig_floor) const {
  const auto d = diagnostics();
  if (d.trace_error > trace_tol) throw Error("trace deviates from 1 by " + std::to_string(d.trace_error));
  if (d.hermiticity_error > herm_tol) {
    throw Error("matrix is not Hermitian (max deviation " + std::to_string(d.hermiticity_error) + ")");
  }
  if (d.min_eigenvalue < eig_floor) {
    throw Error("negative eigenvalue " + std::to_string(d.min_eigenvalue));
  }
}

char pauli_letter(Pauli p) {
  static constexpr char letters[] = {'I', 'X', 'Y', 'Z'};
  return letters[static_cast<int>(p)];
}

namespace {

Pauli parse_letter(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw Error(std::string("invalid Pauli letter '") + c + "'");
  }
}

}  // namespace

PauliString::PauliString(std::string_view letters) {
  letters_.reserve(letters.size());
  for (char c : letters) letters_.push_back(parse_letter(c));
  if (letters_.empty()) throw Error("empty Pauli string");
  if (size() > kMaxQubits) throw Error("Pauli string longer than the supported register");
}

PauliString::PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw Error("empty Pauli string");
  if (size() > kMaxQubits) throw Error("Pauli string longer than the supported register");
}

PauliString PauliString::on(int n_qubits, std::initializer_list<std::pair<int, Pauli>> factors) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw Error("invalid qubit count");
  std::vector<Pauli> letters(static_cast<std::size_t>(n_qubits), Pauli::I);
  for (const auto& [qubit, p] : factors) {
    if (qubit < 0 || qubit >= n_qubits) throw Error("Pauli factor on invalid qubit");
    letters[static_cast<std::size_t>(qubit)] = p;
  }
  return PauliString(std::move(letters));
}

bool PauliString::is_identity() const {
  return std::all_of(letters_.begin(), letters_.end(), [](Pauli p) { return p == Pauli::I; });
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(), [](Pauli p) { return p != Pauli::I; }));
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(letters_.size());
  for (Pauli p : letters_) s.push_back(pauli_letter(p));
  return s;
}

std::uint32_t PauliString::index() const {
  std::uint32_t idx = 0;
  for (Pauli p : letters_) idx = idx * 4 + static_cast<std::uint32_t>(p);
  return idx;
}

PauliString PauliString::from_index(int n_qubits, std::uint32_t index) {
  std::vector<Pauli> letters(static_cast<std::size_t>(n_qubits));
  for (int q = n_qubits - 1; q >= 0; --q) {
    letters[static_cast<std::size_t>(q)] = static_cast<Pauli>(index & 3u);
    index >>= 2;
  }
  if (index != 0) throw Error("Pauli index out of range");
  return PauliString(std::move(letters));
}

std::uint64_t PauliString::x_mask() const {
  std::uint64_t m = 0;
  for (int q = 0; q < size(); ++q) {
    const Pauli p = letters_[static_cast<std::size_t>(q)];
    if (p == Pauli::X || p == Pauli::Y) m |= bit_of(size(), q);
  }
  return m;
}

std::uint64_t PauliString::z_mask() const {
  std::uint64_t m = 0;
  for (int q = 0; q < size(); ++q) {
    const Pauli p = letters_[static_cast<std::size_t>(q)];
    if (p == Pauli::Z || p == Pauli::Y) m |= bit_of(size(), q);
  }
  return m;
}

ComplexMatrix pauli_operator(const PauliString& string) {
  const int n = string.size();
  if (n < 1 || n > kMaxQubits) throw Error("Pauli string size outside the supported range");
  const auto dim = std::uint64_t{1} << n;
  const std::uint64_t x = string.x_mask();
  const std::uint64_t z = string.z_mask();
  static constexpr Complex phases[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = phases[std::popcount(x & z) % 4];
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  // P[c ^ x, c] = i^{#Y} (-1)^{popcount(z & c)}
  for (std::uint64_t c = 0; c < dim; ++c) {
    const double sign = (std::popcount(z & c) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(c ^ x), static_cast<Eigen::Index>(c)) = phase * sign;
  }
  return m;
}

namespace {

// Inserts a zero bit at position `pos` (counted from the least significant bit).
inline std::uint64_t insert_zero_bit(std::uint64_t v, int pos) {
  const std::uint64_t low = v & ((std::uint64_t{1} << pos) - 1);
  return ((v >> pos) << (pos + 1)) | low;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, int qubit) {
  const int n = rho.n_qubits();
  if (qubit < 0 || qubit >= n) throw Error("partial_trace: invalid qubit " + std::to_string(qubit));
  if (n < 2) throw Error("partial_trace: cannot trace out the only qubit");
  const int pos = n - 1 - qubit;
  const std::uint64_t b = std::uint64_t{1} << pos;
  const auto sub = std::uint64_t{1} << (n - 1);
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out(static_cast<Eigen::Index>(sub), static_cast<Eigen::Index>(sub));
  for (std::uint64_t c = 0; c < sub; ++c) {
    const std::uint64_t c0 = insert_zero_bit(c, pos);
    for (std::uint64_t r = 0; r < sub; ++r) {
      const std::uint64_t r0 = insert_zero_bit(r, pos);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(c0)) +
          m(static_cast<Eigen::Index>(r0 | b), static_cast<Eigen::Index>(c0 | b));
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix reduced_state(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.n_qubits();
  if (keep.empty()) throw Error("reduced_state: empty qubit list");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n) throw Error("reduced_state: invalid qubit");
    if (i > 0 && keep[i] <= keep[i - 1]) throw Error("reduced_state: qubits must be ascending");
  }
  const int k = static_cast<int>(keep.size());
  std::uint64_t kept_mask = 0;
  for (int q : keep) kept_mask |= bit_of(n, q);
  const std::uint64_t traced_mask = ((std::uint64_t{1} << n) - 1) & ~kept_mask;

  // Maps a k-bit local index to the full-register bit pattern.
  auto scatter = [&](std::uint64_t local) {
    std::uint64_t full = 0;
    for (int i = 0; i < k; ++i) {
      if (local & bit_of(k, i)) full |= bit_of(n, keep[static_cast<std::size_t>(i)]);
    }
    return full;
  };
  const auto sub = std::uint64_t{1} << k;
  std::vector<std::uint64_t> pattern(sub);
  for (std::uint64_t l = 0; l < sub; ++l) pattern[l] = scatter(l);

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(sub), static_cast<Eigen::Index>(sub));
  // Enumerate all assignments of the traced qubits via subset iteration.
  std::uint64_t t = 0;
  while (true) {
    for (std::uint64_t c = 0; c < sub; ++c) {
      for (std::uint64_t r = 0; r < sub; ++r) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
            m(static_cast<Eigen::Index>(pattern[r] | t), static_cast<Eigen::Index>(pattern[c] | t));
      }
    }
    if (t == traced_mask) break;
    t = (t - traced_mask) & traced_mask;
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix single_qubit_marginal(const DensityMatrix& rho, int qubit) {
  const int n = rho.n_qubits();
  if (qubit < 0 || qubit >= n) throw Error("single_qubit_marginal: invalid qubit");
  const std::uint64_t b = bit_of(n, qubit);
  const auto dim = static_cast<std::uint64_t>(rho.dim());
  const ComplexMatrix& m = rho.matrix();
  Complex p0 = 0.0, p1 = 0.0, coh = 0.0;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & b) continue;
    const auto i0 = static_cast<Eigen::Index>(i);
    const auto i1 = static_cast<Eigen::Index>(i | b);
    p0 += m(i0, i0);
    p1 += m(i1, i1);
    coh += m(i0, i1);
  }
  ComplexMatrix out(2, 2);
  out << p0, coh, std::conj(coh), p1;
  return DensityMatrix(std::move(out));
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, std::uint64_t subset_mask) {
  const int n = rho.n_qubits();
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  if (subset_mask == 0 || (subset_mask & ~full) != 0 || subset_mask == full) {
    throw Error("partial_transpose: subset must be a nonempty proper subset of the qubits");
  }
  const auto dim = static_cast<std::uint64_t>(rho.dim());
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out(m.rows(), m.cols());
  const std::uint64_t keep = ~subset_mask;
  for (std::uint64_t c = 0; c < dim; ++c) {
    for (std::uint64_t r = 0; r < dim; ++r) {
      const std::uint64_t r2 = (r & keep) | (c & subset_mask);
      const std::uint64_t c2 = (c & keep) | (r & subset_mask);
      out(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2)) =
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, std::span<const int> qubits) {
  std::uint64_t mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= rho.n_qubits()) throw Error("partial_transpose: invalid qubit");
    mask |= bit_of(rho.n_qubits(), q);
  }
  return partial_transpose(rho, mask);
}

namespace {

void require_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error("matrix must be square");
  const double dev = max_abs(m - m.adjoint());
  if (dev > tol) throw Error("matrix is not Hermitian (max deviation " + std::to_string(dev) + ")");
}

}  // namespace

EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& m, double herm_tol) {
  require_hermitian(m, herm_tol);
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m, double herm_tol) {
  require_hermitian(m, herm_tol);
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition did not converge");
  return solver.eigenvalues();
}

double entropy_bits(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p > 1e-12) s -= p * std::log2(p);
  }
  return s;
}

double entropy_bits(const RealVector& probabilities) {
  return entropy_bits(std::span<const double>(probabilities.data(), static_cast<std::size_t>(probabilities.size())));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return entropy_bits(hermitian_eigenvalues(rho.matrix(), 1e-8));
}

ComplexMatrix unitary_from_eigensystem(const EigenDecomposition& eig, double t) {
  const ComplexVector phases =
      eig.values.unaryExpr([t](double e) { return std::exp(Complex{0.0, -e * t}); });
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& hamiltonian, double t) {
  return unitary_from_eigensystem(hermitian_eigendecomposition(hamiltonian), t);
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace qrc
