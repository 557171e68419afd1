#pragma once

// Dense complex linear algebra for small multi-qubit registers.
//
// Layout: matrices are Eigen column-major. A basis index b of an N-qubit
// register stores qubit q (0-based) in bit (N-1-q), so qubit 0 is the
// leftmost tensor factor: |b> = |b_0> (x) |b_1> (x) ... (x) |b_{N-1}>.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr int kMaxQubits = 10;

/// Thrown for violated preconditions anywhere in the library.
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t bit_of(int n_qubits, int qubit) {
  return std::uint64_t{1} << (n_qubits - 1 - qubit);
}

/// Number of qubits for a power-of-two dimension; throws otherwise.
int qubits_for_dimension(Eigen::Index dim);

struct StateDiagnostics {
  double trace_error = 0.0;       // |Tr rho - 1|
  double hermiticity_error = 0.0; // max |rho - rho^dagger|
  double min_eigenvalue = 0.0;
};

class DensityMatrix {
 public:
  /// Takes ownership of `m`; checks only the shape. Use diagnostics() or
  /// validate() for physicality.
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix maximally_mixed(int n_qubits);
  static DensityMatrix basis_state(int n_qubits, std::uint64_t index);
  static DensityMatrix pure(const ComplexVector& psi);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  ComplexMatrix& mutable_matrix() { return matrix_; }

  /// this (x) other, `this` on the leftmost qubits.
  DensityMatrix tensor(const DensityMatrix& other) const;

  /// rho <- (rho + rho^dagger) / 2
  void hermitize();

  StateDiagnostics diagnostics() const;

  /// Throws Error unless trace, Hermiticity and positivity are within bounds.
  void validate(double trace_tol = 1e-10, double herm_tol = 1e-10,
                double eig_floor = -1e-9) const;

 private:
  ComplexMatrix matrix_;
  int n_qubits_;
};

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_letter(Pauli p);

/// Tensor product of single-qubit Paulis, qubit 0 first.
class PauliString {
 public:
  PauliString() = default;
  /// Parses letters such as "XZI"; throws on anything outside {I,X,Y,Z}.
  explicit PauliString(std::string_view letters);
  explicit PauliString(std::vector<Pauli> letters);

  /// Identity except for the listed (qubit, letter) pairs.
  static PauliString on(int n_qubits, std::initializer_list<std::pair<int, Pauli>> factors);

  int size() const { return static_cast<int>(letters_.size()); }
  Pauli operator[](int qubit) const { return letters_.at(static_cast<std::size_t>(qubit)); }
  bool is_identity() const;
  int weight() const;
  std::string str() const;

  /// Base-4 index with qubit 0 as the most significant digit (I=0,X=1,Y=2,Z=3).
  std::uint32_t index() const;
  static PauliString from_index(int n_qubits, std::uint32_t index);

  /// Bit masks in basis-index convention: P = i^{popcount(x&z)} X^x Z^z.
  std::uint64_t x_mask() const;
  std::uint64_t z_mask() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> letters_;
};

ComplexMatrix pauli_operator(const PauliString& string);

/// Traces out one qubit; the remaining qubits keep their order.
DensityMatrix partial_trace(const DensityMatrix& rho, int qubit);

/// Marginal on the qubits in `keep` (ascending order required).
DensityMatrix reduced_state(const DensityMatrix& rho, std::span<const int> keep);

/// 2x2 marginal of a single qubit.
DensityMatrix single_qubit_marginal(const DensityMatrix& rho, int qubit);

/// Transpose on the tensor factors of the qubits set in `subset_mask`
/// (basis-index bit convention, see bit_of). The mask must be a nonempty
/// proper subset.
ComplexMatrix partial_transpose(const DensityMatrix& rho, std::uint64_t subset_mask);
ComplexMatrix partial_transpose(const DensityMatrix& rho, std::span<const int> qubits);

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns
};

/// Throws if `m` deviates from Hermitian by more than `herm_tol` (max element).
EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& m, double herm_tol = 1e-9);
RealVector hermitian_eigenvalues(const ComplexMatrix& m, double herm_tol = 1e-9);

/// Shannon entropy in bits of a probability vector; entries below 1e-12 count as 0.
double entropy_bits(std::span<const double> probabilities);
double entropy_bits(const RealVector& probabilities);

/// S(rho) = -Tr rho log2 rho.
double von_neumann_entropy(const DensityMatrix& rho);

/// exp(-i H t) via eigendecomposition.
ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& hamiltonian, double t);
ComplexMatrix unitary_from_eigensystem(const EigenDecomposition& eig, double t);

double max_abs(const ComplexMatrix& m);

}  // namespace qrc
