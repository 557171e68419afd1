#include "qrc/linalg.hpp"
#include "qrc/pauli_basis.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace qrc;
using test::kron;

namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v.cast<Complex>().asDiagonal();
}

ComplexVector bell() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

// Tr over qubit q by explicit index sums.
ComplexMatrix partial_trace_oracle(const ComplexMatrix& rho, int n, int q) {
  const Eigen::Index d = Eigen::Index{1} << (n - 1);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  auto expand = [&](Eigen::Index r, int bit) {
    const Eigen::Index low = r & ((Eigen::Index{1} << (n - 1 - q)) - 1);
    const Eigen::Index high = r >> (n - 1 - q);
    return (((high << 1) | bit) << (n - 1 - q)) | low;
  };
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (int b = 0; b < 2; ++b) out(i, j) += rho(expand(i, b), expand(j, b));
  return out;
}

}  // namespace

TEST_CASE("pauli_operator matches explicit Kronecker products") {
  CHECK(max_abs(pauli_operator(PauliString("Z")) - diag({1, -1})) == 0.0);
  CHECK(max_abs(pauli_operator(PauliString("ZI")) - diag({1, 1, -1, -1})) == 0.0);
  const ComplexMatrix xx = pauli_operator(PauliString("XX"));
  CHECK(std::abs(xx(3, 0) - 1.0) == 0.0);  // |00> -> |11>

  std::mt19937_64 rng(1);
  const char letters[] = "IXYZ";
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    std::string s;
    for (int q = 0; q < n; ++q) s += letters[rng() % 4];
    const ComplexMatrix p = pauli_operator(PauliString(s));
    CHECK(max_abs(p - test::pauli_kron(s)) < 1e-15);
    CHECK(max_abs(p * p - ComplexMatrix::Identity(p.rows(), p.cols())) < 1e-15);
  }
}

TEST_CASE("PauliString parsing, index and masks") {
  CHECK_THROWS_AS(PauliString("XQ"), Error);
  const PauliString p("XZIY");
  CHECK(p.weight() == 3);
  CHECK(p.str() == "XZIY");
  CHECK(PauliString::from_index(4, p.index()) == p);
  CHECK(PauliString("ZIIII").index() == 3u * 256u);
  CHECK(PauliString::on(3, {{1, Pauli::X}}).str() == "IXI");
  CHECK(PauliString("III").is_identity());
}

TEST_CASE("partial trace examples and oracle") {
  std::mt19937_64 rng(2);
  const auto a = test::random_state(1, rng);
  const auto b = test::random_state(2, rng);
  CHECK(max_abs(partial_trace(a.tensor(b), 0).matrix() - b.matrix()) < 1e-15);

  const auto phi = DensityMatrix::pure(bell());
  CHECK(max_abs(partial_trace(phi, 0).matrix() - diag({0.5, 0.5})) < 1e-15);

  const DensityMatrix d(diag({0.2, 0.3, 0.1, 0.4}));
  CHECK(max_abs(partial_trace(d, 1).matrix() - diag({0.5, 0.5})) < 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto rho = test::random_state(n, rng);
    const int q = static_cast<int>(rng() % static_cast<unsigned>(n));
    const auto reduced = partial_trace(rho, q);
    CHECK(max_abs(reduced.matrix() - partial_trace_oracle(rho.matrix(), n, q)) < 1e-14);
    CHECK(std::abs(reduced.matrix().trace() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(partial_trace(d, 2), Error);
}

TEST_CASE("reduced_state and single-qubit marginals") {
  std::mt19937_64 rng(3);
  const auto a = test::random_state(1, rng);
  const auto b = test::random_state(1, rng);
  const auto c = test::random_state(1, rng);
  const auto abc = a.tensor(b).tensor(c);
  const int keep_ac[] = {0, 2};
  CHECK(max_abs(reduced_state(abc, keep_ac).matrix() - a.tensor(c).matrix()) < 1e-14);
  CHECK(max_abs(single_qubit_marginal(abc, 1).matrix() - b.matrix()) < 1e-14);
}

TEST_CASE("partial transpose") {
  const auto phi = DensityMatrix::pure(bell());
  const int first[] = {0};
  const RealVector ev = hermitian_eigenvalues(partial_transpose(phi, first));
  CHECK(ev(0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ev(3) == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(4);
  const auto a = test::random_state(1, rng);
  const auto b = test::random_state(2, rng);
  const auto prod = a.tensor(b);
  const int sub[] = {1, 2};
  const ComplexMatrix pt = partial_transpose(prod, sub);
  CHECK(max_abs(pt - kron(a.matrix(), b.matrix().transpose())) < 1e-15);
  CHECK(hermitian_eigenvalues(pt)(0) > -1e-12);
  const DensityMatrix twice(partial_transpose(DensityMatrix(pt), sub));
  CHECK(max_abs(twice.matrix() - prod.matrix()) == 0.0);
  CHECK_THROWS_AS(partial_transpose(prod, 0), Error);
  CHECK_THROWS_AS(partial_transpose(prod, 7), Error);
}

TEST_CASE("hermitian eigendecomposition") {
  const RealVector ev = hermitian_eigenvalues(diag({3, 1, 2}));
  CHECK(ev(0) == doctest::Approx(1.0));
  CHECK(ev(1) == doctest::Approx(2.0));
  CHECK(ev(2) == doctest::Approx(3.0));
  const RealVector ex = hermitian_eigenvalues(test::pauli2('X'));
  CHECK(ex(0) == doctest::Approx(-1.0));
  CHECK(ex(1) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  const ComplexMatrix h = test::random_hermitian(32, rng);
  const auto eig = hermitian_eigendecomposition(h);
  const ComplexMatrix rebuilt = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  CHECK(max_abs(rebuilt - h) < 1e-9);

  ComplexMatrix bad = h;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(hermitian_eigendecomposition(bad), Error);
}

TEST_CASE("von Neumann entropy in bits") {
  std::mt19937_64 rng(6);
  for (int n = 1; n <= 5; ++n) {
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(n)) == doctest::Approx(n).epsilon(1e-12));
    CHECK(std::abs(von_neumann_entropy(test::random_pure(n, rng))) < 1e-9);
  }
  CHECK(von_neumann_entropy(DensityMatrix(diag({0.5, 0.5}))) == doctest::Approx(1.0));
  const double p[] = {0.25, 0.25, 0.5, 0.0};
  CHECK(entropy_bits(std::span<const double>(p)) == doctest::Approx(1.5));
}

TEST_CASE("matrix exponentials via the eigensystem") {
  const ComplexMatrix z = test::pauli2('Z');
  CHECK(max_abs(unitary_from_hamiltonian(z, 0.0) - ComplexMatrix::Identity(2, 2)) < 1e-15);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = Complex{0, -1};
  expected(1, 1) = Complex{0, 1};
  CHECK(max_abs(unitary_from_hamiltonian(z, std::numbers::pi / 2) - expected) < 1e-12);

  std::mt19937_64 rng(7);
  const ComplexMatrix h = test::random_hermitian(32, rng);
  const ComplexMatrix u = unitary_from_hamiltonian(h, 0.7);
  CHECK(max_abs(u * u.adjoint() - ComplexMatrix::Identity(32, 32)) < 1e-9);
  const ComplexMatrix u1 = unitary_from_hamiltonian(h, 0.3);
  const ComplexMatrix u2 = unitary_from_hamiltonian(h, 0.4);
  CHECK(max_abs(u1 * u2 - u) < 1e-9);
}

TEST_CASE("density matrix construction and validation") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(3, 3)), Error);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(2, 4)), Error);
  CHECK_THROWS_AS(DensityMatrix::maximally_mixed(kMaxQubits + 1), Error);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(2, 2)).validate(), Error);  // trace 2
  CHECK_THROWS_AS(DensityMatrix(diag({1.5, -0.5})).validate(), Error);             // negative eigenvalue
  CHECK_NOTHROW(DensityMatrix::maximally_mixed(5).validate());
  CHECK(DensityMatrix::basis_state(3, 5).matrix()(5, 5) == Complex{1.0, 0.0});
}

TEST_CASE("Pauli coefficients round trip and match Tr[P rho]") {
  std::mt19937_64 rng(8);
  for (int n = 1; n <= 4; ++n) {
    const auto rho = test::random_state(n, rng);
    const RealVector c = pauli_coefficients(rho.matrix());
    CHECK(c(0) == doctest::Approx(1.0));
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(c.size()); k += 3) {
      const auto p = PauliString::from_index(n, k);
      const double direct = (test::pauli_kron(p.str()) * rho.matrix()).trace().real();
      CHECK(c(static_cast<Eigen::Index>(k)) == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(max_abs(from_pauli_coefficients(c) - rho.matrix()) < 1e-14);
  }
}

TEST_CASE("transfer matrix of a unitary propagates coefficients") {
  std::mt19937_64 rng(9);
  const ComplexMatrix u = unitary_from_hamiltonian(test::random_hermitian(8, rng), 1.3);
  const RealMatrix t = transfer_matrix_of_unitary(u);
  CHECK(max_abs((t * t.transpose() - RealMatrix::Identity(64, 64)).cast<Complex>()) < 1e-12);
  const auto rho = test::random_state(3, rng);
  const ComplexMatrix evolved = u * rho.matrix() * u.adjoint();
  CHECK((t * pauli_coefficients(rho.matrix()) - pauli_coefficients(evolved)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(anticommuting_weight(3, PauliString("XYZ").index(), Pauli::Z) == 2);
  CHECK(anticommuting_weight(3, PauliString("XYZ").index(), Pauli::X) == 2);
  CHECK(anticommuting_weight(3, PauliString("IIZ").index(), Pauli::X) == 1);
}
