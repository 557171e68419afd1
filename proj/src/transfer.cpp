#include "qrc/transfer.hpp"

#include "qrc/pauli_basis.hpp"

#include <cmath>

namespace qrc {

RealVector flip_channel_diagonal(int n_qubits, NoiseAxis axis, double p) {
  const auto size = Eigen::Index{1} << (2 * n_qubits);
  RealVector d = RealVector::Ones(size);
  if (axis == NoiseAxis::none || p == 0.0) return d;
  const Pauli letter = axis == NoiseAxis::x ? Pauli::X : Pauli::Z;
  const double damp = 1.0 - 2.0 * p;
  for (Eigen::Index i = 0; i < size; ++i) {
    d(i) = std::pow(damp, anticommuting_weight(n_qubits, static_cast<std::uint32_t>(i), letter));
  }
  return d;
}

namespace {

RealMatrix matrix_power(const RealMatrix& base, int exponent) {
  RealMatrix result = RealMatrix::Identity(base.rows(), base.cols());
  RealMatrix square = base;
  bool first = true;
  while (exponent > 0) {
    if (exponent & 1) {
      if (first) {
        result = square;
        first = false;
      } else {
        result = (result * square).eval();
      }
    }
    exponent >>= 1;
    if (exponent > 0) square = (square * square).eval();
  }
  return result;
}

}  // namespace

TransferPropagator::TransferPropagator(const HamiltonianRealization& h, double delta_T, const NoiseSpec& noise,
                                       int checkpoints)
    : n_qubits_(h.n_qubits), eta_(noise.eta) {
  noise.validate();
  if (!(delta_T > 0.0)) throw Error("interval length must be positive");
  if (checkpoints < 1) throw Error("multiplex factor must be >= 1");
  if (noise.eta % checkpoints != 0) {
    throw Error("multiplex factor " + std::to_string(checkpoints) + " is not commensurate with eta = " +
                std::to_string(noise.eta));
  }
  const double dt = delta_T / noise.eta;
  substep_ = transfer_matrix_of_unitary(unitary_from_eigensystem(h.spectrum, dt));

  RealMatrix block;
  if (noise.active()) {
    const RealVector d = flip_channel_diagonal(n_qubits_, noise.axis, noise.p_err);
    substep_ = d.asDiagonal() * substep_;
    block = matrix_power(substep_, noise.eta / checkpoints);
  } else {
    block = transfer_matrix_of_unitary(unitary_from_eigensystem(h.spectrum, delta_T / checkpoints));
  }
  checkpoints_.reserve(static_cast<std::size_t>(checkpoints));
  checkpoints_.push_back(block);
  for (int j = 2; j <= checkpoints; ++j) checkpoints_.push_back(checkpoints_.back() * block);
}

}  // namespace qrc
