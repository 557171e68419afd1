#pragma once

// Real Pauli-basis representation of Hermitian operators.
//
// rho = 2^{-N} sum_P c_P P with c_P = Tr[P rho]; P ranges over the 4^N Pauli
// strings ordered by PauliString::index(). For a linear map Phi, the Pauli
// transfer matrix T[P,Q] = 2^{-N} Tr[P Phi(Q)] acts as c' = T c and is real
// whenever Phi is Hermiticity preserving.

#include "qrc/linalg.hpp"

namespace qrc {

/// c_P = Re Tr[P m] for every Pauli string P (m assumed Hermitian).
RealVector pauli_coefficients(const ComplexMatrix& m);

/// Inverse of pauli_coefficients.
ComplexMatrix from_pauli_coefficients(const RealVector& coefficients);

/// T[P,Q] = 2^{-N} Tr[P U Q U^dagger].
RealMatrix transfer_matrix_of_unitary(const ComplexMatrix& unitary);

/// Number of qubits on which Pauli `index` carries a letter anticommuting
/// with `letter` (X or Z).
int anticommuting_weight(int n_qubits, std::uint32_t index, Pauli letter);

}  // namespace qrc
