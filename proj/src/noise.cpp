#include "qrc/noise.hpp"

#include <cmath>

namespace qrc {

std::string to_string(NoiseAxis axis) {
  switch (axis) {
    case NoiseAxis::none: return "none";
    case NoiseAxis::x: return "x";
    case NoiseAxis::z: return "z";
  }
  return "none";
}

NoiseAxis parse_noise_axis(std::string_view text) {
  if (text == "none") return NoiseAxis::none;
  if (text == "x" || text == "bit_flip") return NoiseAxis::x;
  if (text == "z" || text == "phase_flip") return NoiseAxis::z;
  throw Error("unknown noise axis '" + std::string(text) + "'");
}

void NoiseSpec::validate() const {
  if (!(p_err >= 0.0 && p_err <= 0.5)) throw Error("p_err must lie in [0, 0.5]");
  if (eta < 1) throw Error("eta must be >= 1");
}

NoiseSpec NoiseSpec::with_eta(int new_eta, double delta_T) const {
  NoiseSpec out = *this;
  out.eta = new_eta;
  if (active() && p_err < 0.5) {
    const double gamma = gamma_from_perr(p_err, delta_T / eta);
    out.p_err = perr_from_gamma(gamma, delta_T / new_eta);
  }
  out.validate();
  return out;
}

double perr_from_gamma(double gamma, double delta_t) {
  if (gamma < 0.0) throw Error("gamma must be non-negative");
  if (!(delta_t > 0.0)) throw Error("delta_t must be positive");
  return 0.5 * (1.0 - std::exp(-2.0 * gamma * delta_t));
}

double gamma_from_perr(double p, double delta_t) {
  if (!(p >= 0.0)) throw Error("p must be non-negative");
  if (p >= 0.5) throw Error("p >= 0.5 is not reachable at a finite rate");
  if (!(delta_t > 0.0)) throw Error("delta_t must be positive");
  return -std::log1p(-2.0 * p) / (2.0 * delta_t);
}

void apply_flip_channel_inplace(ComplexMatrix& rho, int n_qubits, NoiseAxis axis, double p, int qubit) {
  if (qubit < 0 || qubit >= n_qubits) throw Error("flip channel on invalid qubit " + std::to_string(qubit));
  if (!(p >= 0.0 && p <= 0.5)) throw Error("flip probability must lie in [0, 0.5]");
  if (axis == NoiseAxis::none || p == 0.0) return;
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  const std::uint64_t b = bit_of(n_qubits, qubit);
  if (axis == NoiseAxis::z) {
    // Z rho Z flips the sign of entries whose row and column differ on bit b.
    const double damp = 1.0 - 2.0 * p;
    for (std::uint64_t c = 0; c < dim; ++c) {
      for (std::uint64_t r = 0; r < dim; ++r) {
        if (((r ^ c) & b) != 0) rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *= damp;
      }
    }
    return;
  }
  // X rho X: entry (r, c) <- (r^b, c^b). Mix each orbit {(r,c), (r^b,c^b)} once.
  const double keep = 1.0 - p;
  for (std::uint64_t c = 0; c < dim; ++c) {
    for (std::uint64_t r = 0; r < dim; ++r) {
      if (r & b) continue;
      const auto r0 = static_cast<Eigen::Index>(r);
      const auto r1 = static_cast<Eigen::Index>(r | b);
      const auto c0 = static_cast<Eigen::Index>(c);
      const auto c1 = static_cast<Eigen::Index>(c ^ b);
      const Complex a = rho(r0, c0);
      const Complex f = rho(r1, c1);
      rho(r0, c0) = keep * a + p * f;
      rho(r1, c1) = keep * f + p * a;
    }
  }
}

DensityMatrix apply_flip_channel(const DensityMatrix& rho, NoiseAxis axis, double p, int qubit) {
  ComplexMatrix m = rho.matrix();
  apply_flip_channel_inplace(m, rho.n_qubits(), axis, p, qubit);
  return DensityMatrix(std::move(m));
}

IntervalPropagator::IntervalPropagator(const HamiltonianRealization& h, double delta_T, NoiseSpec noise)
    : n_qubits_(h.n_qubits), delta_T_(delta_T), noise_(noise) {
  if (!(delta_T > 0.0)) throw Error("interval length must be positive");
  noise_.validate();
  full_step_ = unitary_from_eigensystem(h.spectrum, delta_T);
  sub_step_ = unitary_from_eigensystem(h.spectrum, delta_T / noise_.eta);
}

void IntervalPropagator::apply_substeps(ComplexMatrix& rho, int count) const {
  ComplexMatrix tmp(rho.rows(), rho.cols());
  for (int s = 0; s < count; ++s) {
    tmp.noalias() = sub_step_ * rho;
    rho.noalias() = tmp * sub_step_.adjoint();
    if (noise_.active()) {
      for (int q = 0; q < n_qubits_; ++q) apply_flip_channel_inplace(rho, n_qubits_, noise_.axis, noise_.p_err, q);
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
}

DensityMatrix IntervalPropagator::apply(const DensityMatrix& rho) const {
  if (rho.n_qubits() != n_qubits_) throw Error("state and Hamiltonian sizes differ");
  ComplexMatrix m = rho.matrix();
  if (!noise_.active()) {
    ComplexMatrix tmp = full_step_ * m;
    m.noalias() = tmp * full_step_.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
  } else {
    apply_substeps(m, noise_.eta);
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix noisy_interval(const DensityMatrix& rho, const HamiltonianRealization& h, double delta_T,
                             const NoiseSpec& noise) {
  return IntervalPropagator(h, delta_T, noise).apply(rho);
}

}  // namespace qrc
