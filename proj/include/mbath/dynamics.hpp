// dynamics.hpp — Pauli master equation for populations and the secular
// GKSL evolution of the full density matrix (Lamb shift set to zero: it
// only shifts coherence oscillation frequencies and never enters
// populations, steady states or currents).

#pragma once

#include <Eigen/Dense>

#include "mbath/system.hpp"

namespace mbath {

// Populations at time tau from the Pauli master equation, by adaptive
// Runge-Kutta integration (dopri5, relative tolerance 1e-10).
Eigen::VectorXd pauli_evolve(const Eigen::VectorXd& p0, const RateMatrix& k,
                             double tau);

// Same propagation through the dense matrix exponential of the generator;
// cross-check path for the integrator.
Eigen::VectorXd pauli_evolve_expm(const Eigen::VectorXd& p0,
                                  const RateMatrix& k, double tau);

// Coherence decay coefficient (1/2) sum_l (k_{i->l} + k_{j->l}), i != j.
double coherence_decay_rate(int i, int j, const RateMatrix& k);

// Secular GKSL evolution: populations follow the Pauli equation, each
// off-diagonal rho_ij rotates at omega_ij and decays at its coherence
// rate. rho0 must be Hermitian, unit trace and PSD to 1e-10.
Eigen::MatrixXcd gksl_evolve(const Eigen::MatrixXcd& rho0,
                             const LevelSystem& sys, const RateMatrix& k,
                             double tau);

}  // namespace mbath
