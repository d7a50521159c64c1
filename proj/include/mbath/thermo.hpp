// thermo.hpp — Nonequilibrium free energy, extractable work, battery
// potentials and passivity.

#pragma once

#include <Eigen/Dense>

#include "mbath/bath.hpp"

namespace mbath {

struct WorkReport {
    double w_max;             // (1/beta) D(p || gibbs)
    double free_energy_ss;    // F(p)
    double free_energy_gibbs; // F(gibbs) = -(1/beta) ln Z
    double relative_entropy;  // D(p || gibbs)
    double ergotropy;         // of the diagonal state
};

// F(p) = sum_i eps_i p_i - S(p)/beta with S = -sum p ln p (0 ln 0 = 0).
double free_energy(const Eigen::VectorXd& p, const Eigen::VectorXd& energies,
                   double beta);

// Maximum extractable work of a diagonal state relative to the Gibbs state
// at the bath rest-frame beta. Both routes (free-energy difference and
// scaled relative entropy) are computed and cross-checked to 1e-12.
WorkReport max_work(const Eigen::VectorXd& p, const Eigen::VectorXd& energies,
                    double beta);

// sum_i eps_i (p_i - p_sorted_desc_i); zero iff populations are
// nonincreasing in energy (passive state).
double ergotropy_diagonal(const Eigen::VectorXd& p,
                          const Eigen::VectorXd& energies);

struct BatteryPotentials {
    double f0, f1, f2;
    double log_zf;
    Eigen::Vector3d populations() const;
};

// Exponential-form potentials of the battery preset (levels 0, w10,
// w10+w21 with the 1<->0 transition forbidden):
// F_1 = beta_eff(w20) w20 - beta_eff(w21) w21, F_2 = beta_eff(w20) w20.
BatteryPotentials battery_potentials(const BathParams& bath, double omega10,
                                     double omega21);

}  // namespace mbath
