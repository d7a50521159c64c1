// system.hpp — Multilevel system description and transition-rate matrix.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mbath/bath.hpp"

namespace mbath {

// An allowed transition between eigenlevels, upper > lower in energy.
struct Transition {
    int upper;
    int lower;
    double omega;  // Bohr frequency eps_upper - eps_lower, > 0
};

// Non-degenerate multilevel system with a Hermitian coupling operator.
// Diagonal couplings carry no Bohr frequency and are ignored by rate
// construction.
class LevelSystem {
   public:
    LevelSystem(Eigen::VectorXd energies, Eigen::MatrixXcd coupling);

    // Three-level Delta configuration with all three couplings equal.
    static LevelSystem delta_three_level(double omega10 = 1.0, double omega21 = 3.1);
    // Same levels with the 1<->0 transition forbidden (lambda_01 = 0).
    static LevelSystem battery_three_level(double omega10 = 1.0, double omega21 = 3.1);
    static LevelSystem two_level(double gap = 1.0);

    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXcd& coupling() const { return coupling_; }
    int size() const { return static_cast<int>(energies_.size()); }

   private:
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd coupling_;
};

// All pairs (i > j) with nonzero coupling, with positive Bohr frequency.
std::vector<Transition> bohr_frequencies(const LevelSystem& sys);

// Advisory checks for the secular regime: warns on nearly degenerate Bohr
// frequencies and on gaps comparable to the largest rate scale.
std::vector<std::string> validate_secular(const LevelSystem& sys,
                                          const BathParams& bath);

// Classical transition generator on the level graph.
struct RateMatrix {
    Eigen::MatrixXd k;      // k(i, j) = rate i -> j, zero diagonal
    Eigen::MatrixXd omega;  // omega(i, j) = eps_i - eps_j
    bool clamped = false;   // true iff some underflowed rate was floored

    int size() const { return static_cast<int>(k.rows()); }
    bool edge(int i, int j) const { return k(i, j) > 0.0; }
};

// k_{i->j} = |A_ij|^2 Gamma(omega_ij). Downward transitions use the
// emission branch, upward the absorption branch. A rate whose Gamma
// underflows entirely is floored at 1e-300 and flagged; the support of the
// graph is set by the coupling alone.
RateMatrix rate_matrix(const LevelSystem& sys, const BathParams& bath);

}  // namespace mbath
