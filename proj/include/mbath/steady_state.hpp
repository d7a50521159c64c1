// steady_state.hpp — Steady-state solver, Kolmogorov-loop classification,
// potentials, currents, cycle affinity and entropy production.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mbath/system.hpp"

namespace mbath {

enum class SteadyStateClass { CurrentFree, Ness };

// A fundamental basis cycle of the undirected support graph with its
// affinity sum_r ln(k_fwd / k_bwd).
struct BasisCycle {
    std::vector<int> nodes;  // closed walk, nodes.front() == nodes.back()
    double affinity;
};

struct Classification {
    SteadyStateClass cls;
    std::vector<BasisCycle> cycles;      // the whole basis
    std::vector<BasisCycle> violations;  // cycles with |affinity| > threshold
};

// Column-form generator G with G(j, i) = k(i, j), diagonal = -outflow;
// dp/dtau = G p.
Eigen::MatrixXd generator(const RateMatrix& k);

// Unique stationary distribution of the rate matrix. Throws if the support
// graph is disconnected (the components are named) or the kernel is not
// one-dimensional. Three-level systems use the matrix-tree closed form,
// which stays componentwise accurate for extreme rate ratios.
Eigen::VectorXd solve_steady(const RateMatrix& k);

// Kolmogorov loop condition on a fundamental cycle basis. CurrentFree iff
// every basis affinity has magnitude <= 1e-10.
Classification classify(const RateMatrix& k);

enum class TreeStrategy { Bfs, Dfs };

struct PotentialForm {
    Eigen::VectorXd F;  // per-level potentials, F(ground) = 0
    double log_zf;      // ln sum_i e^{-F_i}
    Eigen::VectorXd populations() const;
};

// Exponential-form potentials F_i from spanning-tree path sums of
// ln(k_fwd/k_bwd). Only valid for a CurrentFree rate matrix; throws on a
// NESS. Path-independence is verified on every non-tree edge.
PotentialForm potential_form(const RateMatrix& k,
                             TreeStrategy strategy = TreeStrategy::Bfs);

// Edge currents J_{i->j} = p_i k_{i->j} - p_j k_{j->i}, antisymmetric.
Eigen::MatrixXd currents(const Eigen::VectorXd& p, const RateMatrix& k);

// Cycle affinity of the Delta three-level preset,
// A = beta_eff(w20) w20 - beta_eff(w21) w21 - beta_eff(w10) w10.
// Positive current convention: J > 0 means flow along 0 -> 1 -> 2 -> 0.
double cycle_affinity_delta(const LevelSystem& sys, const BathParams& bath);

// Small-velocity expansion of the Delta-cycle affinity, O(u^2).
double affinity_small_u(double omega10, double omega21, double beta, double u);

// Schnakenberg entropy production rate at distribution p.
double entropy_production(const Eigen::VectorXd& p, const RateMatrix& k);

struct SteadyStateReport {
    Eigen::VectorXd populations;
    Classification classification;
    Eigen::MatrixXd edge_currents;
    double entropy_production;
    bool has_potentials = false;  // present iff CurrentFree
    PotentialForm potentials;
};

SteadyStateReport steady_report(const RateMatrix& k);

}  // namespace mbath
