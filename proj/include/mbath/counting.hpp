// counting.hpp — Full counting statistics of a monitored transition and a
// stochastic-simulation cross-check.

#pragma once

#include <cstdint>
#include <utility>

#include "mbath/system.hpp"

namespace mbath {

// Monitored transition: plus_edge counts +1, its reverse counts -1.
struct CountingSpec {
    std::pair<int, int> plus_edge;
    std::pair<int, int> minus_edge;

    // Default clock tick: +1 for 2 -> 0, -1 for 0 -> 2.
    static CountingSpec cycle_tick() { return {{2, 0}, {0, 2}}; }

    void validate(const RateMatrix& k) const;
};

// Dominant eigenvalue of the generator with the monitored edge tilted by
// e^{+s} (plus direction) and e^{-s} (minus direction). Zero at s = 0;
// its derivatives at s = 0 give the current and diffusion constant.
double scaled_cumulant_rate(const RateMatrix& k, const CountingSpec& spec,
                            double s);

struct ClockStats {
    double ticking_rate;          // J
    double diffusion;             // D
    double relative_uncertainty;  // 2D / J^2, infinite when J = 0
    double tur_product;           // relative_uncertainty * Sigma
    bool uncertainty_defined;
};

enum class CumulantMethod {
    Auto,              // CharPoly for three-level systems, else FiniteDifference
    FiniteDifference,  // Richardson-extrapolated central differences
    CharPoly           // exact implicit differentiation, three-level only
};

// First and second counting cumulants plus TUR diagnostics. The
// finite-difference path cannot resolve currents below ~1e-13 of the rate
// scale; the characteristic-polynomial path has no such limit.
ClockStats clock_stats(const RateMatrix& k, const CountingSpec& spec,
                       double sigma,
                       CumulantMethod method = CumulantMethod::Auto);

struct GillespieResult {
    double rate;           // <n> / tau
    double diffusion;      // Var(n) / (2 tau)
    double rate_se;        // standard error of rate
    double diffusion_se;   // bootstrap standard error of diffusion
    std::int64_t total_jumps;
};

// Jump-trajectory sampling of the counter over [0, tau], n_traj
// independent trajectories started from the stationary distribution.
// Per-trajectory streams are keyed by (seed, index); output is
// reproducible and independent of scheduling.
GillespieResult gillespie_count(const RateMatrix& k, const CountingSpec& spec,
                                double tau, int n_traj, std::uint64_t seed);

}  // namespace mbath
