#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "mbath/steady_state.hpp"
#include "mbath/thermo.hpp"

using namespace mbath;

namespace {

Eigen::VectorXd gibbs(const Eigen::VectorXd& eps, double beta) {
    Eigen::VectorXd p = (-beta * (eps.array() - eps.minCoeff())).exp();
    return p / p.sum();
}

const Eigen::VectorXd kDeltaEnergies = [] {
    Eigen::VectorXd e(3);
    e << 0.0, 1.0, 4.1;
    return e;
}();

}  // namespace

TEST_CASE("free energy of reference states") {
    const double beta = 1.3;
    // Gibbs: F = -(1/beta) ln Z
    const Eigen::VectorXd pg = gibbs(kDeltaEnergies, beta);
    double z = 0.0;
    for (int i = 0; i < 3; ++i) z += std::exp(-beta * kDeltaEnergies(i));
    CHECK(free_energy(pg, kDeltaEnergies, beta) ==
          doctest::Approx(-std::log(z) / beta).epsilon(1e-12));
    // pure ground state: F = eps_0 (0 ln 0 = 0 handled)
    Eigen::VectorXd ground(3);
    ground << 1.0, 0.0, 0.0;
    CHECK(free_energy(ground, kDeltaEnergies, beta) ==
          doctest::Approx(0.0).epsilon(1e-15));
    // maximally mixed: F = <eps> - ln(3)/beta
    const Eigen::VectorXd mixed = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    CHECK(free_energy(mixed, kDeltaEnergies, beta) ==
          doctest::Approx(kDeltaEnergies.mean() - std::log(3.0) / beta)
              .epsilon(1e-12));
}

TEST_CASE("no work is extractable from the Gibbs state") {
    for (double beta : {0.05, 1.0, 50.0}) {
        const auto rep =
            max_work(gibbs(kDeltaEnergies, beta), kDeltaEnergies, beta);
        CHECK(std::abs(rep.w_max) < 1e-12);
        CHECK(std::abs(rep.relative_entropy) < 1e-12);
    }
}

TEST_CASE("work routes agree and are nonnegative") {
    Eigen::VectorXd p(3);
    p << 0.2, 0.5, 0.3;
    const double beta = 0.8;
    const auto rep = max_work(p, kDeltaEnergies, beta);
    CHECK(rep.w_max >= 0.0);
    CHECK(rep.w_max ==
          doctest::Approx(rep.free_energy_ss - rep.free_energy_gibbs)
              .epsilon(1e-12));
    CHECK(rep.w_max ==
          doctest::Approx(rep.relative_entropy / beta).epsilon(1e-12));
    // direct relative entropy
    const Eigen::VectorXd g = gibbs(kDeltaEnergies, beta);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d += p(i) * std::log(p(i) / g(i));
    CHECK(rep.relative_entropy == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("ergotropy of diagonal states") {
    Eigen::VectorXd eps2(2);
    eps2 << 0.0, 1.0;
    Eigen::VectorXd passive(2), inverted(2);
    passive << 0.7, 0.3;
    inverted << 0.3, 0.7;
    CHECK(ergotropy_diagonal(passive, eps2) == 0.0);
    CHECK(ergotropy_diagonal(inverted, eps2) ==
          doctest::Approx(0.4).epsilon(1e-14));
    // three-level scramble: reordering to passive lowers the energy
    Eigen::VectorXd p(3);
    p << 0.1, 0.3, 0.6;
    CHECK(ergotropy_diagonal(p, kDeltaEnergies) ==
          doctest::Approx(p.dot(kDeltaEnergies) -
                          (0.6 * 0.0 + 0.3 * 1.0 + 0.1 * 4.1))
              .epsilon(1e-14));
}

TEST_CASE("battery potentials match their definition and the rate matrix") {
    const BathParams bath{1.0, 0.6, 0.1};
    const auto bp = battery_potentials(bath, 1.0, 3.1);
    const double b20 = beta_eff(4.1, bath) * 4.1;
    const double b21 = beta_eff(3.1, bath) * 3.1;
    CHECK(bp.f0 == 0.0);
    CHECK(bp.f1 == doctest::Approx(b20 - b21).epsilon(1e-14));
    CHECK(bp.f2 == doctest::Approx(b20).epsilon(1e-14));
    // difference identity: F_2 - F_1 = beta_eff(w21) w21
    CHECK(bp.f2 - bp.f1 == doctest::Approx(b21).epsilon(1e-12));
    const auto k = rate_matrix(LevelSystem::battery_three_level(), bath);
    CHECK((bp.populations() - solve_steady(k)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("battery state at rest is Gibbs and yields no work") {
    const BathParams rest{1.0, 0.0, 0.1};
    const auto bp = battery_potentials(rest, 1.0, 3.1);
    Eigen::VectorXd eps(3);
    eps << 0.0, 1.0, 4.1;
    CHECK((bp.populations() - gibbs(eps, rest.beta)).cwiseAbs().maxCoeff() <
          1e-12);
    const auto rep = max_work(bp.populations(), eps, rest.beta);
    CHECK(std::abs(rep.w_max) < 1e-12);
}

TEST_CASE("a moving battery charges: positive work without ergotropy") {
    Eigen::VectorXd eps(3);
    eps << 0.0, 1.0, 4.1;
    for (double u : {0.2, 0.6, 0.99}) {
        const auto bp = battery_potentials({1.0, u, 0.1}, 1.0, 3.1);
        const auto rep = max_work(bp.populations(), eps, 1.0);
        CHECK(rep.w_max > 0.0);
        // potentials stay ordered, so the state is passive
        CHECK(rep.ergotropy == 0.0);
    }
}

TEST_CASE("extreme-beta battery populations do not overflow the work") {
    Eigen::VectorXd eps(3);
    eps << 0.0, 1.0, 4.1;
    for (double beta : {0.05, 50.0}) {
        const auto bp = battery_potentials({beta, 0.6, 0.1}, 1.0, 3.1);
        const auto rep = max_work(bp.populations(), eps, beta);
        CHECK(std::isfinite(rep.w_max));
        CHECK(rep.w_max >= 0.0);
    }
}

TEST_CASE("input validation") {
    Eigen::VectorXd eps(3);
    eps << 0.0, 1.0, 4.1;
    Eigen::VectorXd bad(3);
    bad << 0.5, 0.6, 0.2;
    CHECK_THROWS_AS(free_energy(bad, eps, 1.0), std::invalid_argument);
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    CHECK_THROWS_AS(free_energy(p, eps, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(max_work(gibbs(eps, 1.0), eps, 0.0), std::invalid_argument);
}
