#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "mbath/steady_state.hpp"

using namespace mbath;

namespace {

Eigen::VectorXd gibbs(const Eigen::VectorXd& eps, double beta) {
    Eigen::VectorXd p = (-beta * eps.array()).exp();
    return p / p.sum();
}

LevelSystem random_four_level(std::mt19937& rng) {
    std::uniform_real_distribution<double> gap(0.3, 1.7);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    Eigen::VectorXd eps(4);
    for (;;) {
        eps << 0.0, gap(rng), 0.0, 0.0;
        eps(2) = eps(1) + gap(rng);
        eps(3) = eps(2) + gap(rng);
        // distinct Bohr frequencies
        bool ok = true;
        std::vector<double> w;
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < i; ++j) w.push_back(eps(i) - eps(j));
        for (size_t a = 0; a < w.size() && ok; ++a)
            for (size_t b = a + 1; b < w.size(); ++b)
                if (std::abs(w[a] - w[b]) < 1e-2) { ok = false; break; }
        if (ok) break;
    }
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) {
            a(i, j) = std::polar(amp(rng), gap(rng));
            a(j, i) = std::conj(a(i, j));
        }
    return LevelSystem(eps, a);
}

}  // namespace

TEST_CASE("steady state is Gibbs at rest") {
    const BathParams bath{1.3, 0.0, 0.1};
    const auto sys = LevelSystem::delta_three_level();
    const auto p = solve_steady(rate_matrix(sys, bath));
    CHECK((p - gibbs(sys.energies(), bath.beta)).cwiseAbs().maxCoeff() < 1e-10);

    std::mt19937 rng(7);
    for (int trial = 0; trial < 3; ++trial) {
        const auto s4 = random_four_level(rng);
        const auto p4 = solve_steady(rate_matrix(s4, bath));
        CHECK((p4 - gibbs(s4.energies(), bath.beta)).cwiseAbs().maxCoeff() <
              1e-10);
    }
}

TEST_CASE("stationarity residual and positivity") {
    const BathParams bath{1.0, 0.6, 0.1};
    const auto k = rate_matrix(LevelSystem::delta_three_level(), bath);
    const auto p = solve_steady(k);
    CHECK(p.minCoeff() > 0.0);
    CHECK(std::abs(p.sum() - 1.0) < 1e-14);
    CHECK((generator(k) * p).cwiseAbs().maxCoeff() < 1e-12 * k.k.maxCoeff());
}

TEST_CASE("three-level closed form matches the generic kernel solve") {
    const BathParams bath{0.9, 0.45, 0.1};
    const auto sys = LevelSystem::delta_three_level();
    const auto k3 = rate_matrix(sys, bath);
    // embed the same rates in a generic-path problem by perturbing size:
    // instead compare against a dense QR solve done by hand
    const Eigen::MatrixXd g = generator(k3);
    Eigen::MatrixXd a(4, 3);
    a.topRows(3) = g / k3.k.maxCoeff();
    a.bottomRows(1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
    b(3) = 1.0;
    const Eigen::VectorXd p_qr = a.colPivHouseholderQr().solve(b);
    const auto p = solve_steady(k3);
    CHECK((p - p_qr).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("classification at rest, in motion, and for the battery") {
    const auto sys = LevelSystem::delta_three_level();
    CHECK(classify(rate_matrix(sys, {1.0, 0.0, 0.1})).cls ==
          SteadyStateClass::CurrentFree);

    const auto moving = classify(rate_matrix(sys, {1.0, 0.6, 0.1}));
    CHECK(moving.cls == SteadyStateClass::Ness);
    REQUIRE(moving.violations.size() == 1);
    CHECK(moving.violations[0].nodes.size() == 4);  // closed triangle walk

    const auto battery =
        classify(rate_matrix(LevelSystem::battery_three_level(), {1.0, 0.6, 0.1}));
    CHECK(battery.cls == SteadyStateClass::CurrentFree);
    CHECK(battery.cycles.empty());  // no closed sequence of allowed transitions
}

TEST_CASE("basis-cycle affinity matches the closed-form Delta affinity") {
    const auto sys = LevelSystem::delta_three_level();
    for (double u : {0.2, 0.6, 0.99}) {
        const BathParams bath{1.0, u, 0.1};
        const auto cls = classify(rate_matrix(sys, bath));
        REQUIRE(cls.cycles.size() == 1);
        CHECK(cls.cycles[0].affinity ==
              doctest::Approx(cycle_affinity_delta(sys, bath)).epsilon(1e-12));
    }
}

TEST_CASE("potential form reproduces Gibbs at rest") {
    const BathParams bath{1.3, 0.0, 0.1};
    const auto sys = LevelSystem::delta_three_level();
    const auto pf = potential_form(rate_matrix(sys, bath));
    for (int i = 0; i < 3; ++i)
        CHECK(pf.F(i) ==
              doctest::Approx(bath.beta * (sys.energies()(i) - sys.energies()(0)))
                  .epsilon(1e-12));
    CHECK((pf.populations() - gibbs(sys.energies(), bath.beta))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("potential form on the battery preset") {
    const BathParams bath{1.0, 0.6, 0.1};
    const auto k = rate_matrix(LevelSystem::battery_three_level(), bath);
    const auto pf = potential_form(k);
    const double b20 = beta_eff(4.1, bath) * 4.1;
    const double b21 = beta_eff(3.1, bath) * 3.1;
    CHECK(pf.F(0) == 0.0);
    CHECK(pf.F(1) == doctest::Approx(b20 - b21).epsilon(1e-12));
    CHECK(pf.F(2) == doctest::Approx(b20).epsilon(1e-12));
    CHECK((pf.populations() - solve_steady(k)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("two-level steady state is always Gibbs-like") {
    const BathParams bath{1.0, 0.8, 0.1};
    const auto k = rate_matrix(LevelSystem::two_level(1.0), bath);
    const auto pf = potential_form(k);
    CHECK(pf.F(1) == doctest::Approx(beta_eff(1.0, bath) * 1.0).epsilon(1e-12));
    CHECK((pf.populations() - solve_steady(k)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("potential form is tree independent and rejects a NESS") {
    const BathParams rest{0.7, 0.0, 0.1};
    const auto k = rate_matrix(LevelSystem::delta_three_level(), rest);
    const auto bfs = potential_form(k, TreeStrategy::Bfs);
    const auto dfs = potential_form(k, TreeStrategy::Dfs);
    CHECK((bfs.F - dfs.F).cwiseAbs().maxCoeff() < 1e-10);

    const auto ness = rate_matrix(LevelSystem::delta_three_level(), {1.0, 0.6, 0.1});
    CHECK_THROWS_AS(potential_form(ness), std::invalid_argument);
}

TEST_CASE("currents: equal around the Delta cycle, zero when current-free") {
    const BathParams bath{1.0, 0.6, 0.1};
    const auto k = rate_matrix(LevelSystem::delta_three_level(), bath);
    const auto j = currents(solve_steady(k), k);
    CHECK((j + j.transpose()).cwiseAbs().maxCoeff() < 1e-18);
    CHECK(j(0, 1) == doctest::Approx(j(1, 2)).epsilon(1e-10));
    CHECK(j(1, 2) == doctest::Approx(j(2, 0)).epsilon(1e-10));
    // small-u flow runs 0 -> 2 -> 1 -> 0, so J (along 0->1->2->0) < 0
    const auto ksmall = rate_matrix(LevelSystem::delta_three_level(),
                                    {1.0, 0.05, 0.1});
    CHECK(currents(solve_steady(ksmall), ksmall)(0, 1) < 0.0);

    const auto kcf = rate_matrix(LevelSystem::battery_three_level(), bath);
    CHECK(currents(solve_steady(kcf), kcf).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Delta affinity: zero at rest, negative in motion, small-u form") {
    const auto sys = LevelSystem::delta_three_level();
    CHECK(cycle_affinity_delta(sys, {1.0, 0.0, 0.1}) == doctest::Approx(0.0));
    for (double b : {0.2, 1.0, 5.0})
        CHECK(cycle_affinity_delta(sys, {b, 0.2, 0.1}) <= 0.0);
    // expansion matches the closed form near u = 0
    for (double u : {0.01, 0.05}) {
        const double a = cycle_affinity_delta(sys, {1.0, u, 0.1});
        const double approx = affinity_small_u(1.0, 3.1, 1.0, u);
        CHECK(std::abs(a - approx) <= 0.05 * std::abs(a));
    }
    CHECK(affinity_small_u(1.0, 3.1, 1.0, 0.0) == 0.0);
}

TEST_CASE("coth superadditivity keeps the expansion nonpositive") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pos(0.05, 8.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = pos(rng), b = pos(rng), beta = pos(rng);
        const auto c = [beta](double w) {
            return w * w / std::tanh(0.5 * beta * w);
        };
        CHECK(c(a + b) >= c(a) + c(b) - 1e-10 * c(a + b));
        CHECK(affinity_small_u(a, b, beta, 0.3) <= 1e-12);
    }
}

TEST_CASE("entropy production: zero when current-free, J*A on the cycle") {
    const BathParams rest{1.0, 0.0, 0.1};
    const auto kcf = rate_matrix(LevelSystem::delta_three_level(), rest);
    CHECK(std::abs(entropy_production(solve_steady(kcf), kcf)) < 1e-12);

    const BathParams bath{1.0, 0.6, 0.1};
    const auto sys = LevelSystem::delta_three_level();
    const auto k = rate_matrix(sys, bath);
    const auto p = solve_steady(k);
    const double j = currents(p, k)(0, 1);
    const double a = cycle_affinity_delta(sys, bath);
    const double sigma = entropy_production(p, k);
    CHECK(sigma == doctest::Approx(j * a).epsilon(1e-10));
    CHECK(sigma >= 0.0);
}

TEST_CASE("entropy production scales like u^4 near rest") {
    const auto sys = LevelSystem::delta_three_level();
    std::vector<double> us{0.01, 0.02, 0.04, 0.08}, sig;
    for (double u : us) {
        const auto k = rate_matrix(sys, {1.0, u, 0.1});
        sig.push_back(entropy_production(solve_steady(k), k));
    }
    const double slope = std::log(sig.back() / sig.front()) /
                         std::log(us.back() / us.front());
    CHECK(slope == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("disconnected graphs are rejected with named components") {
    Eigen::VectorXd eps(4);
    eps << 0.0, 1.0, 2.2, 3.6;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    a(1, 0) = a(0, 1) = 1.0;
    a(3, 2) = a(2, 3) = 1.0;
    const auto k = rate_matrix(LevelSystem(eps, a), {1.0, 0.2, 0.1});
    CHECK_THROWS_WITH_AS(solve_steady(k),
                         doctest::Contains("disconnected"),
                         std::invalid_argument);
}

TEST_CASE("steady report bundles the pieces consistently") {
    const auto k = rate_matrix(LevelSystem::battery_three_level(), {1.0, 0.6, 0.1});
    const auto rep = steady_report(k);
    CHECK(rep.classification.cls == SteadyStateClass::CurrentFree);
    REQUIRE(rep.has_potentials);
    CHECK((rep.potentials.populations() - rep.populations).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK(rep.edge_currents.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rep.entropy_production >= -1e-12);
}
