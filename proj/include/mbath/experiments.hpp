// experiments.hpp — Config-driven sweeps producing the published data
// tables, output emitters and the self-test battery.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mbath/system.hpp"

namespace mbath {

struct ExperimentConfig {
    std::string experiment;           // fig1 | fig2 | fig4 | sweep | selftest
    std::string preset = "delta";     // delta | battery | custom
    std::optional<LevelSystem> custom_system;
    std::vector<double> beta_grid;    // empty = 40 log-spaced in [0.05, 50]
    std::vector<double> u_list{0.2, 0.6, 0.99};
    double lambda = 0.1;
    std::optional<std::uint64_t> seed;
    int gillespie_trajectories = 500;
    double gillespie_tau_lambda2 = 1e3;  // tau * lambda^2
    std::string output;                  // empty = stdout
    std::string format = "csv";          // csv | json

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    LevelSystem system() const;
};

std::vector<double> log_grid(double lo, double hi, int points);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// (beta, u, affinity, minus_current) for the Delta preset.
Table run_fig1(const ExperimentConfig& cfg);
// (beta, u, delta2, delta2_sigma) plus Gillespie cross-check columns when a
// seed is configured.
Table run_fig2(const ExperimentConfig& cfg);
// (beta, u, w_max) for the battery preset.
Table run_fig4(const ExperimentConfig& cfg);
// Full steady-state report per grid point for any system.
Table run_sweep(const ExperimentConfig& cfg);

struct CheckResult {
    std::string name;
    bool pass;
    double tolerance;
    std::string detail;
};

struct SelftestReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// Invariant battery: KMS identity, quadrature oracle, Gibbs at rest,
// equal currents, TUR, battery potentials, cumulant-route agreement,
// determinism of the sampler.
SelftestReport run_selftest(std::optional<std::uint64_t> seed = {});

// KMS-identity check against an injectable spectral function; the
// self-test passes the production one.
CheckResult kms_identity_check(
    const std::function<double(double, const BathParams&)>& rate_fn,
    double tol);

// Full double precision (17 significant digits), '.' decimal separator.
std::string format_double(double v);
void write_csv(const Table& t, std::ostream& os);
void write_json(const Table& t, const std::string& experiment,
                std::ostream& os);
void write_table(const Table& t, const ExperimentConfig& cfg);

}  // namespace mbath
