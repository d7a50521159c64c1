#include "mbath/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mbath/counting.hpp"
#include "mbath/steady_state.hpp"
#include "mbath/thermo.hpp"

namespace mbath {

using nlohmann::json;

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i)
        g[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
    return g;
}

namespace {

std::vector<double> default_beta_grid() { return log_grid(0.05, 50.0, 40); }

LevelSystem system_from_json(const json& j) {
    const auto& je = j.at("energies");
    Eigen::VectorXd eps(je.size());
    for (size_t i = 0; i < je.size(); ++i) eps(i) = je[i].get<double>();
    const auto& jc = j.at("coupling");
    Eigen::MatrixXcd a(je.size(), je.size());
    for (size_t r = 0; r < jc.size(); ++r)
        for (size_t c = 0; c < jc[r].size(); ++c) {
            const auto& e = jc[r][c];
            if (e.is_array())
                a(r, c) = {e[0].get<double>(), e[1].get<double>()};
            else
                a(r, c) = e.get<double>();
        }
    return LevelSystem(eps, a);
}

std::vector<double> grid_from_json(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    const int points = j.at("points").get<int>();
    const double lo = j.at("min").get<double>(), hi = j.at("max").get<double>();
    if (points < 1) throw std::invalid_argument("beta_grid.points must be >= 1");
    if (points == 1) return {lo};
    if (j.value("spacing", "log") == "linear") {
        std::vector<double> g(points);
        for (int i = 0; i < points; ++i)
            g[i] = lo + (hi - lo) * i / (points - 1);
        return g;
    }
    return log_grid(lo, hi, points);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("system")) {
        if (j["system"].is_string()) {
            cfg.preset = j["system"].get<std::string>();
        } else {
            cfg.preset = "custom";
            cfg.custom_system = system_from_json(j["system"]);
        }
    }
    if (j.contains("beta_grid")) cfg.beta_grid = grid_from_json(j["beta_grid"]);
    if (j.contains("u")) cfg.u_list = j["u"].get<std::vector<double>>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("gillespie_trajectories"))
        cfg.gillespie_trajectories = j["gillespie_trajectories"].get<int>();
    if (j.contains("gillespie_tau_lambda2"))
        cfg.gillespie_tau_lambda2 = j["gillespie_tau_lambda2"].get<double>();
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    return from_json(j);
}

void ExperimentConfig::validate() const {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config field '" + field + "': " + why);
    };
    if (experiment != "fig1" && experiment != "fig2" && experiment != "fig4" &&
        experiment != "sweep" && experiment != "selftest")
        fail("experiment", "must be fig1|fig2|fig4|sweep|selftest");
    if (preset != "delta" && preset != "battery" && preset != "custom")
        fail("system", "must be 'delta', 'battery' or a system object");
    if (preset == "custom" && !custom_system)
        fail("system", "custom system missing");
    // an empty beta_grid means "use the default grid"
    for (double b : beta_grid)
        if (!(b > 0.0)) fail("beta_grid", "all beta must be positive");
    if (u_list.empty()) fail("u", "velocity list must be nonempty");
    for (double u : u_list)
        if (!(u >= 0.0 && u < 1.0)) fail("u", "velocities must lie in [0, 1)");
    if (!(lambda > 0.0)) fail("lambda", "must be positive");
    if (gillespie_trajectories < 2) fail("gillespie_trajectories", "need >= 2");
    if (!(gillespie_tau_lambda2 > 0.0)) fail("gillespie_tau_lambda2", "need > 0");
    if (format != "csv" && format != "json") fail("format", "must be csv|json");
}

LevelSystem ExperimentConfig::system() const {
    if (preset == "delta") return LevelSystem::delta_three_level();
    if (preset == "battery") return LevelSystem::battery_three_level();
    return *custom_system;
}

namespace {

ExperimentConfig with_defaults(ExperimentConfig cfg) {
    if (cfg.beta_grid.empty()) cfg.beta_grid = default_beta_grid();
    return cfg;
}

}  // namespace

Table run_fig1(const ExperimentConfig& cfg0) {
    const auto cfg = with_defaults(cfg0);
    const auto sys = LevelSystem::delta_three_level();
    Table t;
    t.columns = {"beta", "u", "affinity", "minus_current"};
    for (double u : cfg.u_list)
        for (double beta : cfg.beta_grid) {
            const BathParams bath{beta, u, cfg.lambda};
            const auto k = rate_matrix(sys, bath);
            const auto p = solve_steady(k);
            const double j = p(2) * k.k(2, 0) - p(0) * k.k(0, 2);
            const double a = cycle_affinity_delta(sys, bath);
            t.rows.push_back({beta, u, a, -j});
        }
    return t;
}

Table run_fig2(const ExperimentConfig& cfg0) {
    const auto cfg = with_defaults(cfg0);
    const auto sys = LevelSystem::delta_three_level();
    const bool with_mc = cfg.seed.has_value();
    Table t;
    t.columns = {"beta", "u", "delta2", "delta2_sigma"};
    if (with_mc)
        t.columns.insert(t.columns.end(),
                         {"mc_rate", "mc_rate_se", "mc_diffusion",
                          "mc_diffusion_se"});
    const auto spec = CountingSpec::cycle_tick();
    for (double u : cfg.u_list)
        for (double beta : cfg.beta_grid) {
            const BathParams bath{beta, u, cfg.lambda};
            const auto k = rate_matrix(sys, bath);
            const auto p = solve_steady(k);
            const double j = p(2) * k.k(2, 0) - p(0) * k.k(0, 2);
            const double sigma = j * cycle_affinity_delta(sys, bath);
            const auto stats = clock_stats(k, spec, sigma);
            std::vector<double> row{beta, u, stats.relative_uncertainty,
                                    stats.tur_product};
            if (with_mc) {
                const double tau =
                    cfg.gillespie_tau_lambda2 / (cfg.lambda * cfg.lambda);
                const auto mc = gillespie_count(k, spec, tau,
                                                cfg.gillespie_trajectories,
                                                *cfg.seed);
                row.insert(row.end(), {mc.rate, mc.rate_se, mc.diffusion,
                                       mc.diffusion_se});
            }
            t.rows.push_back(std::move(row));
        }
    return t;
}

Table run_fig4(const ExperimentConfig& cfg0) {
    const auto cfg = with_defaults(cfg0);
    Table t;
    t.columns = {"beta", "u", "w_max"};
    const Eigen::VectorXd eps = LevelSystem::battery_three_level().energies();
    for (double u : cfg.u_list)
        for (double beta : cfg.beta_grid) {
            const BathParams bath{beta, u, cfg.lambda};
            const auto bp = battery_potentials(bath, eps(1), eps(2) - eps(1));
            const auto w = max_work(bp.populations(), eps, beta);
            t.rows.push_back({beta, u, w.w_max});
        }
    return t;
}

Table run_sweep(const ExperimentConfig& cfg0) {
    const auto cfg = with_defaults(cfg0);
    const auto sys = cfg.system();
    const int n = sys.size();
    Table t;
    t.columns = {"beta", "u"};
    for (int i = 0; i < n; ++i) t.columns.push_back("p" + std::to_string(i));
    t.columns.insert(t.columns.end(),
                     {"ness", "max_abs_affinity", "entropy_production"});
    for (double u : cfg.u_list)
        for (double beta : cfg.beta_grid) {
            const BathParams bath{beta, u, cfg.lambda};
            const auto k = rate_matrix(sys, bath);
            const auto rep = steady_report(k);
            std::vector<double> row{beta, u};
            for (int i = 0; i < n; ++i) row.push_back(rep.populations(i));
            double amax = 0.0;
            for (const auto& c : rep.classification.cycles)
                amax = std::max(amax, std::abs(c.affinity));
            row.push_back(
                rep.classification.cls == SteadyStateClass::Ness ? 1.0 : 0.0);
            row.push_back(amax);
            row.push_back(rep.entropy_production);
            t.rows.push_back(std::move(row));
        }
    return t;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const Table& t, std::ostream& os) {
    for (size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
}

void write_json(const Table& t, const std::string& experiment,
                std::ostream& os) {
    json j;
    j["schema_version"] = 1;
    j["experiment"] = experiment;
    j["columns"] = t.columns;
    j["rows"] = json::array();
    for (const auto& row : t.rows) j["rows"].push_back(row);
    os << j.dump(2) << "\n";
}

void write_table(const Table& t, const ExperimentConfig& cfg) {
    std::ostringstream buf;
    if (cfg.format == "json")
        write_json(t, cfg.experiment, buf);
    else
        write_csv(t, buf);
    if (cfg.output.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output: " + cfg.output);
        out << buf.str();
    }
}

// ---------------------------------------------------------------------------
// self-test battery

CheckResult kms_identity_check(
    const std::function<double(double, const BathParams&)>& rate_fn,
    double tol) {
    double worst = 0.0;
    for (double u : {0.0, 0.2, 0.6, 0.99})
        for (double beta : log_grid(0.1, 10.0, 12))
            for (double omega : log_grid(0.1, 10.0, 12)) {
                const BathParams bath{beta, u, 0.1};
                const double ratio =
                    rate_fn(omega, bath) / rate_fn(-omega, bath);
                const double expect = std::exp(beta_eff(omega, bath) * omega);
                worst = std::max(worst,
                                 std::abs(ratio - expect) / expect);
            }
    return {"modified KMS identity", worst <= tol, tol,
            "worst relative deviation " + format_double(worst)};
}

namespace {

CheckResult check(const std::string& name, bool pass, double tol,
                  const std::string& detail) {
    return {name, pass, tol, detail};
}

}  // namespace

bool SelftestReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

SelftestReport run_selftest(std::optional<std::uint64_t> seed) {
    SelftestReport rep;
    // Doppler factor identities
    {
        double worst = 0.0;
        for (double u : {0.0, 0.3, 0.6, 0.9, 0.99, 0.999}) {
            const auto d = doppler_factors(u);
            worst = std::max(worst, std::abs(d.plus * d.minus - 1.0));
            worst = std::max(
                worst, std::abs(d.plus - d.minus -
                                2.0 * u / std::sqrt(1.0 - u * u)));
        }
        rep.checks.push_back(check("Doppler factor identities", worst <= 1e-12,
                                   1e-12, "worst " + format_double(worst)));
    }
    rep.checks.push_back(kms_identity_check(
        [](double w, const BathParams& b) { return spectral_rate(w, b); },
        1e-12));
    // closed-form occupation vs quadrature oracle
    {
        double worst = 0.0;
        for (double u : {0.01, 0.5, 0.99})
            for (double beta : log_grid(0.1, 10.0, 8))
                for (double omega : log_grid(0.1, 10.0, 8)) {
                    const BathParams bath{beta, u, 0.1};
                    const double a = occupation(omega, bath);
                    const double b = occupation_quadrature(omega, bath);
                    worst = std::max(worst, std::abs(a - b) / b);
                }
        rep.checks.push_back(check("occupation vs quadrature oracle",
                                   worst <= 1e-10, 1e-10,
                                   "worst relative " + format_double(worst)));
    }
    // Gibbs state at rest
    {
        const auto sys = LevelSystem::delta_three_level();
        const BathParams bath{1.7, 0.0, 0.1};
        const auto p = solve_steady(rate_matrix(sys, bath));
        Eigen::VectorXd g = (-bath.beta * sys.energies().array()).exp();
        g /= g.sum();
        const double worst = (p - g).cwiseAbs().maxCoeff();
        rep.checks.push_back(check("Gibbs state at u = 0", worst <= 1e-10,
                                   1e-10, "max abs " + format_double(worst)));
    }
    // equal steady currents around the Delta cycle
    {
        const auto sys = LevelSystem::delta_three_level();
        const BathParams bath{1.0, 0.6, 0.1};
        const auto k = rate_matrix(sys, bath);
        const auto p = solve_steady(k);
        const auto j = currents(p, k);
        const double worst =
            std::max(std::abs(j(0, 1) - j(1, 2)), std::abs(j(1, 2) - j(2, 0)));
        rep.checks.push_back(check("equal currents around Delta cycle",
                                   worst <= 1e-10, 1e-10,
                                   "max mismatch " + format_double(worst)));
    }
    // TUR at sample NESS points
    {
        const auto sys = LevelSystem::delta_three_level();
        double worst = 1e9;
        for (double u : {0.2, 0.6, 0.99})
            for (double beta : {0.3, 1.0, 5.0}) {
                const BathParams bath{beta, u, 0.1};
                const auto k = rate_matrix(sys, bath);
                const auto p = solve_steady(k);
                const double j = p(2) * k.k(2, 0) - p(0) * k.k(0, 2);
                const double sigma = j * cycle_affinity_delta(sys, bath);
                const auto st =
                    clock_stats(k, CountingSpec::cycle_tick(), sigma);
                worst = std::min(worst, st.tur_product);
            }
        rep.checks.push_back(check("TUR delta2*Sigma >= 2", worst >= 2.0 - 1e-6,
                                   1e-6, "minimum " + format_double(worst)));
    }
    // battery potentials against the generic solver
    {
        const auto sys = LevelSystem::battery_three_level();
        const BathParams bath{1.0, 0.6, 0.1};
        const auto p = solve_steady(rate_matrix(sys, bath));
        const auto bp = battery_potentials(bath, 1.0, 3.1);
        const double worst =
            (p - Eigen::VectorXd(bp.populations())).cwiseAbs().maxCoeff();
        rep.checks.push_back(check("battery potentials vs solver",
                                   worst <= 1e-10, 1e-10,
                                   "max abs " + format_double(worst)));
    }
    // finite-difference vs characteristic-polynomial cumulants
    {
        const auto sys = LevelSystem::delta_three_level();
        const BathParams bath{1.0, 0.6, 0.1};
        const auto k = rate_matrix(sys, bath);
        const auto fd = clock_stats(k, CountingSpec::cycle_tick(), 0.0,
                                    CumulantMethod::FiniteDifference);
        const auto cp = clock_stats(k, CountingSpec::cycle_tick(), 0.0,
                                    CumulantMethod::CharPoly);
        const double worst = std::max(
            std::abs(fd.ticking_rate - cp.ticking_rate) /
                std::abs(cp.ticking_rate),
            std::abs(fd.diffusion - cp.diffusion) / cp.diffusion);
        rep.checks.push_back(check("cumulant routes agree", worst <= 1e-6,
                                   1e-6, "worst relative " +
                                             format_double(worst)));
    }
    // sampler determinism
    {
        const auto sys = LevelSystem::delta_three_level();
        const BathParams bath{1.0, 0.6, 0.1};
        const auto k = rate_matrix(sys, bath);
        const std::uint64_t s = seed.value_or(12345);
        const auto a = gillespie_count(k, CountingSpec::cycle_tick(), 1e4, 64, s);
        const auto b = gillespie_count(k, CountingSpec::cycle_tick(), 1e4, 64, s);
        const bool same = a.rate == b.rate && a.diffusion == b.diffusion &&
                          a.total_jumps == b.total_jumps;
        rep.checks.push_back(
            check("Gillespie determinism", same, 0.0,
                  same ? "identical repeat" : "repeat runs differ"));
    }
    return rep;
}

}  // namespace mbath
