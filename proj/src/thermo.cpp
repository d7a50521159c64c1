#include "mbath/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mbath {

namespace {

void check_distribution(const Eigen::VectorXd& p) {
    if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("thermo: not a probability distribution");
}

double entropy(const Eigen::VectorXd& p) {
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) s -= p(i) * std::log(p(i));
    return s;
}

// log of the Gibbs weight, shifted so the ground level carries weight 1
double log_partition(const Eigen::VectorXd& energies, double beta) {
    const double e0 = energies.minCoeff();
    double z = 0.0;
    for (int i = 0; i < energies.size(); ++i)
        z += std::exp(-beta * (energies(i) - e0));
    return std::log(z) - beta * e0;
}

}  // namespace

double free_energy(const Eigen::VectorXd& p, const Eigen::VectorXd& energies,
                   double beta) {
    check_distribution(p);
    if (p.size() != energies.size())
        throw std::invalid_argument("free_energy: dimension mismatch");
    if (!(beta > 0.0))
        throw std::invalid_argument("free_energy: beta must be positive");
    return energies.dot(p) - entropy(p) / beta;
}

WorkReport max_work(const Eigen::VectorXd& p, const Eigen::VectorXd& energies,
                    double beta) {
    check_distribution(p);
    if (!(beta > 0.0))
        throw std::invalid_argument("max_work: beta must be positive");
    const double log_z = log_partition(energies, beta);
    double rel_ent = 0.0;  // sum p (ln p - ln q), q = Gibbs
    for (int i = 0; i < p.size(); ++i) {
        if (p(i) <= 0.0) continue;
        const double log_q = -beta * energies(i) - log_z;
        rel_ent += p(i) * (std::log(p(i)) - log_q);
    }
    WorkReport rep;
    rep.relative_entropy = rel_ent;
    rep.free_energy_ss = free_energy(p, energies, beta);
    rep.free_energy_gibbs = -log_z / beta;
    rep.w_max = rep.free_energy_ss - rep.free_energy_gibbs;
    rep.ergotropy = ergotropy_diagonal(p, energies);
    const double alt = rel_ent / beta;
    if (std::abs(rep.w_max - alt) >
        1e-12 * std::max({1.0, std::abs(rep.w_max), std::abs(alt)}))
        throw std::runtime_error(
            "max_work: free-energy and relative-entropy routes disagree");
    // the relative entropy is nonnegative; clip roundoff from the sum
    if (rep.relative_entropy < 0.0 && rep.relative_entropy > -1e-12) {
        rep.relative_entropy = 0.0;
        rep.w_max = 0.0;
    }
    return rep;
}

double ergotropy_diagonal(const Eigen::VectorXd& p,
                          const Eigen::VectorXd& energies) {
    check_distribution(p);
    std::vector<double> sorted(p.data(), p.data() + p.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double w = 0.0;
    for (int i = 0; i < p.size(); ++i) w += energies(i) * (p(i) - sorted[i]);
    return std::max(w, 0.0);
}

Eigen::Vector3d BatteryPotentials::populations() const {
    Eigen::Vector3d f{f0, f1, f2};
    return (-f.array() - log_zf).exp();
}

BatteryPotentials battery_potentials(const BathParams& bath, double omega10,
                                     double omega21) {
    bath.validate();
    const double w20 = omega10 + omega21;
    BatteryPotentials bp;
    bp.f0 = 0.0;
    const double b20 = beta_eff(w20, bath) * w20;
    bp.f1 = b20 - beta_eff(omega21, bath) * omega21;
    bp.f2 = b20;
    const double fmin = std::min({bp.f0, bp.f1, bp.f2});
    bp.log_zf = -fmin + std::log(std::exp(-(bp.f0 - fmin)) +
                                 std::exp(-(bp.f1 - fmin)) +
                                 std::exp(-(bp.f2 - fmin)));
    return bp;
}

}  // namespace mbath
