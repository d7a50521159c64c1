#include "mbath/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mbath {

namespace {
constexpr double kRateFloor = 1e-300;
}

LevelSystem::LevelSystem(Eigen::VectorXd energies, Eigen::MatrixXcd coupling)
    : energies_(std::move(energies)), coupling_(std::move(coupling)) {
    const int n = static_cast<int>(energies_.size());
    if (n < 2) throw std::invalid_argument("LevelSystem: need at least two levels");
    if (coupling_.rows() != n || coupling_.cols() != n)
        throw std::invalid_argument("LevelSystem: coupling must be n x n");
    for (int i = 1; i < n; ++i)
        if (!(energies_(i) > energies_(i - 1)))
            throw std::invalid_argument(
                "LevelSystem: energies must be strictly increasing");
    const double scale = coupling_.cwiseAbs().maxCoeff();
    if ((coupling_ - coupling_.adjoint()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("LevelSystem: coupling must be Hermitian");
}

LevelSystem LevelSystem::delta_three_level(double omega10, double omega21) {
    Eigen::VectorXd eps(3);
    eps << 0.0, omega10, omega10 + omega21;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Ones(3, 3);
    a.diagonal().setZero();
    return LevelSystem(eps, a);
}

LevelSystem LevelSystem::battery_three_level(double omega10, double omega21) {
    Eigen::VectorXd eps(3);
    eps << 0.0, omega10, omega10 + omega21;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Ones(3, 3);
    a.diagonal().setZero();
    a(0, 1) = a(1, 0) = 0.0;
    return LevelSystem(eps, a);
}

LevelSystem LevelSystem::two_level(double gap) {
    Eigen::VectorXd eps(2);
    eps << 0.0, gap;
    Eigen::MatrixXcd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    return LevelSystem(eps, a);
}

std::vector<Transition> bohr_frequencies(const LevelSystem& sys) {
    std::vector<Transition> out;
    for (int i = 1; i < sys.size(); ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(sys.coupling()(i, j)) != 0.0)
                out.push_back({i, j, sys.energies()(i) - sys.energies()(j)});
    return out;
}

std::vector<std::string> validate_secular(const LevelSystem& sys,
                                          const BathParams& bath) {
    bath.validate();
    std::vector<std::string> warnings;
    const auto trans = bohr_frequencies(sys);
    double omega_max = 0.0;
    for (const auto& t : trans) omega_max = std::max(omega_max, t.omega);
    const double rate_scale =
        bath.lambda * bath.lambda * omega_max / (2.0 * M_PI);
    for (size_t a = 0; a < trans.size(); ++a) {
        for (size_t b = a + 1; b < trans.size(); ++b) {
            const double gap = std::abs(trans[a].omega - trans[b].omega);
            std::ostringstream msg;
            if (gap <= 1e-12 * omega_max) {
                msg << "degenerate Bohr frequencies " << trans[a].omega << " ("
                    << trans[a].upper << "->" << trans[a].lower << ") and ("
                    << trans[b].upper << "->" << trans[b].lower << ")";
                warnings.push_back(msg.str());
            } else if (gap < 10.0 * rate_scale) {
                msg << "Bohr frequency gap " << gap << " between ("
                    << trans[a].upper << "->" << trans[a].lower << ") and ("
                    << trans[b].upper << "->" << trans[b].lower
                    << ") is within 10x the rate scale " << rate_scale
                    << "; secular approximation questionable";
                warnings.push_back(msg.str());
            }
        }
    }
    for (int i = 0; i < sys.size(); ++i)
        if (std::abs(sys.coupling()(i, i)) != 0.0)
            warnings.push_back("nonzero diagonal coupling on level " +
                               std::to_string(i) + " is ignored");
    return warnings;
}

RateMatrix rate_matrix(const LevelSystem& sys, const BathParams& bath) {
    bath.validate();
    const auto trans = bohr_frequencies(sys);
    for (size_t a = 0; a < trans.size(); ++a)
        for (size_t b = a + 1; b < trans.size(); ++b)
            if (std::abs(trans[a].omega - trans[b].omega) <=
                1e-12 * std::max(trans[a].omega, trans[b].omega))
                throw std::invalid_argument(
                    "rate_matrix: degenerate Bohr frequencies; secular master "
                    "equation not applicable");
    const int n = sys.size();
    RateMatrix rm;
    rm.k = Eigen::MatrixXd::Zero(n, n);
    rm.omega = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rm.omega(i, j) = sys.energies()(i) - sys.energies()(j);
    for (const auto& t : trans) {
        const double w2 = std::norm(sys.coupling()(t.upper, t.lower));
        double down = w2 * spectral_rate(t.omega, bath);
        double up = w2 * spectral_rate(-t.omega, bath);
        if (down <= 0.0) { down = kRateFloor; rm.clamped = true; }
        if (up <= 0.0) { up = kRateFloor; rm.clamped = true; }
        rm.k(t.upper, t.lower) = down;
        rm.k(t.lower, t.upper) = up;
    }
    return rm;
}

}  // namespace mbath
