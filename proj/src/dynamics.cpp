#include "mbath/dynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "mbath/steady_state.hpp"

namespace mbath {

namespace {

void check_tau(double tau) {
    if (!(tau >= 0.0))
        throw std::invalid_argument("evolution time must be nonnegative");
}

void check_distribution(const Eigen::VectorXd& p, int n) {
    if (p.size() != n)
        throw std::invalid_argument("population vector has wrong dimension");
    if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("population vector is not a distribution");
}

}  // namespace

Eigen::VectorXd pauli_evolve(const Eigen::VectorXd& p0, const RateMatrix& k,
                             double tau) {
    check_tau(tau);
    const int n = k.size();
    check_distribution(p0, n);
    if (tau == 0.0) return p0;
    const Eigen::MatrixXd g = generator(k);

    using state = std::vector<double>;
    state y(p0.data(), p0.data() + n);
    const auto rhs = [&g, n](const state& p, state& dpdt, double) {
        Eigen::Map<const Eigen::VectorXd> pv(p.data(), n);
        Eigen::Map<Eigen::VectorXd>(dpdt.data(), n) = g * pv;
    };
    namespace ode = boost::numeric::odeint;
    const double scale = std::max(k.k.maxCoeff(), 1e-300);
    const double dt0 = std::min(tau, 0.01 / scale);
    ode::integrate_adaptive(
        ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-14, 1e-10),
        rhs, y, 0.0, tau, dt0);
    return Eigen::Map<Eigen::VectorXd>(y.data(), n);
}

Eigen::VectorXd pauli_evolve_expm(const Eigen::VectorXd& p0,
                                  const RateMatrix& k, double tau) {
    check_tau(tau);
    check_distribution(p0, k.size());
    const Eigen::MatrixXd g = generator(k);
    return (g * tau).exp() * p0;
}

double coherence_decay_rate(int i, int j, const RateMatrix& k) {
    const int n = k.size();
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("coherence_decay_rate: need distinct levels");
    double sum = 0.0;
    for (int l = 0; l < n; ++l) sum += k.k(i, l) + k.k(j, l);
    return 0.5 * sum;
}

Eigen::MatrixXcd gksl_evolve(const Eigen::MatrixXcd& rho0,
                             const LevelSystem& sys, const RateMatrix& k,
                             double tau) {
    check_tau(tau);
    const int n = sys.size();
    if (rho0.rows() != n || rho0.cols() != n)
        throw std::invalid_argument("gksl_evolve: rho0 has wrong dimension");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("gksl_evolve: rho0 is not Hermitian");
    if (std::abs(rho0.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho0.trace().imag()) > 1e-10)
        throw std::invalid_argument("gksl_evolve: rho0 does not have unit trace");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("gksl_evolve: rho0 is not positive semidefinite");

    const Eigen::VectorXd p = pauli_evolve_expm(rho0.diagonal().real(), k, tau);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    rho.diagonal() = p.cast<std::complex<double>>();
    using namespace std::complex_literals;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double omega = sys.energies()(i) - sys.energies()(j);
            const double decay = coherence_decay_rate(i, j, k);
            rho(i, j) = rho0(i, j) * std::exp(-decay * tau) *
                        std::exp(-1i * omega * tau);
        }
    return rho;
}

}  // namespace mbath
