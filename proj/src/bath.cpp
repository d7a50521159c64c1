#include "mbath/bath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mbath {

namespace {
constexpr double kSmallVelocity = 1e-4;  // switch point for the series branch
}

void BathParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("BathParams: beta must be positive and finite");
    if (!(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("BathParams: u must lie in [0, 1)");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("BathParams: lambda must be positive and finite");
}

DopplerFactors doppler_factors(double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("doppler_factors: u must lie in [0, 1)");
    return {std::sqrt((1.0 - u) / (1.0 + u)), std::sqrt((1.0 + u) / (1.0 - u))};
}

double log1mexp(double x) {
    // Representation switch at ln 2 keeps full precision on both sides.
    if (x > 0.6931471805599453)
        return std::log1p(-std::exp(-x));
    return std::log(-std::expm1(-x));
}

double bose_occupation(double x) {
    // 1/(e^x - 1) = e^{-x}/(1 - e^{-x})
    const double e = std::exp(-x);
    return e / (1.0 - e);
}

namespace {

// N for u -> 0: average of f(D) = 1/(e^{xD}-1) over [d-, d+] expanded to
// second order in u about D = 1.
double occupation_series(double x, double u) {
    const double e = std::exp(-x);
    const double om = 1.0 - e;
    const double f = e / om;
    const double fp = -x * e / (om * om);
    const double fpp = x * x * e * (1.0 + e) / (om * om * om);
    return f + u * u * (0.5 * fp + fpp / 6.0);
}

}  // namespace

double log_occupation(double omega, const BathParams& bath) {
    bath.validate();
    if (!(omega > 0.0))
        throw std::invalid_argument("log_occupation: omega must be positive");
    const double x = bath.beta * omega;
    const double d_minus = doppler_factors(bath.u).minus;
    if (x * d_minus < 650.0) {
        // N is a normal double here; take the log directly.
        return std::log(occupation(omega, bath));
    }
    // Deep quantum regime: N underflows, but its log is still exact.
    // log1mexp(y) = -e^{-y} to machine precision for y this large, so
    // N = pref * (e^{-x d-} - e^{-x d+}) with no further approximation.
    if (bath.u < kSmallVelocity) {
        const double fp_over_f = -x;        // f'(1)/f(1) up to e^{-x} terms
        const double fpp_over_f = x * x;    // f''(1)/f(1), same accuracy
        return -x - log1mexp(x) +
               std::log1p(bath.u * bath.u *
                          (0.5 * fp_over_f + fpp_over_f / 6.0));
    }
    const auto d = doppler_factors(bath.u);
    const double pref =
        std::sqrt(1.0 - bath.u * bath.u) / (2.0 * x * bath.u);
    return std::log(pref) - x * d.minus + log1mexp(x * (d.plus - d.minus));
}

double occupation(double omega, const BathParams& bath) {
    bath.validate();
    if (!(omega > 0.0))
        throw std::invalid_argument("occupation: omega must be positive");
    const double x = bath.beta * omega;
    if (bath.u < kSmallVelocity) return occupation_series(x, bath.u);
    const auto d = doppler_factors(bath.u);
    const double pref = std::sqrt(1.0 - bath.u * bath.u) / (2.0 * x * bath.u);
    return pref * (log1mexp(x * d.plus) - log1mexp(x * d.minus));
}

double occupation_quadrature(double omega, const BathParams& bath) {
    bath.validate();
    if (!(omega > 0.0))
        throw std::invalid_argument("occupation_quadrature: omega must be positive");
    const double x = bath.beta * omega;
    if (bath.u == 0.0) return bose_occupation(x);
    const auto d = doppler_factors(bath.u);
    const auto f = [x](double D) { return 1.0 / std::expm1(x * D); };
    double error = 0.0, l1 = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            f, d.minus, d.plus, 12, 1e-13, &error, &l1);
    // The returned error estimate is very conservative (orders of magnitude
    // above the true error); gate only against gross non-convergence.
    if (!(std::isfinite(integral)) || error > 1e-3 * std::max(l1, 1e-300))
        throw std::runtime_error(
            "occupation_quadrature: did not converge, error estimate " +
            std::to_string(error));
    return integral / (d.plus - d.minus);
}

double spectral_rate(double omega, const BathParams& bath) {
    bath.validate();
    if (omega == 0.0)
        throw std::invalid_argument("spectral_rate: omega = 0 has no defined rate");
    const double aw = std::abs(omega);
    const double gamma = bath.lambda * bath.lambda * aw / (2.0 * M_PI);
    const double n = occupation(aw, bath);
    return omega > 0.0 ? gamma * (n + 1.0) : gamma * n;
}

double beta_eff(double omega, const BathParams& bath) {
    if (!(omega > 0.0))
        throw std::invalid_argument("beta_eff: omega must be positive");
    const double n = occupation(omega, bath);
    if (n >= 1e-290) return std::log1p(1.0 / n) / omega;
    // underflowing occupation: log1p(1/N) = -ln N up to an error of N
    return -log_occupation(omega, bath) / omega;
}

}  // namespace mbath
