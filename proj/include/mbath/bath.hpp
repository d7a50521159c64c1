// bath.hpp — Doppler-modified thermal bath spectral function for inertial
// motion through a massless scalar field at inverse temperature beta.

#pragma once

namespace mbath {

// Bath parameters in natural units (hbar = c = k_B = 1).
struct BathParams {
    double beta;    // inverse temperature, > 0
    double u;       // velocity, 0 <= u < 1
    double lambda;  // coupling strength, > 0

    // Throws std::invalid_argument on violation of the above.
    void validate() const;
};

struct DopplerFactors {
    double minus;  // sqrt((1-u)/(1+u)), redshift edge
    double plus;   // sqrt((1+u)/(1-u)), blueshift edge
};

// Extreme Doppler shifts of bath quanta seen by the moving system.
DopplerFactors doppler_factors(double u);

// log(1 - e^{-x}) for x > 0, stable for both tiny and huge x.
double log1mexp(double x);

// Bose-Einstein occupation 1/(e^x - 1), overflow-safe.
double bose_occupation(double x);

// Effective occupation number N(omega, beta, u): the Bose factor averaged
// over the Doppler interval [d_minus, d_plus], in closed form. Requires
// omega > 0. Below u = 1e-4 a second-order expansion in u is used; the
// direct prefactor 1/(2*beta*omega*u) loses precision there.
double occupation(double omega, const BathParams& bath);

// ln N(omega, beta, u), exact even where N underflows double precision.
double log_occupation(double omega, const BathParams& bath);

// Same quantity by adaptive quadrature of the Bose factor over the Doppler
// interval. Independent oracle for occupation(); throws if the quadrature
// does not converge.
double occupation_quadrature(double omega, const BathParams& bath);

// Bath spectral function Gamma(omega). Emission (omega > 0) carries N+1,
// absorption (omega < 0) carries N; gamma(w) = lambda^2 w / (2 pi).
// omega = 0 is rejected.
double spectral_rate(double omega, const BathParams& bath);

// Frequency-dependent effective inverse temperature,
// omega * beta_eff = log(1 + 1/N). Requires omega > 0.
double beta_eff(double omega, const BathParams& bath);

}  // namespace mbath
