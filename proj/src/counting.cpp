#include "mbath/counting.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mbath/steady_state.hpp"

namespace mbath {

namespace {

double dominant_real_eigenvalue(const Eigen::MatrixXd& w) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(w, false);
    const auto& ev = es.eigenvalues();
    int best = 0;
    for (int i = 1; i < ev.size(); ++i)
        if (ev(i).real() > ev(best).real()) best = i;
    for (int i = 0; i < ev.size(); ++i)
        if (i != best &&
            std::abs(ev(i).real() - ev(best).real()) < 1e-12 * w.norm() &&
            std::abs(ev(i).imag() - ev(best).imag()) > 1e-12 * w.norm())
            throw std::runtime_error(
                "scaled_cumulant_rate: degenerate dominant eigenvalue");
    return ev(best).real();
}

Eigen::MatrixXd tilted_generator(const RateMatrix& k, const CountingSpec& spec,
                                 double s) {
    Eigen::MatrixXd w = generator(k);
    const auto [pi, pj] = spec.plus_edge;
    const auto [mi, mj] = spec.minus_edge;
    w(pj, pi) = k.k(pi, pj) * std::exp(s);
    w(mj, mi) = k.k(mi, mj) * std::exp(-s);
    return w;
}

// Richardson-extrapolated difference sequence with a noise-floor stop:
// halving h past the rounding floor only amplifies noise, so we keep the
// best-converged level.
template <typename F>
double richardson(F diff, double h0, double tol) {
    double prev_d = diff(h0);
    double prev_r = 0.0, best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= 12; ++level) {
        const double d = diff(h0 / std::pow(2.0, level));
        const double r = (4.0 * d - prev_d) / 3.0;
        if (level >= 2) {
            const double err = std::abs(r - prev_r);
            if (err < best_err) {
                best = r;
                best_err = err;
            }
            if (err <= tol * std::max(std::abs(r), 1e-300)) return r;
            if (err > 4.0 * best_err) return best;
        }
        prev_d = d;
        prev_r = r;
        best = r;
    }
    return best;
}

// Exact three-level cumulants by implicit differentiation of the
// characteristic polynomial det(W(s) - theta). Only the constant
// coefficient depends on s, through the two directed cycle products that
// traverse the monitored edge; every coefficient is a sum of
// same-signed rate products, so no precision is lost even when upward
// rates underflow toward 1e-300.
struct ThreeLevelCumulants {
    double current;
    double diffusion;
};

ThreeLevelCumulants three_level_cumulants(const RateMatrix& km,
                                          const CountingSpec& spec) {
    const auto& k = km.k;
    const int a = spec.plus_edge.first, b = spec.plus_edge.second;
    const int c = 3 - a - b;  // remaining level
    const double pi_fwd = k(a, b) * k(b, c) * k(c, a);
    const double pi_bwd = k(b, a) * k(a, c) * k(c, b);
    double m = 0.0;  // sum of rooted spanning-tree weights
    m += k(1, 0) * k(2, 0) + k(1, 0) * k(2, 1) + k(1, 2) * k(2, 0);
    m += k(0, 1) * k(2, 1) + k(2, 0) * k(0, 1) + k(0, 2) * k(2, 1);
    m += k(0, 1) * k(1, 2) + k(0, 2) * k(1, 2) + k(1, 0) * k(0, 2);
    const double trace = -k.sum();
    const double j = (pi_fwd - pi_bwd) / m;
    const double d = 0.5 * ((pi_fwd + pi_bwd) + 2.0 * trace * j * j) / m;
    return {j, d};
}

}  // namespace

void CountingSpec::validate(const RateMatrix& k) const {
    const int n = k.size();
    const auto in_range = [n](std::pair<int, int> e) {
        return e.first >= 0 && e.first < n && e.second >= 0 && e.second < n &&
               e.first != e.second;
    };
    if (!in_range(plus_edge) || !in_range(minus_edge))
        throw std::invalid_argument("CountingSpec: edge indices out of range");
    if (minus_edge != std::pair{plus_edge.second, plus_edge.first})
        throw std::invalid_argument(
            "CountingSpec: minus_edge must be the reverse of plus_edge");
    if (!k.edge(plus_edge.first, plus_edge.second) ||
        !k.edge(minus_edge.first, minus_edge.second))
        throw std::invalid_argument(
            "CountingSpec: monitored edge is absent from the rate matrix");
}

double scaled_cumulant_rate(const RateMatrix& k, const CountingSpec& spec,
                            double s) {
    spec.validate(k);
    return dominant_real_eigenvalue(tilted_generator(k, spec, s));
}

ClockStats clock_stats(const RateMatrix& k, const CountingSpec& spec,
                       double sigma, CumulantMethod method) {
    spec.validate(k);
    if (method == CumulantMethod::Auto)
        method = k.size() == 3 ? CumulantMethod::CharPoly
                               : CumulantMethod::FiniteDifference;

    double j = 0.0, d = 0.0;
    if (method == CumulantMethod::CharPoly) {
        if (k.size() != 3)
            throw std::invalid_argument(
                "clock_stats: CharPoly path needs a three-level system");
        const auto cum = three_level_cumulants(k, spec);
        j = cum.current;
        d = cum.diffusion;
    } else {
        // work on the normalized generator; cumulants scale linearly
        const double scale = k.k.maxCoeff();
        RateMatrix kn = k;
        kn.k /= scale;
        const auto theta = [&kn, &spec](double s) {
            return dominant_real_eigenvalue(tilted_generator(kn, spec, s));
        };
        const double theta0 = theta(0.0);
        j = richardson(
                [&](double h) { return (theta(h) - theta(-h)) / (2.0 * h); },
                0.5, 1e-7) *
            scale;
        d = 0.5 * scale *
            richardson(
                [&](double h) {
                    return (theta(h) - 2.0 * theta0 + theta(-h)) / (h * h);
                },
                0.5, 1e-7);
    }

    ClockStats out;
    out.ticking_rate = j;
    out.diffusion = d;
    out.uncertainty_defined = j != 0.0 && std::isfinite(j);
    out.relative_uncertainty =
        out.uncertainty_defined ? 2.0 * d / (j * j)
                                : std::numeric_limits<double>::infinity();
    out.tur_product = out.relative_uncertainty * sigma;
    return out;
}

namespace {

// SplitMix64; seeds the per-trajectory streams.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Stream {
   public:
    Stream(std::uint64_t seed, std::uint64_t index)
        : state_(seed ^ (0xA0761D6478BD642FULL * (index + 1))) {
        splitmix64(state_);  // decorrelate nearby indices
    }
    double uniform() {  // in (0, 1]
        return (static_cast<double>(splitmix64(state_) >> 11) + 1.0) * 0x1p-53;
    }

   private:
    std::uint64_t state_;
};

}  // namespace

GillespieResult gillespie_count(const RateMatrix& k, const CountingSpec& spec,
                                double tau, int n_traj, std::uint64_t seed) {
    spec.validate(k);
    if (!(tau > 0.0) || n_traj < 2)
        throw std::invalid_argument("gillespie_count: need tau > 0, n_traj >= 2");
    const int n = k.size();
    const Eigen::VectorXd p_ss = solve_steady(k);
    Eigen::VectorXd cum_p(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) cum_p(i) = (acc += p_ss(i));
    Eigen::VectorXd out_rate(n);
    for (int i = 0; i < n; ++i) out_rate(i) = k.k.row(i).sum();

    std::vector<double> counts(n_traj);
    std::int64_t jumps = 0;
    for (int t = 0; t < n_traj; ++t) {
        Stream rng(seed, static_cast<std::uint64_t>(t));
        // stationary start keeps <n> = J tau free of transient bias
        int state = 0;
        const double u0 = rng.uniform();
        while (state < n - 1 && u0 > cum_p(state)) ++state;
        double time = 0.0;
        long net = 0;
        while (true) {
            time += -std::log(rng.uniform()) / out_rate(state);
            if (time > tau) break;
            const double r = rng.uniform() * out_rate(state);
            int next = 0;
            double run = 0.0;
            for (; next < n; ++next) {
                if (next == state) continue;
                run += k.k(state, next);
                if (r <= run) break;
            }
            if (next >= n) next = n - 1 == state ? n - 2 : n - 1;
            if (state == spec.plus_edge.first && next == spec.plus_edge.second)
                ++net;
            else if (state == spec.minus_edge.first &&
                     next == spec.minus_edge.second)
                --net;
            state = next;
            ++jumps;
        }
        counts[t] = static_cast<double>(net);
    }

    const double m = static_cast<double>(n_traj);
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= m;
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    var /= (m - 1.0);

    GillespieResult res;
    res.rate = mean / tau;
    res.diffusion = var / (2.0 * tau);
    res.rate_se = std::sqrt(var / m) / tau;

    // bootstrap over trajectories for the diffusion standard error
    const int n_boot = 200;
    std::vector<double> boot(n_boot);
    Stream brng(seed ^ 0x5851F42D4C957F2DULL, 0);
    for (int b = 0; b < n_boot; ++b) {
        double bm = 0.0, bs = 0.0;
        std::vector<double> sample(n_traj);
        for (int t = 0; t < n_traj; ++t) {
            const int idx = static_cast<int>(brng.uniform() * m) % n_traj;
            sample[t] = counts[idx];
            bm += sample[t];
        }
        bm /= m;
        for (double c : sample) bs += (c - bm) * (c - bm);
        boot[b] = bs / (m - 1.0) / (2.0 * tau);
    }
    double bmean = 0.0;
    for (double v : boot) bmean += v;
    bmean /= n_boot;
    double bvar = 0.0;
    for (double v : boot) bvar += (v - bmean) * (v - bmean);
    res.diffusion_se = std::sqrt(bvar / (n_boot - 1.0));
    res.total_jumps = jumps;
    return res;
}

}  // namespace mbath
