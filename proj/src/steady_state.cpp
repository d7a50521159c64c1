#include "mbath/steady_state.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace mbath {

namespace {

constexpr double kAffinityThreshold = 1e-10;

// Connected components of the undirected support graph.
std::vector<std::vector<int>> components(const RateMatrix& k) {
    const int n = k.size();
    std::vector<int> label(n, -1);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        comps.emplace_back();
        std::deque<int> queue{s};
        label[s] = static_cast<int>(comps.size()) - 1;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            comps.back().push_back(v);
            for (int w = 0; w < n; ++w) {
                if (label[w] < 0 && (k.edge(v, w) || k.edge(w, v))) {
                    label[w] = label[s];
                    queue.push_back(w);
                }
            }
        }
    }
    return comps;
}

void require_connected(const RateMatrix& k) {
    const auto comps = components(k);
    if (comps.size() == 1) return;
    std::ostringstream msg;
    msg << "transition graph is disconnected: components";
    for (const auto& c : comps) {
        msg << " {";
        for (size_t i = 0; i < c.size(); ++i) msg << (i ? "," : "") << c[i];
        msg << "}";
    }
    throw std::invalid_argument(msg.str());
}

// Spanning tree of the support graph rooted at 0; parent[root] = -1.
std::vector<int> spanning_tree(const RateMatrix& k, TreeStrategy strategy) {
    const int n = k.size();
    std::vector<int> parent(n, -2);
    std::deque<int> frontier{0};
    parent[0] = -1;
    while (!frontier.empty()) {
        int v;
        if (strategy == TreeStrategy::Bfs) {
            v = frontier.front();
            frontier.pop_front();
        } else {
            v = frontier.back();
            frontier.pop_back();
        }
        for (int w = 0; w < n; ++w)
            if (parent[w] == -2 && k.edge(v, w)) {
                parent[w] = v;
                frontier.push_back(w);
            }
    }
    return parent;
}

// Closed walk a -> ... -> b -> a through the tree, for non-tree edge (a, b).
std::vector<int> tree_cycle(const std::vector<int>& parent, int a, int b) {
    std::vector<int> up_a{a}, up_b{b};
    for (int v = a; v != -1; v = parent[v]) if (v != a) up_a.push_back(v);
    for (int v = b; v != -1; v = parent[v]) if (v != b) up_b.push_back(v);
    // splice at lowest common ancestor
    size_t ia = up_a.size(), ib = up_b.size();
    while (ia > 0 && ib > 0 && up_a[ia - 1] == up_b[ib - 1]) { --ia; --ib; }
    std::vector<int> cycle;  // b -> ... -> a then close with edge a -> b
    for (size_t t = 0; t <= ib; ++t) cycle.push_back(up_b[t]);
    for (size_t t = ia; t-- > 0;) cycle.push_back(up_a[t]);
    cycle.push_back(b);
    return cycle;
}

double walk_affinity(const std::vector<int>& nodes, const RateMatrix& k) {
    double a = 0.0;
    for (size_t t = 0; t + 1 < nodes.size(); ++t)
        a += std::log(k.k(nodes[t], nodes[t + 1]) / k.k(nodes[t + 1], nodes[t]));
    return a;
}

// Matrix-tree stationary weights for three states: sums of positive
// products only, componentwise accurate for arbitrarily skewed rates.
Eigen::VectorXd steady_three(const RateMatrix& km) {
    const auto& k = km.k;
    Eigen::VectorXd t(3);
    t(0) = k(1, 0) * k(2, 0) + k(1, 0) * k(2, 1) + k(1, 2) * k(2, 0);
    t(1) = k(0, 1) * k(2, 1) + k(2, 0) * k(0, 1) + k(0, 2) * k(2, 1);
    t(2) = k(0, 1) * k(1, 2) + k(0, 2) * k(1, 2) + k(1, 0) * k(0, 2);
    return t / t.sum();
}

}  // namespace

Eigen::MatrixXd generator(const RateMatrix& k) {
    const int n = k.size();
    Eigen::MatrixXd g = k.k.transpose();
    for (int i = 0; i < n; ++i) g(i, i) = -k.k.row(i).sum();
    return g;
}

Eigen::VectorXd solve_steady(const RateMatrix& k) {
    require_connected(k);
    const int n = k.size();
    if (n == 3) return steady_three(k);
    const Eigen::MatrixXd g = generator(k);
    const double scale = k.k.maxCoeff();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(g);
    rank_qr.setThreshold(1e-12);
    if (rank_qr.rank() != n - 1)
        throw std::runtime_error("solve_steady: stationary kernel is not unique");
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = g / scale;
    a.bottomRows(1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    Eigen::VectorXd p = a.colPivHouseholderQr().solve(b);
    if ((g * p).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::runtime_error("solve_steady: stationarity residual too large");
    // stray negative round-off only
    p = p.cwiseMax(0.0);
    return p / p.sum();
}

Classification classify(const RateMatrix& k) {
    require_connected(k);
    const int n = k.size();
    const auto parent = spanning_tree(k, TreeStrategy::Bfs);
    Classification out;
    out.cls = SteadyStateClass::CurrentFree;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (!k.edge(a, b)) continue;
            if (parent[a] == b || parent[b] == a) continue;  // tree edge
            BasisCycle c;
            c.nodes = tree_cycle(parent, a, b);
            c.affinity = walk_affinity(c.nodes, k);
            out.cycles.push_back(c);
            if (std::abs(c.affinity) > kAffinityThreshold) {
                out.cls = SteadyStateClass::Ness;
                out.violations.push_back(c);
            }
        }
    }
    return out;
}

Eigen::VectorXd PotentialForm::populations() const {
    return (-F.array() - log_zf).exp();
}

PotentialForm potential_form(const RateMatrix& k, TreeStrategy strategy) {
    const auto cls = classify(k);
    if (cls.cls == SteadyStateClass::Ness)
        throw std::invalid_argument(
            "potential_form: rate matrix violates the loop condition (NESS)");
    const int n = k.size();
    const auto parent = spanning_tree(k, strategy);
    PotentialForm pf;
    pf.F = Eigen::VectorXd::Zero(n);
    // fill F in tree order; parent is acyclic so a fixed-point sweep works
    std::vector<bool> done(n, false);
    done[0] = true;
    for (int pass = 0, remaining = n - 1; remaining > 0 && pass < n; ++pass) {
        for (int v = 0; v < n; ++v) {
            if (done[v] || !done[parent[v]]) continue;
            pf.F(v) = pf.F(parent[v]) -
                      std::log(k.k(parent[v], v) / k.k(v, parent[v]));
            done[v] = true;
            --remaining;
        }
    }
    // path independence across non-tree edges
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b || !k.edge(a, b)) continue;
            if (parent[a] == b || parent[b] == a) continue;
            const double expect = pf.F(a) - std::log(k.k(a, b) / k.k(b, a));
            if (std::abs(pf.F(b) - expect) >
                1e-9 * std::max(1.0, pf.F.cwiseAbs().maxCoeff()))
                throw std::runtime_error(
                    "potential_form: path-dependent potentials on edge (" +
                    std::to_string(a) + "," + std::to_string(b) + ")");
        }
    // log-sum-exp; F(ground) = 0 keeps the max term at hand
    const double fmin = pf.F.minCoeff();
    pf.log_zf = -fmin + std::log((-(pf.F.array() - fmin)).exp().sum());
    return pf;
}

Eigen::MatrixXd currents(const Eigen::VectorXd& p, const RateMatrix& k) {
    const int n = k.size();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) j(a, b) = p(a) * k.k(a, b) - p(b) * k.k(b, a);
    return j;
}

double cycle_affinity_delta(const LevelSystem& sys, const BathParams& bath) {
    if (sys.size() != 3)
        throw std::invalid_argument("cycle_affinity_delta: need a three-level system");
    for (auto [i, j] : {std::pair{1, 0}, {2, 1}, {2, 0}})
        if (std::abs(sys.coupling()(i, j)) == 0.0)
            throw std::invalid_argument(
                "cycle_affinity_delta: all three couplings must be nonzero");
    const double w10 = sys.energies()(1) - sys.energies()(0);
    const double w21 = sys.energies()(2) - sys.energies()(1);
    const double w20 = sys.energies()(2) - sys.energies()(0);
    return beta_eff(w20, bath) * w20 - beta_eff(w21, bath) * w21 -
           beta_eff(w10, bath) * w10;
}

double affinity_small_u(double omega10, double omega21, double beta, double u) {
    const auto c = [beta](double w) {
        return w * w / std::tanh(0.5 * beta * w);
    };
    return beta * beta * u * u / 6.0 *
           (c(omega10) + c(omega21) - c(omega10 + omega21));
}

double entropy_production(const Eigen::VectorXd& p, const RateMatrix& k) {
    const int n = k.size();
    double sigma = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (!k.edge(a, b)) continue;
            const double j = p(a) * k.k(a, b) - p(b) * k.k(b, a);
            if (j == 0.0) continue;
            sigma += j * std::log((p(a) * k.k(a, b)) / (p(b) * k.k(b, a)));
        }
    return sigma;
}

SteadyStateReport steady_report(const RateMatrix& k) {
    SteadyStateReport rep;
    rep.populations = solve_steady(k);
    rep.classification = classify(k);
    rep.edge_currents = currents(rep.populations, k);
    rep.entropy_production = entropy_production(rep.populations, k);
    if (rep.classification.cls == SteadyStateClass::CurrentFree) {
        rep.has_potentials = true;
        rep.potentials = potential_form(k);
    }
    return rep;
}

}  // namespace mbath
