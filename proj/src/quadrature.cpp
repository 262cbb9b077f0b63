#include "nudged_ns/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace nudged_ns {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Map from [-1, 1] to [0, 1].
        nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
        weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

Quadrature collapsed_gauss(int n) {
    std::vector<double> s, ws;
    gauss_legendre(n, s, ws);
    Quadrature q;
    q.degree = 2 * n - 2;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // x = s_i, y = (1 - s_i) t_j with Jacobian (1 - s_i); reference area 1/2.
            const double x = s[static_cast<std::size_t>(i)];
            const double y = (1.0 - x) * s[static_cast<std::size_t>(j)];
            q.points.push_back({1.0 - x - y, x, y});
            q.weights.push_back(2.0 * ws[static_cast<std::size_t>(i)] * ws[static_cast<std::size_t>(j)] * (1.0 - x));
        }
    }
    return q;
}

const Quadrature& assembly_rule() {
    static const Quadrature rule = [] {
        const double r15 = std::sqrt(15.0);
        const double a1 = (6.0 - r15) / 21.0;
        const double b1 = (9.0 + 2.0 * r15) / 21.0;
        const double a2 = (6.0 + r15) / 21.0;
        const double b2 = (9.0 - 2.0 * r15) / 21.0;
        const double w1 = (155.0 - r15) / 1200.0;
        const double w2 = (155.0 + r15) / 1200.0;
        Quadrature q;
        q.degree = 5;
        q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                    {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                    {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
        q.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
        return q;
    }();
    return rule;
}

const Quadrature& accurate_rule() {
    static const Quadrature rule = collapsed_gauss(6);
    return rule;
}

} // namespace nudged_ns
