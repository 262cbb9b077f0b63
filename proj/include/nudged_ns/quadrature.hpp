#pragma once

#include <array>
#include <vector>

namespace nudged_ns {

/// Rule on the reference triangle. Points are barycentric coordinates and the
/// weights sum to one; multiply by the cell area at use.
struct Quadrature {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// 7-point rule, exact through degree 5. Used for all assembly.
const Quadrature& assembly_rule();

/// Collapsed Gauss-Legendre rule exact through degree 10. Used for error
/// norms and force evaluation.
const Quadrature& accurate_rule();

/// Collapsed (Duffy) tensor Gauss-Legendre rule with n points per direction,
/// exact through degree 2n - 2.
Quadrature collapsed_gauss(int n);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace nudged_ns
