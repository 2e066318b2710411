#pragma once

#include <vector>

namespace froc {

// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes from Newton iteration on the Legendre recurrence. The 201- and
// 402-point rules are cached; other orders are computed on each call.
const QuadratureRule& gauss_legendre_unit(int n);
QuadratureRule make_gauss_legendre_unit(int n);

}  // namespace froc
