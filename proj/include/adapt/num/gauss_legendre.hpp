#pragma once
#include <cstddef>
#include <vector>

namespace adapt::num {

struct GaussLegendre {
    std::vector<double> x;  // nodes on (-1, 1)
    std::vector<double> w;
};

// Nodes/weights for n-point Gauss-Legendre, cached per n.
const GaussLegendre& gauss_legendre(std::size_t n);

}  // namespace adapt::num
