#pragma once

#include <vector>

#include "egm/biquat.hpp"

namespace egm {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int n);
};

/// Quadrature on the unit sphere: product of Gauss-Legendre in the polar
/// cosine (degree points) and a uniform trapezoid in azimuth (2*degree
/// points). Weights sum to 4*pi; exact for spherical harmonics up to order
/// ~2*degree-1. This is the discrete carrier of the light-cone simple layer.
struct SphereQuadrature {
    std::vector<Vec3> nodes;      // unit vectors
    std::vector<double> weights;  // sum = 4*pi

    explicit SphereQuadrature(int degree);
    int degree = 0;
    std::size_t size() const { return nodes.size(); }
};

} // namespace egm
