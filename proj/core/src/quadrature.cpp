#include "egm/quadrature.hpp"

#include <cmath>

#include "egm/errors.hpp"

namespace egm {

GaussLegendre::GaussLegendre(int n) {
    if (n < 1) throw Error("GaussLegendre: need at least one node");
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on P_n with the Chebyshev-like initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pn1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

SphereQuadrature::SphereQuadrature(int deg) : degree(deg) {
    if (deg < 1) throw Error("SphereQuadrature: degree must be >= 1");
    const GaussLegendre polar(deg);
    const int n_phi = 2 * deg;
    const double wphi = 2.0 * M_PI / n_phi;
    nodes.reserve(std::size_t(deg) * n_phi);
    weights.reserve(std::size_t(deg) * n_phi);
    for (int i = 0; i < deg; ++i) {
        const double mu = polar.nodes[i];  // cos(theta)
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = (j + 0.5) * wphi;
            nodes.push_back({s * std::cos(phi), s * std::sin(phi), mu});
            weights.push_back(polar.weights[i] * wphi);
        }
    }
}

} // namespace egm
