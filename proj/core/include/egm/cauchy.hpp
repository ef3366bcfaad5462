#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "egm/grid.hpp"
#include "egm/quadrature.hpp"

namespace egm {

using FieldFn = std::function<Biquaternion(double, const Vec3&)>;
using SpatialFn = std::function<Biquaternion(const Vec3&)>;

/// Source/data bundle for the Cauchy formulas: right-hand side G(tau, x),
/// initial data K0(x), and a radius bounding their spatial support (used only
/// to skip empty quadrature, infinity is fine).
struct SourceSpec {
    FieldFn source;    // null means G = 0
    SpatialFn initial; // null means K0 = 0
    double support_radius = std::numeric_limits<double>::infinity();
};

/// Knobs for the quadrature-backed solvers. delta = 0 picks the finite
/// difference step for the outer complex gradient automatically
/// (max of a grid-spacing hint and the quadrature noise floor^(1/3)).
struct SolverConfig {
    int sphere_degree = 8;
    int radial_shells = 8;
    double delta = 0.0;
    double delta_hint = 0.0;  // grid spacing hint for the auto rule
    double tol = 1e-8;
    int max_iter = 40;
    double omega = 1.0;
    double divergence_bound = 1e8;
    std::uint64_t budget = 4'000'000'000ULL;  // integrand evaluations
};

/// tau^-1 * surface integral of f over the sphere ||y - x|| = radius,
/// approximated as radius * sum_i w_i f(x + radius n_i). Returns 0 at
/// radius = 0 (the 4*pi*0*f(x) limit convention).
Biquaternion sphere_mean(const SpatialFn& f, const Vec3& center, double radius,
                         const SphereQuadrature& q);

/// Retarded cone integral (4 pi)^-1 int_{r<=tau} G(tau - r, y)/r dV(y),
/// by Gauss-Legendre radial shells times the sphere quadrature. The 1/r
/// singularity cancels against the r^2 surface element.
Biquaternion convolve_wave(const FieldFn& G, double tau, const Vec3& x,
                           const SphereQuadrature& q, int radial_shells);

/// Kirchhoff-type solution of D^sign K = G with K(0,.) = K0: the outer
/// mutual gradient D^(-sign) is applied by finite differences of the
/// quadrature functionals, which also captures the moving-domain boundary
/// term. Constants solve D^+- K = 0 and propagate unchanged; this oracle
/// fixes the overall sign convention of the formula.
Biquaternion cauchy_solve(int sign, const SourceSpec& s, double tau, const Vec3& x,
                          const SphereQuadrature& q, const SolverConfig& cfg);

/// Maxwell Cauchy problem: D+ A = Theta, A(0,.) = A0.
Biquaternion maxwell_cauchy(const FieldFn& theta, const SpatialFn& A0, double tau,
                            const Vec3& x, const SphereQuadrature& q, const SolverConfig& cfg);

/// Free charge-current evolution under the inertia law D- Theta = 0.
Biquaternion free_theta_evolve(const SpatialFn& theta0, double tau, const Vec3& x,
                               const SphereQuadrature& q, const SolverConfig& cfg);

/// Evaluates cauchy_solve on every node of a grid (nodes are independent;
/// the quadrature accumulation order is fixed, so results do not depend on
/// the worker count).
BiquatField cauchy_solve_field(int sign, const SourceSpec& s, const Grid4& g,
                               const SphereQuadrature& q, const SolverConfig& cfg);

/// Picard iteration for the transformation integral equation
///   kappa Theta = D+{H F * psi} + F(0,.) *x psi + kappa D+{Theta0 *x psi},
///   F = Theta ∘ A_ext,
/// with under-relaxation omega. Stops when the sup change drops below tol or
/// at max_iter (reported, not an error); iterates exceeding the divergence
/// bound raise Divergence.
struct PicardResult {
    BiquatField theta;
    int iterations = 0;
    double final_delta = 0.0;
    bool converged = false;
    std::vector<double> deltas;
};

PicardResult transform_picard(const FieldFn& A_ext, const SpatialFn& theta0, const Grid4& g,
                              const SphereQuadrature& q, const SolverConfig& cfg, double kappa);

} // namespace egm
