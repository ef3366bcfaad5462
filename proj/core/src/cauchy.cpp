#include "egm/cauchy.hpp"

#include <atomic>
#include <cmath>

#include "egm/interp.hpp"
#include "egm/operators.hpp"
#include "egm/parallel.hpp"

namespace egm {

namespace {

constexpr double FOUR_PI = 4.0 * M_PI;

// Noise floor of the double-precision quadrature sums, cube-rooted for the
// central-difference step rule.
const double NOISE_CBRT = std::cbrt(1e-13);

double pick_delta(const SolverConfig& cfg, double tau) {
    const double scale = std::max(1.0, std::abs(tau));
    if (cfg.delta > 0.0) {
        if (cfg.delta < 1e3 * 2.2e-16 * scale)
            throw StepTooSmall("finite-difference step " + std::to_string(cfg.delta) +
                               " is below the quadrature noise floor");
        return cfg.delta;
    }
    return std::max(cfg.delta_hint, NOISE_CBRT * scale);
}

} // namespace

Biquaternion sphere_mean(const SpatialFn& f, const Vec3& center, double radius,
                         const SphereQuadrature& q) {
    if (!(radius > 0.0) || !f) return Biquaternion{};
    Biquaternion acc{};
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec3 y{center.x + radius * q.nodes[i].x,
                     center.y + radius * q.nodes[i].y,
                     center.z + radius * q.nodes[i].z};
        acc += q.weights[i] * f(y);
    }
    return radius * acc;
}

namespace {

Biquaternion cone_integral(const FieldFn& G, double tau, const Vec3& x,
                           const SphereQuadrature& q, const GaussLegendre& radial,
                           std::uint64_t* evals) {
    if (!(tau > 0.0) || !G) return Biquaternion{};
    Biquaternion acc{};
    for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
        const double r = 0.5 * tau * (radial.nodes[k] + 1.0);
        const double wr = 0.5 * tau * radial.weights[k] * r;  // r from dV/r
        Biquaternion shell{};
        const double sigma = tau - r;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Vec3 y{x.x + r * q.nodes[i].x, x.y + r * q.nodes[i].y, x.z + r * q.nodes[i].z};
            shell += q.weights[i] * G(sigma, y);
        }
        acc += wr * shell;
    }
    if (evals) *evals += radial.nodes.size() * q.size();
    return (1.0 / FOUR_PI) * acc;
}

// Combined quadrature functional whose outer mutual gradient yields the
// Cauchy solution: cone integral of G plus the spherical layer of K0.
struct CauchyFunctional {
    const SourceSpec* spec;
    const SphereQuadrature* q;
    const GaussLegendre* radial;
    std::uint64_t* evals;

    Biquaternion operator()(double tau, const Vec3& x) const {
        Biquaternion val = cone_integral(spec->source, tau, x, *q, *radial, evals);
        if (spec->initial && tau > 0.0) {
            val += (1.0 / FOUR_PI) * sphere_mean(spec->initial, x, tau, *q);
            if (evals) *evals += q->size();
        }
        return val;
    }
};

// Outer D^sign via central differences of a functional; one-sided near tau=0
// (the functionals live on tau >= 0).
template <typename Fn>
Biquaternion fd_gradient(const Fn& f, double tau, const Vec3& x, double delta, int sign) {
    const double inv2d = 0.5 / delta;
    Biquaternion dtau;
    if (tau - delta >= 0.0) {
        dtau = inv2d * (f(tau + delta, x) - f(tau - delta, x));
    } else {
        dtau = inv2d * (-3.0 * f(tau, x) + 4.0 * f(tau + delta, x) - f(tau + 2.0 * delta, x));
    }
    auto shift = [&x](int axis, double d) {
        Vec3 y = x;
        if (axis == 0) y.x += d;
        if (axis == 1) y.y += d;
        if (axis == 2) y.z += d;
        return y;
    };
    const Biquaternion dx = inv2d * (f(tau, shift(0, delta)) - f(tau, shift(0, -delta)));
    const Biquaternion dy = inv2d * (f(tau, shift(1, delta)) - f(tau, shift(1, -delta)));
    const Biquaternion dz = inv2d * (f(tau, shift(2, delta)) - f(tau, shift(2, -delta)));
    return assemble_gradient(dtau, dx, dy, dz, sign);
}

} // namespace

Biquaternion convolve_wave(const FieldFn& G, double tau, const Vec3& x,
                           const SphereQuadrature& q, int radial_shells) {
    const GaussLegendre radial(radial_shells);
    return cone_integral(G, tau, x, q, radial, nullptr);
}

Biquaternion cauchy_solve(int sign, const SourceSpec& s, double tau, const Vec3& x,
                          const SphereQuadrature& q, const SolverConfig& cfg) {
    if (!(tau >= 0.0)) throw Error("cauchy_solve: tau must be >= 0");
    const GaussLegendre radial(cfg.radial_shells);
    std::uint64_t evals = 0;
    CauchyFunctional fun{&s, &q, &radial, &evals};
    const double delta = pick_delta(cfg, tau);
    const Biquaternion out = fd_gradient(fun, tau, x, delta, -sign);
    if (evals > cfg.budget)
        throw QuadratureBudgetExceeded("cauchy_solve: " + std::to_string(evals) +
                                       " integrand evaluations exceed the budget");
    return out;
}

Biquaternion maxwell_cauchy(const FieldFn& theta, const SpatialFn& A0, double tau,
                            const Vec3& x, const SphereQuadrature& q, const SolverConfig& cfg) {
    SourceSpec s;
    s.source = theta;
    s.initial = A0;
    return cauchy_solve(+1, s, tau, x, q, cfg);
}

Biquaternion free_theta_evolve(const SpatialFn& theta0, double tau, const Vec3& x,
                               const SphereQuadrature& q, const SolverConfig& cfg) {
    SourceSpec s;
    s.initial = theta0;
    return cauchy_solve(-1, s, tau, x, q, cfg);
}

BiquatField cauchy_solve_field(int sign, const SourceSpec& s, const Grid4& g,
                               const SphereQuadrature& q, const SolverConfig& cfg) {
    const GaussLegendre radial(cfg.radial_shells);
    BiquatField out(g);
    std::atomic<std::uint64_t> total_evals{0};
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        std::uint64_t local = 0;
        CauchyFunctional fun{&s, &q, &radial, &local};
        for (std::size_t itz = b; itz < e; ++itz) {
            const int it = int(itz);
            const double tau = g.tau(it);
            const double delta = pick_delta(cfg, tau);
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        out.at(it, ix, iy, iz) =
                            fd_gradient(fun, tau, g.point(ix, iy, iz), delta, -sign);
                        if (local > cfg.budget || total_evals.load(std::memory_order_relaxed) > cfg.budget)
                            throw QuadratureBudgetExceeded(
                                "cauchy_solve_field: integrand evaluation budget exceeded");
                    }
        }
        total_evals.fetch_add(local, std::memory_order_relaxed);
    });
    return out;
}

PicardResult transform_picard(const FieldFn& A_ext, const SpatialFn& theta0, const Grid4& g,
                              const SphereQuadrature& q, const SolverConfig& cfg, double kappa) {
    if (!(kappa > 0.0)) throw Error("transform_picard: kappa must be > 0");
    if (g.tau0 != 0.0)
        throw Error("transform_picard: the grid must start at tau = 0 (the Cauchy data live there)");
    PicardResult res;

    // Free-evolution term D+{Theta0 *x psi}; iteration independent.
    SourceSpec free_spec;
    free_spec.initial = theta0;
    const BiquatField base = cauchy_solve_field(-1, free_spec, g, q, cfg);

    res.theta = base;
    const double tau_lo = g.tau0;
    const double tau_hi = g.tau(g.nt - 1);
    const GaussLegendre radial(cfg.radial_shells);
    const double scale0 = interior_max_norm(base) + 1.0;

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const BiquatField& cur = res.theta;
        // F = Theta ∘ A_ext with Theta interpolated on the grid; tau is
        // clamped into the stored range (O(delta^2) effect at the top slice)
        // and the field is extended by zero outside the spatial box, which is
        // exact for compactly supported charge-currents.
        FieldFn force = [&](double sigma, const Vec3& y) {
            const double sc = std::min(std::max(sigma, tau_lo), tau_hi);
            Biquaternion th;
            if (!interpolate(cur, sc, y, 1, th)) return Biquaternion{};
            return mul(th, A_ext(sigma, y));
        };

        BiquatField next(g);
        parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
            std::uint64_t local = 0;
            SourceSpec fs;
            fs.source = force;
            CauchyFunctional fun{&fs, &q, &radial, &local};
            for (std::size_t itz = b; itz < e; ++itz) {
                const int it = int(itz);
                const double tau = g.tau(it);
                const double delta = pick_delta(cfg, tau);
                for (int ix = 0; ix < g.nx; ++ix)
                    for (int iy = 0; iy < g.ny; ++iy)
                        for (int iz = 0; iz < g.nz; ++iz) {
                            const Biquaternion volume =
                                fd_gradient(fun, tau, g.point(ix, iy, iz), delta, +1);
                            next.at(it, ix, iy, iz) =
                                (1.0 / kappa) * volume + base.at(it, ix, iy, iz);
                        }
            }
        });

        double delta_inf = 0.0;
        double next_inf = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = cfg.omega * next[i] + (1.0 - cfg.omega) * cur[i];
            delta_inf = std::max(delta_inf, norm(next[i] - cur[i]));
            next_inf = std::max(next_inf, norm(next[i]));
        }
        res.theta = std::move(next);
        res.iterations = iter;
        res.final_delta = delta_inf;
        res.deltas.push_back(delta_inf);
        if (next_inf > cfg.divergence_bound * scale0)
            throw Divergence("transform_picard: iterate norm " + std::to_string(next_inf) +
                             " exceeds the divergence bound after " + std::to_string(iter) +
                             " iterations");
        if (delta_inf < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

} // namespace egm
