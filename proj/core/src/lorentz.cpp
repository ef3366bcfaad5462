#include "egm/lorentz.hpp"

#include <cmath>
#include <random>

#include "egm/interp.hpp"
#include "egm/operators.hpp"
#include "egm/parallel.hpp"

namespace egm {

TransformParams TransformParams::boost(const Vec3& axis, double v) {
    if (!(std::abs(v) < 1.0)) throw Error("boost speed must satisfy |v| < 1");
    TransformParams p;
    p.e = axis;
    p.theta = 0.5 * std::atanh(v);
    p.phi = 0.0;
    return p;
}

TransformParams TransformParams::rotation(const Vec3& axis, double half_angle) {
    TransformParams p;
    p.e = axis;
    p.theta = 0.0;
    p.phi = half_angle;
    return p;
}

LorentzElement::LorentzElement(const TransformParams& p) : params_(p) {
    const double elen = norm(p.e);
    if (std::abs(elen - 1.0) > 1e-10)
        throw BadUnitVector("transform axis must be a unit vector, |e| = " + std::to_string(elen));
    const Complex arg(p.theta, -p.phi);
    const Complex ch = std::cosh(arg);
    const Complex sh = std::sinh(arg);
    const Vec3c ie{IMAG_UNIT * Complex(p.e.x), IMAG_UNIT * Complex(p.e.y),
                   IMAG_UNIT * Complex(p.e.z)};
    L_ = {ch, sh * ie};
    Lstar_ = star(L_);
    Lbar_ = bar(L_);
    Lbarstar_ = star(Lbar_);
}

LorentzElement make_transform(const TransformParams& p) { return LorentzElement(p); }

Biquaternion transform_event(const LorentzElement& L, const Biquaternion& Z) {
    return mul(mul(L.L(), Z), L.Lstar());
}

Biquaternion inverse_event(const LorentzElement& L, const Biquaternion& Zp) {
    return mul(mul(L.Lbar_star(), Zp), L.Lbar());
}

Biquaternion transform_field_value(const LorentzElement& L, const Biquaternion& K) {
    return mul(mul(L.Lbar_star(), K), L.L());
}

Biquaternion inverse_field_value(const LorentzElement& L, const Biquaternion& Kp) {
    return mul(mul(L.L(), Kp), L.Lbar_star());
}

Biquaternion event_sandwich(const LorentzElement& L, const Biquaternion& X) {
    return transform_event(L, X);
}

namespace {

double gamma_of(double v) { return 1.0 / std::sqrt(1.0 - v * v); }

} // namespace

Vec3c rel_strength(const Vec3c& A, const TransformParams& p) {
    const double v = p.velocity();
    const double g = gamma_of(v);
    const Vec3c e = p.e.complexified();
    const Complex eA = dot(e, A);
    return (A - eA * e) + (g * eA) * e;
}

void rel_charge_current(const Complex& rho, const Vec3c& J, const TransformParams& p,
                        Complex& rho_out, Vec3c& J_out) {
    const double v = p.velocity();
    const double g = gamma_of(v);
    const Vec3c e = p.e.complexified();
    const Complex eJ = dot(e, J);
    rho_out = g * (rho - v * eJ);
    J_out = (J - eJ * e) + (g * (eJ - v * rho)) * e;
}

void rel_force_power(const Complex& M, const Vec3c& F, const TransformParams& p,
                     Complex& M_out, Vec3c& F_out) {
    const double v = p.velocity();
    const double g = gamma_of(v);
    const Vec3c e = p.e.complexified();
    const Complex eF = dot(e, F);
    M_out = g * (M + v * eF);
    F_out = (F - eF * e) + (g * (eF - v * M)) * e;
}

FieldTransformResult transform_field(const LorentzElement& L, const BiquatField& src,
                                     const Grid4& target, int interp_order,
                                     bool require_full_coverage) {
    FieldTransformResult res;
    res.field = BiquatField(target, src.boundary_rings());
    res.covered.assign(target.node_count(), 0);

    std::vector<std::size_t> covered_count(std::size_t(target.nt), 0);
    parallel_for(std::size_t(target.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t itz = b; itz < e; ++itz) {
            const int it = int(itz);
            std::size_t hits = 0;
            for (int ix = 0; ix < target.nx; ++ix)
                for (int iy = 0; iy < target.ny; ++iy)
                    for (int iz = 0; iz < target.nz; ++iz) {
                        const Biquaternion Zp = event(target.tau(it), target.point(ix, iy, iz));
                        const Biquaternion Z = inverse_event(L, Zp);
                        const double tau = Z.s.real();
                        const Vec3 x{Z.v.x.imag(), Z.v.y.imag(), Z.v.z.imag()};
                        Biquaternion K;
                        if (interpolate(src, tau, x, interp_order, K)) {
                            res.field.at(it, ix, iy, iz) = transform_field_value(L, K);
                            res.covered[target.index(it, ix, iy, iz)] = 1;
                            ++hits;
                        }
                    }
            covered_count[itz] = hits;
        }
    });

    std::size_t covered = 0;
    for (std::size_t c : covered_count) covered += c;
    res.covered_fraction = double(covered) / double(target.node_count());
    if (require_full_coverage && covered != target.node_count())
        throw CoverageError("transform_field: preimage leaves the source grid, uncovered fraction " +
                                std::to_string(1.0 - res.covered_fraction),
                            1.0 - res.covered_fraction);
    return res;
}

CovarianceResidual covariance_residual(const LorentzElement& L, const BiquatField& A,
                                       const BiquatField& theta, const Grid4& target,
                                       int interp_order) {
    if (!A.grid().same_layout(theta.grid()))
        throw GridMismatch("covariance_residual: field grids differ");
    const FieldTransformResult Ap = transform_field(L, A, target, interp_order);
    const FieldTransformResult Tp = transform_field(L, theta, target, interp_order);
    if (Ap.covered_fraction == 0.0)
        throw CoverageError("covariance_residual: no target node is covered", 1.0);

    const BiquatField dAp = d_plus(Ap.field);

    // A node enters the residual when its whole D+ stencil was covered.
    auto covered_at = [&](int it, int ix, int iy, int iz) {
        return Ap.covered[target.index(it, ix, iy, iz)] != 0;
    };
    CovarianceResidual out;
    out.covered_fraction = Ap.covered_fraction;
    double sum = 0.0;
    std::size_t n = 0;
    for (int it = 1; it < target.nt - 1; ++it)
        for (int ix = 1; ix < target.nx - 1; ++ix)
            for (int iy = 1; iy < target.ny - 1; ++iy)
                for (int iz = 1; iz < target.nz - 1; ++iz) {
                    bool usable = covered_at(it, ix, iy, iz);
                    for (int d = -1; d <= 1 && usable; d += 2)
                        usable = covered_at(it + d, ix, iy, iz) && covered_at(it, ix + d, iy, iz) &&
                                 covered_at(it, ix, iy + d, iz) && covered_at(it, ix, iy, iz + d);
                    if (!usable) continue;
                    const double r =
                        norm(dAp.at(it, ix, iy, iz) - Tp.field.at(it, ix, iy, iz));
                    out.residual_max = std::max(out.residual_max, r);
                    sum += r;
                    ++n;
                }
    out.residual_mean = n ? sum / double(n) : 0.0;
    out.masked_nodes = n;
    return out;
}

ComponentFormulaAudit component_formula_audit(std::uint64_t seed, int count) {
    ComponentFormulaAudit audit;
    audit.seed = seed;
    audit.count = count;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> uv(0.0, 0.95);

    auto rand_unit = [&]() {
        Vec3 e;
        double n = 0.0;
        do {
            e = {u(rng), u(rng), u(rng)};
            n = norm(e);
        } while (n < 1e-3);
        return (1.0 / n) * e;
    };
    auto rand_vec = [&]() {
        return Vec3c{Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
    };

    for (int k = 0; k < count; ++k) {
        TransformParams p;
        p.e = rand_unit();
        const double v = uv(rng);
        p.theta = 0.5 * std::atanh(v);
        p.phi = 0.0;
        const LorentzElement L(p);
        TransformParams pinv = p;
        pinv.theta = -p.theta;
        const LorentzElement Linv(pinv);
        const double g = gamma_of(v);
        const Vec3c e = p.e.complexified();

        // strength formula
        {
            const Vec3c A = rand_vec();
            const Vec3c formula = rel_strength(A, p);
            const Biquaternion sand = event_sandwich(L, Biquaternion::vector(A));
            audit.strength_vs_event_vector =
                std::max(audit.strength_vs_event_vector, norm(Biquaternion::vector(formula - sand.v)));
            const Complex expected_scalar = -IMAG_UNIT * (v * g) * dot(e, A);
            audit.strength_scalar_term_gap =
                std::max(audit.strength_scalar_term_gap, std::abs(sand.s - expected_scalar));
        }

        // charge-current formulas
        {
            const Complex rho(u(rng), u(rng));
            const Vec3c J = rand_vec();
            Complex rho_p;
            Vec3c J_p;
            rel_charge_current(rho, J, p, rho_p, J_p);
            const Biquaternion formula{-IMAG_UNIT * rho_p, -J_p};
            const Biquaternion theta{-IMAG_UNIT * rho, -J};
            const Biquaternion sand = event_sandwich(L, theta);
            audit.charge_vs_event = std::max(audit.charge_vs_event, norm(formula - sand));
            const Biquaternion adj = transform_field_value(L, theta);
            audit.charge_vs_adjoint = std::max(audit.charge_vs_adjoint, norm(formula - adj));
        }

        // force-power formulas
        {
            const Complex M(u(rng), u(rng));
            const Vec3c F = rand_vec();
            Complex M_p;
            Vec3c F_p;
            rel_force_power(M, F, p, M_p, F_p);
            const Biquaternion fp{M, -IMAG_UNIT * F};
            const Biquaternion sand_fwd = event_sandwich(L, fp);
            const Biquaternion sand_inv = event_sandwich(Linv, fp);
            const Complex M_fwd = sand_fwd.s;
            const Complex M_inv = sand_inv.s;
            const Vec3c F_fwd = IMAG_UNIT * sand_fwd.v;  // vector part is -iF'
            const Vec3c F_inv = IMAG_UNIT * sand_inv.v;
            audit.power_vs_inverse_event = std::max(audit.power_vs_inverse_event, std::abs(M_p - M_inv));
            audit.force_vs_event =
                std::max(audit.force_vs_event, norm(Biquaternion::vector(F_p - F_fwd)));
            audit.power_vs_event = std::max(audit.power_vs_event, std::abs(M_p - M_fwd));
            audit.force_vs_inverse_event =
                std::max(audit.force_vs_inverse_event, norm(Biquaternion::vector(F_p - F_inv)));
        }
    }
    return audit;
}

} // namespace egm
