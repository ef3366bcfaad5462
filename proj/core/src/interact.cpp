#include "egm/interact.hpp"

#include <cmath>

#include "egm/interp.hpp"
#include "egm/operators.hpp"
#include "egm/parallel.hpp"

namespace egm {

ForcePower force_power(const Biquaternion& theta, const Biquaternion& a_ext) {
    const Biquaternion prod = mul(theta, a_ext);
    ForcePower fp;
    fp.M = prod.s;
    fp.F = IMAG_UNIT * prod.v;  // vector part is -iF
    fp.FH = {fp.F.x.real(), fp.F.y.real(), fp.F.z.real()};
    fp.FE = {fp.F.x.imag(), fp.F.y.imag(), fp.F.z.imag()};
    return fp;
}

namespace {

void require_same_grid(const Grid4& a, const Grid4& b, const char* what) {
    if (!a.same_layout(b)) throw GridMismatch(std::string(what) + ": grids differ");
}

} // namespace

BiquatField force_power_field(const ChargeCurrent& theta, const FieldStrength& a_ext) {
    require_same_grid(theta.grid(), a_ext.grid(), "force_power_field");
    const BiquatField& tf = theta.biquat();
    const BiquatField& af = a_ext.biquat();
    BiquatField out(tf.grid(), std::max(tf.boundary_rings(), af.boundary_rings()));
    parallel_for(tf.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = mul(tf[i], af[i]);
    });
    return out;
}

BiquatField action_reaction_residual(const ChargeCurrent& theta1, const FieldStrength& a1,
                                     const ChargeCurrent& theta2, const FieldStrength& a2) {
    require_same_grid(theta1.grid(), a2.grid(), "action_reaction_residual");
    require_same_grid(theta2.grid(), a1.grid(), "action_reaction_residual");
    const BiquatField& t1 = theta1.biquat();
    const BiquatField& t2 = theta2.biquat();
    const BiquatField& f1 = a1.biquat();
    const BiquatField& f2 = a2.biquat();
    BiquatField out(t1.grid());
    parallel_for(t1.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = mul(t1[i], f2[i]) + mul(t2[i], f1[i]);
    });
    return out;
}

BiquatField second_law_residual(const ChargeCurrent& theta, const FieldStrength& a_ext,
                                double kappa, SecondLawOperator op) {
    require_same_grid(theta.grid(), a_ext.grid(), "second_law_residual");
    BiquatField grad = (op == SecondLawOperator::dminus) ? d_minus(theta.biquat())
                                                         : d_plus(theta.biquat());
    const BiquatField& tf = theta.biquat();
    const BiquatField& af = a_ext.biquat();
    const double sign = (op == SecondLawOperator::dminus) ? -1.0 : 1.0;
    parallel_for(grad.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            grad[i] = kappa * grad[i] + sign * mul(tf[i], af[i]);
    });
    return grad;
}

BiquatField inertia_residual(const ChargeCurrent& theta) { return d_minus(theta.biquat()); }

InertiaComponentReport inertia_component_report(const BiquatField& r,
                                                const MediumConstants& m) {
    const Grid4& g = r.grid();
    InertiaComponentReport rep;
    auto lo = [&](int n) { return std::min(r.boundary_rings(), std::max(0, (n - 1) / 2)); };
    for (int it = lo(g.nt); it < g.nt - lo(g.nt); ++it)
        for (int ix = lo(g.nx); ix < g.nx - lo(g.nx); ++ix)
            for (int iy = lo(g.ny); iy < g.ny - lo(g.ny); ++iy)
                for (int iz = lo(g.nz); iz < g.nz - lo(g.nz); ++iz) {
                    const Biquaternion& R = r.at(it, ix, iy, iz);
                    const Complex is = IMAG_UNIT * R.s;  // = d_tau rho + div J residual
                    rep.charge_electric = std::max(rep.charge_electric,
                                                   std::abs(is.real()) / m.sqrt_mu);
                    rep.charge_gravimag = std::max(rep.charge_gravimag,
                                                   std::abs(is.imag()) / m.sqrt_eps);
                    const Vec3 re{R.v.x.real(), R.v.y.real(), R.v.z.real()};
                    const Vec3 im{R.v.x.imag(), R.v.y.imag(), R.v.z.imag()};
                    rep.current_electric = std::max(rep.current_electric, norm(re) / m.sqrt_mu);
                    rep.current_gravimag = std::max(rep.current_gravimag, norm(im) / m.sqrt_eps);
                }
    return rep;
}

ScalarField scalar_field_source_residual(const ScalarField& a, const ScalarField& M,
                                         double kappa) {
    if (!a.grid().same_layout(M.grid()))
        throw GridMismatch("scalar_field_source_residual: grids differ");
    const Grid4& g = a.grid();
    g.require_min_extent(3);
    BiquatField carrier(g);
    for (std::size_t i = 0; i < carrier.size(); ++i) carrier[i] = Biquaternion::scalar(a[i]);
    const BiquatField boxed = box_direct(carrier);
    ScalarField r(g, std::max(a.boundary_rings(), M.boundary_rings()) + 1);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = -IMAG_UNIT * kappa * boxed[i].s - M[i];
    return r;
}

ThetaEnergy theta_energy(const ChargeCurrent& theta, const MediumConstants&) {
    const BiquatField& tf = theta.biquat();
    const Grid4& g = tf.grid();
    g.require_min_extent(3);
    ThetaEnergy out{RealField(g), RealField(g), Vec3Field(g), RealField(g)};

    // carrier: s = rho, v = P_J (for the grad/div stencils of U)
    BiquatField carrier(g);
    for (std::size_t i = 0; i < tf.size(); ++i) {
        const Complex rho = IMAG_UNIT * tf[i].s;
        const Vec3c J = -tf[i].v;
        out.W_theta.data[i] = 0.5 * std::norm(rho);
        out.Q.data[i] = 0.5 * norm_sq(J);
        const Vec3c pj = (0.5 * IMAG_UNIT) * cross(J, conj(J));
        out.P_J.data[i] = {pj.x.real(), pj.y.real(), pj.z.real()};
        carrier[i] = {rho, out.P_J.data[i].complexified()};
    }
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t itz = b; itz < e; ++itz) {
            const int it = int(itz);
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        const NodeDerivatives d = node_derivatives(carrier, it, ix, iy, iz);
                        const double div_pj =
                            d.dx.v.x.real() + d.dy.v.y.real() + d.dz.v.z.real();
                        const Vec3c grad_rho{d.dx.s, d.dy.s, d.dz.s};
                        const Vec3c J = -tf.at(it, ix, iy, iz).v;
                        out.U.at(it, ix, iy, iz) =
                            div_pj - dot(grad_rho, conj(J)).real();
                    }
        }
    });
    return out;
}

RealField first_law_residual(const ChargeCurrent& theta, const BiquatField& force_power,
                             double kappa, const MediumConstants& m,
                             FirstLawOrientation orient) {
    require_same_grid(theta.grid(), force_power.grid(), "first_law_residual");
    const Grid4& g = theta.grid();
    g.require_min_extent(3);
    const BiquatField& tf = theta.biquat();

    // carrier: s = Q, v = P_J; second carrier piggybacks rho in the force loop
    BiquatField carrier(g);
    BiquatField rho_carrier(g);
    for (std::size_t i = 0; i < tf.size(); ++i) {
        const Complex rho = IMAG_UNIT * tf[i].s;
        const Vec3c J = -tf[i].v;
        const Vec3c pj = (0.5 * IMAG_UNIT) * cross(J, conj(J));
        carrier[i] = {Complex(0.5 * norm_sq(J)),
                      Vec3c{Complex(pj.x.real()), Complex(pj.y.real()), Complex(pj.z.real())}};
        rho_carrier[i] = Biquaternion::scalar(rho);
    }

    const double force_sign = (orient == FirstLawOrientation::algebra) ? 1.0 : -1.0;
    RealField r(g);
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t itz = b; itz < e; ++itz) {
            const int it = int(itz);
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        const NodeDerivatives d = node_derivatives(carrier, it, ix, iy, iz);
                        const double dtau_Q = d.dtau.s.real();
                        const double div_pj =
                            d.dx.v.x.real() + d.dy.v.y.real() + d.dz.v.z.real();
                        const NodeDerivatives dr = node_derivatives(rho_carrier, it, ix, iy, iz);
                        const Vec3c grad_rho{dr.dx.s, dr.dy.s, dr.dz.s};
                        const Vec3c J = -tf.at(it, ix, iy, iz).v;
                        const Vec3c F = IMAG_UNIT * force_power.at(it, ix, iy, iz).v;
                        const double lhs =
                            kappa * (dtau_Q - div_pj + dot(grad_rho, conj(J)).real());
                        r.at(it, ix, iy, iz) =
                            lhs + force_sign * dot(F, conj(J)).imag();
                    }
        }
    });
    (void)m;
    return r;
}

namespace {

// trapezoid weight for a node inside [lo, hi]
double trap_w(int i, int lo, int hi) { return (i == lo || i == hi) ? 0.5 : 1.0; }

void check_region(const Grid4& g, const Region& rg) {
    if (rg.it0 < 0 || rg.it1 >= g.nt || rg.it0 > rg.it1 || rg.ix0 < 0 || rg.ix1 >= g.nx ||
        rg.ix0 > rg.ix1 || rg.iy0 < 0 || rg.iy1 >= g.ny || rg.iy0 > rg.iy1 || rg.iz0 < 0 ||
        rg.iz1 >= g.nz || rg.iz0 > rg.iz1)
        throw RegionOutsideGrid("first_law_integral: region is not inside the grid");
}

} // namespace

FirstLawBalance first_law_integral(const ChargeCurrent& theta, const BiquatField& force_power,
                                   double kappa, const MediumConstants& m, const Region& rg) {
    require_same_grid(theta.grid(), force_power.grid(), "first_law_integral");
    const Grid4& g = theta.grid();
    check_region(g, rg);
    const BiquatField& tf = theta.biquat();
    const double h3 = g.h * g.h * g.h;
    const double h2 = g.h * g.h;

    auto Q_at = [&](int it, int ix, int iy, int iz) {
        return 0.5 * norm_sq(tf.at(it, ix, iy, iz).v);
    };
    auto PJ_at = [&](int it, int ix, int iy, int iz) {
        const Vec3c J = -tf.at(it, ix, iy, iz).v;
        const Vec3c pj = (0.5 * IMAG_UNIT) * cross(J, conj(J));
        return Vec3{pj.x.real(), pj.y.real(), pj.z.real()};
    };

    FirstLawBalance bal;

    // volume integral of Q(t1) - Q(t0), trapezoid weights on the box faces
    for (int ix = rg.ix0; ix <= rg.ix1; ++ix)
        for (int iy = rg.iy0; iy <= rg.iy1; ++iy)
            for (int iz = rg.iz0; iz <= rg.iz1; ++iz) {
                const double w = trap_w(ix, rg.ix0, rg.ix1) * trap_w(iy, rg.iy0, rg.iy1) *
                                 trap_w(iz, rg.iz0, rg.iz1);
                bal.q_difference += w * h3 * (Q_at(rg.it1, ix, iy, iz) - Q_at(rg.it0, ix, iy, iz));
            }

    // rho carrier for grad rho
    BiquatField rho_carrier(g);
    for (std::size_t i = 0; i < tf.size(); ++i)
        rho_carrier[i] = Biquaternion::scalar(IMAG_UNIT * tf[i].s);

    for (int it = rg.it0; it <= rg.it1; ++it) {
        const double wt = trap_w(it, rg.it0, rg.it1) * g.dtau;

        // boundary flux of P_J over the six faces, outward normals
        double flux = 0.0;
        auto face_xy = [&](int iz, double nz) {
            for (int ix = rg.ix0; ix <= rg.ix1; ++ix)
                for (int iy = rg.iy0; iy <= rg.iy1; ++iy) {
                    const double w = trap_w(ix, rg.ix0, rg.ix1) * trap_w(iy, rg.iy0, rg.iy1);
                    flux += w * h2 * nz * PJ_at(it, ix, iy, iz).z;
                }
        };
        auto face_xz = [&](int iy, double ny) {
            for (int ix = rg.ix0; ix <= rg.ix1; ++ix)
                for (int iz = rg.iz0; iz <= rg.iz1; ++iz) {
                    const double w = trap_w(ix, rg.ix0, rg.ix1) * trap_w(iz, rg.iz0, rg.iz1);
                    flux += w * h2 * ny * PJ_at(it, ix, iy, iz).y;
                }
        };
        auto face_yz = [&](int ix, double nx) {
            for (int iy = rg.iy0; iy <= rg.iy1; ++iy)
                for (int iz = rg.iz0; iz <= rg.iz1; ++iz) {
                    const double w = trap_w(iy, rg.iy0, rg.iy1) * trap_w(iz, rg.iz0, rg.iz1);
                    flux += w * h2 * nx * PJ_at(it, ix, iy, iz).x;
                }
        };
        face_yz(rg.ix1, 1.0);
        face_yz(rg.ix0, -1.0);
        face_xz(rg.iy1, 1.0);
        face_xz(rg.iy0, -1.0);
        face_xy(rg.iz1, 1.0);
        face_xy(rg.iz0, -1.0);
        bal.flux += wt * flux;

        for (int ix = rg.ix0; ix <= rg.ix1; ++ix)
            for (int iy = rg.iy0; iy <= rg.iy1; ++iy)
                for (int iz = rg.iz0; iz <= rg.iz1; ++iz) {
                    const double w = trap_w(ix, rg.ix0, rg.ix1) * trap_w(iy, rg.iy0, rg.iy1) *
                                     trap_w(iz, rg.iz0, rg.iz1) * wt * h3;
                    const NodeDerivatives dr = node_derivatives(rho_carrier, it, ix, iy, iz);
                    const Vec3c grad_rho{dr.dx.s, dr.dy.s, dr.dz.s};
                    const Vec3c J = -tf.at(it, ix, iy, iz).v;
                    bal.grad_term += w * dot(grad_rho, conj(J)).real();
                    const Vec3c F = IMAG_UNIT * force_power.at(it, ix, iy, iz).v;
                    bal.force_term += w * dot(F, conj(J)).imag();
                }
    }

    bal.defect = bal.q_difference - bal.flux + bal.grad_term + bal.force_term / kappa;
    (void)m;
    return bal;
}

std::string to_string(EnergyClass c) {
    switch (c) {
        case EnergyClass::release: return "release";
        case EnergyClass::absorb: return "absorb";
        case EnergyClass::conserve: return "conserve";
        case EnergyClass::exchange: return "exchange";
    }
    return "conserve";
}

InteractionEnergy interaction_energy(const std::vector<const ChargeCurrent*>& fields) {
    if (fields.empty()) throw Error("interaction_energy: no fields");
    const Grid4& g = fields[0]->grid();
    for (const auto* f : fields) require_same_grid(g, f->grid(), "interaction_energy");
    const std::size_t n = fields[0]->biquat().size();
    const int N = int(fields.size());

    InteractionEnergy out;
    out.dW = RealField(g);
    out.dP.assign(n, Vec3c{});
    out.node_class.assign(n, EnergyClass::conserve);

    // classification tolerance: 1e-9 * max nodal ||sum Theta||^2
    double max_sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Biquaternion sum{};
        for (const auto* f : fields) sum += f->biquat()[i];
        max_sum_sq = std::max(max_sum_sq, norm_sq(sum));
    }
    out.tolerance = 1e-9 * max_sum_sq;

    double dW_int = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Biquaternion dxi{};
        for (int k = 0; k < N; ++k)
            for (int l = k + 1; l < N; ++l) {
                const Biquaternion& tk = fields[k]->biquat()[i];
                const Biquaternion& tl = fields[l]->biquat()[i];
                dxi += mul(tk, star(tl)) + mul(tl, star(tk));
            }
        out.dW.data[i] = dxi.s.real();
        out.dP[i] = -IMAG_UNIT * dxi.v;
        dW_int += dxi.s.real();

        if (dxi.s.real() > out.tolerance)
            out.node_class[i] = EnergyClass::release;
        else if (dxi.s.real() < -out.tolerance)
            out.node_class[i] = EnergyClass::absorb;
        else if (norm(dxi) <= out.tolerance)
            out.node_class[i] = EnergyClass::conserve;
        else
            out.node_class[i] = EnergyClass::exchange;
    }
    out.dW_integral = dW_int * g.h * g.h * g.h * g.dtau;

    const double vol_tol = out.tolerance * double(n) * g.h * g.h * g.h * g.dtau;
    if (out.dW_integral > vol_tol)
        out.aggregate = EnergyClass::release;
    else if (out.dW_integral < -vol_tol)
        out.aggregate = EnergyClass::absorb;
    else {
        double max_dxi = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            max_dxi = std::max(max_dxi,
                               std::sqrt(out.dW.data[i] * out.dW.data[i] + norm_sq(out.dP[i])));
        out.aggregate = (max_dxi <= out.tolerance) ? EnergyClass::conserve : EnergyClass::exchange;
    }
    return out;
}

namespace {

// Spatial quaternion gradient (0 +- i nabla)∘theta on one z-fastest slice.
struct SliceShape {
    int nx, ny, nz;
    double h;
    std::size_t idx(int ix, int iy, int iz) const {
        return (std::size_t(ix) * ny + iy) * nz + iz;
    }
};

Biquaternion slice_deriv(const std::vector<Biquaternion>& s, const SliceShape& sh, int axis,
                         int ix, int iy, int iz) {
    const double inv2h = 0.5 / sh.h;
    auto get = [&](int k) {
        if (axis == 0) return s[sh.idx(k, iy, iz)];
        if (axis == 1) return s[sh.idx(ix, k, iz)];
        return s[sh.idx(ix, iy, k)];
    };
    const int i = (axis == 0) ? ix : (axis == 1) ? iy : iz;
    const int n = (axis == 0) ? sh.nx : (axis == 1) ? sh.ny : sh.nz;
    if (i == 0) return inv2h * (-3.0 * get(0) + 4.0 * get(1) - get(2));
    if (i == n - 1) return inv2h * (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3));
    return inv2h * (get(i + 1) - get(i - 1));
}

void spatial_gradient_slice(const std::vector<Biquaternion>& s, const SliceShape& sh, int sign,
                            std::vector<Biquaternion>& out) {
    const Complex is = IMAG_UNIT * double(sign);
    parallel_for(std::size_t(sh.nx), [&](std::size_t b, std::size_t e) {
        for (std::size_t ixz = b; ixz < e; ++ixz) {
            const int ix = int(ixz);
            for (int iy = 0; iy < sh.ny; ++iy)
                for (int iz = 0; iz < sh.nz; ++iz) {
                    const Biquaternion dx = slice_deriv(s, sh, 0, ix, iy, iz);
                    const Biquaternion dy = slice_deriv(s, sh, 1, ix, iy, iz);
                    const Biquaternion dz = slice_deriv(s, sh, 2, ix, iy, iz);
                    const Complex div_v = dx.v.x + dy.v.y + dz.v.z;
                    const Vec3c grad_s{dx.s, dy.s, dz.s};
                    const Vec3c rot_v{dy.v.z - dz.v.y, dz.v.x - dx.v.z, dx.v.y - dy.v.x};
                    out[sh.idx(ix, iy, iz)] = {-is * div_v, is * grad_s + is * rot_v};
                }
        }
    });
}

} // namespace

void multi_field_step(std::vector<std::vector<Biquaternion>>& theta_slices,
                      const Grid4& spatial, double tau,
                      const std::vector<FieldFn>& strengths, const DynamicsConfig& cfg) {
    const int N = int(theta_slices.size());
    if (N < 2) throw Error("multi_field_step: need at least two interacting fields");
    if (int(strengths.size()) != N) throw Error("multi_field_step: one strength per field");
    if (spatial.cfl_ratio() > cfg.cfl_bound + 1e-12)
        throw CFLViolation("dtau/h = " + std::to_string(spatial.cfl_ratio()) +
                           " exceeds the bound " + std::to_string(cfg.cfl_bound));
    const SliceShape sh{spatial.nx, spatial.ny, spatial.nz, spatial.h};
    const std::size_t sn = spatial.spatial_count();
    const double kappa = cfg.kappa;
    const int op_sign = (cfg.op == SecondLawOperator::dminus) ? -1 : +1;
    // dminus: dtheta/dtau = +kappa^-1 theta∘A - Dsp(-); dplus: -kappa^-1 theta∘A - Dsp(+)
    const double force_fac = (cfg.op == SecondLawOperator::dminus) ? 1.0 / kappa : -1.0 / kappa;

    std::vector<Biquaternion> dsp(sn), stage(sn);
    std::vector<Biquaternion> k1(sn), k2(sn), k3(sn), k4(sn);

    auto rhs = [&](const std::vector<Biquaternion>& th, int field, double t,
                   std::vector<Biquaternion>& out) {
        spatial_gradient_slice(th, sh, op_sign, dsp);
        for (int ix = 0; ix < spatial.nx; ++ix)
            for (int iy = 0; iy < spatial.ny; ++iy)
                for (int iz = 0; iz < spatial.nz; ++iz) {
                    const std::size_t i = sh.idx(ix, iy, iz);
                    Biquaternion a_sum{};
                    const Vec3 x = spatial.point(ix, iy, iz);
                    for (int mfield = 0; mfield < N; ++mfield)
                        if (mfield != field && strengths[mfield]) a_sum += strengths[mfield](t, x);
                    out[i] = force_fac * mul(th[i], a_sum) - dsp[i];
                }
    };

    const double dt = spatial.dtau;
    for (int k = 0; k < N; ++k) {
        std::vector<Biquaternion>& th = theta_slices[k];
        rhs(th, k, tau, k1);
        for (std::size_t i = 0; i < sn; ++i) stage[i] = th[i] + (0.5 * dt) * k1[i];
        rhs(stage, k, tau + 0.5 * dt, k2);
        for (std::size_t i = 0; i < sn; ++i) stage[i] = th[i] + (0.5 * dt) * k2[i];
        rhs(stage, k, tau + 0.5 * dt, k3);
        for (std::size_t i = 0; i < sn; ++i) stage[i] = th[i] + dt * k3[i];
        rhs(stage, k, tau + dt, k4);
        for (std::size_t i = 0; i < sn; ++i)
            th[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

DynamicsResult run_dynamics(const Grid4& grid, const std::vector<SpatialFn>& initial,
                            const std::vector<FieldFn>& strengths, const DynamicsConfig& cfg,
                            const MediumConstants& m) {
    const int N = int(initial.size());
    if (N < 2) throw Error("run_dynamics: need at least two interacting fields");
    if (int(strengths.size()) != N) throw Error("run_dynamics: one strength per field");
    if (grid.cfl_ratio() > cfg.cfl_bound + 1e-12)
        throw CFLViolation("dtau/h = " + std::to_string(grid.cfl_ratio()) +
                           " exceeds the bound " + std::to_string(cfg.cfl_bound));
    grid.require_min_extent(3);

    const SliceShape sh{grid.nx, grid.ny, grid.nz, grid.h};
    const std::size_t sn = grid.spatial_count();
    const double kappa = cfg.kappa;
    const int op_sign = (cfg.op == SecondLawOperator::dminus) ? -1 : +1;

    DynamicsResult res;
    res.trajectories.assign(N, BiquatField(grid));

    std::vector<std::vector<Biquaternion>> state(N, std::vector<Biquaternion>(sn));
    for (int k = 0; k < N; ++k) {
        for (int ix = 0; ix < grid.nx; ++ix)
            for (int iy = 0; iy < grid.ny; ++iy)
                for (int iz = 0; iz < grid.nz; ++iz)
                    state[k][sh.idx(ix, iy, iz)] =
                        initial[k] ? initial[k](grid.point(ix, iy, iz)) : Biquaternion{};
        for (std::size_t i = 0; i < sn; ++i) res.trajectories[k].raw()[i] = state[k][i];
    }

    std::vector<Biquaternion> dspm(sn);

    // Advanced-strength mode: per step, re-solve each field's own strength
    // slice from its stored trajectory (frozen across the step's stages),
    // with the configured strength at tau = 0 as Cauchy data.
    std::vector<std::vector<Biquaternion>> a_slice(N);
    const bool advance = cfg.advance_strengths;
    auto slice_lookup = [&](int mf) {
        return FieldFn([&a_slice, &grid, &sh, mf](double, const Vec3& x) {
            const int ix = int(std::lround((x.x - grid.x0) / grid.h));
            const int iy = int(std::lround((x.y - grid.y0) / grid.h));
            const int iz = int(std::lround((x.z - grid.z0) / grid.h));
            return a_slice[mf][sh.idx(ix, iy, iz)];
        });
    };
    std::vector<FieldFn> strengths_eff = strengths;
    if (advance)
        for (int mf = 0; mf < N; ++mf) strengths_eff[mf] = slice_lookup(mf);

    const SphereQuadrature sphere(cfg.solver.sphere_degree);
    const double dt = grid.dtau;
    for (int step = 0; step < grid.nt - 1; ++step) {
        const double tau = grid.tau(step);

        if (advance) {
            const double tau_mid = tau + 0.5 * dt;
            const double sigma_hi = tau;
            for (int mf = 0; mf < N; ++mf) {
                a_slice[mf].assign(sn, Biquaternion{});
                const BiquatField& traj = res.trajectories[mf];
                FieldFn theta_fn = [&traj, &grid, sigma_hi](double sigma, const Vec3& y) {
                    Biquaternion v;
                    const double sc = std::min(std::max(sigma, grid.tau0), sigma_hi);
                    if (!interpolate(traj, sc, y, 1, v)) return Biquaternion{};
                    return v;
                };
                SpatialFn a0 = nullptr;
                if (strengths[mf]) {
                    const FieldFn& s0 = strengths[mf];
                    a0 = [&s0](const Vec3& y) { return s0(0.0, y); };
                }
                for (int ix = 0; ix < grid.nx; ++ix)
                    for (int iy = 0; iy < grid.ny; ++iy)
                        for (int iz = 0; iz < grid.nz; ++iz)
                            a_slice[mf][sh.idx(ix, iy, iz)] = maxwell_cauchy(
                                theta_fn, a0, tau_mid, grid.point(ix, iy, iz), sphere, cfg.solver);
            }
        }

        multi_field_step(state, grid, tau, strengths_eff, cfg);

        double max_norm = 0.0;
        for (int k = 0; k < N; ++k) {
            const std::size_t off = grid.index(step + 1, 0, 0, 0);
            for (std::size_t i = 0; i < sn; ++i) {
                res.trajectories[k].raw()[off + i] = state[k][i];
                max_norm = std::max(max_norm, norm(state[k][i]));
            }
        }
        if (max_norm > cfg.divergence_bound)
            throw Divergence("run_dynamics: field norm " + std::to_string(max_norm) +
                             " exceeded the bound at step " + std::to_string(step + 1));

        // per-step audit record at the new slice
        DynamicsRecord rec;
        rec.step = step + 1;
        rec.tau = grid.tau(step + 1);

        // summary slice quantities
        double energy_q = 0.0, flux = 0.0;
        {
            std::vector<Biquaternion> sum(sn);
            for (std::size_t i = 0; i < sn; ++i) {
                Biquaternion s{};
                for (int k = 0; k < N; ++k) s += state[k][i];
                sum[i] = s;
            }
            const double h3 = grid.h * grid.h * grid.h;
            for (int ix = 0; ix < grid.nx; ++ix)
                for (int iy = 0; iy < grid.ny; ++iy)
                    for (int iz = 0; iz < grid.nz; ++iz) {
                        const Vec3c J = -sum[sh.idx(ix, iy, iz)].v;
                        energy_q += 0.5 * norm_sq(J) * h3;
                        const bool on_face = ix == 0 || ix == grid.nx - 1 || iy == 0 ||
                                             iy == grid.ny - 1 || iz == 0 || iz == grid.nz - 1;
                        if (on_face) {
                            const Vec3c pj = (0.5 * IMAG_UNIT) * cross(J, conj(J));
                            Vec3 nvec{0, 0, 0};
                            if (ix == 0) nvec.x -= 1;
                            if (ix == grid.nx - 1) nvec.x += 1;
                            if (iy == 0) nvec.y -= 1;
                            if (iy == grid.ny - 1) nvec.y += 1;
                            if (iz == 0) nvec.z -= 1;
                            if (iz == grid.nz - 1) nvec.z += 1;
                            flux += (pj.x.real() * nvec.x + pj.y.real() * nvec.y +
                                     pj.z.real() * nvec.z) *
                                    grid.h * grid.h;
                        }
                    }
        }
        rec.energy_Q = energy_q;
        rec.flux_PJ = flux;

        // pairwise reciprocity defect at the new slice
        {
            double ar = 0.0;
            const double tau_new = grid.tau(step + 1);
            for (int ix = 0; ix < grid.nx; ++ix)
                for (int iy = 0; iy < grid.ny; ++iy)
                    for (int iz = 0; iz < grid.nz; ++iz) {
                        const std::size_t i = sh.idx(ix, iy, iz);
                        const Vec3 x = grid.point(ix, iy, iz);
                        for (int k = 0; k < N; ++k)
                            for (int l = k + 1; l < N; ++l) {
                                Biquaternion ak{}, al{};
                                if (advance) {
                                    ak = a_slice[k][i];
                                    al = a_slice[l][i];
                                } else {
                                    if (strengths[k]) ak = strengths[k](tau_new, x);
                                    if (strengths[l]) al = strengths[l](tau_new, x);
                                }
                                ar = std::max(ar, norm(mul(state[k][i], al) +
                                                       mul(state[l][i], ak)));
                            }
                    }
            rec.action_reaction = ar;
        }

        // interaction energy across the N current slices
        {
            double dw_int = 0.0, max_dxi = 0.0, max_sum_sq = 0.0;
            for (std::size_t i = 0; i < sn; ++i) {
                Biquaternion dxi{};
                for (int k = 0; k < N; ++k)
                    for (int l = k + 1; l < N; ++l)
                        dxi += mul(state[k][i], star(state[l][i])) +
                               mul(state[l][i], star(state[k][i]));
                dw_int += dxi.s.real();
                max_dxi = std::max(max_dxi, norm(dxi));
                Biquaternion s{};
                for (int k = 0; k < N; ++k) s += state[k][i];
                max_sum_sq = std::max(max_sum_sq, norm_sq(s));
            }
            rec.deltaW_theta = dw_int * grid.h * grid.h * grid.h;
            const double tol = 1e-9 * max_sum_sq * double(sn) * grid.h * grid.h * grid.h;
            if (rec.deltaW_theta > tol)
                rec.classification = "release";
            else if (rec.deltaW_theta < -tol)
                rec.classification = "absorb";
            else
                rec.classification = (max_dxi <= 1e-9 * max_sum_sq) ? "conserve" : "exchange";
        }

        // second-law and summary-free residuals at the previous slice
        // (tau-central difference once three slices exist)
        if (step >= 1) {
            const int it = step;  // middle slice
            double r2 = 0.0, rsum = 0.0;
            std::vector<Biquaternion> mid(sn), summ(sn);
            for (int k = 0; k < N; ++k) {
                const std::size_t o0 = grid.index(it - 1, 0, 0, 0);
                const std::size_t o1 = grid.index(it, 0, 0, 0);
                const std::size_t o2 = grid.index(it + 1, 0, 0, 0);
                for (std::size_t i = 0; i < sn; ++i) mid[i] = res.trajectories[k].raw()[o1 + i];
                spatial_gradient_slice(mid, sh, op_sign, dspm);
                for (int ix = 1; ix < grid.nx - 1; ++ix)
                    for (int iy = 1; iy < grid.ny - 1; ++iy)
                        for (int iz = 1; iz < grid.nz - 1; ++iz) {
                            const std::size_t i = sh.idx(ix, iy, iz);
                            const Biquaternion dtau_th =
                                (0.5 / dt) * (res.trajectories[k].raw()[o2 + i] -
                                              res.trajectories[k].raw()[o0 + i]);
                            Biquaternion a_sum{};
                            const Vec3 x = grid.point(ix, iy, iz);
                            for (int mf = 0; mf < N; ++mf) {
                                if (mf == k) continue;
                                if (advance)
                                    a_sum += a_slice[mf][i];
                                else if (strengths[mf])
                                    a_sum += strengths[mf](grid.tau(it), x);
                            }
                            const Biquaternion law =
                                kappa * (dtau_th + dspm[i]) -
                                double(-op_sign) * mul(mid[i], a_sum);
                            r2 = std::max(r2, norm(law));
                        }
            }
            // summary field: free law residual
            {
                const std::size_t o0 = grid.index(it - 1, 0, 0, 0);
                const std::size_t o1 = grid.index(it, 0, 0, 0);
                const std::size_t o2 = grid.index(it + 1, 0, 0, 0);
                for (std::size_t i = 0; i < sn; ++i) {
                    Biquaternion s{};
                    for (int k = 0; k < N; ++k) s += res.trajectories[k].raw()[o1 + i];
                    summ[i] = s;
                }
                spatial_gradient_slice(summ, sh, op_sign, dspm);
                for (int ix = 1; ix < grid.nx - 1; ++ix)
                    for (int iy = 1; iy < grid.ny - 1; ++iy)
                        for (int iz = 1; iz < grid.nz - 1; ++iz) {
                            const std::size_t i = sh.idx(ix, iy, iz);
                            Biquaternion s0{}, s2{};
                            for (int k = 0; k < N; ++k) {
                                s0 += res.trajectories[k].raw()[o0 + i];
                                s2 += res.trajectories[k].raw()[o2 + i];
                            }
                            const Biquaternion law = kappa * ((0.5 / dt) * (s2 - s0) + dspm[i]);
                            rsum = std::max(rsum, norm(law));
                        }
            }
            rec.residual_second_law = r2;
            rec.residual_summary_free = rsum;
        }

        res.records.push_back(rec);
    }
    (void)m;
    return res;
}

} // namespace egm
