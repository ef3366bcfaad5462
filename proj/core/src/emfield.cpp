#include "egm/emfield.hpp"

#include <cmath>

#include "egm/parallel.hpp"

namespace egm {

MediumConstants::MediumConstants(double e, double m) : eps(e), mu(m) {
    if (!(eps > 0.0) || !(mu > 0.0)) throw Error("MediumConstants: eps and mu must be > 0");
    sqrt_eps = std::sqrt(eps);
    sqrt_mu = std::sqrt(mu);
    c = 1.0 / (sqrt_eps * sqrt_mu);
}

namespace {

void require_same_grid(const Grid4& a, const Grid4& b, const char* what) {
    if (!a.same_layout(b)) throw GridMismatch(std::string(what) + ": grids differ");
}

} // namespace

FieldStrength assemble_strength(const Vec3Field& E, const Vec3Field& H,
                                const MediumConstants& m) {
    require_same_grid(E.grid, H.grid, "assemble_strength");
    const Grid4& g = E.grid;
    BiquatField out(g);
    parallel_for(g.node_count(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Vec3& ev = E.data[i];
            const Vec3& hv = H.data[i];
            out[i] = Biquaternion::vector({Complex(m.sqrt_eps * ev.x, m.sqrt_mu * hv.x),
                                           Complex(m.sqrt_eps * ev.y, m.sqrt_mu * hv.y),
                                           Complex(m.sqrt_eps * ev.z, m.sqrt_mu * hv.z)});
        }
    });
    return FieldStrength(std::move(out));
}

void extract_EH(const FieldStrength& A, const MediumConstants& m, Vec3Field& E, Vec3Field& H) {
    const Grid4& g = A.grid();
    E = Vec3Field(g);
    H = Vec3Field(g);
    const BiquatField& f = A.biquat();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Vec3c& v = f[i].v;
        E.data[i] = {v.x.real() / m.sqrt_eps, v.y.real() / m.sqrt_eps, v.z.real() / m.sqrt_eps};
        H.data[i] = {v.x.imag() / m.sqrt_mu, v.y.imag() / m.sqrt_mu, v.z.imag() / m.sqrt_mu};
    }
}

ChargeCurrent assemble_charge_current(const RealField& rhoE, const RealField& rhoH,
                                      const Vec3Field& jE, const Vec3Field& jH,
                                      const MediumConstants& m) {
    require_same_grid(rhoE.grid, rhoH.grid, "assemble_charge_current");
    require_same_grid(rhoE.grid, jE.grid, "assemble_charge_current");
    require_same_grid(rhoE.grid, jH.grid, "assemble_charge_current");
    const Grid4& g = rhoE.grid;
    BiquatField out(g);
    parallel_for(g.node_count(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Complex rho(rhoE.data[i] / m.sqrt_eps, -rhoH.data[i] / m.sqrt_mu);
            const Vec3& je = jE.data[i];
            const Vec3& jh = jH.data[i];
            const Vec3c J{Complex(m.sqrt_mu * je.x, -m.sqrt_eps * jh.x),
                          Complex(m.sqrt_mu * je.y, -m.sqrt_eps * jh.y),
                          Complex(m.sqrt_mu * je.z, -m.sqrt_eps * jh.z)};
            out[i] = ChargeCurrent::node(rho, J);
        }
    });
    return ChargeCurrent(std::move(out));
}

void extract_charges(const ChargeCurrent& theta, const MediumConstants& m, RealField& rhoE,
                     RealField& rhoH, Vec3Field& jE, Vec3Field& jH) {
    const Grid4& g = theta.grid();
    rhoE = RealField(g);
    rhoH = RealField(g);
    jE = Vec3Field(g);
    jH = Vec3Field(g);
    const BiquatField& f = theta.biquat();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Complex rho = IMAG_UNIT * f[i].s;
        const Vec3c J = -f[i].v;
        rhoE.data[i] = rho.real() * m.sqrt_eps;
        rhoH.data[i] = -rho.imag() * m.sqrt_mu;
        jE.data[i] = {J.x.real() / m.sqrt_mu, J.y.real() / m.sqrt_mu, J.z.real() / m.sqrt_mu};
        jH.data[i] = {-J.x.imag() / m.sqrt_eps, -J.y.imag() / m.sqrt_eps,
                      -J.z.imag() / m.sqrt_eps};
    }
}

ChargeCurrent theta_of_field(const FieldStrength& A) {
    return ChargeCurrent(d_plus(A.biquat()));
}

BiquatField maxwell_residual(const FieldStrength& A, const ChargeCurrent& theta) {
    require_same_grid(A.grid(), theta.grid(), "maxwell_residual");
    BiquatField r = d_plus(A.biquat());
    const BiquatField& th = theta.biquat();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= th[i];
    r.set_boundary_rings(std::max(r.boundary_rings(), th.boundary_rings()));
    return r;
}

EnergyMomentum energy_momentum(const FieldStrength& A, const MediumConstants&) {
    const BiquatField& f = A.biquat();
    BiquatField out(f.grid(), f.boundary_rings());
    parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = 0.5 * mul(f[i], star(f[i]));
    });
    return EnergyMomentum(std::move(out));
}

BiquatField wave_residual(const FieldStrength& A, const ChargeCurrent& theta) {
    require_same_grid(A.grid(), theta.grid(), "wave_residual");
    BiquatField lhs = box_direct(A.biquat());
    const BiquatField rhs = d_minus(theta.biquat());
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= rhs[i];
    lhs.set_boundary_rings(std::max(lhs.boundary_rings(), rhs.boundary_rings()) + 1);
    return lhs;
}

ScalarField charge_conservation_residual(const ChargeCurrent& theta) {
    const BiquatField& f = theta.biquat();
    const Grid4& g = f.grid();
    g.require_min_extent(3);
    ScalarField r(g, f.boundary_rings() + 1);
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t it = b; it < e; ++it)
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        const NodeDerivatives d = node_derivatives(f, int(it), ix, iy, iz);
                        // rho = i s, J = -v
                        const Complex dtau_rho = IMAG_UNIT * d.dtau.s;
                        const Complex div_J = -(d.dx.v.x + d.dy.v.y + d.dz.v.z);
                        r.at(int(it), ix, iy, iz) = dtau_rho + div_J;
                    }
    });
    return r;
}

RealField energy_conservation_residual(const FieldStrength& A, const ChargeCurrent& theta,
                                       const MediumConstants& m) {
    require_same_grid(A.grid(), theta.grid(), "energy_conservation_residual");
    const Grid4& g = A.grid();
    g.require_min_extent(3);
    const EnergyMomentum xi = energy_momentum(A, m);

    // Pack (W, P) into a biquaternion carrier so the node stencils apply.
    BiquatField wp(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const Vec3 P = xi.P_at(it, ix, iy, iz);
                    wp.at(it, ix, iy, iz) = {Complex(xi.W_at(it, ix, iy, iz)), P.complexified()};
                }

    RealField r(g);
    const BiquatField& af = A.biquat();
    const BiquatField& tf = theta.biquat();
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t itz = b; itz < e; ++itz) {
            const int it = int(itz);
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        const NodeDerivatives d = node_derivatives(wp, it, ix, iy, iz);
                        const double dtau_W = d.dtau.s.real();
                        const double div_P = d.dx.v.x.real() + d.dy.v.y.real() + d.dz.v.z.real();
                        const Vec3c J = -tf.at(it, ix, iy, iz).v;
                        const Vec3c Abar = conj(af.at(it, ix, iy, iz).v);
                        r.at(it, ix, iy, iz) = dtau_W + div_P + dot(J, Abar).real();
                    }
        }
    });
    return r;
}

double energy_rhs_component_gap(const FieldStrength& A, const ChargeCurrent& theta,
                                const MediumConstants& m) {
    require_same_grid(A.grid(), theta.grid(), "energy_rhs_component_gap");
    Vec3Field E, H, jE, jH;
    RealField rhoE, rhoH;
    extract_EH(A, m, E, H);
    extract_charges(theta, m, rhoE, rhoH, jE, jH);
    const BiquatField& af = A.biquat();
    const BiquatField& tf = theta.biquat();
    double gap = 0.0;
    for (std::size_t i = 0; i < af.size(); ++i) {
        const double lhs = -dot(-tf[i].v, conj(af[i].v)).real();
        const double rhs = (dot(jH.data[i], H.data[i]) - dot(jE.data[i], E.data[i])) / m.c;
        gap = std::max(gap, std::abs(lhs - rhs));
    }
    return gap;
}

ScalarField lorenz_gauge_residual(const Potential& p) {
    const BiquatField& f = p.biquat();
    const Grid4& g = f.grid();
    g.require_min_extent(3);
    ScalarField r(g, f.boundary_rings() + 1);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const NodeDerivatives d = node_derivatives(f, it, ix, iy, iz);
                    // phi = -i s, Psi = -v
                    const Complex dtau_phi = -IMAG_UNIT * d.dtau.s;
                    const Complex div_Psi = -(d.dx.v.x + d.dy.v.y + d.dz.v.z);
                    r.at(it, ix, iy, iz) = dtau_phi - div_Psi;
                }
    return r;
}

FieldStrength strength_of_potential(const Potential& p) {
    return FieldStrength(d_minus(p.biquat()));
}

double interior_max_abs(const RealField& f, int rings) {
    const Grid4& g = f.grid;
    int r = rings;
    if (g.nt <= 2 * r || g.nx <= 2 * r || g.ny <= 2 * r || g.nz <= 2 * r) r = 0;
    double mx = 0.0;
    for (int it = r; it < g.nt - r; ++it)
        for (int ix = r; ix < g.nx - r; ++ix)
            for (int iy = r; iy < g.ny - r; ++iy)
                for (int iz = r; iz < g.nz - r; ++iz)
                    mx = std::max(mx, std::abs(f.at(it, ix, iy, iz)));
    return mx;
}

double interior_mean_abs(const RealField& f, int rings) {
    const Grid4& g = f.grid;
    int r = rings;
    if (g.nt <= 2 * r || g.nx <= 2 * r || g.ny <= 2 * r || g.nz <= 2 * r) r = 0;
    double sum = 0.0;
    std::size_t n = 0;
    for (int it = r; it < g.nt - r; ++it)
        for (int ix = r; ix < g.nx - r; ++ix)
            for (int iy = r; iy < g.ny - r; ++iy)
                for (int iz = r; iz < g.nz - r; ++iz) {
                    sum += std::abs(f.at(it, ix, iy, iz));
                    ++n;
                }
    return n ? sum / double(n) : 0.0;
}

} // namespace egm
