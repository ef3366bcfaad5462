#include "egm/operators.hpp"

#include "egm/parallel.hpp"

namespace egm {

namespace {

// First derivative along one axis: central in the interior, 2nd-order
// one-sided on the two faces. `get(k)` reads the sample at offset index k.
template <typename Get>
Biquaternion deriv1(const Get& get, int i, int n, double inv2h) {
    if (i == 0)
        return inv2h * (-3.0 * get(0) + 4.0 * get(1) - get(2));
    if (i == n - 1)
        return inv2h * (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3));
    return inv2h * (get(i + 1) - get(i - 1));
}

// Second derivative: central 3-point; one-sided 4-point (2nd order) on faces
// when the axis is long enough, 3-point fallback otherwise. Face values are
// masked out by boundary_rings downstream.
template <typename Get>
Biquaternion deriv2(const Get& get, int i, int n, double invh2) {
    if (i == 0) {
        if (n >= 4)
            return invh2 * (2.0 * get(0) - 5.0 * get(1) + 4.0 * get(2) - get(3));
        return invh2 * (get(0) - 2.0 * get(1) + get(2));
    }
    if (i == n - 1) {
        if (n >= 4)
            return invh2 * (2.0 * get(n - 1) - 5.0 * get(n - 2) + 4.0 * get(n - 3) - get(n - 4));
        return invh2 * (get(n - 1) - 2.0 * get(n - 2) + get(n - 3));
    }
    return invh2 * (get(i + 1) - 2.0 * get(i) + get(i - 1));
}

} // namespace

NodeDerivatives node_derivatives(const BiquatField& f, int it, int ix, int iy, int iz) {
    const Grid4& g = f.grid();
    NodeDerivatives d;
    d.dtau = deriv1([&](int k) { return f.at(k, ix, iy, iz); }, it, g.nt, 0.5 / g.dtau);
    d.dx = deriv1([&](int k) { return f.at(it, k, iy, iz); }, ix, g.nx, 0.5 / g.h);
    d.dy = deriv1([&](int k) { return f.at(it, ix, k, iz); }, iy, g.ny, 0.5 / g.h);
    d.dz = deriv1([&](int k) { return f.at(it, ix, iy, k); }, iz, g.nz, 0.5 / g.h);
    return d;
}

Biquaternion assemble_gradient(const Biquaternion& dtau, const Biquaternion& dx,
                               const Biquaternion& dy, const Biquaternion& dz, int sign) {
    const Complex is = IMAG_UNIT * double(sign);
    const Complex div_f = dx.v.x + dy.v.y + dz.v.z;
    const Vec3c grad_f{dx.s, dy.s, dz.s};
    const Vec3c rot_f{dy.v.z - dz.v.y, dz.v.x - dx.v.z, dx.v.y - dy.v.x};
    return {dtau.s - is * div_f, dtau.v + is * grad_f + is * rot_f};
}

namespace {

BiquatField gradient(const BiquatField& f, int sign) {
    const Grid4& g = f.grid();
    g.require_min_extent(3);
    BiquatField out(g, f.boundary_rings() + 1);
    const Complex is = IMAG_UNIT * double(sign);
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t it = b; it < e; ++it)
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        const NodeDerivatives d = node_derivatives(f, int(it), ix, iy, iz);
                        const Complex div_f = d.dx.v.x + d.dy.v.y + d.dz.v.z;
                        const Vec3c grad_f{d.dx.s, d.dy.s, d.dz.s};
                        const Vec3c rot_f{d.dy.v.z - d.dz.v.y,
                                          d.dz.v.x - d.dx.v.z,
                                          d.dx.v.y - d.dy.v.x};
                        out.at(int(it), ix, iy, iz) = {
                            d.dtau.s - is * div_f,
                            d.dtau.v + is * grad_f + is * rot_f};
                    }
    });
    return out;
}

} // namespace

BiquatField d_plus(const BiquatField& f) { return gradient(f, +1); }
BiquatField d_minus(const BiquatField& f) { return gradient(f, -1); }

BiquatField box_direct(const BiquatField& f) {
    const Grid4& g = f.grid();
    g.require_min_extent(3);
    BiquatField out(g, f.boundary_rings() + 1);
    const double invdt2 = 1.0 / (g.dtau * g.dtau);
    const double invh2 = 1.0 / (g.h * g.h);
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t it = b; it < e; ++it)
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz) {
                        const Biquaternion dtt =
                            deriv2([&](int k) { return f.at(k, ix, iy, iz); }, int(it), g.nt, invdt2);
                        const Biquaternion dxx =
                            deriv2([&](int k) { return f.at(int(it), k, iy, iz); }, ix, g.nx, invh2);
                        const Biquaternion dyy =
                            deriv2([&](int k) { return f.at(int(it), ix, k, iz); }, iy, g.ny, invh2);
                        const Biquaternion dzz =
                            deriv2([&](int k) { return f.at(int(it), ix, iy, k); }, iz, g.nz, invh2);
                        out.at(int(it), ix, iy, iz) = dtt - (dxx + dyy + dzz);
                    }
    });
    return out;
}

BiquatField box_factored(const BiquatField& f) { return d_minus(d_plus(f)); }

} // namespace egm
