#include "egm/grid.hpp"

#include <cmath>
#include <string>

#include "egm/parallel.hpp"

namespace egm {

namespace {
int g_max_threads = 0;
}

void set_max_threads(int n) { g_max_threads = n; }

int max_threads() {
    if (g_max_threads > 0) return g_max_threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

Grid4::Grid4(int nt_, int nx_, int ny_, int nz_, double dtau_, double h_,
             double tau0_, double x0_, double y0_, double z0_)
    : nt(nt_), nx(nx_), ny(ny_), nz(nz_), dtau(dtau_), h(h_),
      tau0(tau0_), x0(x0_), y0(y0_), z0(z0_) {
    if (nt <= 0 || nx <= 0 || ny <= 0 || nz <= 0)
        throw GridTooSmall("Grid4: node counts must be positive");
    if (!(dtau > 0.0) || !(h > 0.0))
        throw GridTooSmall("Grid4: spacings must be positive");
}

bool Grid4::same_layout(const Grid4& o) const {
    return nt == o.nt && nx == o.nx && ny == o.ny && nz == o.nz &&
           dtau == o.dtau && h == o.h &&
           tau0 == o.tau0 && x0 == o.x0 && y0 == o.y0 && z0 == o.z0;
}

void Grid4::require_min_extent(int min_nodes) const {
    if (nt < min_nodes || nx < min_nodes || ny < min_nodes || nz < min_nodes)
        throw GridTooSmall("grid needs at least " + std::to_string(min_nodes) +
                           " nodes per axis, got " + std::to_string(nt) + "x" +
                           std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                           std::to_string(nz));
}

BiquatField BiquatField::sample(const Grid4& g,
                                const std::function<Biquaternion(double, const Vec3&)>& f) {
    BiquatField out(g);
    parallel_for(std::size_t(g.nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t it = b; it < e; ++it) {
            const double tau = g.tau(int(it));
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz)
                        out.at(int(it), ix, iy, iz) = f(tau, g.point(ix, iy, iz));
        }
    });
    return out;
}

void BiquatField::validate_finite() const {
    const Grid4& g = grid_;
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    if (!finite(at(it, ix, iy, iz)))
                        throw NonFiniteValue(
                            "non-finite sample at node (" + std::to_string(it) + "," +
                            std::to_string(ix) + "," + std::to_string(iy) + "," +
                            std::to_string(iz) + "), tau=" + std::to_string(g.tau(it)) +
                            " x=" + std::to_string(g.x(ix)) + " y=" + std::to_string(g.y(iy)) +
                            " z=" + std::to_string(g.z(iz)));
}

namespace {

struct Mask {
    int t0, t1, x0, x1, y0, y1, z0, z1;
    bool empty() const { return t0 > t1 || x0 > x1 || y0 > y1 || z0 > z1; }
};

Mask interior_mask(const Grid4& g, int rings) {
    Mask m{rings, g.nt - 1 - rings, rings, g.nx - 1 - rings,
           rings, g.ny - 1 - rings, rings, g.nz - 1 - rings};
    if (m.empty()) m = Mask{0, g.nt - 1, 0, g.nx - 1, 0, g.ny - 1, 0, g.nz - 1};
    return m;
}

} // namespace

double interior_max_norm(const BiquatField& f, int extra_rings) {
    const Mask m = interior_mask(f.grid(), f.boundary_rings() + extra_rings);
    double mx = 0.0;
    for (int it = m.t0; it <= m.t1; ++it)
        for (int ix = m.x0; ix <= m.x1; ++ix)
            for (int iy = m.y0; iy <= m.y1; ++iy)
                for (int iz = m.z0; iz <= m.z1; ++iz)
                    mx = std::max(mx, norm(f.at(it, ix, iy, iz)));
    return mx;
}

double interior_mean_norm(const BiquatField& f, int extra_rings) {
    const Mask m = interior_mask(f.grid(), f.boundary_rings() + extra_rings);
    double sum = 0.0;
    std::size_t n = 0;
    for (int it = m.t0; it <= m.t1; ++it)
        for (int ix = m.x0; ix <= m.x1; ++ix)
            for (int iy = m.y0; iy <= m.y1; ++iy)
                for (int iz = m.z0; iz <= m.z1; ++iz) {
                    sum += norm(f.at(it, ix, iy, iz));
                    ++n;
                }
    return n ? sum / double(n) : 0.0;
}

double interior_max_abs(const ScalarField& f, int extra_rings) {
    const Mask m = interior_mask(f.grid(), f.boundary_rings() + extra_rings);
    double mx = 0.0;
    for (int it = m.t0; it <= m.t1; ++it)
        for (int ix = m.x0; ix <= m.x1; ++ix)
            for (int iy = m.y0; iy <= m.y1; ++iy)
                for (int iz = m.z0; iz <= m.z1; ++iz)
                    mx = std::max(mx, std::abs(f.at(it, ix, iy, iz)));
    return mx;
}

double interior_mean_abs(const ScalarField& f, int extra_rings) {
    const Mask m = interior_mask(f.grid(), f.boundary_rings() + extra_rings);
    double sum = 0.0;
    std::size_t n = 0;
    for (int it = m.t0; it <= m.t1; ++it)
        for (int ix = m.x0; ix <= m.x1; ++ix)
            for (int iy = m.y0; iy <= m.y1; ++iy)
                for (int iz = m.z0; iz <= m.z1; ++iz) {
                    sum += std::abs(f.at(it, ix, iy, iz));
                    ++n;
                }
    return n ? sum / double(n) : 0.0;
}

} // namespace egm
