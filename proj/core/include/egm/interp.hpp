#pragma once

#include <cmath>

#include "egm/grid.hpp"

namespace egm {

/// Lagrange interpolation stencil along one axis: start index plus 2 (linear)
/// or 3 (quadratic) weights. `ok` is false when the coordinate falls outside
/// the axis range.
struct AxisStencil {
    int i0 = 0;
    int count = 0;
    double w[3] = {0.0, 0.0, 0.0};
    bool ok = false;
};

inline AxisStencil axis_stencil(double s, int n, int order) {
    AxisStencil st;
    if (!(s >= -1e-9 && s <= n - 1 + 1e-9)) return st;
    s = std::min(std::max(s, 0.0), double(n - 1));
    if (order <= 1 || n < 3) {
        int i0 = std::min(int(std::floor(s)), n - 2);
        if (i0 < 0) i0 = 0;
        const double t = s - i0;
        st.i0 = i0;
        st.count = 2;
        st.w[0] = 1.0 - t;
        st.w[1] = t;
        st.ok = true;
        return st;
    }
    int i0 = int(std::lround(s)) - 1;
    i0 = std::min(std::max(i0, 0), n - 3);
    const double t = s - i0;
    st.i0 = i0;
    st.count = 3;
    st.w[0] = 0.5 * (t - 1.0) * (t - 2.0);
    st.w[1] = -t * (t - 2.0);
    st.w[2] = 0.5 * t * (t - 1.0);
    st.ok = true;
    return st;
}

/// Tensor-product interpolation of a biquaternion field at (tau, x).
/// Returns false when the point is outside the grid.
inline bool interpolate(const BiquatField& f, double tau, const Vec3& x, int order,
                        Biquaternion& out) {
    const Grid4& g = f.grid();
    const AxisStencil st = axis_stencil((tau - g.tau0) / g.dtau, g.nt, order);
    const AxisStencil sx = axis_stencil((x.x - g.x0) / g.h, g.nx, order);
    const AxisStencil sy = axis_stencil((x.y - g.y0) / g.h, g.ny, order);
    const AxisStencil sz = axis_stencil((x.z - g.z0) / g.h, g.nz, order);
    if (!st.ok || !sx.ok || !sy.ok || !sz.ok) return false;
    Biquaternion acc{};
    for (int a = 0; a < st.count; ++a)
        for (int b = 0; b < sx.count; ++b)
            for (int c = 0; c < sy.count; ++c)
                for (int d = 0; d < sz.count; ++d) {
                    const double w = st.w[a] * sx.w[b] * sy.w[c] * sz.w[d];
                    if (w == 0.0) continue;
                    acc += w * f.at(st.i0 + a, sx.i0 + b, sy.i0 + c, sz.i0 + d);
                }
    out = acc;
    return true;
}

} // namespace egm
