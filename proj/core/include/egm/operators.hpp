#pragma once

#include "egm/grid.hpp"

namespace egm {

/// Mutual complex gradients D+- = d_tau +- i nabla acting by left quaternion
/// multiplication:
///   D+- (f + F) = (d_tau f -+ i div F) + (d_tau F +- i grad f +- i rot F).
/// Spatial and temporal derivatives are 2nd-order central differences in the
/// interior and 2nd-order one-sided stencils on the faces; the output's
/// boundary_rings is the input's plus one.
BiquatField d_plus(const BiquatField& f);
BiquatField d_minus(const BiquatField& f);

/// Wave operator box = d_tau^2 - Laplace, componentwise on (f, F).
BiquatField box_direct(const BiquatField& f);

/// Factorized wave operator d_minus(d_plus(f)); agrees with box_direct to
/// discretization order on the doubly-interior region.
BiquatField box_factored(const BiquatField& f);

/// Derivatives of one biquaternion node in all four grid directions,
/// assembled by the same stencils the whole-field operators use. The window
/// spans index offsets -2..+2 per axis (one-sided forms near faces).
struct NodeDerivatives {
    Biquaternion dtau, dx, dy, dz;
};

NodeDerivatives node_derivatives(const BiquatField& f, int it, int ix, int iy, int iz);

/// D+- assembled from precomputed node derivatives (sign = +1 or -1).
Biquaternion assemble_gradient(const Biquaternion& dtau, const Biquaternion& dx,
                               const Biquaternion& dy, const Biquaternion& dz, int sign);

} // namespace egm
