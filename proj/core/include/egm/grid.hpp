#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "egm/biquat.hpp"
#include "egm/errors.hpp"

namespace egm {

/// Uniform spacetime grid (tau, x1, x2, x3), model units with c = 1.
/// Storage order is tau-major: the slowest index is the time slice, so
/// slices along tau are contiguous and independently addressable.
struct Grid4 {
    int nt = 0, nx = 0, ny = 0, nz = 0;
    double dtau = 1.0;  // tau spacing, > 0
    double h = 1.0;     // spatial spacing, > 0 (same for all three axes)
    double tau0 = 0.0, x0 = 0.0, y0 = 0.0, z0 = 0.0;

    Grid4() = default;
    Grid4(int nt_, int nx_, int ny_, int nz_, double dtau_, double h_,
          double tau0_ = 0.0, double x0_ = 0.0, double y0_ = 0.0, double z0_ = 0.0);

    std::size_t node_count() const {
        return std::size_t(nt) * std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
    }
    std::size_t spatial_count() const {
        return std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
    }

    std::size_t index(int it, int ix, int iy, int iz) const {
        return ((std::size_t(it) * nx + ix) * ny + iy) * nz + iz;
    }

    double tau(int it) const { return tau0 + it * dtau; }
    double x(int ix) const { return x0 + ix * h; }
    double y(int iy) const { return y0 + iy * h; }
    double z(int iz) const { return z0 + iz * h; }
    Vec3 point(int ix, int iy, int iz) const { return {x(ix), y(iy), z(iz)}; }

    /// Courant-style ratio recorded for stability reporting.
    double cfl_ratio() const { return dtau / h; }

    bool same_layout(const Grid4& o) const;
    void require_min_extent(int min_nodes) const;
};

/// Biquaternion-valued function sampled on a Grid4.
///
/// `boundary_rings` counts how many outermost node rings hold values computed
/// with one-sided stencils (or are otherwise less trustworthy); residual
/// audits exclude them by default. A freshly sampled field has zero rings.
class BiquatField {
public:
    BiquatField() = default;
    explicit BiquatField(const Grid4& g, int rings = 0)
        : grid_(g), rings_(rings), data_(g.node_count()) {}

    static BiquatField sample(const Grid4& g,
                              const std::function<Biquaternion(double, const Vec3&)>& f);

    const Grid4& grid() const { return grid_; }
    int boundary_rings() const { return rings_; }
    void set_boundary_rings(int r) { rings_ = r; }

    Biquaternion& at(int it, int ix, int iy, int iz) { return data_[grid_.index(it, ix, iy, iz)]; }
    const Biquaternion& at(int it, int ix, int iy, int iz) const {
        return data_[grid_.index(it, ix, iy, iz)];
    }
    Biquaternion& operator[](std::size_t i) { return data_[i]; }
    const Biquaternion& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return data_.size(); }

    std::vector<Biquaternion>& raw() { return data_; }
    const std::vector<Biquaternion>& raw() const { return data_; }

    /// Throws NonFiniteValue naming the offending node if any sample is not finite.
    void validate_finite() const;

private:
    Grid4 grid_;
    int rings_ = 0;
    std::vector<Biquaternion> data_;
};

/// Max-norm over the interior mask (all rings excluded on every axis).
/// Falls back to the full grid when the mask would be empty.
double interior_max_norm(const BiquatField& f, int extra_rings = 0);

/// Mean of ||.|| over the same interior mask, fixed summation order.
double interior_mean_norm(const BiquatField& f, int extra_rings = 0);

/// Scalar complex field on a Grid4 (audit residual carriers).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid4& g, int rings = 0)
        : grid_(g), rings_(rings), data_(g.node_count()) {}

    const Grid4& grid() const { return grid_; }
    int boundary_rings() const { return rings_; }
    void set_boundary_rings(int r) { rings_ = r; }

    Complex& at(int it, int ix, int iy, int iz) { return data_[grid_.index(it, ix, iy, iz)]; }
    const Complex& at(int it, int ix, int iy, int iz) const {
        return data_[grid_.index(it, ix, iy, iz)];
    }
    Complex& operator[](std::size_t i) { return data_[i]; }
    const Complex& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return data_.size(); }

private:
    Grid4 grid_;
    int rings_ = 0;
    std::vector<Complex> data_;
};

double interior_max_abs(const ScalarField& f, int extra_rings = 0);
double interior_mean_abs(const ScalarField& f, int extra_rings = 0);

} // namespace egm
