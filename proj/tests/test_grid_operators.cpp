#include <doctest.h>

#include <cmath>

#include "egm/operators.hpp"
#include "egm/parallel.hpp"
#include "test_support.hpp"

using namespace egm;
using egmtest::rel_gap;

namespace {

using FieldClosure = std::function<Biquaternion(double, const Vec3&)>;

// Independent derivative oracle: 4th-order central differences with a step
// far below the grid spacing, applied to the closed-form field.
Biquaternion fd_oracle_dir(const FieldClosure& f, double tau, Vec3 x, int axis) {
    const double d = 1e-3;
    auto at = [&](double off) {
        double t = tau;
        Vec3 p = x;
        if (axis == 0) t += off;
        if (axis == 1) p.x += off;
        if (axis == 2) p.y += off;
        if (axis == 3) p.z += off;
        return f(t, p);
    };
    return (1.0 / (12.0 * d)) * (at(-2 * d) - 8.0 * at(-d) + 8.0 * at(d) - at(2 * d));
}

Biquaternion oracle_gradient(const FieldClosure& f, double tau, const Vec3& x, int sign) {
    return assemble_gradient(fd_oracle_dir(f, tau, x, 0), fd_oracle_dir(f, tau, x, 1),
                             fd_oracle_dir(f, tau, x, 2), fd_oracle_dir(f, tau, x, 3), sign);
}

FieldClosure smooth_trig_field() {
    return [](double tau, const Vec3& p) {
        const double c1 = std::cos(1.1 * tau - 0.9 * p.x);
        const double s2 = std::sin(0.8 * p.y + 0.5 * tau);
        const double c3 = std::cos(0.7 * p.z + 0.3 * p.x);
        return Biquaternion{Complex(c1, 0.4 * s2),
                            {Complex(0.9 * s2, 0.2 * c3), Complex(c3, -0.5 * c1),
                             Complex(0.3 * c1 * s2, 0.6 * c3)}};
    };
}

} // namespace

TEST_CASE("grid index and coordinate maps invert each other") {
    const Grid4 g(5, 6, 7, 8, 0.25, 0.5, -1.0, 2.0, -3.0, 0.5);
    CHECK(g.node_count() == 5u * 6u * 7u * 8u);
    CHECK(g.cfl_ratio() == doctest::Approx(0.5));
    for (int it = 0; it < g.nt; ++it) CHECK(int(std::lround((g.tau(it) - g.tau0) / g.dtau)) == it);
    for (int ix = 0; ix < g.nx; ++ix) CHECK(int(std::lround((g.x(ix) - g.x0) / g.h)) == ix);

    // tau-major layout: consecutive iz entries are adjacent
    CHECK(g.index(0, 0, 0, 1) == g.index(0, 0, 0, 0) + 1);
    CHECK(g.index(1, 0, 0, 0) == g.spatial_count());

    CHECK_THROWS_AS(Grid4(0, 4, 4, 4, 0.1, 0.1), GridTooSmall);
    CHECK_THROWS_AS(Grid4(4, 4, 4, 4, -0.1, 0.1), GridTooSmall);
}

TEST_CASE("field sampling and finiteness validation") {
    const Grid4 g(3, 3, 3, 3, 0.1, 0.1);
    BiquatField f = BiquatField::sample(g, [](double tau, const Vec3& p) {
        return Biquaternion{Complex(tau + p.x), {}};
    });
    CHECK(f.at(2, 1, 0, 0).s == Complex(0.2 + 0.1));
    f.validate_finite();
    f.at(1, 2, 1, 0).v.y = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(f.validate_finite(), NonFiniteValue);
}

TEST_CASE("mutual gradients vanish on constants and are exact on linear fields") {
    const Grid4 g(5, 5, 5, 5, 0.2, 0.3);
    std::mt19937_64 rng(3);
    const Biquaternion c0 = egmtest::random_biquat(rng);
    const BiquatField constant = BiquatField::sample(g, [&](double, const Vec3&) { return c0; });
    for (const auto& out : {d_plus(constant), d_minus(constant)}) {
        CHECK(interior_max_norm(out, -1) < 1e-14);  // faces included: one-sided is exact too
        CHECK(out.boundary_rings() == 1);
    }

    // f = tau -> D+- = 1
    const BiquatField ftau =
        BiquatField::sample(g, [](double tau, const Vec3&) { return Biquaternion::scalar(Complex(tau)); });
    const BiquatField dp = d_plus(ftau);
    for (std::size_t i = 0; i < dp.size(); ++i) CHECK(rel_gap(dp[i], BQ_ONE) < 1e-13);

    // F = e1 * x2 -> D+ = -i e3 (pure curl term)
    const BiquatField fcurl = BiquatField::sample(g, [](double, const Vec3& p) {
        return Biquaternion::vector({Complex(p.y), Complex(0), Complex(0)});
    });
    const Biquaternion expect_curl{Complex(0), {Complex(0), Complex(0), Complex(0, -1)}};
    const BiquatField dpc = d_plus(fcurl);
    for (std::size_t i = 0; i < dpc.size(); ++i) CHECK(rel_gap(dpc[i], expect_curl) < 1e-13);

    // f = x1 -> D- = -i e1 (gradient with the lower sign)
    const BiquatField fgrad = BiquatField::sample(
        g, [](double, const Vec3& p) { return Biquaternion::scalar(Complex(p.x)); });
    const Biquaternion expect_grad{Complex(0), {Complex(0, -1), Complex(0), Complex(0)}};
    const BiquatField dmg = d_minus(fgrad);
    for (std::size_t i = 0; i < dmg.size(); ++i) CHECK(rel_gap(dmg[i], expect_grad) < 1e-13);

    // F = e1 const -> D- = 0
    const BiquatField fconstv = BiquatField::sample(g, [](double, const Vec3&) {
        return Biquaternion::vector({Complex(1), Complex(0), Complex(0)});
    });
    CHECK(interior_max_norm(d_minus(fconstv), -1) < 1e-14);
}

TEST_CASE("mutual gradients match the independent derivative oracle at 2nd order") {
    const FieldClosure f = smooth_trig_field();
    // fixed physical extent, doubled node counts: the error is compared on
    // the shared coarse nodes so the Richardson ratio is clean
    double err[2];
    int pass = 0;
    for (int n : {9, 17}) {
        const double h = 0.8 / (n - 1);
        const Grid4 g(n, n, n, n, h, h, 0.05, -0.3, 0.2, -0.1);
        const BiquatField field = BiquatField::sample(g, f);
        const BiquatField dp = d_plus(field);
        const BiquatField dm = d_minus(field);
        const int step = (n - 1) / 8;
        double worst = 0.0;
        for (int it = step; it < g.nt - 1; it += step)
            for (int ix = step; ix < g.nx - 1; ix += step)
                for (int iy = step; iy < g.ny - 1; iy += step)
                    for (int iz = step; iz < g.nz - 1; iz += step) {
                        const Vec3 p = g.point(ix, iy, iz);
                        worst = std::max(worst, norm(dp.at(it, ix, iy, iz) -
                                                     oracle_gradient(f, g.tau(it), p, +1)));
                        worst = std::max(worst, norm(dm.at(it, ix, iy, iz) -
                                                     oracle_gradient(f, g.tau(it), p, -1)));
                    }
        err[pass++] = worst;
    }
    CHECK(err[0] < 2e-2);
    const double ratio = err[0] / err[1];
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("gradients are linear over complex scalars") {
    const Grid4 g(5, 5, 5, 5, 0.15, 0.2);
    std::mt19937_64 rng(5);
    const FieldClosure f = smooth_trig_field();
    const BiquatField a = BiquatField::sample(g, f);
    const BiquatField b = BiquatField::sample(g, [&](double tau, const Vec3& p) {
        return mul(f(tau, p), Biquaternion{Complex(0.3, 0.7), {}});
    });
    const Complex alpha(0.8, -0.4), beta(-1.1, 0.2);
    BiquatField combo(g);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = alpha * a[i] + beta * b[i];
    const BiquatField lhs = d_plus(combo);
    const BiquatField da = d_plus(a);
    const BiquatField db = d_plus(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        worst = std::max(worst, rel_gap(lhs[i], alpha * da[i] + beta * db[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("wave operator oracles") {
    const Grid4 g(6, 6, 6, 6, 0.1, 0.1);
    // constant -> 0
    const BiquatField c = BiquatField::sample(g, [](double, const Vec3&) {
        return Biquaternion{Complex(2, -1), {Complex(1), Complex(0, 3), Complex(0)}};
    });
    CHECK(interior_max_norm(box_direct(c), -1) < 1e-12);

    // f = tau^2 + ||x||^2: box f = 2 - 6 = -4, exact for quadratics
    const BiquatField q = BiquatField::sample(g, [](double tau, const Vec3& p) {
        return Biquaternion::scalar(Complex(tau * tau + p.x * p.x + p.y * p.y + p.z * p.z));
    });
    const BiquatField bq = box_direct(q);
    for (std::size_t i = 0; i < bq.size(); ++i)
        CHECK(rel_gap(bq[i], Biquaternion::scalar(Complex(-4))) < 1e-11);
}

TEST_CASE("plane wave is annihilated by the wave operator to O(h^2)") {
    // dtau != h: with equal spacings the leading truncation errors of the
    // tau and x second differences cancel exactly on a null wave
    double err[2];
    int pass = 0;
    for (int n : {9, 17}) {
        const double h = 0.8 / (n - 1);
        const Grid4 g(n, n, 6, 6, 0.5 * h, h);
        const BiquatField w = BiquatField::sample(g, [](double tau, const Vec3& p) {
            return Biquaternion::scalar(Complex(std::cos(tau - p.x)));
        });
        const BiquatField r = box_direct(w);
        const int step = (n - 1) / 8;
        double worst = 0.0;
        for (int it = step; it < g.nt - 1; it += step)
            for (int ix = step; ix < g.nx - 1; ix += step)
                for (int iy = 1; iy < g.ny - 1; ++iy)
                    for (int iz = 1; iz < g.nz - 1; ++iz)
                        worst = std::max(worst, norm(r.at(it, ix, iy, iz)));
        err[pass++] = worst;
    }
    CHECK(err[0] < 5e-3);
    CHECK(err[0] / err[1] > 3.5);
    CHECK(err[0] / err[1] < 4.5);
}

TEST_CASE("factorization box = D- D+ on the doubly-interior region") {
    const FieldClosure f = smooth_trig_field();
    double err[2];
    int pass = 0;
    for (double h : {0.12, 0.06}) {
        const Grid4 g(10, 10, 10, 10, h, h, 0.0, -0.2, 0.1, 0.3);
        const BiquatField field = BiquatField::sample(g, f);
        const BiquatField direct = box_direct(field);
        const BiquatField factored = box_factored(field);
        CHECK(factored.boundary_rings() == 2);
        double worst = 0.0;
        for (int it = 2; it < g.nt - 2; ++it)
            for (int ix = 2; ix < g.nx - 2; ++ix)
                for (int iy = 2; iy < g.ny - 2; ++iy)
                    for (int iz = 2; iz < g.nz - 2; ++iz)
                        worst = std::max(
                            worst, norm(factored.at(it, ix, iy, iz) - direct.at(it, ix, iy, iz)));
        err[pass++] = worst;
    }
    const double ratio = err[0] / err[1];
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("mixed gradient order D+D- = D-D+ to O(h^2)") {
    const FieldClosure f = smooth_trig_field();
    const Grid4 g(9, 9, 9, 9, 0.08, 0.08);
    const BiquatField field = BiquatField::sample(g, f);
    const BiquatField pm = d_plus(d_minus(field));
    const BiquatField mp = d_minus(d_plus(field));
    double worst = 0.0;
    for (int it = 2; it < g.nt - 2; ++it)
        for (int ix = 2; ix < g.nx - 2; ++ix)
            for (int iy = 2; iy < g.ny - 2; ++iy)
                for (int iz = 2; iz < g.nz - 2; ++iz)
                    worst = std::max(worst, norm(pm.at(it, ix, iy, iz) - mp.at(it, ix, iy, iz)));
    CHECK(worst < 5e-3);
}

TEST_CASE("operators reject too-small grids") {
    const Grid4 tiny(2, 4, 4, 4, 0.1, 0.1);
    const BiquatField f(tiny);
    CHECK_THROWS_AS(d_plus(f), GridTooSmall);
    CHECK_THROWS_AS(box_direct(f), GridTooSmall);
}

TEST_CASE("gradient output is bitwise independent of the worker count") {
    const Grid4 g(8, 10, 10, 10, 0.07, 0.09, 0.1, -0.4, 0.2, -0.1);
    const BiquatField f = BiquatField::sample(g, smooth_trig_field());
    set_max_threads(1);
    const BiquatField one = d_plus(f);
    set_max_threads(4);
    const BiquatField four = d_plus(f);
    set_max_threads(0);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].s == four[i].s);
        CHECK(one[i].v.x == four[i].v.x);
        CHECK(one[i].v.y == four[i].v.y);
        CHECK(one[i].v.z == four[i].v.z);
    }
}
