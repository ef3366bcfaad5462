#include <doctest.h>

#include <cmath>

#include "egm/emfield.hpp"
#include "test_support.hpp"

using namespace egm;
using egmtest::rel_gap;

namespace {

Vec3Field uniform_vec(const Grid4& g, const Vec3& v) {
    Vec3Field f(g);
    for (auto& e : f.data) e = v;
    return f;
}

} // namespace

TEST_CASE("medium constants") {
    const MediumConstants unit(1.0, 1.0);
    CHECK(unit.c == 1.0);
    CHECK(unit.c * std::sqrt(unit.eps * unit.mu) == 1.0);

    const MediumConstants m(4.0, 1.0);
    CHECK(std::abs(m.c * std::sqrt(m.eps * m.mu) - 1.0) < 3e-16);
    CHECK_THROWS_AS(MediumConstants(-1.0, 1.0), Error);
}

TEST_CASE("strength assembly and exact round trip") {
    const Grid4 g(3, 3, 3, 3, 0.1, 0.1);
    const MediumConstants unit(1.0, 1.0);

    const FieldStrength zero = assemble_strength(uniform_vec(g, {}), uniform_vec(g, {}), unit);
    CHECK(interior_max_norm(zero.biquat(), 0) == 0.0);

    const FieldStrength a =
        assemble_strength(uniform_vec(g, {1, 0, 0}), uniform_vec(g, {0, 1, 0}), unit);
    CHECK(rel_gap(a.biquat()[0],
                  Biquaternion::vector({Complex(1, 0), Complex(0, 1), Complex(0)})) == 0.0);
    CHECK(a.a_at(0, 0, 0, 0) == Complex(0));

    // eps = 4: A = 2 e1, by substituting into the assembly map
    const MediumConstants m4(4.0, 1.0);
    const FieldStrength a4 = assemble_strength(uniform_vec(g, {1, 0, 0}), uniform_vec(g, {}), m4);
    CHECK(rel_gap(a4.biquat()[0], Biquaternion::vector({Complex(2), Complex(0), Complex(0)})) ==
          0.0);

    Vec3Field E, H;
    extract_EH(a4, m4, E, H);
    CHECK(E.data[0].x == 1.0);
    CHECK(norm(H.data[0]) == 0.0);

    Vec3Field small(Grid4(2, 2, 2, 2, 0.1, 0.1));
    CHECK_THROWS_AS(assemble_strength(small, uniform_vec(g, {}), unit), GridMismatch);
}

TEST_CASE("charge-current assembly and round trip") {
    const Grid4 g(3, 3, 3, 3, 0.1, 0.1);
    const MediumConstants unit(1.0, 1.0);
    RealField rhoE(g), rhoH(g);
    for (auto& v : rhoE.data) v = 1.0;
    const ChargeCurrent th = assemble_charge_current(
        rhoE, rhoH, uniform_vec(g, {1, 0, 0}), uniform_vec(g, {0, 1, 0}), unit);
    CHECK(th.rho_at(0, 0, 0, 0) == Complex(1));
    // J = jE - i jH = e1 - i e2
    CHECK(rel_gap(Biquaternion::vector(th.J_at(0, 0, 0, 0)),
                  Biquaternion::vector({Complex(1, 0), Complex(0, -1), Complex(0)})) == 0.0);

    RealField rE, rH;
    Vec3Field jE, jH;
    extract_charges(th, unit, rE, rH, jE, jH);
    CHECK(rE.data[0] == 1.0);
    CHECK(rH.data[0] == 0.0);
    CHECK(jE.data[0].x == 1.0);
    CHECK(jH.data[0].y == 1.0);
}

TEST_CASE("theta_of_field recovers manufactured charges") {
    const Grid4 g(5, 9, 9, 9, 0.1, 0.12, 0.0, -0.5, -0.5, -0.5);

    // zero strength -> zero charge-current
    const FieldStrength zero{BiquatField(g)};
    CHECK(interior_max_norm(theta_of_field(zero).biquat(), 0) == 0.0);

    // static curl-free strength: rho = div A, J = 0
    const FieldStrength a(BiquatField::sample(g, [](double, const Vec3& p) {
        return FieldStrength::node(Complex(0), {Complex(std::sin(p.x)), Complex(std::sin(p.y)),
                                                Complex(std::sin(p.z))});
    }));
    const ChargeCurrent th = theta_of_field(a);
    double worst_rho = 0.0, worst_j = 0.0;
    for (int it = 1; it < g.nt - 1; ++it)
        for (int ix = 1; ix < g.nx - 1; ++ix)
            for (int iy = 1; iy < g.ny - 1; ++iy)
                for (int iz = 1; iz < g.nz - 1; ++iz) {
                    const Vec3 p = g.point(ix, iy, iz);
                    const double div_a = std::cos(p.x) + std::cos(p.y) + std::cos(p.z);
                    worst_rho = std::max(worst_rho,
                                         std::abs(th.rho_at(it, ix, iy, iz) - Complex(div_a)));
                    worst_j = std::max(worst_j, std::sqrt(norm_sq(th.J_at(it, ix, iy, iz))));
                }
    CHECK(worst_rho < 1e-2);  // O(h^2) stencil error, three axes
    CHECK(worst_j < 1e-13);

    // scalar strength a = tau: rho = -d_tau a = -1 (modified system), J = 0
    const FieldStrength sc(BiquatField::sample(g, [](double tau, const Vec3&) {
        return FieldStrength::node(Complex(tau), {});
    }));
    const ChargeCurrent th2 = theta_of_field(sc);
    for (int it = 0; it < g.nt; ++it) {
        CHECK(std::abs(th2.rho_at(it, 2, 2, 2) - Complex(-1)) < 1e-12);
        CHECK(std::sqrt(norm_sq(th2.J_at(it, 2, 2, 2))) < 1e-12);
    }
}

TEST_CASE("maxwell residual is linear in the charge-current perturbation") {
    const Grid4 g(4, 4, 4, 4, 0.1, 0.1);
    const FieldStrength zero{BiquatField(g)};
    const ChargeCurrent zt{BiquatField(g)};
    CHECK(interior_max_norm(maxwell_residual(zero, zt), 0) == 0.0);

    std::mt19937_64 rng(51);
    BiquatField delta(g);
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = egmtest::random_biquat(rng);
    const ChargeCurrent perturbed(delta);
    const BiquatField r = maxwell_residual(zero, perturbed);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, norm(r[i] + delta[i]));
    CHECK(worst == 0.0);  // residual = -delta exactly
}

TEST_CASE("energy-momentum density and the ordering oracle") {
    const Grid4 g(3, 3, 3, 3, 0.1, 0.1);
    const MediumConstants unit(1.0, 1.0);

    const FieldStrength zero{BiquatField(g)};
    const EnergyMomentum em0 = energy_momentum(zero, unit);
    CHECK(em0.W_at(0, 0, 0, 0) == 0.0);

    // E = e1, H = e2: W = 1, P = e3
    const FieldStrength a =
        assemble_strength(uniform_vec(g, {1, 0, 0}), uniform_vec(g, {0, 1, 0}), unit);
    const EnergyMomentum em = energy_momentum(a, unit);
    CHECK(em.W_at(0, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    const Vec3 P = em.P_at(0, 0, 0, 0);
    CHECK(P.z == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(P.x) + std::abs(P.y) < 1e-14);

    // parallel E and H: P = 0
    const FieldStrength ap =
        assemble_strength(uniform_vec(g, {1, 0, 0}), uniform_vec(g, {2, 0, 0}), unit);
    CHECK(norm(energy_momentum(ap, unit).P_at(0, 0, 0, 0)) < 1e-14);

    // The 0.5 A∘A* ordering reproduces (W, P); the reversed ordering flips P.
    const Biquaternion Av = a.biquat()[0];
    const Biquaternion fwd = 0.5 * mul(Av, star(Av));
    const Biquaternion rev = 0.5 * mul(star(Av), Av);
    CHECK(fwd.v.z.imag() == doctest::Approx(1.0));
    CHECK(rev.v.z.imag() == doctest::Approx(-1.0));

    // ||P|| <= W everywhere on random real media inputs
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const MediumConstants m(1.7, 0.6);
    Vec3Field E(g), H(g);
    for (std::size_t i = 0; i < E.data.size(); ++i) {
        E.data[i] = {u(rng), u(rng), u(rng)};
        H.data[i] = {u(rng), u(rng), u(rng)};
    }
    const EnergyMomentum emr = energy_momentum(assemble_strength(E, H, m), m);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    CHECK(norm(emr.P_at(it, ix, iy, iz)) <=
                          emr.W_at(it, ix, iy, iz) + 1e-12);
                    // cross-check P against c^-1 E x H at the same node
                    const Vec3 p_ref =
                        (1.0 / m.c) * cross(E.at(it, ix, iy, iz), H.at(it, ix, iy, iz));
                    CHECK(norm(emr.P_at(it, ix, iy, iz) - p_ref) < 1e-12);
                }
}

TEST_CASE("wave residual of a Maxwell-consistent pair decays at 2nd order") {
    auto strength = [](double tau, const Vec3& p) {
        const double u = tau - p.x;
        return FieldStrength::node(Complex(0),
                                   {Complex(0), Complex(std::cos(u)), Complex(0, std::cos(u))});
    };
    double err[2];
    int pass = 0;
    for (double h : {0.1, 0.05}) {
        const Grid4 g(10, 10, 6, 6, h, h);
        const FieldStrength a(BiquatField::sample(g, strength));
        const ChargeCurrent th = theta_of_field(a);
        err[pass++] = interior_max_norm(wave_residual(a, th));
    }
    CHECK(err[0] / err[1] > 3.3);
    CHECK(err[0] / err[1] < 4.8);
}

TEST_CASE("component wave form matches the biquaternion gradient of theta") {
    // vector part of D- Theta is i rot J - grad rho - d_tau J
    auto rho_fn = [](double tau, const Vec3& p) {
        return Complex(std::cos(tau + p.y), 0.3 * std::sin(p.x));
    };
    auto j_fn = [](double tau, const Vec3& p) {
        return Vec3c{Complex(std::sin(p.y + 0.2 * tau), 0.1),
                     Complex(std::cos(p.z), std::sin(p.x)),
                     Complex(0.5 * std::cos(tau), std::cos(p.y))};
    };
    const Grid4 g(7, 7, 7, 7, 0.07, 0.07, 0.1, -0.2, 0.0, 0.1);
    const ChargeCurrent th(BiquatField::sample(g, [&](double tau, const Vec3& p) {
        return ChargeCurrent::node(rho_fn(tau, p), j_fn(tau, p));
    }));
    const BiquatField dm = d_minus(th.biquat());

    const double d = 1e-4;
    auto grad_rho = [&](double tau, const Vec3& p) {
        return Vec3c{(rho_fn(tau, {p.x + d, p.y, p.z}) - rho_fn(tau, {p.x - d, p.y, p.z})) /
                         (2 * d),
                     (rho_fn(tau, {p.x, p.y + d, p.z}) - rho_fn(tau, {p.x, p.y - d, p.z})) /
                         (2 * d),
                     (rho_fn(tau, {p.x, p.y, p.z + d}) - rho_fn(tau, {p.x, p.y, p.z - d})) /
                         (2 * d)};
    };
    auto dtau_j = [&](double tau, const Vec3& p) {
        const Vec3c a = j_fn(tau + d, p), b = j_fn(tau - d, p);
        return (1.0 / (2 * d)) * (a - b);
    };
    auto rot_j = [&](double tau, const Vec3& p) {
        auto at = [&](double dx, double dy, double dz) {
            return j_fn(tau, {p.x + dx, p.y + dy, p.z + dz});
        };
        const Vec3c dx = (1.0 / (2 * d)) * (at(d, 0, 0) - at(-d, 0, 0));
        const Vec3c dy = (1.0 / (2 * d)) * (at(0, d, 0) - at(0, -d, 0));
        const Vec3c dz = (1.0 / (2 * d)) * (at(0, 0, d) - at(0, 0, -d));
        return Vec3c{dy.z - dz.y, dz.x - dx.z, dx.y - dy.x};
    };

    double worst = 0.0;
    for (int pt = 0; pt < 10; ++pt) {
        const int it = 2 + pt % 3, ix = 2 + pt % 4, iy = 3, iz = 2 + pt % 3;
        const double tau = g.tau(it);
        const Vec3 p = g.point(ix, iy, iz);
        const Vec3c expect = IMAG_UNIT * rot_j(tau, p) - grad_rho(tau, p) - dtau_j(tau, p);
        worst = std::max(worst, std::sqrt(norm_sq(dm.at(it, ix, iy, iz).v - expect)));
    }
    CHECK(worst < 5e-3);  // grid stencil error dominates the fine-step oracle
}

TEST_CASE("charge conservation residual") {
    const Grid4 g(6, 8, 8, 8, 0.08, 0.1, 0.0, -0.4, -0.4, -0.4);

    // static rho, no current -> exactly conserved
    const ChargeCurrent stat(BiquatField::sample(g, [](double, const Vec3& p) {
        return ChargeCurrent::node(Complex(std::sin(p.x)), {});
    }));
    CHECK(interior_max_abs(charge_conservation_residual(stat)) < 1e-12);

    // rho = -tau div J0 + rho0(x), J = J0(x): conserved pair, O(h^2) discrete
    auto j0 = [](const Vec3& p) {
        return Vec3c{Complex(std::sin(p.y)), Complex(std::cos(p.x) * std::sin(p.z)),
                     Complex(0.3 * std::cos(p.x))};
    };
    auto div_j0 = [](const Vec3& p) { return -std::sin(p.x) * std::sin(p.z) * 0.0; };
    // div of the above: d/dx sin(y) = 0, d/dy (cos x sin z) = 0, d/dz (0.3 cos x) = 0
    const ChargeCurrent cons(BiquatField::sample(g, [&](double tau, const Vec3& p) {
        return ChargeCurrent::node(Complex(-tau * div_j0(p) + std::cos(p.x)), j0(p));
    }));
    CHECK(interior_max_abs(charge_conservation_residual(cons)) < 1e-12);

    // rho = tau -> residual 1
    const ChargeCurrent drift(BiquatField::sample(g, [](double tau, const Vec3&) {
        return ChargeCurrent::node(Complex(tau), {});
    }));
    const ScalarField r = charge_conservation_residual(drift);
    CHECK(interior_max_abs(r) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("energy conservation for a free plane wave") {
    auto wave = [](double tau, const Vec3& p) {
        const double u = tau - p.x;
        // E = e2 cos u, H = e3 cos u: unit-medium null field
        return FieldStrength::node(Complex(0),
                                   {Complex(0), Complex(std::cos(u)), Complex(0, std::cos(u))});
    };
    const MediumConstants unit(1.0, 1.0);
    // dtau = h/2 so the tau and x truncation errors do not cancel on the wave
    double err[2];
    int pass = 0;
    for (int n : {11, 21}) {
        const double h = 1.0 / (n - 1);
        const Grid4 g(n, n, 4, 4, 0.5 * h, h);
        const FieldStrength a(BiquatField::sample(g, wave));
        const ChargeCurrent zero{BiquatField(g)};
        const RealField r = energy_conservation_residual(a, zero, unit);
        err[pass++] = interior_max_abs(r, 1);
        CHECK(energy_rhs_component_gap(a, zero, unit) < 1e-13);
    }
    CHECK(err[0] / err[1] > 3.4);
    CHECK(err[0] / err[1] < 4.6);
}

TEST_CASE("lorenz gauge and potential-derived strength") {
    const Grid4 g(5, 6, 6, 6, 0.1, 0.1);
    // tau-independent phi with a divergence-free Psi satisfies the gauge
    const Potential pot(BiquatField::sample(g, [](double, const Vec3& p) {
        return Potential::node(Complex(std::sin(p.x)),
                               {Complex(-p.y), Complex(p.x), Complex(0.5)});
    }));
    CHECK(interior_max_abs(lorenz_gauge_residual(pot)) < 1e-12);
    const FieldStrength a = strength_of_potential(pot);
    double worst_scalar = 0.0;
    for (int it = 1; it < g.nt - 1; ++it)
        for (int ix = 1; ix < g.nx - 1; ++ix)
            for (int iy = 1; iy < g.ny - 1; ++iy)
                for (int iz = 1; iz < g.nz - 1; ++iz)
                    worst_scalar = std::max(worst_scalar, std::abs(a.a_at(it, ix, iy, iz)));
    CHECK(worst_scalar < 1e-12);
}

TEST_CASE("divergence identities recover the media charge definitions") {
    // rhoE = eps div E and rhoH = -mu div H, recovered from the strength
    // gradient to O(h^2) on manufactured fields
    const Grid4 g(5, 9, 9, 9, 0.1, 0.1, 0.0, -0.4, -0.4, -0.4);
    const MediumConstants m(1.6, 0.9);
    auto E_fn = [](const Vec3& p) {
        return Vec3{std::sin(p.x), 0.3 * std::cos(p.y), 0.2 * p.z};
    };
    auto H_fn = [](const Vec3& p) {
        return Vec3{0.4 * std::cos(p.y), std::sin(p.z), 0.5 * std::sin(p.x + p.y)};
    };
    auto div_E = [](const Vec3& p) { return std::cos(p.x) - 0.3 * std::sin(p.y) + 0.2; };
    const double div_H = 0.0;  // each component independent of its own axis

    Vec3Field E(g), H(g);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    E.at(it, ix, iy, iz) = E_fn(g.point(ix, iy, iz));
                    H.at(it, ix, iy, iz) = H_fn(g.point(ix, iy, iz));
                }
    const FieldStrength a = assemble_strength(E, H, m);
    const ChargeCurrent th = theta_of_field(a);
    double worst_e = 0.0, worst_h = 0.0;
    for (int it = 1; it < g.nt - 1; ++it)
        for (int ix = 1; ix < g.nx - 1; ++ix)
            for (int iy = 1; iy < g.ny - 1; ++iy)
                for (int iz = 1; iz < g.nz - 1; ++iz) {
                    const Vec3 p = g.point(ix, iy, iz);
                    const Complex rho = th.rho_at(it, ix, iy, iz);
                    // rho = rhoE/sqrt(eps) - i rhoH/sqrt(mu)
                    const double rhoE = rho.real() * m.sqrt_eps;
                    const double rhoH = -rho.imag() * m.sqrt_mu;
                    worst_e = std::max(worst_e, std::abs(rhoE - m.eps * div_E(p)));
                    worst_h = std::max(worst_h, std::abs(rhoH - (-m.mu * div_H)));
                }
    CHECK(worst_e < 5e-3);
    CHECK(worst_h < 5e-3);
}

TEST_CASE("potential chain: charges equal the wave operator of the potential") {
    // Theta = D+ D- Phi, which must agree with box Phi on the interior
    const Grid4 g(8, 8, 8, 8, 0.06, 0.08, 0.0, -0.3, -0.3, -0.3);
    const Potential pot(BiquatField::sample(g, [](double tau, const Vec3& p) {
        return Potential::node(Complex(std::cos(tau - p.x), 0.2 * std::sin(p.y)),
                               {Complex(0.4 * std::sin(tau + p.z)), Complex(0.3 * std::cos(p.x)),
                                Complex(0.1)});
    }));
    const ChargeCurrent th = theta_of_field(strength_of_potential(pot));
    const BiquatField boxed = box_direct(pot.biquat());
    double worst = 0.0;
    for (int it = 2; it < g.nt - 2; ++it)
        for (int ix = 2; ix < g.nx - 2; ++ix)
            for (int iy = 2; iy < g.ny - 2; ++iy)
                for (int iz = 2; iz < g.nz - 2; ++iz)
                    worst = std::max(worst, norm(th.biquat().at(it, ix, iy, iz) -
                                                 boxed.at(it, ix, iy, iz)));
    CHECK(worst < 5e-2);  // O(h^2) agreement of the two discrete routes
}
