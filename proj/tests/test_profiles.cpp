#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "twistel/errors.hpp"
#include "twistel/profiles.hpp"
#include "twistel/radial_grid.hpp"

using namespace twistel;

TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(validate(p));
    p.m = 2;
    CHECK_THROWS_WITH_AS(validate(p), "|m| must be >= 3", std::invalid_argument);
    p.m = 3;
    p.mu = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.mu = 1.0;
    p.r0 = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("equilibrium profile matches the hyperbolic oracle") {
    for (int m : {3, 4, 5}) {
        for (double rho : {0.0, 1e-3, 0.3, 1.0, 2.0, 7.5, 40.0}) {
            CAPTURE(m);
            CAPTURE(rho);
            CHECK(profile_h1(rho, m) == doctest::Approx(oracle::h1(rho, m)).epsilon(1e-12));
            CHECK(profile_h3(rho, m) == doctest::Approx(oracle::h3(rho, m)).epsilon(1e-12));
        }
    }
    // rational anchor at rho = 2, m = 3
    CHECK(profile_h1(2.0, 3) == doctest::Approx(16.0 / 65.0).epsilon(1e-15));
    CHECK(profile_h3(2.0, 3) == doctest::Approx(63.0 / 65.0).epsilon(1e-15));
    // endpoint limits
    CHECK(profile_h1(0.0, 4) == 0.0);
    CHECK(profile_h3(0.0, 4) == -1.0);
    CHECK(profile_h1(1.0, 5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(profile_h3(1.0, 5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(profile_h1(-0.1, 3), std::invalid_argument);
    CHECK_THROWS_AS(profile_h3(-0.1, 3), std::invalid_argument);
}

TEST_CASE("profile derivative identities") {
    // h1' = -(m/rho) h1 h3 and h3' = (m/rho) h1^2, checked by central differences
    for (int m : {3, 4}) {
        for (double rho : {0.4, 1.0, 1.7, 3.2}) {
            double d = 1e-6 * rho;
            double d1 = (profile_h1(rho + d, m) - profile_h1(rho - d, m)) / (2.0 * d);
            double d3 = (profile_h3(rho + d, m) - profile_h3(rho - d, m)) / (2.0 * d);
            double h1 = profile_h1(rho, m), h3 = profile_h3(rho, m);
            CAPTURE(m);
            CAPTURE(rho);
            CHECK(d1 == doctest::Approx(-(m / rho) * h1 * h3).epsilon(1e-7));
            CHECK(d3 == doctest::Approx((m / rho) * h1 * h1).epsilon(1e-7));
        }
    }
    for (double rho : {0.0, 0.2, 1.0, 5.0, 60.0}) {
        Vec3 h = harmonic_profile(rho, 3);
        CHECK(h[1] == 0.0);
        CHECK(dot(h, h) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("profile mass integrals hit their closed forms") {
    for (int m : {3, 4, 5}) {
        double want = oracle::mass_integral(m);
        // independent quadrature route
        double got = oracle::integrate(
            [m](double rho) { return oracle::h1(rho, m) * oracle::h1(rho, m) * rho; }, 0.0, 200.0,
            1e-13);
        CAPTURE(m);
        CHECK(got == doctest::Approx(want).epsilon(1e-8));

        // first moment against h3 carries an exact factor 1/m
        double first = oracle::integrate(
            [m](double rho) {
                double h1 = oracle::h1(rho, m);
                return h1 * h1 * oracle::h3(rho, m) * rho;
            },
            0.0, 200.0, 1e-13);
        CHECK(first == doctest::Approx(want / m).epsilon(1e-7));

        // grid trapezoid reaches the same value
        RadialGrid g = make_grid(60.0, 2049, GridKind::Geometric);
        std::vector<double> f(g.n());
        for (int i = 0; i < g.n(); ++i) {
            double h1 = profile_h1(g.r[i], m);
            f[i] = h1 * h1;
        }
        CHECK(integrate_radial(f, g) == doctest::Approx(want).epsilon(1e-5));
    }
}

TEST_CASE("finite rotations about e3") {
    Vec3 e1{1.0, 0.0, 0.0};
    Vec3 got = rotate_e3(e1, 1.5707963267948966);
    CHECK(got[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(got[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(got[2] == 0.0);

    // composition and inverse
    Vec3 v{0.3, -0.7, 0.55};
    Vec3 once = rotate_e3(rotate_e3(v, 0.4), 0.9);
    Vec3 both = rotate_e3(v, 1.3);
    for (int k = 0; k < 3; ++k)
        CHECK(once[k] == doctest::Approx(both[k]).epsilon(1e-14));
    Vec3 back = rotate_e3(rotate_e3(v, 2.1), -2.1);
    for (int k = 0; k < 3; ++k)
        CHECK(back[k] == doctest::Approx(v[k]).epsilon(1e-14));

    // generator relations: R^2 v = rot_gen2 v
    Vec3 rr = rot_gen(rot_gen(v));
    Vec3 r2 = rot_gen2(v);
    for (int k = 0; k < 3; ++k)
        CHECK(rr[k] == doctest::Approx(r2[k]).epsilon(1e-16));

    Vec3 prof = rotated_scaled_profile(1.2, 0.7, 0.6, 3);
    Vec3 manual = rotate_e3(harmonic_profile(2.0, 3), 0.7);
    for (int k = 0; k < 3; ++k)
        CHECK(prof[k] == doctest::Approx(manual[k]).epsilon(1e-15));
}

TEST_CASE("spreading vortex solves its heat equation") {
    double omega = 0.7, r0 = 1.3;
    for (double t : {0.0, 0.5, 2.0}) {
        for (double r : {0.2, 1.0, 3.0, 8.0}) {
            double dr = 1e-4 * (1.0 + r);
            double dt = 1e-5;
            double wt = (oseen_w(r, t + dt, omega, r0) - oseen_w(r, t, omega, r0)) / dt;
            double wp =
                (oseen_w(r + dr, t, omega, r0) - oseen_w(r - dr, t, omega, r0)) / (2.0 * dr);
            double wpp = (oseen_w(r + dr, t, omega, r0) - 2.0 * oseen_w(r, t, omega, r0) +
                          oseen_w(r - dr, t, omega, r0)) /
                         (dr * dr);
            CAPTURE(t);
            CAPTURE(r);
            CHECK(std::abs(wt - (wpp - wp / r)) < 2e-4 * omega);
        }
    }

    // endpoint values and the r^2-normalized form
    CHECK(oseen_w(0.0, 1.0, omega, r0) == 0.0);
    CHECK(oseen_w(40.0, 0.0, omega, r0) == doctest::Approx(omega).epsilon(1e-12));
    for (double r : {0.05, 0.5, 2.0}) {
        double direct = oseen_w(r, 0.4, omega, r0) / (r * r);
        CHECK(oseen_w_over_r2(r, 0.4, omega, r0) == doctest::Approx(direct).epsilon(1e-11));
    }
    // axis limit omega / l and series continuity across the switch
    CHECK(oseen_w_over_r2(0.0, 0.5, omega, r0) ==
          doctest::Approx(omega / (4.0 * 0.5 + r0 * r0)).epsilon(1e-14));
    double below = oseen_w_over_r2(0.0316, 0.0, omega, 1.0);
    double above = oseen_w_over_r2(0.0317, 0.0, omega, 1.0);
    CHECK(below == doctest::Approx(above).epsilon(1e-5));

    // derivative of the normalized form against central differences
    for (double r : {0.01, 0.3, 1.5, 5.0}) {
        double d = 1e-5;
        double fd = (oseen_w_over_r2(r + d, 0.7, omega, r0) -
                     oseen_w_over_r2(r - d, 0.7, omega, r0)) /
                    (2.0 * d);
        CHECK(oseen_w_over_r2_deriv(r, 0.7, omega, r0) == doctest::Approx(fd).epsilon(1e-6));
    }

    RadialGrid g = make_grid(10.0, 65, GridKind::Uniform);
    std::vector<double> field = oseen_field(g, 0.3, omega, r0);
    for (int i = 0; i < g.n(); ++i)
        CHECK(field[i] == oseen_w(g.r[i], 0.3, omega, r0));
}

TEST_CASE("gamma of z") {
    CHECK(gamma_of_z(cplx{0.0, 0.0}) == 0.0);
    CHECK(gamma_of_z(cplx{0.3, 0.4}) == doctest::Approx(std::sqrt(0.75) - 1.0).epsilon(1e-15));
    CHECK(gamma_of_z(cplx{0.0, 0.5}) == doctest::Approx(std::sqrt(0.75) - 1.0).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_of_z(cplx{0.51, 0.0}), std::invalid_argument);
}

TEST_CASE("bump perturbations are orthogonal, scaled and validated") {
    RadialGrid g = make_grid(50.0, 1025, GridKind::Geometric);
    double amp = 1e-2;
    std::vector<cplx> z = make_bump_perturbation(BumpSpec{}, amp, g, 3);
    REQUIRE(int(z.size()) == g.n());
    CHECK(z[0] == cplx{0.0, 0.0});

    double sup = 0.0;
    for (const cplx& v : z)
        sup = std::max(sup, std::abs(v));
    CHECK(sup == doctest::Approx(amp).epsilon(1e-12));

    std::vector<cplx> zh(g.n());
    for (int i = 0; i < g.n(); ++i)
        zh[i] = z[i] * profile_h1(g.r[i], 3);
    CHECK(std::abs(integrate_radial(zh, g)) < 1e-12);

    CHECK_THROWS_AS(make_bump_perturbation(BumpSpec{}, 0.5, g, 3), std::invalid_argument);

    std::vector<cplx> zero = make_test_perturbation("zero", 0.0, g, 3);
    for (const cplx& v : zero)
        CHECK(v == cplx{0.0, 0.0});
    std::vector<cplx> outer = make_test_perturbation("bump-outer", amp, g, 3);
    CHECK(oracle::max_abs_diff(outer, z) > 1e-4);
    CHECK_THROWS_AS(make_test_perturbation("spiral", amp, g, 3), std::invalid_argument);
}

TEST_CASE("seed flows carry the requested norms") {
    RadialGrid g = make_grid(30.0, 1025, GridKind::Geometric);
    double l2 = 2.5e-3, width = 1.4;

    std::vector<double> v = make_gaussian_vin(l2, width, g);
    std::vector<double> v2(g.n());
    for (int i = 0; i < g.n(); ++i)
        v2[i] = v[i] * v[i];
    CHECK(std::sqrt(integrate_radial(v2, g)) == doctest::Approx(l2).epsilon(1e-6));

    std::vector<double> w = make_wstar_in(l2, width, g);
    CHECK(w[0] == 0.0);
    std::vector<double> wr = divide_by_r(w, g);
    std::vector<double> wr2(g.n());
    for (int i = 0; i < g.n(); ++i)
        wr2[i] = wr[i] * wr[i];
    CHECK(std::sqrt(integrate_radial(wr2, g)) == doctest::Approx(l2).epsilon(1e-6));

    CHECK_THROWS_AS(make_gaussian_vin(-1.0, width, g), std::invalid_argument);
    CHECK_THROWS_AS(make_wstar_in(l2, 0.0, g), std::invalid_argument);
}

TEST_CASE("initial data assembly and state validation") {
    RadialGrid g = make_grid(25.0, 513, GridKind::Geometric);
    ModelParams p;
    p.omega = 0.4;
    RadialGrid rho = scaled_grid(g, 1.0 / 0.5);
    std::vector<cplx> z = make_bump_perturbation(BumpSpec{}, 1e-3, rho, p.m);
    std::vector<double> zero(g.n(), 0.0);

    EquivariantState s = build_initial_data(g, p, 0.5, 0.8, z, zero, zero);
    CHECK_NOTHROW(validate_state(s, g));
    CHECK(s.t == 0.0);
    CHECK(s.phi[0][0] == 0.0);
    CHECK(s.phi[0][1] == 0.0);
    CHECK(s.phi[0][2] == -1.0);
    for (int i = 0; i < g.n(); ++i)
        CHECK(dot(s.phi[i], s.phi[i]) == doctest::Approx(1.0).epsilon(1e-13));
    // with no swirl excess W starts exactly on the vortex profile
    for (int i = 0; i < g.n(); ++i)
        CHECK(s.W[i] == doctest::Approx(oseen_w(g.r[i], 0.0, p.omega, p.r0)).epsilon(1e-14));

    EquivariantState broken = s;
    broken.phi[40] = Vec3{0.5, 0.0, 0.0};
    CHECK_THROWS_AS(validate_state(broken, g), UnitNormViolation);
    broken = s;
    broken.W[0] = 0.1;
    CHECK_THROWS_AS(validate_state(broken, g), std::invalid_argument);
    broken = s;
    broken.V.pop_back();
    CHECK_THROWS_AS(validate_state(broken, g), SizeMismatch);

    std::vector<cplx> short_z(z.begin(), z.end() - 1);
    CHECK_THROWS_AS(build_initial_data(g, p, 0.5, 0.0, short_z, zero, zero), SizeMismatch);
    CHECK_THROWS_AS(build_initial_data(g, p, 0.0, 0.0, z, zero, zero), std::invalid_argument);
}

TEST_CASE("three dimensional reconstruction") {
    RadialGrid g = make_grid(25.0, 513, GridKind::Geometric);
    ModelParams p;
    p.omega = 0.6;
    std::vector<cplx> z(g.n(), cplx{0.0, 0.0});
    std::vector<double> zero(g.n(), 0.0);
    std::vector<double> vin = make_gaussian_vin(1e-2, 1.0, g);
    EquivariantState s = build_initial_data(g, p, 0.5, 0.0, z, vin, zero);

    double d = 1.7;
    std::vector<SamplePoint> pts{{d, 0.0, 0.0}, {0.0, 0.0, 0.9}, {0.0, d, 0.3}};
    Reconstruction3D rec = reconstruct_3d(s, g, p, pts);
    REQUIRE(rec.velocity.size() == 3);

    // on the x1 axis the director is phi(d) itself and the swirl points along e2
    Vec3 want_dir = rotated_scaled_profile(d, 0.0, 0.5, p.m);
    for (int k = 0; k < 3; ++k)
        CHECK(rec.director[0][k] == doctest::Approx(want_dir[k]).epsilon(1e-6));
    CHECK(rec.velocity[0][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rec.velocity[0][1] == doctest::Approx(oseen_w(d, 0.0, p.omega, p.r0) / d).epsilon(1e-5));

    // on the vertical axis the director is -e3 twisted about e3, hence -e3
    CHECK(rec.director[1][2] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(rec.velocity[1][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rec.velocity[1][1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rec.velocity[1][2] == doctest::Approx(vin[0]).epsilon(1e-5));

    // a quarter turn in the plane plus lift: m theta + mu x3 rotates the profile
    double alpha = p.m * 1.5707963267948966 + p.mu * 0.3;
    Vec3 want_rot = rotated_scaled_profile(d, alpha, 0.5, p.m);
    for (int k = 0; k < 3; ++k)
        CHECK(rec.director[2][k] == doctest::Approx(want_rot[k]).epsilon(1e-6));
}
