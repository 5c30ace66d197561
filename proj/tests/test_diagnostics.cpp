#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "twistel/diagnostics.hpp"
#include "twistel/errors.hpp"
#include "twistel/gauge.hpp"
#include "twistel/modulation.hpp"
#include "twistel/profiles.hpp"
#include "twistel/radial_grid.hpp"

using namespace twistel;

TEST_CASE("energy report on a pure bubble matches closed forms") {
    ModelParams p;
    RadialGrid g = make_grid(15.0, 1024, GridKind::Geometric);
    const double sig = 0.5;

    EquivariantState s;
    s.t = 0.0;
    s.phi.resize(g.n());
    for (int i = 0; i < g.n(); ++i) s.phi[i] = harmonic_profile(g.r[i] / sig, p.m);
    s.W.assign(g.n(), 0.0);
    s.V.assign(g.n(), 0.0);

    const GaugeFields gf = compute_gauge(s, g, p);
    const EnergyReport rep = energy_report(s, gf, g, p);

    // |v|^2 = 1 - phi3^2 = h1^2 exactly, so E = mu^2 sigma^2 M with
    // M = int h1^2 rho drho = 2 pi / (m^2 sin(pi/m)).
    const double M = oracle::mass_integral(p.m);
    CHECK(rep.E == doctest::Approx(p.mu * p.mu * sig * sig * M).epsilon(1e-5));
    CHECK(rep.Estar < 1e-10); // q, V, W* all vanish for the bubble
    CHECK(rep.q_l2 < 1e-5);
    CHECK(rep.V_l2 == 0.0);
    CHECK(rep.wstar_over_r_l2 == 0.0);
    CHECK(rep.forcing == 0.0);
    CHECK(rep.v_l2 == doctest::Approx(sig * std::sqrt(M)).epsilon(1e-5));

    // Without flows the dissipation reduces to mu^4 int |v phi3|^2 r dr
    // = mu^4 sigma^2 int h1^2 h3^2 rho drho.
    const int m = p.m;
    const double I = oracle::integrate(
        [m](double rho) {
            const double h1 = oracle::h1(rho, m);
            const double h3 = oracle::h3(rho, m);
            return h1 * h1 * h3 * h3 * rho;
        },
        0.0, 60.0);
    CHECK(rep.dissipation ==
          doctest::Approx(std::pow(p.mu, 4) * sig * sig * I).epsilon(1e-4));
}

TEST_CASE("energy identity residual is plain algebra") {
    CHECK(energy_identity_residual(3.0, 5.0, 0.5, 0.7, 0.2) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(energy_identity_residual(5.0, 3.0, 1.0, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(energy_identity_residual(1.0, 1.0, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(energy_identity_residual(1.0, 1.0, -0.1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("exponential rate fit recovers synthetic slopes") {
    std::vector<double> t, v;
    for (int i = 0; i < 20; ++i) {
        t.push_back(0.1 * i);
        v.push_back(3.0 * std::exp(-0.7 * t.back()));
    }
    FitResult fit = fit_exponential_rate(t, v, 0.0, 2.0);
    CHECK(fit.rate == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.samples == 20);

    // window restriction keeps exactly the samples inside it
    fit = fit_exponential_rate(t, v, 0.5, 1.45);
    CHECK(fit.samples == 10);
    CHECK(fit.rate == doctest::Approx(-0.7).epsilon(1e-12));

    // multiplicative noise costs correlation but not much slope
    std::vector<double> vn(v);
    for (size_t i = 0; i < vn.size(); ++i) vn[i] *= 1.0 + 0.05 * std::sin(13.0 * t[i]);
    fit = fit_exponential_rate(t, vn, 0.0, 2.0);
    CHECK(fit.r2 < 1.0 - 1e-6);
    CHECK(fit.r2 > 0.9);
    CHECK(fit.rate == doctest::Approx(-0.7).epsilon(0.1));

    // a constant series has zero rate and a perfect fit by convention
    std::vector<double> vc(t.size(), 3.0);
    fit = fit_exponential_rate(t, vc, 0.0, 2.0);
    CHECK(fit.rate == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fit.r2 == 1.0);

    std::vector<double> t_short(t.begin(), t.begin() + 5);
    std::vector<double> v_short(v.begin(), v.begin() + 5);
    CHECK_THROWS_AS(fit_exponential_rate(t_short, v_short, 0.0, 2.0), std::invalid_argument);
    std::vector<double> vz(v);
    vz[7] = 0.0;
    CHECK_THROWS_AS(fit_exponential_rate(t, vz, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponential_rate(t_short, v, 0.0, 2.0), SizeMismatch);
}

TEST_CASE("decay bound check compares window constants") {
    std::vector<double> t, v1, v05;
    for (int i = 0; i <= 80; ++i) {
        t.push_back(0.05 * i);
        v1.push_back(1.0 / (1.0 + t.back()));
        v05.push_back(1.0 / std::sqrt(1.0 + t.back()));
    }

    DecayCheck chk = decay_bound_check(t, v1, -1.0, true, 1.0, 4.0);
    CHECK(chk.pass);
    CHECK(chk.c_first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chk.c_second == doctest::Approx(1.0).epsilon(1e-12));

    // (1+t)^{-1/2} does not satisfy a (1+t)^{-1} bound with a stable constant
    chk = decay_bound_check(t, v05, -1.0, true, 1.0, 4.0);
    CHECK(!chk.pass);
    CHECK(chk.c_second > chk.c_first);

    // plain base t
    std::vector<double> vt;
    for (double tv : t) vt.push_back(2.0 / std::max(tv, 1e-300));
    chk = decay_bound_check(t, vt, -1.0, false, 1.0, 4.0);
    CHECK(chk.pass);
    CHECK(chk.c_first == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(decay_bound_check(t, v1, -1.0, true, 1.0, 1.04), std::invalid_argument);
    CHECK_THROWS_AS(decay_bound_check(t, v1, -1.0, false, 0.0, 4.0), std::invalid_argument);
    std::vector<double> t_short(t.begin(), t.end() - 1);
    CHECK_THROWS_AS(decay_bound_check(t_short, v1, -1.0, true, 1.0, 4.0), SizeMismatch);
}

TEST_CASE("deformation coercivity spectrum") {
    for (int m : {3, 4}) {
        double prev = 0.0;
        for (int n : {256, 512}) {
            RadialGrid g = make_grid(30.0, n, GridKind::Geometric);

            CoercivityResult unc = coercivity_spectrum(g, m, false);
            CHECK(std::abs(unc.min_quotient) < 1e-10); // h1 spans the kernel
            CHECK(unc.kernel_alignment > 0.9999);

            CoercivityResult con = coercivity_spectrum(g, m, true);
            CHECK(con.min_quotient > 0.2);
            CHECK(con.kernel_alignment < 0.5); // constrained minimizer leaves the kernel
            if (prev > 0.0) CHECK(con.min_quotient == doctest::Approx(prev).epsilon(0.05));
            prev = con.min_quotient;
        }
    }
    RadialGrid big = make_grid(30.0, 4096, GridKind::Geometric);
    CHECK_THROWS_AS(coercivity_spectrum(big, 3, false), std::invalid_argument);
}

namespace {

ModulationFrame scaled_bump_frame(const RadialGrid& g, int m, const BumpSpec& bs, double target,
                                  double theta) {
    ModulationFrame fr;
    fr.sigma = 1.0;
    fr.theta = theta;
    fr.rho_grid = g;
    fr.z = make_bump_perturbation(bs, 1e-3, g, m);
    const double xn = x_norm(fr.z, fr.rho_grid);
    for (auto& zz : fr.z) zz *= target / xn;
    fr.gamma.resize(g.n());
    for (int i = 0; i < g.n(); ++i) fr.gamma[i] = gamma_of_z(fr.z[i]);
    return fr;
}

} // namespace

TEST_CASE("gauge norm is equivalent to the deformation norm") {
    ModelParams p;
    RadialGrid g = make_grid(30.0, 512, GridKind::Geometric);

    std::vector<ModulationFrame> frames;
    for (double amp : {1e-4, 1e-3, 3e-3, 1e-2}) {
        BumpSpec inner;
        frames.push_back(scaled_bump_frame(g, p.m, inner, amp, 0.0));
        BumpSpec outer;
        outer.rho0 = 2.2;
        outer.width = 1.1;
        outer.phase = 1.9;
        frames.push_back(scaled_bump_frame(g, p.m, outer, amp, 0.7));
    }

    RatioStats st = check_norm_equivalence(g, p, frames);
    CHECK(st.count == 8);
    CHECK(st.min_ratio > 0.5);
    CHECK(st.max_ratio / st.min_ratio < 10.0);

    CHECK_THROWS_AS(check_norm_equivalence(g, p, {}), std::invalid_argument);
}

TEST_CASE("gauge operator coercivity ratio is stable under refinement") {
    ModelParams p;
    double prev = 0.0;
    for (int n : {512, 1024}) {
        RadialGrid g = make_grid(30.0, n, GridKind::Geometric);
        BumpSpec outer;
        outer.rho0 = 2.2;
        outer.width = 1.1;
        outer.phase = 1.9;
        ModulationFrame fr = scaled_bump_frame(g, p.m, outer, 3e-3, 0.7);

        EquivariantState s;
        s.t = 0.0;
        s.phi = synthesize_director(fr, g, p.m);
        s.W.assign(g.n(), 0.0);
        s.V.assign(g.n(), 0.0);
        const GaugeFields gf = compute_gauge(s, g, p);

        const double ratio = lm_coercivity_ratio(s, gf, g, p.m);
        CHECK(ratio > 0.0);
        CHECK(ratio < 10.0);
        if (prev > 0.0) CHECK(ratio == doctest::Approx(prev).epsilon(0.02));
        prev = ratio;
    }
}

TEST_CASE("bootstrap assumption check follows its band and budget") {
    ModelParams p;
    const double sigma_in = 0.5;
    const double eps = 0.2;
    const double eps_star = 0.1;
    const double mm = static_cast<double>(p.m * p.m);

    const double t = 1.0;
    const double ref = sigma_in * std::exp(-p.mu * p.mu * t / mm);
    BootstrapCheck chk = bootstrap_assumption_check(t, ref, 0.0, p, sigma_in, eps, eps_star);
    CHECK(chk.a1);
    CHECK(chk.a2);
    CHECK(chk.sigma_lo == doctest::Approx((1.0 - 0.5 * eps) * ref).epsilon(1e-14));
    CHECK(chk.sigma_hi == doctest::Approx((1.0 + 0.5 * eps) * ref).epsilon(1e-14));
    CHECK(chk.v2_budget ==
          doctest::Approx(std::pow(eps_star, 1.5) / ((1.0 + t) * (1.0 + t))).epsilon(1e-14));

    // just inside and just outside the band
    chk = bootstrap_assumption_check(t, ref * (1.0 + 0.49 * eps), 0.0, p, sigma_in, eps, eps_star);
    CHECK(chk.a1);
    chk = bootstrap_assumption_check(t, ref * (1.0 + 0.51 * eps), 0.0, p, sigma_in, eps, eps_star);
    CHECK(!chk.a1);
    chk = bootstrap_assumption_check(t, ref * (1.0 - 0.51 * eps), 0.0, p, sigma_in, eps, eps_star);
    CHECK(!chk.a1);

    const double budget = std::pow(eps_star, 1.5) / ((1.0 + t) * (1.0 + t));
    chk = bootstrap_assumption_check(t, ref, 0.99 * std::sqrt(budget), p, sigma_in, eps, eps_star);
    CHECK(chk.a2);
    chk = bootstrap_assumption_check(t, ref, 1.01 * std::sqrt(budget), p, sigma_in, eps, eps_star);
    CHECK(!chk.a2);
}
