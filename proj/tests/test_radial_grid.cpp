#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "twistel/errors.hpp"
#include "twistel/radial_grid.hpp"

using namespace twistel;

namespace {

std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
    std::vector<double> out(g.n());
    for (int i = 0; i < g.n(); ++i)
        out[i] = f(g.r[i]);
    return out;
}

double test_f(double r) { return std::exp(-r) * std::sin(2.0 * r); }
double test_f1(double r) { return std::exp(-r) * (2.0 * std::cos(2.0 * r) - std::sin(2.0 * r)); }
double test_f2(double r) {
    return std::exp(-r) * (-4.0 * std::cos(2.0 * r) - 3.0 * std::sin(2.0 * r));
}

double max_err(const std::vector<double>& got, const RadialGrid& g, double (*exact)(double)) {
    double worst = 0.0;
    for (int i = 0; i < g.n(); ++i)
        worst = std::max(worst, std::abs(got[i] - exact(g.r[i])));
    return worst;
}

} // namespace

TEST_CASE("grid construction basics") {
    RadialGrid gu = make_grid(10.0, 101, GridKind::Uniform);
    CHECK(gu.n() == 101);
    CHECK(gu.r.front() == 0.0);
    CHECK(gu.r.back() == doctest::Approx(10.0).epsilon(1e-15));
    for (int i = 1; i < gu.n(); ++i) {
        CHECK(gu.r[i] > gu.r[i - 1]);
        CHECK(gu.r[i] - gu.r[i - 1] == doctest::Approx(0.1).epsilon(1e-12));
    }

    // weights are the trapezoid cell halves and sum to the domain length
    double wsum = 0.0;
    for (double w : gu.w)
        wsum += w;
    CHECK(wsum == doctest::Approx(10.0).epsilon(1e-13));

    RadialGrid gg = make_grid(20.0, 257, GridKind::Geometric);
    CHECK(gg.beta > 0.0);
    int below_twentieth = 0;
    for (double r : gg.r)
        if (r < 1.0)
            ++below_twentieth;
    CHECK(below_twentieth >= 257 / 4);
    CHECK(gg.r[2] < 20.0 / 100.0);
}

TEST_CASE("grid construction rejects bad arguments") {
    CHECK_THROWS_AS(make_grid(0.0, 64, GridKind::Uniform), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 64, GridKind::Uniform), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(10.0, 8, GridKind::Uniform), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(10.0, 64, GridKind::Geometric, -2.0), std::invalid_argument);
}

TEST_CASE("fornberg weights reproduce classic stencils") {
    double x[3] = {-0.5, 0.0, 0.5};
    double w[3];
    fornberg_weights(0.0, x, 3, 1, w);
    CHECK(w[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(1.0).epsilon(1e-14));
    fornberg_weights(0.0, x, 3, 2, w);
    CHECK(w[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(-8.0).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("derivatives converge at second order on graded grids") {
    for (int order = 1; order <= 2; ++order) {
        RadialGrid g1 = make_grid(10.0, 301, GridKind::Geometric, 3.0);
        RadialGrid g2 = make_grid(10.0, 601, GridKind::Geometric, 3.0);
        double e1 = max_err(apply_derivative(sample(g1, test_f), g1, order), g1,
                            order == 1 ? test_f1 : test_f2);
        double e2 = max_err(apply_derivative(sample(g2, test_f), g2, order), g2,
                            order == 1 ? test_f1 : test_f2);
        CAPTURE(order);
        CHECK(e1 / e2 >= 3.6); // order two gives a factor of four per halving
    }
}

TEST_CASE("high order first derivative converges at fourth order") {
    RadialGrid g1 = make_grid(10.0, 301, GridKind::Geometric, 3.0);
    RadialGrid g2 = make_grid(10.0, 601, GridKind::Geometric, 3.0);
    double e1 = max_err(derivative_hi(sample(g1, test_f), g1), g1, test_f1);
    double e2 = max_err(derivative_hi(sample(g2, test_f), g2), g2, test_f1);
    CHECK(e1 / e2 >= 14.0); // order four gives a factor of sixteen
    CHECK(e2 < 1e-7);
}

TEST_CASE("radial quadrature matches the adaptive oracle") {
    RadialGrid g = make_grid(12.0, 2049, GridKind::Geometric, 3.0);
    std::vector<double> f(g.n());
    for (int i = 0; i < g.n(); ++i)
        f[i] = std::exp(-g.r[i] * g.r[i]);
    double got = integrate_radial(f, g);
    double want = oracle::integrate([](double r) { return std::exp(-r * r) * r; }, 0.0, 12.0);
    CHECK(want == doctest::Approx(0.5).epsilon(1e-10)); // closed form of the oracle target
    CHECK(got == doctest::Approx(want).epsilon(2e-6));

    // trapezoid convergence: one refinement gains about a factor of four
    RadialGrid gc = make_grid(12.0, 513, GridKind::Geometric, 3.0);
    RadialGrid gf = make_grid(12.0, 1025, GridKind::Geometric, 3.0);
    std::vector<double> fc(gc.n()), ff(gf.n());
    for (int i = 0; i < gc.n(); ++i)
        fc[i] = std::exp(-gc.r[i] * gc.r[i]);
    for (int i = 0; i < gf.n(); ++i)
        ff[i] = std::exp(-gf.r[i] * gf.r[i]);
    double ec = std::abs(integrate_radial(fc, gc) - want);
    double ef = std::abs(integrate_radial(ff, gf) - want);
    CHECK(ec / ef >= 3.5);

    // plain measure on the same data
    double plain = integrate_plain(f, g);
    double plain_want = oracle::integrate([](double r) { return std::exp(-r * r); }, 0.0, 12.0);
    CHECK(plain == doctest::Approx(plain_want).epsilon(1e-5));
}

TEST_CASE("complex overloads agree with the real ones componentwise") {
    RadialGrid g = make_grid(8.0, 201, GridKind::Geometric, 2.5);
    std::vector<cplx> f(g.n());
    std::vector<double> fr(g.n()), fi(g.n());
    for (int i = 0; i < g.n(); ++i) {
        fr[i] = std::sin(g.r[i]);
        fi[i] = std::exp(-g.r[i]);
        f[i] = cplx{fr[i], fi[i]};
    }
    std::vector<cplx> d = apply_derivative(f, g, 1);
    std::vector<double> dr = apply_derivative(fr, g, 1);
    std::vector<double> di = apply_derivative(fi, g, 1);
    double worst = 0.0;
    for (int i = 0; i < g.n(); ++i)
        worst = std::max(worst, std::abs(d[i] - cplx{dr[i], di[i]}));
    CHECK(worst == 0.0);

    cplx total = integrate_radial(f, g);
    CHECK(total.real() == doctest::Approx(integrate_radial(fr, g)).epsilon(1e-15));
    CHECK(total.imag() == doctest::Approx(integrate_radial(fi, g)).epsilon(1e-15));
}

TEST_CASE("radial laplacians are exact on quadratics") {
    RadialGrid g = make_grid(5.0, 129, GridKind::Geometric, 2.0);
    std::vector<double> f(g.n());
    for (int i = 0; i < g.n(); ++i)
        f[i] = g.r[i] * g.r[i];

    // f'' + f'/r on r^2 equals 4 everywhere, including the axis limit
    std::vector<double> lap = apply_radial_laplacian(f, g, 1);
    for (int i = 0; i < g.n(); ++i)
        CHECK(lap[i] == doctest::Approx(4.0).epsilon(1e-8));

    // f'' - f'/r on r^2 vanishes identically
    std::vector<double> swirl = apply_radial_laplacian(f, g, -1);
    for (int i = 0; i < g.n(); ++i)
        CHECK(std::abs(swirl[i]) < 1e-8);
}

TEST_CASE("division by r handles the axis by extrapolation") {
    RadialGrid g = make_grid(6.0, 201, GridKind::Geometric, 2.0);
    std::vector<double> f(g.n());
    for (int i = 0; i < g.n(); ++i)
        f[i] = g.r[i] * std::cos(g.r[i]);
    std::vector<double> q = divide_by_r(f, g);
    double worst = 0.0;
    for (int i = 1; i < g.n(); ++i)
        worst = std::max(worst, std::abs(q[i] - std::cos(g.r[i])));
    CHECK(worst < 1e-12);
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-6));

    // a field that does not vanish at the axis is a usage error
    std::vector<double> bad(g.n(), 1.0);
    CHECK_THROWS_AS(divide_by_r(bad, g), AxisSingularity);
    CHECK_THROWS_AS(apply_radial_laplacian(bad, g, -1), AxisSingularity);
}

TEST_CASE("quadratic axis extrapolation is exact") {
    auto f = [](double x) { return 3.0 - 2.0 * x + 0.7 * x * x; };
    double got = extrapolate_to_zero(0.1, f(0.1), 0.25, f(0.25), 0.4, f(0.4));
    CHECK(got == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("scaled grids transform nodes, weights and stencils consistently") {
    RadialGrid g = make_grid(10.0, 257, GridKind::Geometric, 3.0);
    double factor = 2.5;
    RadialGrid gs = scaled_grid(g, factor);
    CHECK(gs.r_max == doctest::Approx(25.0).epsilon(1e-15));
    for (int i = 0; i < g.n(); ++i)
        CHECK(gs.r[i] == doctest::Approx(g.r[i] * factor).epsilon(1e-15));

    // chain rule: d/dr on the scaled grid equals (1/factor) d/dx on the original
    std::vector<double> f(g.n()), fs(g.n());
    for (int i = 0; i < g.n(); ++i) {
        f[i] = std::sin(g.r[i]);
        fs[i] = std::sin(gs.r[i] / factor);
    }
    std::vector<double> d = apply_derivative(f, g, 1);
    std::vector<double> ds = apply_derivative(fs, gs, 1);
    double worst = 0.0;
    for (int i = 0; i < g.n(); ++i)
        worst = std::max(worst, std::abs(ds[i] - d[i] / factor));
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(scaled_grid(g, 0.0), std::invalid_argument);
}

TEST_CASE("length mismatches are rejected") {
    RadialGrid g = make_grid(5.0, 65, GridKind::Uniform);
    std::vector<double> wrong(g.n() + 1, 0.0);
    CHECK_THROWS_AS(apply_derivative(wrong, g, 1), SizeMismatch);
    CHECK_THROWS_AS(integrate_radial(wrong, g), SizeMismatch);
    CHECK_THROWS_AS(divide_by_r(wrong, g), SizeMismatch);
    CHECK_THROWS_AS(apply_radial_laplacian(wrong, g, 1), SizeMismatch);
    std::vector<double> f(g.n(), 0.0);
    CHECK_THROWS_AS(apply_derivative(f, g, 3), std::invalid_argument);
    CHECK_THROWS_AS(apply_radial_laplacian(f, g, 0), std::invalid_argument);
}
