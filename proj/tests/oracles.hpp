#pragma once

// Reference implementations used only by the tests. Kept independent of the
// library code paths they are checking: quadrature is adaptive Simpson, the
// equilibrium profile is evaluated through cosh/tanh instead of powers.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline double simpson_panel(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_panel(f, a, m, fa, flm, fm);
    double right = simpson_panel(f, m, b, fm, frm, fb);
    if (depth <= 0)
        return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson integral of f over [a, b]. The interval is pre-split into
// uniform panels so narrow features cannot hide from the first coarse samples.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (!(b > a))
        throw std::invalid_argument("oracle::integrate needs b > a");
    const int panels = 32;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        double lo = a + (b - a) * k / panels;
        double hi = a + (b - a) * (k + 1) / panels;
        double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        double whole = simpson_panel(f, lo, hi, fa, fm, fb);
        total += adaptive_simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / panels, 44);
    }
    return total;
}

// Equilibrium profile through the hyperbolic route: h1 = sech(m log rho),
// h3 = tanh(m log rho).
inline double h1(double rho, int m) {
    if (rho <= 0.0)
        return 0.0;
    return 1.0 / std::cosh(m * std::log(rho));
}

inline double h3(double rho, int m) {
    if (rho <= 0.0)
        return -1.0;
    return std::tanh(m * std::log(rho));
}

// Closed form of int_0^inf h1^2 rho drho.
inline double mass_integral(int m) {
    const double pi = 3.14159265358979323846;
    return 2.0 * pi / (m * m * std::sin(pi / m));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("oracle::max_abs_diff length mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("oracle::max_abs_diff length mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen);
    }
};

} // namespace oracle
