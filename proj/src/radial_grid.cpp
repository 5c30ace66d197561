#include "twistel/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twistel/errors.hpp"

namespace twistel {

namespace {

constexpr int kMinNodes = 16;

double geometric_fraction(double beta, double xi) {
    // fraction of r_max reached at parameter xi in (0,1)
    return std::expm1(beta * xi) / std::expm1(beta);
}

// Smallest beta with geometric_fraction(beta, xi) <= target (fraction decreases in beta).
double solve_beta(double xi, double target) {
    double lo = 1e-3, hi = 60.0;
    if (geometric_fraction(hi, xi) > target)
        throw std::invalid_argument("grid grading target unreachable");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (geometric_fraction(mid, xi) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

void build_stencils(RadialGrid& g) {
    const int n = g.n();
    g.d1.resize(n);
    g.d2.resize(n);
    g.d1_hi.resize(n);
    double wk[6];
    for (int i = 0; i < n; ++i) {
        // order-2 tables: 3-point centered inside, 4-point one-sided at the ends
        int start, len;
        if (i == 0) {
            start = 0;
            len = 4;
        } else if (i == n - 1) {
            start = n - 4;
            len = 4;
        } else {
            start = i - 1;
            len = 3;
        }
        StencilRow row1{start, len, {}};
        fornberg_weights(g.r[i], g.r.data() + start, len, 1, wk);
        std::copy(wk, wk + len, row1.w.begin());
        g.d1[i] = row1;

        StencilRow row2{start, len, {}};
        fornberg_weights(g.r[i], g.r.data() + start, len, 2, wk);
        std::copy(wk, wk + len, row2.w.begin());
        g.d2[i] = row2;

        // order-4 first derivative: 5-point windows clamped at the ends
        int s5 = std::clamp(i - 2, 0, n - 5);
        StencilRow row5{s5, 5, {}};
        fornberg_weights(g.r[i], g.r.data() + s5, 5, 1, wk);
        std::copy(wk, wk + 5, row5.w.begin());
        g.d1_hi[i] = row5;
    }
}

template <class T>
std::vector<T> apply_table(const std::vector<StencilRow>& tab, const std::vector<T>& f) {
    std::vector<T> out(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        const StencilRow& s = tab[i];
        T acc{};
        for (int k = 0; k < s.len; ++k)
            acc += s.w[k] * f[s.start + k];
        out[i] = acc;
    }
    return out;
}

} // namespace

void fornberg_weights(double x0, const double* x, int npt, int deriv, double* out) {
    // Fornberg (1988) recursion for finite-difference weights on arbitrary nodes.
    double c[6][5] = {};
    double c1 = 1.0;
    double c4 = x[0] - x0;
    for (int k = 0; k <= deriv; ++k)
        for (int j = 0; j < npt; ++j)
            c[j][k] = 0.0;
    c[0][0] = 1.0;
    for (int i = 1; i < npt; ++i) {
        int mn = std::min(i, deriv);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    for (int j = 0; j < npt; ++j)
        out[j] = c[j][deriv];
}

RadialGrid make_grid(double r_max, int n, GridKind kind, double beta) {
    if (r_max <= 0.0)
        throw std::invalid_argument("r_max must be positive");
    if (n < kMinNodes)
        throw std::invalid_argument("grid needs at least 16 nodes");

    RadialGrid g;
    g.r_max = r_max;
    g.kind = kind;
    g.r.resize(n);

    if (kind == GridKind::Uniform) {
        g.beta = 0.0;
        for (int i = 0; i < n; ++i)
            g.r[i] = r_max * double(i) / double(n - 1);
    } else {
        if (beta < 0.0)
            throw std::invalid_argument("beta must be nonnegative");
        double b = beta;
        if (b == 0.0) {
            // about a quarter of the nodes inside r_max/20, and the third node
            // inside r_max/100 so the axis region is always resolved
            double b_quarter = solve_beta(0.25, 1.0 / 20.0);
            double b_axis = solve_beta(2.0 / double(n - 1), 1.0 / 100.0);
            b = std::max(b_quarter, b_axis);
        }
        g.beta = b;
        for (int i = 0; i < n; ++i)
            g.r[i] = r_max * geometric_fraction(b, double(i) / double(n - 1));
    }
    g.r.front() = 0.0;
    g.r.back() = r_max;

    for (int i = 1; i < n; ++i)
        if (!(g.r[i] > g.r[i - 1]))
            throw std::runtime_error("grid nodes not strictly increasing");

    g.w.assign(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double half = 0.5 * (g.r[i + 1] - g.r[i]);
        g.w[i] += half;
        g.w[i + 1] += half;
    }

    build_stencils(g);
    return g;
}

RadialGrid scaled_grid(const RadialGrid& g, double factor) {
    if (factor <= 0.0)
        throw std::invalid_argument("scale factor must be positive");
    RadialGrid out = g;
    out.r_max = g.r_max * factor;
    for (auto& v : out.r)
        v *= factor;
    for (auto& v : out.w)
        v *= factor;
    build_stencils(out);
    return out;
}

double integrate_radial(const std::vector<double>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("integrate_radial field length");
    double acc = 0.0;
    for (size_t i = 0; i < f.size(); ++i)
        acc += g.w[i] * g.r[i] * f[i];
    return acc;
}

cplx integrate_radial(const std::vector<cplx>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("integrate_radial field length");
    cplx acc{};
    for (size_t i = 0; i < f.size(); ++i)
        acc += g.w[i] * g.r[i] * f[i];
    return acc;
}

double integrate_plain(const std::vector<double>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("integrate_plain field length");
    double acc = 0.0;
    for (size_t i = 0; i < f.size(); ++i)
        acc += g.w[i] * f[i];
    return acc;
}

std::vector<double> apply_derivative(const std::vector<double>& f, const RadialGrid& g, int order) {
    if (f.size() != g.r.size())
        throw SizeMismatch("apply_derivative field length");
    if (order == 1)
        return apply_table(g.d1, f);
    if (order == 2)
        return apply_table(g.d2, f);
    throw std::invalid_argument("derivative order must be 1 or 2");
}

std::vector<cplx> apply_derivative(const std::vector<cplx>& f, const RadialGrid& g, int order) {
    if (f.size() != g.r.size())
        throw SizeMismatch("apply_derivative field length");
    if (order == 1)
        return apply_table(g.d1, f);
    if (order == 2)
        return apply_table(g.d2, f);
    throw std::invalid_argument("derivative order must be 1 or 2");
}

std::vector<double> derivative_hi(const std::vector<double>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("derivative_hi field length");
    return apply_table(g.d1_hi, f);
}

std::vector<cplx> derivative_hi(const std::vector<cplx>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("derivative_hi field length");
    return apply_table(g.d1_hi, f);
}

double extrapolate_to_zero(double x1, double v1, double x2, double v2, double x3, double v3) {
    double l1 = (x2 * x3) / ((x1 - x2) * (x1 - x3));
    double l2 = (x1 * x3) / ((x2 - x1) * (x2 - x3));
    double l3 = (x1 * x2) / ((x3 - x1) * (x3 - x2));
    return v1 * l1 + v2 * l2 + v3 * l3;
}

std::vector<double> apply_radial_laplacian(const std::vector<double>& f, const RadialGrid& g, int sign) {
    if (f.size() != g.r.size())
        throw SizeMismatch("apply_radial_laplacian field length");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("laplacian sign must be +1 or -1");

    std::vector<double> d1f = apply_derivative(f, g, 1);
    std::vector<double> d2f = apply_derivative(f, g, 2);
    std::vector<double> out(f.size());
    for (size_t i = 1; i < f.size(); ++i)
        out[i] = d2f[i] + double(sign) * d1f[i] / g.r[i];

    if (sign == 1) {
        // limit of f'' + f'/r at the axis for even f is 2 f''(0)
        out[0] = 2.0 * d2f[0];
    } else {
        double scale = 0.0;
        for (double v : f)
            scale = std::max(scale, std::abs(v));
        if (std::abs(f[0]) > 1e-6 * (1.0 + scale))
            throw AxisSingularity("f(0) must vanish for the f'' - f'/r operator");
        out[0] = extrapolate_to_zero(g.r[1], out[1], g.r[2], out[2], g.r[3], out[3]);
    }
    return out;
}

std::vector<double> divide_by_r(const std::vector<double>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("divide_by_r field length");
    double scale = 0.0;
    for (double v : f)
        scale = std::max(scale, std::abs(v));
    if (std::abs(f[0]) > 1e-6 * (1.0 + scale))
        throw AxisSingularity("f(0) must vanish to divide by r");
    std::vector<double> out(f.size());
    const StencilRow& s = g.d1[0];
    double lim = 0.0;
    for (int k = 0; k < s.len; ++k)
        lim += s.w[k] * f[s.start + k];
    out[0] = lim;
    for (size_t i = 1; i < f.size(); ++i)
        out[i] = f[i] / g.r[i];
    return out;
}

std::vector<cplx> divide_by_r(const std::vector<cplx>& f, const RadialGrid& g) {
    if (f.size() != g.r.size())
        throw SizeMismatch("divide_by_r field length");
    double scale = 0.0;
    for (const cplx& v : f)
        scale = std::max(scale, std::abs(v));
    if (std::abs(f[0]) > 1e-6 * (1.0 + scale))
        throw AxisSingularity("f(0) must vanish to divide by r");
    std::vector<cplx> out(f.size());
    const StencilRow& s = g.d1[0];
    cplx lim{};
    for (int k = 0; k < s.len; ++k)
        lim += s.w[k] * f[s.start + k];
    out[0] = lim;
    for (size_t i = 1; i < f.size(); ++i)
        out[i] = f[i] / g.r[i];
    return out;
}

} // namespace twistel
