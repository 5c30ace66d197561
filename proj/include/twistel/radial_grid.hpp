#pragma once

#include <array>
#include <complex>
#include <vector>

namespace twistel {

using cplx = std::complex<double>;

enum class GridKind { Uniform, Geometric };

// One finite-difference stencil row: weights applied to f[start .. start+len-1].
struct StencilRow {
    int start = 0;
    int len = 0;
    std::array<double, 6> w{};
};

// Radial mesh on [0, r_max] with trapezoid quadrature weights (plain dr measure)
// and precomputed derivative stencils. Geometric grids follow the exponential map
// r(xi) = r_max (e^{beta xi} - 1)/(e^beta - 1), which clusters nodes at the axis.
struct RadialGrid {
    std::vector<double> r;   // nodes, r[0] = 0, r[n-1] = r_max, strictly increasing
    std::vector<double> w;   // trapezoid weights for integral in dr
    double r_max = 0.0;
    GridKind kind = GridKind::Uniform;
    double beta = 0.0;       // grading strength, 0 for uniform

    std::vector<StencilRow> d1;    // first derivative, order >= 2
    std::vector<StencilRow> d2;    // second derivative, order >= 2
    std::vector<StencilRow> d1_hi; // first derivative, order >= 4 (5-point)

    int n() const { return static_cast<int>(r.size()); }
};

// beta = 0 picks the grading automatically: about a quarter of the nodes inside
// r_max/20 and at least 3 nodes inside r_max/100. Minimum node count is 16.
RadialGrid make_grid(double r_max, int n, GridKind kind, double beta = 0.0);

// Same node layout scaled by factor (used to reinterpret an r-grid as a rho-grid).
RadialGrid scaled_grid(const RadialGrid& g, double factor);

// Fornberg weights for the m-th derivative at x0 from the given nodes.
// out[k] multiplies f(x[k]); npt <= 6.
void fornberg_weights(double x0, const double* x, int npt, int deriv, double* out);

double integrate_radial(const std::vector<double>& f, const RadialGrid& g); // int f r dr
cplx integrate_radial(const std::vector<cplx>& f, const RadialGrid& g);
double integrate_plain(const std::vector<double>& f, const RadialGrid& g);  // int f dr

// order 1 or 2; centered 3-point stencils inside, one-sided 4-point at the ends.
std::vector<double> apply_derivative(const std::vector<double>& f, const RadialGrid& g, int order);
std::vector<cplx> apply_derivative(const std::vector<cplx>& f, const RadialGrid& g, int order);

// First derivative at order >= 4 (5-point windows).
std::vector<double> derivative_hi(const std::vector<double>& f, const RadialGrid& g);
std::vector<cplx> derivative_hi(const std::vector<cplx>& f, const RadialGrid& g);

// f'' + sign f'/r. sign +1 uses the axis limit 2 f''(0) (expects f'(0) = 0);
// sign -1 requires f(0) = 0 and extrapolates the axis value from interior nodes.
std::vector<double> apply_radial_laplacian(const std::vector<double>& f, const RadialGrid& g, int sign);

// f/r with the axis value replaced by the limit f'(0); requires f(0) = 0.
std::vector<double> divide_by_r(const std::vector<double>& f, const RadialGrid& g);
std::vector<cplx> divide_by_r(const std::vector<cplx>& f, const RadialGrid& g);

// Value at x = 0 of the quadratic through (x1,v1), (x2,v2), (x3,v3).
double extrapolate_to_zero(double x1, double v1, double x2, double v2, double x3, double v3);

} // namespace twistel
