#pragma once

#include <array>
#include <string>
#include <vector>

#include "twistel/radial_grid.hpp"

namespace twistel {

using Vec3 = std::array<double, 3>;

struct ModelParams {
    int m = 3;          // equivariance index, >= 3
    double mu = 1.0;    // axial twist rate, > 0
    double omega = 0.0; // vortex circulation amplitude
    double r0 = 1.0;    // vortex core length at t = 0
};

// Throws on m < 3 or mu <= 0. Tests may bypass this for the mu = 0 gradient-flow
// steady-state check; every public entry point calls it.
void validate(const ModelParams& p);

// Director profile, swirl, and vertical flow on the radial mesh.
struct EquivariantState {
    std::vector<Vec3> phi;
    std::vector<double> W;
    std::vector<double> V;
    double t = 0.0;
};

void validate_state(const EquivariantState& s, const RadialGrid& g, double far_field_tol = 1e-3);

inline double dot(const Vec3& a, const Vec3& b, const Vec3* = nullptr) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
// Infinitesimal rotation about e3: R v = (-v2, v1, 0).
inline Vec3 rot_gen(const Vec3& v) { return {-v[1], v[0], 0.0}; }
inline Vec3 rot_gen2(const Vec3& v) { return {-v[0], -v[1], 0.0}; }
// Finite rotation e^{alpha R} about e3.
Vec3 rotate_e3(const Vec3& v, double alpha);

// Equator-crossing harmonic bubble: h1 = 2/(rho^m + rho^-m), h3 = (rho^m - rho^-m)/(rho^m + rho^-m).
double profile_h1(double rho, int m);
double profile_h3(double rho, int m);
Vec3 harmonic_profile(double rho, int m); // (h1, 0, h3)

// e^{alpha R} h(r / sigma)
Vec3 rotated_scaled_profile(double r, double alpha, double sigma, int m);

// Spreading vortex core l(t) = 4t + r0^2.
double oseen_w(double r, double t, double omega, double r0);
double oseen_w_over_r2(double r, double t, double omega, double r0);
// d/dr [ W_os / r^2 ], finite at the axis.
double oseen_w_over_r2_deriv(double r, double t, double omega, double r0);
std::vector<double> oseen_field(const RadialGrid& g, double t, double omega, double r0);

// Complex bump shape used to seed perturbations: two rho^m-weighted Gaussian
// lobes mixed with independent phases, then projected against h1 and rescaled
// so the sup norm equals the requested amplitude.
struct BumpSpec {
    double rho0 = 1.5;
    double width = 0.8;
    double phase = 0.6;
    double rho0_b = 2.5;
    double width_b = 1.0;
    double phase_b = 2.1;
    double mix = 0.35; // weight of the second lobe in [0, 1]
};

// grid is the rho-grid the perturbation lives on. Both real and imaginary parts
// come out orthogonal to h1 in L2(rho drho) on that grid. amplitude must be < 1/2.
std::vector<cplx> make_bump_perturbation(const BumpSpec& spec, double amplitude,
                                         const RadialGrid& grid, int m);
// kind: "zero", "bump", "bump-outer".
std::vector<cplx> make_test_perturbation(const std::string& kind, double amplitude,
                                         const RadialGrid& grid, int m);

// gamma = sqrt(1 - |z|^2) - 1, valid for |z| <= 1/2.
double gamma_of_z(cplx z);

// Gaussian vertical flow A exp(-(r/width)^2) with prescribed L2(r dr) norm.
std::vector<double> make_gaussian_vin(double l2_norm, double width, const RadialGrid& g);
// Swirl excess B r^2 exp(-(r/width)^2) with prescribed L2(r dr) norm of W/r.
std::vector<double> make_wstar_in(double l2_norm, double width, const RadialGrid& g);

// phi_in = e^{theta R} { (1+gamma) h(rho) + z1 e2 + z2 h(rho) x e2 }, rho = r / sigma_in.
// z_in must live on the rho-grid r/sigma_in (node i of z_in is at rho = r_i / sigma_in).
EquivariantState build_initial_data(const RadialGrid& g, const ModelParams& p, double sigma_in,
                                    double theta_in, const std::vector<cplx>& z_in,
                                    const std::vector<double>& v_in,
                                    const std::vector<double>& wstar_in);

struct SamplePoint {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
};

struct Reconstruction3D {
    std::vector<Vec3> velocity;
    std::vector<Vec3> director;
};

// u = (W/r^2)(-x2, x1, 0) + V e3, director = e^{mu x3 R} e^{m theta R} phi(r).
Reconstruction3D reconstruct_3d(const EquivariantState& s, const RadialGrid& g,
                                const ModelParams& p, const std::vector<SamplePoint>& pts);

} // namespace twistel
