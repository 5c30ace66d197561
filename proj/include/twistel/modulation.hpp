#pragma once

#include <utility>
#include <vector>

#include "twistel/profiles.hpp"
#include "twistel/radial_grid.hpp"

namespace twistel {

// Decomposition phi = e^{theta R} { (1+gamma) h(rho) + z1 e2 + z2 h(rho) x e2 },
// rho = r / sigma, gamma = sqrt(1 - |z|^2) - 1, with z orthogonal to h1 in L2(rho drho).
// z lives on rho_grid, whose node i sits at r_i / sigma.
struct ModulationFrame {
    double sigma = 1.0;
    double theta = 0.0;
    RadialGrid rho_grid;
    std::vector<cplx> z;
    std::vector<double> gamma;
    double orth_residual = 0.0; // |int z h1 rho drho| at the returned parameters
    double consistency = 0.0;   // max_i |<zeta, h> - (1 + gamma)|
};

// Unconstrained read-off of z at fixed parameters (no orthogonality solve).
ModulationFrame decompose_at(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                             double sigma, double theta);

// Newton in (sigma, theta) on Re/Im of int z h1 rho drho = 0; finite-difference
// Jacobian, damped steps, tolerance 1e-12 on the constraint, at most 50 iterations.
// Throws NoConvergence if the iteration stalls or the decomposition leaves its
// validity region (sup |z| > 1/2 or inconsistent frame projection).
ModulationFrame extract_modulation(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                                   double sigma_guess, double theta_guess);

// Grid-search fallback: scans (sigma, theta) candidates, then polishes with Newton.
ModulationFrame extract_with_search(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                                    double sigma_lo, double sigma_hi);

// Rebuild the director on the r-grid. z is sampled at rho = r / frame.sigma by
// monotone cubic interpolation with zero extension beyond the stored support;
// when the frame's rho-grid is the scaled r-grid the node values are used directly.
std::vector<Vec3> synthesize_director(const ModulationFrame& frame, const RadialGrid& g, int m);

// L_h z = d_rho z + (m/rho) h3 z, kernel h1.
std::vector<cplx> apply_Lh(const std::vector<cplx>& z, const RadialGrid& rho_grid, int m);
// L_h^* w = -d_rho w - w/rho + (m/rho) h3 w  (adjoint in L2(rho drho))
std::vector<cplx> apply_Lh_star(const std::vector<cplx>& w, const RadialGrid& rho_grid, int m);
// N z = L_h^* L_h z = -[ z'' + z'/rho + (m^2/rho^2)(2 h1^2 - 1) z ]
std::vector<cplx> apply_N(const std::vector<cplx>& z, const RadialGrid& rho_grid, int m);

// ||z||_X = sqrt( int (|d_rho z|^2 + |z|^2/rho^2) rho drho ); z(0) must vanish.
double x_norm(const std::vector<cplx>& z, const RadialGrid& rho_grid);
double l2_rho_norm(const std::vector<cplx>& z, const RadialGrid& rho_grid);

// Right-hand side of the modulation equation d_t z + sigma^-2 N z = Mod + HT.
// w_over_r2 and v_vert are the fluid fields sampled at the frame's nodes
// (node i of the rho-grid corresponds to r = sigma rho_i).
std::pair<std::vector<cplx>, std::vector<cplx>> compute_mod_ht(
    const ModulationFrame& frame, double sigma_dot, double theta_dot,
    const std::vector<double>& w_over_r2, const std::vector<double>& v_vert,
    const ModelParams& p);

} // namespace twistel
