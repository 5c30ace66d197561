#pragma once

#include <vector>

#include "twistel/profiles.hpp"
#include "twistel/radial_grid.hpp"

namespace twistel {

// Parallel tangent frame along phi and the derived complex fields.
// e solves e_r + <e, phi_r> phi = 0 inward from e(r_max) = e2;
// q = q1 + i q2 are the frame components of d_r phi - (m/r) phi x R phi;
// v = <e3, e> + i <e3, phi x e>.
struct GaugeFields {
    std::vector<Vec3> e;
    std::vector<cplx> q;
    std::vector<cplx> v;
    double tangency_residual = 0.0; // max |<q_vec, phi>| left outside the tangent frame
};

GaugeFields compute_gauge(const EquivariantState& s, const RadialGrid& g, const ModelParams& p);

// L_m q = d_r q + q/r - m phi3 q / r
std::vector<cplx> compute_lm(const std::vector<cplx>& q, const std::vector<double>& phi3,
                             const RadialGrid& g, int m);
// L_m^* v = -d_r v - m phi3 v / r  (adjoint in L2(r dr))
std::vector<cplx> compute_lm_star(const std::vector<cplx>& v, const std::vector<double>& phi3,
                                  const RadialGrid& g, int m);

// S(r) = int_r^rmax < L_m q + mu^2 v phi3 + i v (m W / tau^2 + mu V), i (q + m v / tau) > dtau.
// Diagnostic only; plain dtau measure.
std::vector<double> compute_s_integral(const EquivariantState& s, const GaugeFields& gf,
                                       const RadialGrid& g, const ModelParams& p);

} // namespace twistel
