#include "twistel/profiles.hpp"

#include <cmath>
#include <stdexcept>

#include "twistel/errors.hpp"
#include "twistel/interp.hpp"

namespace twistel {

void validate(const ModelParams& p) {
    if (p.m < 3)
        throw std::invalid_argument("|m| must be >= 3");
    if (!(p.mu > 0.0))
        throw std::invalid_argument("mu must be positive");
    if (!(p.r0 > 0.0))
        throw std::invalid_argument("r0 must be positive");
}

void validate_state(const EquivariantState& s, const RadialGrid& g, double far_field_tol) {
    const size_t n = g.r.size();
    if (s.phi.size() != n || s.W.size() != n || s.V.size() != n)
        throw SizeMismatch("state fields must match the grid");
    for (size_t i = 0; i < n; ++i) {
        double nrm = std::sqrt(dot(s.phi[i], s.phi[i]));
        if (std::abs(nrm - 1.0) > 1e-12)
            throw UnitNormViolation("|phi| deviates from 1 at node " + std::to_string(i));
    }
    if (std::abs(s.W[0]) > 1e-10)
        throw std::invalid_argument("W(0) must vanish");
    const Vec3& far = s.phi[n - 1];
    double dev = std::sqrt(far[0] * far[0] + far[1] * far[1] + (far[2] - 1.0) * (far[2] - 1.0));
    if (dev > far_field_tol)
        throw std::invalid_argument("far-field director deviates from e3 beyond tolerance");
}

Vec3 rotate_e3(const Vec3& v, double alpha) {
    double c = std::cos(alpha), s = std::sin(alpha);
    return {c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]};
}

double profile_h1(double rho, int m) {
    if (rho < 0.0)
        throw std::invalid_argument("rho must be nonnegative");
    if (rho == 0.0)
        return 0.0;
    // evaluate through the smaller of rho^m, rho^-m to avoid overflow
    if (rho <= 1.0) {
        double p = std::pow(rho, m);
        return 2.0 * p / (p * p + 1.0);
    }
    double q = std::pow(rho, -m);
    return 2.0 * q / (1.0 + q * q);
}

double profile_h3(double rho, int m) {
    if (rho < 0.0)
        throw std::invalid_argument("rho must be nonnegative");
    if (rho == 0.0)
        return -1.0;
    if (rho <= 1.0) {
        double p = std::pow(rho, m);
        return (p * p - 1.0) / (p * p + 1.0);
    }
    double q = std::pow(rho, -m);
    return (1.0 - q * q) / (1.0 + q * q);
}

Vec3 harmonic_profile(double rho, int m) { return {profile_h1(rho, m), 0.0, profile_h3(rho, m)}; }

Vec3 rotated_scaled_profile(double r, double alpha, double sigma, int m) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be positive");
    return rotate_e3(harmonic_profile(r / sigma, m), alpha);
}

double oseen_w(double r, double t, double omega, double r0) {
    double l = 4.0 * t + r0 * r0;
    return -omega * std::expm1(-r * r / l);
}

double oseen_w_over_r2(double r, double t, double omega, double r0) {
    double l = 4.0 * t + r0 * r0;
    double x = r * r / l;
    if (x < 1e-3)
        return (omega / l) * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
    return -omega * std::expm1(-x) / (r * r);
}

double oseen_w_over_r2_deriv(double r, double t, double omega, double r0) {
    double l = 4.0 * t + r0 * r0;
    double x = r * r / l;
    if (x < 1e-3)
        return (2.0 * omega * r / (l * l)) * (-0.5 + x / 3.0 - x * x / 8.0);
    double e = std::exp(-x);
    return (2.0 * omega / (r * r * r)) * (x * e - 1.0 + e);
}

std::vector<double> oseen_field(const RadialGrid& g, double t, double omega, double r0) {
    std::vector<double> out(g.r.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = oseen_w(g.r[i], t, omega, r0);
    return out;
}

std::vector<cplx> make_bump_perturbation(const BumpSpec& spec, double amplitude,
                                         const RadialGrid& grid, int m) {
    if (amplitude < 0.0 || amplitude >= 0.5)
        throw std::invalid_argument("perturbation amplitude must lie in [0, 1/2)");
    const size_t n = grid.r.size();
    std::vector<cplx> z(n, cplx{0.0, 0.0});
    if (amplitude == 0.0)
        return z;

    auto lobe = [&](double rho, double rho0, double width) {
        // rho^m weight keeps the axis vanishing order of admissible data
        double s = rho / rho0;
        return std::pow(s, m) * std::exp(-(rho - rho0) * (rho - rho0) / (width * width));
    };
    cplx pa = std::polar(1.0, spec.phase);
    cplx pb = std::polar(1.0, spec.phase_b);
    for (size_t i = 0; i < n; ++i) {
        double rho = grid.r[i];
        z[i] = (1.0 - spec.mix) * pa * lobe(rho, spec.rho0, spec.width) +
               spec.mix * pb * lobe(rho, spec.rho0_b, spec.width_b);
    }
    z[0] = 0.0;

    std::vector<double> h1(n);
    for (size_t i = 0; i < n; ++i)
        h1[i] = profile_h1(grid.r[i], m);
    double h1_mass = 0.0;
    cplx zh1{};
    for (size_t i = 0; i < n; ++i) {
        h1_mass += grid.w[i] * grid.r[i] * h1[i] * h1[i];
        zh1 += grid.w[i] * grid.r[i] * h1[i] * z[i];
    }
    cplx coef = zh1 / h1_mass;
    for (size_t i = 0; i < n; ++i)
        z[i] -= coef * h1[i];

    double sup = 0.0;
    for (const cplx& v : z)
        sup = std::max(sup, std::abs(v));
    if (sup == 0.0)
        throw std::invalid_argument("perturbation shape vanished after projection");
    double scale = amplitude / sup;
    for (cplx& v : z)
        v *= scale;
    return z;
}

std::vector<cplx> make_test_perturbation(const std::string& kind, double amplitude,
                                         const RadialGrid& grid, int m) {
    if (kind == "zero" || amplitude == 0.0)
        return std::vector<cplx>(grid.r.size(), cplx{0.0, 0.0});
    if (kind == "bump")
        return make_bump_perturbation(BumpSpec{}, amplitude, grid, m);
    if (kind == "bump-outer") {
        BumpSpec s;
        s.rho0 = 3.0;
        s.width = 1.2;
        s.phase = 2.2;
        s.rho0_b = 4.5;
        s.width_b = 1.5;
        s.phase_b = 0.4;
        s.mix = 0.4;
        return make_bump_perturbation(s, amplitude, grid, m);
    }
    throw std::invalid_argument("unknown perturbation kind: " + kind);
}

double gamma_of_z(cplx z) {
    double s = std::norm(z);
    if (s > 0.25 + 1e-13)
        throw std::invalid_argument("|z| must not exceed 1/2");
    s = std::min(s, 1.0);
    return -s / (1.0 + std::sqrt(1.0 - s));
}

std::vector<double> make_gaussian_vin(double l2_norm, double width, const RadialGrid& g) {
    if (l2_norm < 0.0 || !(width > 0.0))
        throw std::invalid_argument("vin needs l2_norm >= 0 and width > 0");
    // int A^2 exp(-2 r^2/w^2) r dr = A^2 w^2 / 4
    double a = 2.0 * l2_norm / width;
    std::vector<double> out(g.r.size());
    for (size_t i = 0; i < out.size(); ++i) {
        double s = g.r[i] / width;
        out[i] = a * std::exp(-s * s);
    }
    return out;
}

std::vector<double> make_wstar_in(double l2_norm, double width, const RadialGrid& g) {
    if (l2_norm < 0.0 || !(width > 0.0))
        throw std::invalid_argument("wstar_in needs l2_norm >= 0 and width > 0");
    // int (B r^2 exp(-r^2/w^2)/r)^2 r dr = B^2 w^4 / 8
    double b = l2_norm * std::sqrt(8.0) / (width * width);
    std::vector<double> out(g.r.size());
    for (size_t i = 0; i < out.size(); ++i) {
        double s = g.r[i] / width;
        out[i] = b * g.r[i] * g.r[i] * std::exp(-s * s);
    }
    return out;
}

EquivariantState build_initial_data(const RadialGrid& g, const ModelParams& p, double sigma_in,
                                    double theta_in, const std::vector<cplx>& z_in,
                                    const std::vector<double>& v_in,
                                    const std::vector<double>& wstar_in) {
    if (!(sigma_in > 0.0))
        throw std::invalid_argument("sigma_in must be positive");
    const size_t n = g.r.size();
    if (z_in.size() != n || v_in.size() != n || wstar_in.size() != n)
        throw SizeMismatch("initial data fields must match the grid");

    EquivariantState s;
    s.t = 0.0;
    s.phi.resize(n);
    s.W.resize(n);
    s.V = v_in;
    for (size_t i = 0; i < n; ++i) {
        double rho = g.r[i] / sigma_in;
        double h1 = profile_h1(rho, p.m);
        double h3 = profile_h3(rho, p.m);
        double gam = gamma_of_z(z_in[i]);
        double z1 = z_in[i].real(), z2 = z_in[i].imag();
        // frame {h, e2, h x e2} with h x e2 = (-h3, 0, h1)
        Vec3 u = {(1.0 + gam) * h1 - z2 * h3, z1, (1.0 + gam) * h3 + z2 * h1};
        double nrm = std::sqrt(dot(u, u));
        if (std::abs(nrm - 1.0) > 1e-10)
            throw UnitNormViolation("constructed director off the sphere at node " + std::to_string(i));
        for (double& c : u)
            c /= nrm;
        s.phi[i] = rotate_e3(u, theta_in);
        s.W[i] = oseen_w(g.r[i], 0.0, p.omega, p.r0) + wstar_in[i];
    }
    validate_state(s, g);
    return s;
}

Reconstruction3D reconstruct_3d(const EquivariantState& s, const RadialGrid& g,
                                const ModelParams& p, const std::vector<SamplePoint>& pts) {
    validate(p);
    const size_t n = g.r.size();
    if (s.phi.size() != n)
        throw SizeMismatch("state does not match grid");

    std::vector<double> wor2(n);
    for (size_t i = 1; i < n; ++i)
        wor2[i] = s.W[i] / (g.r[i] * g.r[i]);
    wor2[0] = extrapolate_to_zero(g.r[1], wor2[1], g.r[2], wor2[2], g.r[3], wor2[3]);

    std::vector<double> p1(n), p2(n), p3(n);
    for (size_t i = 0; i < n; ++i) {
        p1[i] = s.phi[i][0];
        p2[i] = s.phi[i][1];
        p3[i] = s.phi[i][2];
    }
    MonotoneCubic iw(g.r, wor2, MonotoneCubic::Extend::Clamp);
    MonotoneCubic iv(g.r, s.V, MonotoneCubic::Extend::Clamp);
    MonotoneCubic i1(g.r, p1, MonotoneCubic::Extend::Clamp);
    MonotoneCubic i2(g.r, p2, MonotoneCubic::Extend::Clamp);
    MonotoneCubic i3(g.r, p3, MonotoneCubic::Extend::Clamp);

    Reconstruction3D out;
    out.velocity.resize(pts.size());
    out.director.resize(pts.size());
    for (size_t k = 0; k < pts.size(); ++k) {
        const SamplePoint& q = pts[k];
        double r = std::hypot(q.x1, q.x2);
        if (r > g.r_max)
            throw std::invalid_argument("sample point outside the radial domain");
        double w = iw(r);
        out.velocity[k] = {-w * q.x2, w * q.x1, iv(r)};
        Vec3 phi = {i1(r), i2(r), i3(r)};
        double nrm = std::sqrt(dot(phi, phi));
        if (nrm == 0.0)
            throw UnitNormViolation("interpolated director vanished");
        for (double& c : phi)
            c /= nrm;
        double theta = (r > 0.0) ? std::atan2(q.x2, q.x1) : 0.0;
        out.director[k] = rotate_e3(phi, p.mu * q.x3 + p.m * theta);
    }
    return out;
}

} // namespace twistel
