#include "twistel/modulation.hpp"

#include <algorithm>
#include <cmath>

#include "twistel/errors.hpp"
#include "twistel/interp.hpp"

namespace twistel {

namespace {

// Constraint integral int z h1 rho drho evaluated on the r-grid: with
// rho_i = r_i / sigma the measure picks up a 1/sigma^2.
cplx constraint_integral(const std::vector<Vec3>& phi, const RadialGrid& g, int m, double sigma,
                         double theta, std::vector<cplx>* z_out) {
    const size_t n = g.r.size();
    double c = std::cos(theta), s = std::sin(theta);
    cplx acc{};
    if (z_out)
        z_out->resize(n);
    for (size_t i = 0; i < n; ++i) {
        double rho = g.r[i] / sigma;
        double h1 = profile_h1(rho, m);
        double h3 = profile_h3(rho, m);
        // zeta = e^{-theta R} phi
        double z1 = -s * phi[i][0] + c * phi[i][1];
        double z2 = -h3 * (c * phi[i][0] + s * phi[i][1]) + h1 * phi[i][2];
        cplx z{z1, z2};
        if (z_out)
            (*z_out)[i] = z;
        acc += g.w[i] * g.r[i] * h1 * z;
    }
    return acc / (sigma * sigma);
}

ModulationFrame assemble_frame(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                               double sigma, double theta) {
    ModulationFrame f;
    f.sigma = sigma;
    f.theta = theta;
    cplx res = constraint_integral(phi, g, m, sigma, theta, &f.z);
    f.orth_residual = std::abs(res);
    f.rho_grid = scaled_grid(g, 1.0 / sigma);

    const size_t n = g.r.size();
    f.gamma.resize(n);
    double c = std::cos(theta), s = std::sin(theta);
    for (size_t i = 0; i < n; ++i) {
        double sq = std::norm(f.z[i]);
        double gam = -std::min(sq, 1.0) / (1.0 + std::sqrt(std::max(0.0, 1.0 - sq)));
        f.gamma[i] = gam;
        double rho = f.rho_grid.r[i];
        double h1 = profile_h1(rho, m);
        double h3 = profile_h3(rho, m);
        // <zeta, h> should equal 1 + gamma when the decomposition is on its sheet
        double zh = h1 * (c * phi[i][0] + s * phi[i][1]) + h3 * phi[i][2];
        f.consistency = std::max(f.consistency, std::abs(zh - (1.0 + gam)));
    }
    return f;
}

} // namespace

ModulationFrame decompose_at(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                             double sigma, double theta) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be positive");
    if (phi.size() != g.r.size())
        throw SizeMismatch("decompose_at director length");
    return assemble_frame(phi, g, m, sigma, theta);
}

ModulationFrame extract_modulation(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                                   double sigma_guess, double theta_guess) {
    if (!(sigma_guess > 0.0))
        throw std::invalid_argument("sigma guess must be positive");
    if (phi.size() != g.r.size())
        throw SizeMismatch("extract_modulation director length");

    const double tol = 1e-12;
    const int max_iter = 50;
    double sg = sigma_guess, th = theta_guess;
    cplx F = constraint_integral(phi, g, m, sg, th, nullptr);

    int it = 0;
    for (; it < max_iter && std::abs(F) > tol; ++it) {
        double ds = 1e-6 * sg;
        double dt = 1e-6;
        cplx Fsp = constraint_integral(phi, g, m, sg + ds, th, nullptr);
        cplx Fsm = constraint_integral(phi, g, m, sg - ds, th, nullptr);
        cplx Ftp = constraint_integral(phi, g, m, sg, th + dt, nullptr);
        cplx Ftm = constraint_integral(phi, g, m, sg, th - dt, nullptr);
        double j11 = (Fsp.real() - Fsm.real()) / (2 * ds);
        double j12 = (Ftp.real() - Ftm.real()) / (2 * dt);
        double j21 = (Fsp.imag() - Fsm.imag()) / (2 * ds);
        double j22 = (Ftp.imag() - Ftm.imag()) / (2 * dt);
        double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-300)
            throw NoConvergence("singular Jacobian in modulation extraction");
        double step_s = (j22 * F.real() - j12 * F.imag()) / det;
        double step_t = (-j21 * F.real() + j11 * F.imag()) / det;

        double lam = 1.0;
        bool accepted = false;
        for (int k = 0; k < 12; ++k, lam *= 0.5) {
            double sg_new = sg - lam * step_s;
            double th_new = th - lam * step_t;
            if (!(sg_new > 0.0))
                continue;
            cplx Fn = constraint_integral(phi, g, m, sg_new, th_new, nullptr);
            if (std::abs(Fn) < std::abs(F)) {
                sg = sg_new;
                th = th_new;
                F = Fn;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NoConvergence("modulation Newton stalled at residual " + std::to_string(std::abs(F)));
    }
    if (std::abs(F) > tol)
        throw NoConvergence("modulation Newton did not reach tolerance in 50 iterations");

    ModulationFrame f = assemble_frame(phi, g, m, sg, th);
    double sup = 0.0;
    for (const cplx& v : f.z)
        sup = std::max(sup, std::abs(v));
    if (sup > 0.5 + 1e-9)
        throw NoConvergence("decomposition left its validity region: sup |z| = " + std::to_string(sup));
    if (f.consistency > 1e-6)
        throw NoConvergence("frame projection inconsistent; decomposition off its sheet");
    return f;
}

ModulationFrame extract_with_search(const std::vector<Vec3>& phi, const RadialGrid& g, int m,
                                    double sigma_lo, double sigma_hi) {
    if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
        throw std::invalid_argument("need 0 < sigma_lo < sigma_hi");
    const int ns = 16, nt = 8;
    struct Cand {
        double res, sigma, theta;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < ns; ++i) {
        double sg = sigma_lo * std::pow(sigma_hi / sigma_lo, double(i) / double(ns - 1));
        for (int j = 0; j < nt; ++j) {
            double th = -3.0 + 6.0 * double(j) / double(nt - 1);
            cplx F = constraint_integral(phi, g, m, sg, th, nullptr);
            cands.push_back({std::abs(F), sg, th});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.res < b.res; });
    std::string last_err;
    for (size_t k = 0; k < cands.size() && k < 8; ++k) {
        try {
            return extract_modulation(phi, g, m, cands[k].sigma, cands[k].theta);
        } catch (const NoConvergence& e) {
            last_err = e.what();
        }
    }
    throw NoConvergence("grid-search fallback exhausted; last: " + last_err);
}

std::vector<Vec3> synthesize_director(const ModulationFrame& frame, const RadialGrid& g, int m) {
    const size_t n = g.r.size();
    if (frame.z.size() != frame.rho_grid.r.size())
        throw SizeMismatch("frame z does not match its rho-grid");

    // nodal fast path: the stored rho-grid is exactly the scaled r-grid
    bool nodal = frame.rho_grid.r.size() == n;
    if (nodal) {
        for (size_t i = 0; i < n && nodal; ++i)
            if (std::abs(frame.rho_grid.r[i] * frame.sigma - g.r[i]) > 1e-12 * (1.0 + g.r_max))
                nodal = false;
    }

    std::vector<cplx> zq;
    if (nodal) {
        zq = frame.z;
    } else {
        std::vector<double> rho_q(n);
        for (size_t i = 0; i < n; ++i)
            rho_q[i] = g.r[i] * (1.0 / frame.sigma);
        zq = resample(frame.rho_grid.r, frame.z, rho_q, MonotoneCubic::Extend::Zero);
    }

    std::vector<Vec3> phi(n);
    for (size_t i = 0; i < n; ++i) {
        double rho = g.r[i] / frame.sigma;
        double h1 = profile_h1(rho, m);
        double h3 = profile_h3(rho, m);
        double gam = gamma_of_z(zq[i]);
        double z1 = zq[i].real(), z2 = zq[i].imag();
        Vec3 u = {(1.0 + gam) * h1 - z2 * h3, z1, (1.0 + gam) * h3 + z2 * h1};
        double nrm = std::sqrt(dot(u, u));
        if (nrm < 0.5)
            throw UnitNormViolation("synthesized director degenerate");
        for (double& c : u)
            c /= nrm;
        phi[i] = rotate_e3(u, frame.theta);
    }
    return phi;
}

std::vector<cplx> apply_Lh(const std::vector<cplx>& z, const RadialGrid& rho_grid, int m) {
    if (z.size() != rho_grid.r.size())
        throw SizeMismatch("apply_Lh field length");
    std::vector<cplx> dz = apply_derivative(z, rho_grid, 1);
    std::vector<cplx> zr = divide_by_r(z, rho_grid);
    std::vector<cplx> out(z.size());
    for (size_t i = 0; i < z.size(); ++i)
        out[i] = dz[i] + double(m) * profile_h3(rho_grid.r[i], m) * zr[i];
    return out;
}

std::vector<cplx> apply_Lh_star(const std::vector<cplx>& w, const RadialGrid& rho_grid, int m) {
    if (w.size() != rho_grid.r.size())
        throw SizeMismatch("apply_Lh_star field length");
    std::vector<cplx> dw = apply_derivative(w, rho_grid, 1);
    std::vector<cplx> wr = divide_by_r(w, rho_grid);
    std::vector<cplx> out(w.size());
    for (size_t i = 0; i < w.size(); ++i)
        out[i] = -dw[i] - wr[i] + double(m) * profile_h3(rho_grid.r[i], m) * wr[i];
    return out;
}

std::vector<cplx> apply_N(const std::vector<cplx>& z, const RadialGrid& rho_grid, int m) {
    if (z.size() != rho_grid.r.size())
        throw SizeMismatch("apply_N field length");
    std::vector<cplx> dz = apply_derivative(z, rho_grid, 1);
    std::vector<cplx> d2z = apply_derivative(z, rho_grid, 2);
    std::vector<cplx> out(z.size());
    for (size_t i = 1; i < z.size(); ++i) {
        double rho = rho_grid.r[i];
        double h1 = profile_h1(rho, m);
        double pot = (double(m) * m / (rho * rho)) * (2.0 * h1 * h1 - 1.0);
        out[i] = -(d2z[i] + dz[i] / rho + pot * z[i]);
    }
    // the axis value is a removable placeholder: every L2(rho drho) pairing
    // weights node 0 by rho = 0
    out[0] = cplx{extrapolate_to_zero(rho_grid.r[1], out[1].real(), rho_grid.r[2], out[2].real(),
                                      rho_grid.r[3], out[3].real()),
                  extrapolate_to_zero(rho_grid.r[1], out[1].imag(), rho_grid.r[2], out[2].imag(),
                                      rho_grid.r[3], out[3].imag())};
    return out;
}

double x_norm(const std::vector<cplx>& z, const RadialGrid& rho_grid) {
    if (z.size() != rho_grid.r.size())
        throw SizeMismatch("x_norm field length");
    double sup = 0.0;
    for (const cplx& v : z)
        sup = std::max(sup, std::abs(v));
    if (std::abs(z[0]) > 1e-12 * (1.0 + sup))
        throw AxisSingularity("z(0) must vanish for the X norm");
    std::vector<cplx> dz = apply_derivative(z, rho_grid, 1);
    std::vector<double> f(z.size());
    for (size_t i = 1; i < z.size(); ++i)
        f[i] = std::norm(dz[i]) + std::norm(z[i]) / (rho_grid.r[i] * rho_grid.r[i]);
    // linear first-cell model: |z|^2/rho^2 is constant there; trapezoid with the
    // zero-weighted axis node integrates it exactly
    f[0] = std::norm(dz[0]) + std::norm(z[1]) / (rho_grid.r[1] * rho_grid.r[1]);
    return std::sqrt(integrate_radial(f, rho_grid));
}

double l2_rho_norm(const std::vector<cplx>& z, const RadialGrid& rho_grid) {
    if (z.size() != rho_grid.r.size())
        throw SizeMismatch("l2_rho_norm field length");
    std::vector<double> f(z.size());
    for (size_t i = 0; i < z.size(); ++i)
        f[i] = std::norm(z[i]);
    return std::sqrt(integrate_radial(f, rho_grid));
}

std::pair<std::vector<cplx>, std::vector<cplx>> compute_mod_ht(
    const ModulationFrame& frame, double sigma_dot, double theta_dot,
    const std::vector<double>& w_over_r2, const std::vector<double>& v_vert,
    const ModelParams& p) {
    const RadialGrid& rg = frame.rho_grid;
    const size_t n = rg.r.size();
    if (frame.z.size() != n || w_over_r2.size() != n || v_vert.size() != n)
        throw SizeMismatch("compute_mod_ht field length");

    const double m = p.m;
    const double mu2 = p.mu * p.mu;
    const double sig = frame.sigma;
    const double s2 = sig * sig;
    const cplx iu{0.0, 1.0};

    std::vector<cplx> dz = apply_derivative(frame.z, rg, 1);
    std::vector<cplx> mod(n), ht(n);
    for (size_t i = 0; i < n; ++i) {
        double rho = rg.r[i];
        double h1 = profile_h1(rho, p.m);
        double h3 = profile_h3(rho, p.m);
        double hfrac = (i == 0) ? 0.0 : m * h1 / rho; // m h1 / rho, vanishing at the axis
        cplx z = frame.z[i];
        double z1 = z.real(), z2 = z.imag();
        double gam = frame.gamma[i];
        double root = std::sqrt(std::max(1e-12, 1.0 - std::norm(z)));
        double dgam = -(z1 * dz[i].real() + z2 * dz[i].imag()) / root;

        double drive = theta_dot + p.mu * v_vert[i] + m * w_over_r2[i];
        cplx first = -(cplx{(1.0 + gam) * h1, 0.0} + iu * h3 * z) * drive;
        cplx second = (sigma_dot / sig) * (iu * (1.0 + gam) * m * h1 + rho * dz[i]);
        cplx third = mu2 * (iu * (1.0 + gam) * h1 * h3 + iu * h1 * h1 * z2 - h3 * h3 * z);
        mod[i] = first + second + third;

        double a = gam * h1 - z2 * h3;
        double bsq = z1 * z1 + a * a + 2.0 * h1 * a;
        double coef = (i == 0) ? mu2 : (m * m / (rho * rho * s2) + mu2);
        double w1 = dgam - hfrac * z2;
        double w2 = dz[i].real();
        double w3 = dz[i].imag() + hfrac * gam;
        double csq = w1 * w1 + w2 * w2 + w3 * w3 + 2.0 * hfrac * w3;
        ht[i] = (iu / s2) * (2.0 * hfrac * dgam) + coef * z * bsq + (csq / s2) * z;
    }
    return {std::move(mod), std::move(ht)};
}

} // namespace twistel
