#include "twistel/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "twistel/errors.hpp"

namespace twistel {

namespace {

// (W - W_os)/r with the axis limit 0; W* vanishes quadratically at r = 0.
std::vector<double> wstar_over_r(const EquivariantState& s, const RadialGrid& g,
                                 const ModelParams& p) {
    const int n = g.n();
    std::vector<double> ws(n);
    for (int i = 0; i < n; ++i) ws[i] = s.W[i] - oseen_w(g.r[i], s.t, p.omega, p.r0);
    return divide_by_r(ws, g);
}

} // namespace

EnergyReport energy_report(const EquivariantState& s, const GaugeFields& gf, const RadialGrid& g,
                           const ModelParams& p) {
    const int n = g.n();
    if (static_cast<int>(gf.q.size()) != n) throw SizeMismatch("gauge fields do not match grid");

    EnergyReport rep;
    const std::vector<double> wsr = wstar_over_r(s, g, p);

    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::norm(gf.q[i]);
    const double q2 = integrate_radial(f, g);
    for (int i = 0; i < n; ++i) f[i] = std::norm(gf.v[i]);
    const double v2 = integrate_radial(f, g);
    for (int i = 0; i < n; ++i) f[i] = s.V[i] * s.V[i];
    const double V2 = integrate_radial(f, g);
    for (int i = 0; i < n; ++i) f[i] = wsr[i] * wsr[i];
    const double ws2 = integrate_radial(f, g);

    rep.q_l2 = std::sqrt(q2);
    rep.v_l2 = std::sqrt(v2);
    rep.V_l2 = std::sqrt(V2);
    rep.wstar_over_r_l2 = std::sqrt(ws2);
    rep.Estar = q2 + V2 + ws2;
    rep.E = rep.Estar + p.mu * p.mu * v2;

    // Dissipation: |L_m q + mu^2 v phi3|^2 + (d_r V)^2 + (d_r W* / r)^2.
    std::vector<double> phi3(n);
    for (int i = 0; i < n; ++i) phi3[i] = s.phi[i][2];
    const std::vector<cplx> lmq = compute_lm(gf.q, phi3, g, p.m);
    for (int i = 0; i < n; ++i) {
        const cplx a = lmq[i] + p.mu * p.mu * gf.v[i] * s.phi[i][2];
        f[i] = std::norm(a);
    }
    double diss = integrate_radial(f, g);

    const std::vector<double> dV = apply_derivative(s.V, g, 1);
    for (int i = 0; i < n; ++i) f[i] = dV[i] * dV[i];
    diss += integrate_radial(f, g);

    std::vector<double> wstar(n);
    for (int i = 0; i < n; ++i) wstar[i] = s.W[i] - oseen_w(g.r[i], s.t, p.omega, p.r0);
    std::vector<double> dws = apply_derivative(wstar, g, 1);
    dws[0] = 0.0; // W* is even in r, so its derivative vanishes at the axis
    const std::vector<double> dws_r = divide_by_r(dws, g);
    for (int i = 0; i < n; ++i) f[i] = dws_r[i] * dws_r[i];
    diss += integrate_radial(f, g);
    rep.dissipation = diss;

    // Forcing: m int d_r(W_os/r^2) <q, i v> r dr with <q, i v> = Im(q conj(v)).
    for (int i = 0; i < n; ++i) {
        const double dw = oseen_w_over_r2_deriv(g.r[i], s.t, p.omega, p.r0);
        f[i] = dw * std::imag(gf.q[i] * std::conj(gf.v[i]));
    }
    rep.forcing = p.m * integrate_radial(f, g);
    return rep;
}

double energy_identity_residual(double e_prev, double e_next, double span, double dissipation,
                                double forcing) {
    if (span <= 0.0) throw std::invalid_argument("time span must be positive");
    return std::abs(0.5 * (e_next - e_prev) / span + dissipation - forcing);
}

FitResult fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& value,
                               double t_lo, double t_hi) {
    if (t.size() != value.size()) throw SizeMismatch("time and value series differ in length");
    std::vector<double> tt, lv;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (!(value[i] > 0.0))
            throw std::invalid_argument("nonpositive value in fit window, cannot take log");
        tt.push_back(t[i]);
        lv.push_back(std::log(value[i]));
    }
    if (tt.size() < 10) throw std::invalid_argument("insufficient samples in fit window");

    const double nn = static_cast<double>(tt.size());
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < tt.size(); ++i) {
        mt += tt[i];
        mv += lv[i];
    }
    mt /= nn;
    mv /= nn;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < tt.size(); ++i) {
        const double dx = tt[i] - mt;
        const double dy = lv[i] - mv;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw std::invalid_argument("degenerate time window in fit");

    FitResult res;
    res.samples = static_cast<int>(tt.size());
    res.rate = sxy / sxx;
    const double ss_res = syy - sxy * sxy / sxx;
    res.r2 = (syy <= 1e-300) ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
    return res;
}

DecayCheck decay_bound_check(const std::vector<double>& t, const std::vector<double>& value,
                             double exponent, bool offset_base, double t_lo, double t_hi) {
    if (t.size() != value.size()) throw SizeMismatch("time and value series differ in length");
    const double t_mid = 0.5 * (t_lo + t_hi);
    DecayCheck chk;
    int n_first = 0, n_second = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        const double base = offset_base ? 1.0 + t[i] : t[i];
        if (base <= 0.0) throw std::invalid_argument("decay base must be positive in window");
        const double c = value[i] * std::pow(base, -exponent);
        if (t[i] <= t_mid) {
            chk.c_first = std::max(chk.c_first, c);
            ++n_first;
        } else {
            chk.c_second = std::max(chk.c_second, c);
            ++n_second;
        }
    }
    if (n_first < 2 || n_second < 2)
        throw std::invalid_argument("insufficient samples in decay window");
    chk.pass = chk.c_second <= chk.c_first * (1.0 + 1e-9);
    return chk;
}

CoercivityResult coercivity_spectrum(const RadialGrid& rho_grid, int m, bool constrained) {
    const int n = rho_grid.n();
    if (n > 2049) throw std::invalid_argument("coercivity solve limited to 2048 nodes");
    const int dim = n - 1; // z(0) = 0 pinned, dofs at nodes 1..n-1

    // Cell-midpoint assembly: for cell j between nodes j and j+1,
    //   (Gz)_j = (z_{j+1} - z_j)/d_j + kappa(mid_j) (z_j + z_{j+1})/2
    // with kappa = (m/rho) h3, cell weight mid_j d_j. The two-point stencil
    // couples only neighbours, so no oscillatory null modes appear.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j + 1 < n; ++j) {
        const double d = rho_grid.r[j + 1] - rho_grid.r[j];
        const double mid = 0.5 * (rho_grid.r[j] + rho_grid.r[j + 1]);
        const double cw = mid * d;
        const double kap = (static_cast<double>(m) / mid) * profile_h3(mid, m);
        // Coefficients on (z_j, z_{j+1}); dof index of node k is k-1 (node 0 fixed at 0).
        const double ga = -1.0 / d + 0.5 * kap;
        const double gb = 1.0 / d + 0.5 * kap;
        const double da = -1.0 / d;
        const double db = 1.0 / d;
        const double pa = 0.5 / mid; // midpoint value of z/rho
        const double pb = 0.5 / mid;
        const int ia = j - 1, ib = j;
        if (ia >= 0) {
            A(ia, ia) += cw * ga * ga;
            A(ia, ib) += cw * ga * gb;
            A(ib, ia) += cw * gb * ga;
            B(ia, ia) += cw * (da * da + pa * pa);
            B(ia, ib) += cw * (da * db + pa * pb);
            B(ib, ia) += cw * (db * da + pb * pa);
        }
        A(ib, ib) += cw * gb * gb;
        B(ib, ib) += cw * (db * db + pb * pb);
    }

    // Nodal L2(rho drho) mass over the dofs, used for the constraint and for
    // the alignment report.
    Eigen::VectorXd mass(dim), h1v(dim);
    for (int k = 1; k < n; ++k) {
        mass[k - 1] = rho_grid.w[k] * rho_grid.r[k];
        h1v[k - 1] = profile_h1(rho_grid.r[k], m);
    }

    Eigen::VectorXd zmin;
    double lam = 0.0;
    if (!constrained) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
        if (ges.info() != Eigen::Success) throw NoConvergence("eigensolve failed");
        lam = ges.eigenvalues()[0];
        zmin = ges.eigenvectors().col(0);
    } else {
        // Remove span{mass .* h1} via a Householder reflector mapping c to e1;
        // the remaining columns span the constraint plane.
        Eigen::VectorXd c(dim);
        for (int k = 0; k < dim; ++k) c[k] = mass[k] * h1v[k];
        const double cn = c.norm();
        if (cn <= 0.0) throw std::invalid_argument("degenerate constraint vector");
        Eigen::VectorXd u = c;
        u[0] += (c[0] >= 0.0 ? cn : -cn);
        u.normalize();
        // Q = (I - 2 u u^T) with first column dropped.
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(dim, dim) - 2.0 * u * u.transpose();
        Eigen::MatrixXd Q = H.rightCols(dim - 1);
        Eigen::MatrixXd Ar = Q.transpose() * A * Q;
        Eigen::MatrixXd Br = Q.transpose() * B * Q;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ar, Br);
        if (ges.info() != Eigen::Success) throw NoConvergence("eigensolve failed");
        lam = ges.eigenvalues()[0];
        zmin = Q * ges.eigenvectors().col(0);
    }

    CoercivityResult res;
    res.min_quotient = lam;
    double zh = 0.0, zz = 0.0, hh = 0.0;
    for (int k = 0; k < dim; ++k) {
        zh += mass[k] * zmin[k] * h1v[k];
        zz += mass[k] * zmin[k] * zmin[k];
        hh += mass[k] * h1v[k] * h1v[k];
    }
    res.kernel_alignment = std::abs(zh) / std::sqrt(std::max(zz * hh, 1e-300));
    return res;
}

double lm_coercivity_ratio(const EquivariantState& s, const GaugeFields& gf, const RadialGrid& g,
                           int m) {
    const int n = g.n();
    const std::vector<cplx> dq = apply_derivative(gf.q, g, 1);
    const std::vector<cplx> qr = divide_by_r(gf.q, g);
    std::vector<double> phi3(n);
    for (int i = 0; i < n; ++i) phi3[i] = s.phi[i][2];
    const std::vector<cplx> lmq = compute_lm(gf.q, phi3, g, m);

    std::vector<double> num(n), den(n);
    for (int i = 0; i < n; ++i) {
        num[i] = std::norm(dq[i]) + std::norm(qr[i]);
        den[i] = std::norm(lmq[i]);
    }
    const double d = integrate_radial(den, g);
    if (d <= 0.0) throw std::invalid_argument("vanishing denominator in coercivity ratio");
    return integrate_radial(num, g) / d;
}

RatioStats check_norm_equivalence(const RadialGrid& g, const ModelParams& p,
                                  const std::vector<ModulationFrame>& frames) {
    RatioStats st;
    st.min_ratio = std::numeric_limits<double>::infinity();
    st.max_ratio = 0.0;
    for (const ModulationFrame& fr : frames) {
        EquivariantState s;
        s.t = 0.0;
        s.phi = synthesize_director(fr, g, p.m);
        s.W.assign(g.n(), 0.0);
        s.V.assign(g.n(), 0.0);
        const GaugeFields gf = compute_gauge(s, g, p);
        std::vector<double> f(g.n());
        for (int i = 0; i < g.n(); ++i) f[i] = std::norm(gf.q[i]);
        const double qn = std::sqrt(integrate_radial(f, g));
        const double zn = x_norm(fr.z, fr.rho_grid);
        if (zn <= 0.0) throw std::invalid_argument("zero deformation in norm comparison");
        const double ratio = qn / zn;
        st.min_ratio = std::min(st.min_ratio, ratio);
        st.max_ratio = std::max(st.max_ratio, ratio);
        ++st.count;
    }
    if (st.count == 0) throw std::invalid_argument("no frames supplied");
    return st;
}

BootstrapCheck bootstrap_assumption_check(double t, double sigma, double v2_l2,
                                          const ModelParams& p, double sigma_in, double epsilon,
                                          double epsilon_star) {
    BootstrapCheck chk;
    const double mm = static_cast<double>(p.m) * static_cast<double>(p.m);
    const double ref = sigma_in * std::exp(-p.mu * p.mu * t / mm);
    chk.sigma_lo = (1.0 - 0.5 * epsilon) * ref;
    chk.sigma_hi = (1.0 + 0.5 * epsilon) * ref;
    chk.a1 = sigma >= chk.sigma_lo && sigma <= chk.sigma_hi;
    chk.v2_budget = std::pow(epsilon_star, 1.5) / ((1.0 + t) * (1.0 + t));
    chk.a2 = v2_l2 * v2_l2 <= chk.v2_budget;
    return chk;
}

} // namespace twistel
