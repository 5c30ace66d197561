#include "twistel/gauge.hpp"

#include <cmath>

#include "twistel/errors.hpp"

namespace twistel {

namespace {

Vec3 axpy(double a, const Vec3& x, const Vec3& y) {
    return {a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]};
}

Vec3 normalized(const Vec3& v) {
    double n = std::sqrt(dot(v, v));
    if (n < 1e-8)
        throw DegenerateFrame("frame vector collapsed during transport");
    return {v[0] / n, v[1] / n, v[2] / n};
}

} // namespace

GaugeFields compute_gauge(const EquivariantState& s, const RadialGrid& g, const ModelParams& p) {
    const int n = g.n();
    if (static_cast<int>(s.phi.size()) != n)
        throw SizeMismatch("state does not match grid");

    std::vector<double> c1(n), c2(n), c3(n);
    for (int i = 0; i < n; ++i) {
        c1[i] = s.phi[i][0];
        c2[i] = s.phi[i][1];
        c3[i] = s.phi[i][2];
    }
    std::vector<double> d1 = derivative_hi(c1, g);
    std::vector<double> d2 = derivative_hi(c2, g);
    std::vector<double> d3 = derivative_hi(c3, g);

    GaugeFields gf;
    gf.e.resize(n);
    gf.q.resize(n);
    gf.v.resize(n);

    // inward transport, RK4 on each interval with stage data linearly interpolated
    auto rhs = [](const Vec3& e, const Vec3& phi, const Vec3& dphi) {
        double a = dot(e, dphi);
        return Vec3{-a * phi[0], -a * phi[1], -a * phi[2]};
    };
    Vec3 e = {0.0, 1.0, 0.0};
    gf.e[n - 1] = e;
    for (int i = n - 2; i >= 0; --i) {
        double ds = g.r[i] - g.r[i + 1];
        Vec3 phi_a = s.phi[i + 1], phi_b = s.phi[i];
        Vec3 dphi_a = {d1[i + 1], d2[i + 1], d3[i + 1]};
        Vec3 dphi_b = {d1[i], d2[i], d3[i]};
        Vec3 phi_m = normalized(axpy(1.0, phi_a, phi_b));
        Vec3 dphi_m = {0.5 * (dphi_a[0] + dphi_b[0]), 0.5 * (dphi_a[1] + dphi_b[1]),
                       0.5 * (dphi_a[2] + dphi_b[2])};

        Vec3 k1 = rhs(e, phi_a, dphi_a);
        Vec3 k2 = rhs(axpy(0.5 * ds, k1, e), phi_m, dphi_m);
        Vec3 k3 = rhs(axpy(0.5 * ds, k2, e), phi_m, dphi_m);
        Vec3 k4 = rhs(axpy(ds, k3, e), phi_b, dphi_b);
        Vec3 inc = {k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0], k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1],
                    k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]};
        e = axpy(ds / 6.0, inc, e);
        // re-orthonormalize against phi at the new node
        e = axpy(-dot(e, phi_b), phi_b, e);
        e = normalized(e);
        gf.e[i] = e;
    }

    const double m = p.m;
    for (int i = 0; i < n; ++i) {
        const Vec3& phi = s.phi[i];
        Vec3 qv;
        if (i == 0) {
            // both d_r phi and (m/r) phi x R phi vanish at the axis for admissible data
            qv = {0.0, 0.0, 0.0};
        } else {
            Vec3 dphi = {d1[i], d2[i], d3[i]};
            // phi x R phi = (-phi3 phi1, -phi3 phi2, phi1^2 + phi2^2)
            Vec3 pxr = {-phi[2] * phi[0], -phi[2] * phi[1], phi[0] * phi[0] + phi[1] * phi[1]};
            double a = m / g.r[i];
            qv = {dphi[0] - a * pxr[0], dphi[1] - a * pxr[1], dphi[2] - a * pxr[2]};
        }
        Vec3 pxe = cross(phi, gf.e[i]);
        gf.q[i] = {dot(qv, gf.e[i]), dot(qv, pxe)};
        gf.v[i] = {gf.e[i][2], pxe[2]};
        gf.tangency_residual = std::max(gf.tangency_residual, std::abs(dot(qv, phi)));
    }
    return gf;
}

std::vector<cplx> compute_lm(const std::vector<cplx>& q, const std::vector<double>& phi3,
                             const RadialGrid& g, int m) {
    if (q.size() != g.r.size() || phi3.size() != g.r.size())
        throw SizeMismatch("compute_lm field length");
    std::vector<cplx> dq = apply_derivative(q, g, 1);
    std::vector<cplx> qr = divide_by_r(q, g);
    std::vector<cplx> out(q.size());
    for (size_t i = 0; i < q.size(); ++i)
        out[i] = dq[i] + qr[i] - double(m) * phi3[i] * qr[i];
    return out;
}

std::vector<cplx> compute_lm_star(const std::vector<cplx>& v, const std::vector<double>& phi3,
                                  const RadialGrid& g, int m) {
    if (v.size() != g.r.size() || phi3.size() != g.r.size())
        throw SizeMismatch("compute_lm_star field length");
    std::vector<cplx> dv = apply_derivative(v, g, 1);
    std::vector<cplx> vr = divide_by_r(v, g);
    std::vector<cplx> out(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out[i] = -dv[i] - double(m) * phi3[i] * vr[i];
    return out;
}

std::vector<double> compute_s_integral(const EquivariantState& s, const GaugeFields& gf,
                                       const RadialGrid& g, const ModelParams& p) {
    const size_t n = g.r.size();
    if (gf.q.size() != n || s.W.size() != n)
        throw SizeMismatch("compute_s_integral field length");

    std::vector<double> phi3(n);
    for (size_t i = 0; i < n; ++i)
        phi3[i] = s.phi[i][2];
    std::vector<cplx> lmq = compute_lm(gf.q, phi3, g, p.m);
    std::vector<cplx> vr = divide_by_r(gf.v, g);

    std::vector<double> wor2(n);
    for (size_t i = 1; i < n; ++i)
        wor2[i] = s.W[i] / (g.r[i] * g.r[i]);
    wor2[0] = extrapolate_to_zero(g.r[1], wor2[1], g.r[2], wor2[2], g.r[3], wor2[3]);

    const cplx iu{0.0, 1.0};
    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) {
        cplx a = lmq[i] + p.mu * p.mu * gf.v[i] * phi3[i] +
                 iu * gf.v[i] * (double(p.m) * wor2[i] + p.mu * s.V[i]);
        cplx b = iu * (gf.q[i] + double(p.m) * vr[i]);
        f[i] = a.real() * b.real() + a.imag() * b.imag();
    }

    std::vector<double> out(n, 0.0);
    for (int i = int(n) - 2; i >= 0; --i)
        out[i] = out[i + 1] + 0.5 * (g.r[i + 1] - g.r[i]) * (f[i] + f[i + 1]);
    return out;
}

} // namespace twistel
