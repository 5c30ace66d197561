#include "twistel/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "twistel/errors.hpp"
#include "twistel/gauge.hpp"

namespace twistel {

namespace {

constexpr double kRenormLimit = 1e-3;
constexpr double kDtFloor = 1e-10;

} // namespace

RunConfig resolve_config(const RunConfig& cfg) {
    RunConfig r = cfg;
    validate(r.params);
    if (r.sigma_in <= 0.0) throw ConfigError("sigma_in must be positive");
    if (r.n < 16) throw ConfigError("n must be at least 16");
    if (r.dt <= 0.0) throw ConfigError("dt must be positive");
    if (r.dt_max < r.dt) r.dt_max = r.dt;
    if (r.output_cadence < 1) throw ConfigError("output_cadence must be at least 1");
    if (r.perturb_amplitude < 0.0 || r.perturb_amplitude >= 0.5)
        throw ConfigError("perturb_amplitude must lie in [0, 1/2)");
    if (r.epsilon <= 0.0 || r.epsilon_star <= 0.0)
        throw ConfigError("bootstrap tolerances must be positive");
    if (r.r_max <= 0.0) r.r_max = std::max(50.0 * r.sigma_in, 10.0 * r.params.r0);
    const double mm = static_cast<double>(r.params.m) * static_cast<double>(r.params.m);
    if (r.t_end < 0.0) r.t_end = 3.0 * mm / (r.params.mu * r.params.mu);
    if (r.mode == RunMode::HeatFlow) {
        if (r.params.omega != 0.0) throw ConfigError("heat-flow mode requires omega = 0");
        if (r.vin_l2 != 0.0 || r.wstar_l2 != 0.0)
            throw ConfigError("heat-flow mode requires zero flow data");
    }
    return r;
}

Stepper::Stepper(const RadialGrid& g, const ModelParams& p, RunMode mode)
    : grid_(g), params_(p), mode_(mode) {
    validate(params_);
    const int n = grid_.n();
    mat_ph_.a.resize(n);
    mat_ph_.b.resize(n);
    mat_ph_.c.resize(n);
    mat_pv_ = mat_ph_;
    mat_w_ = mat_ph_;
    mat_v_ = mat_ph_;
    mat_g1_ = mat_ph_;
}

void Stepper::build_matrices(double dt) const {
    if (dt == cached_dt_) return;
    const int n = grid_.n();
    const double m2 = static_cast<double>(params_.m) * static_cast<double>(params_.m);
    const double mu2 = params_.mu * params_.mu;
    const double h1 = grid_.r[1] - grid_.r[0];
    const double h1sq = h1 * h1;

    auto dirichlet = [](TriDiag& M, int row) {
        M.a[row] = 0.0;
        M.b[row] = 1.0;
        M.c[row] = 0.0;
    };

    for (int i = 1; i + 1 < n; ++i) {
        const StencilRow& s2 = grid_.d2[i];
        const StencilRow& s1 = grid_.d1[i];
        const double ri = grid_.r[i];
        // Interior second/first derivative rows are 3-point centered.
        const double l0 = s2.w[0] + s1.w[0] / ri;
        const double l1 = s2.w[1] + s1.w[1] / ri;
        const double l2 = s2.w[2] + s1.w[2] / ri;
        const double pot = m2 / (ri * ri) + mu2;

        mat_ph_.a[i] = -dt * l0;
        mat_ph_.b[i] = 1.0 - dt * (l1 - pot);
        mat_ph_.c[i] = -dt * l2;

        mat_pv_.a[i] = -dt * l0;
        mat_pv_.b[i] = 1.0 - dt * l1;
        mat_pv_.c[i] = -dt * l2;

        const double w0 = s2.w[0] - s1.w[0] / ri;
        const double w1 = s2.w[1] - s1.w[1] / ri;
        const double w2 = s2.w[2] - s1.w[2] / ri;
        mat_w_.a[i] = -dt * w0;
        mat_w_.b[i] = 1.0 - dt * w1;
        mat_w_.c[i] = -dt * w2;

        mat_v_.a[i] = -dt * l0;
        mat_v_.b[i] = 1.0 - dt * l1;
        mat_v_.c[i] = -dt * l2;

        const double g0 = s2.w[0] + 3.0 * s1.w[0] / ri;
        const double g1 = s2.w[1] + 3.0 * s1.w[1] / ri;
        const double g2 = s2.w[2] + 3.0 * s1.w[2] / ri;
        mat_g1_.a[i] = -dt * g0;
        mat_g1_.b[i] = 1.0 - dt * g1;
        mat_g1_.c[i] = -dt * g2;
    }

    dirichlet(mat_ph_, 0);
    dirichlet(mat_ph_, n - 1);
    dirichlet(mat_pv_, 0);
    dirichlet(mat_pv_, n - 1);
    dirichlet(mat_w_, 0);
    dirichlet(mat_w_, n - 1);

    // Axis rows from the even extension: Lap2 V(0) ~ 4 (V_1 - V_0)/h^2 and
    // Lap4 g(0) ~ 8 (g_1 - g_0)/h^2.
    mat_v_.a[0] = 0.0;
    mat_v_.b[0] = 1.0 + 4.0 * dt / h1sq;
    mat_v_.c[0] = -4.0 * dt / h1sq;
    dirichlet(mat_v_, n - 1);

    mat_g1_.a[0] = 0.0;
    mat_g1_.b[0] = 1.0 + 8.0 * dt / h1sq;
    mat_g1_.c[0] = -8.0 * dt / h1sq;
    dirichlet(mat_g1_, n - 1);

    cached_dt_ = dt;
}

void Stepper::solve(const TriDiag& M, std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    std::vector<double> cp(n), dp(n);
    double beta = M.b[0];
    if (beta == 0.0) throw StabilityFailure("singular tridiagonal system");
    cp[0] = M.c[0] / beta;
    dp[0] = rhs[0] / beta;
    for (int i = 1; i < n; ++i) {
        beta = M.b[i] - M.a[i] * cp[i - 1];
        if (beta == 0.0) throw StabilityFailure("singular tridiagonal system");
        cp[i] = M.c[i] / beta;
        dp[i] = (rhs[i] - M.a[i] * dp[i - 1]) / beta;
    }
    rhs[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = dp[i] - cp[i] * rhs[i + 1];
}

double Stepper::attempt(const EquivariantState& s, double dt, EquivariantState& out) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    const int n = grid_.n();
    if (static_cast<int>(s.phi.size()) != n) throw SizeMismatch("state does not match grid");
    build_matrices(dt);

    const double m2 = static_cast<double>(params_.m) * static_cast<double>(params_.m);
    const double mu2 = params_.mu * params_.mu;
    const double md = static_cast<double>(params_.m);

    std::vector<double> p1(n), p2(n), p3(n);
    for (int i = 0; i < n; ++i) {
        p1[i] = s.phi[i][0];
        p2[i] = s.phi[i][1];
        p3[i] = s.phi[i][2];
    }
    const std::vector<double> d1 = apply_derivative(p1, grid_, 1);
    const std::vector<double> d2v = apply_derivative(p2, grid_, 1);
    const std::vector<double> d3 = apply_derivative(p3, grid_, 1);

    // Interior radial Laplacian of the horizontal components drives the swirl
    // and vertical-flow forcing <Lap2 phi, R phi> = phi1 Lap2 phi2 - phi2 Lap2 phi1.
    std::vector<double> lap1(n, 0.0), lap2(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const StencilRow& s2 = grid_.d2[i];
        const StencilRow& s1 = grid_.d1[i];
        const double ri = grid_.r[i];
        double a1 = 0.0, a2 = 0.0;
        for (int k = 0; k < s2.len; ++k) {
            const double w = s2.w[k] + s1.w[k] / ri;
            a1 += w * p1[s2.start + k];
            a2 += w * p2[s2.start + k];
        }
        lap1[i] = a1;
        lap2[i] = a2;
    }

    std::vector<double> r1(n), r2(n), r3(n);
    for (int i = 1; i + 1 < n; ++i) {
        const double ri = grid_.r[i];
        const double grad2 = d1[i] * d1[i] + d2v[i] * d2v[i] + d3[i] * d3[i];
        const double horiz = p1[i] * p1[i] + p2[i] * p2[i];
        const double coef = m2 / (ri * ri) + mu2;
        double swirl = 0.0;
        if (mode_ == RunMode::Coupled)
            swirl = md * s.W[i] / (ri * ri) + params_.mu * s.V[i];
        // R phi = (-phi2, phi1, 0).
        const double n1 = grad2 * p1[i] + coef * horiz * p1[i] - swirl * (-p2[i]);
        const double n2 = grad2 * p2[i] + coef * horiz * p2[i] - swirl * p1[i];
        const double n3 = grad2 * p3[i] + coef * horiz * p3[i];
        r1[i] = p1[i] + dt * n1;
        r2[i] = p2[i] + dt * n2;
        r3[i] = p3[i] + dt * n3;
    }
    r1[0] = 0.0;
    r2[0] = 0.0;
    r3[0] = -1.0;
    r1[n - 1] = 0.0;
    r2[n - 1] = 0.0;
    r3[n - 1] = 1.0;

    solve(mat_ph_, r1);
    solve(mat_ph_, r2);
    solve(mat_pv_, r3);

    out.t = s.t + dt;
    out.phi.resize(n);
    out.W = s.W;
    out.V = s.V;

    if (mode_ == RunMode::Coupled) {
        std::vector<double> rw(n), rv(n);
        for (int i = 1; i + 1 < n; ++i) {
            const double f = p1[i] * lap2[i] - p2[i] * lap1[i];
            rw[i] = s.W[i] - dt * md * f;
            rv[i] = s.V[i] - dt * params_.mu * f;
        }
        rw[0] = 0.0;
        rw[n - 1] = oseen_w(grid_.r_max, s.t + dt, params_.omega, params_.r0);
        rv[0] = s.V[0];
        rv[n - 1] = 0.0;
        solve(mat_w_, rw);
        solve(mat_v_, rv);
        out.W = std::move(rw);
        out.V = std::move(rv);
    }

    double corr = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(r1[i]) || !std::isfinite(r2[i]) || !std::isfinite(r3[i]) ||
            !std::isfinite(out.W[i]) || !std::isfinite(out.V[i]))
            throw NanDetected("non-finite value after implicit solve");
        const double nrm = std::sqrt(r1[i] * r1[i] + r2[i] * r2[i] + r3[i] * r3[i]);
        if (nrm <= 0.0) throw NanDetected("vanishing director after implicit solve");
        corr = std::max(corr, std::abs(nrm - 1.0));
        out.phi[i] = {r1[i] / nrm, r2[i] / nrm, r3[i] / nrm};
    }
    return corr;
}

void Stepper::advance_companions(std::vector<double>& V1, std::vector<double>& g1,
                                 double dt) const {
    build_matrices(dt);
    const int n = grid_.n();
    if (static_cast<int>(V1.size()) != n || static_cast<int>(g1.size()) != n)
        throw SizeMismatch("companion fields do not match grid");
    V1[n - 1] = 0.0;
    g1[n - 1] = 0.0;
    solve(mat_v_, V1);
    solve(mat_g1_, g1);
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(V1[i]) || !std::isfinite(g1[i]))
            throw NanDetected("non-finite companion field");
}

double similarity_lambda(double t, const ModelParams& p) {
    const double mm = static_cast<double>(p.m) * static_cast<double>(p.m);
    return std::exp(-p.mu * p.mu * t / mm) / p.mu;
}

double similarity_time(double t, const ModelParams& p) {
    const double mm = static_cast<double>(p.m) * static_cast<double>(p.m);
    return 0.5 * mm * std::expm1(2.0 * p.mu * p.mu * t / mm);
}

namespace {

// Diagnostics snapshot at a record time; the energy-identity residual column
// is filled afterwards from neighbouring records.
void fill_record(TrajectoryRecord& rec, const EquivariantState& s, const RadialGrid& g,
                 const RunConfig& cfg, const std::vector<double>& V1,
                 const std::vector<double>& g1, double prev_t, double prev_weight_integrand,
                 double prev_weighted) {
    const ModelParams& p = cfg.params;
    const int n = g.n();
    const GaugeFields gf = compute_gauge(s, g, p);
    const EnergyReport rep = energy_report(s, gf, g, p);

    rec.t = s.t;
    DiagnosticsRecord& d = rec.diag;
    d.t = s.t;
    d.sigma = rec.frame.sigma;
    d.theta = rec.frame.theta;
    d.x_norm_z = x_norm(rec.frame.z, rec.frame.rho_grid);
    d.l2_z = rec.frame.sigma * l2_rho_norm(rec.frame.z, rec.frame.rho_grid);
    d.E = rep.E;
    d.Estar = rep.Estar;
    d.dissipation = rep.dissipation;
    d.forcing = rep.forcing;
    d.residual = std::numeric_limits<double>::quiet_NaN();
    d.V_l2 = rep.V_l2;
    d.wstar_over_r_l2 = rep.wstar_over_r_l2;
    d.v_l2 = rep.v_l2;

    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        const double v2 = s.V[i] - V1[i];
        f[i] = v2 * v2;
    }
    d.V2_l2 = std::sqrt(integrate_radial(f, g));

    double v1s = 0.0, g1s = 0.0;
    for (int i = 0; i < n; ++i) {
        v1s = std::max(v1s, std::abs(V1[i]));
        g1s = std::max(g1s, std::abs(g1[i]));
    }
    d.V1_sup = v1s;
    d.wstar1_over_r2_sup = g1s;

    std::vector<double> ws(n);
    for (int i = 0; i < n; ++i) ws[i] = s.W[i] - oseen_w(g.r[i], s.t, p.omega, p.r0);
    const std::vector<double> wsr = divide_by_r(ws, g);
    for (int i = 0; i < n; ++i) {
        const double w2 = wsr[i] - g1[i] * g.r[i];
        f[i] = w2 * w2;
    }
    d.wstar2_over_r_l2 = std::sqrt(integrate_radial(f, g));

    const double mm = static_cast<double>(p.m) * static_cast<double>(p.m);
    const double integrand = std::exp(2.0 * p.mu * p.mu * s.t / mm) * d.x_norm_z * d.x_norm_z;
    d.weighted_z =
        prev_weighted + 0.5 * (integrand + prev_weight_integrand) * (s.t - prev_t);

    const BootstrapCheck bc = bootstrap_assumption_check(s.t, d.sigma, d.V2_l2, p, cfg.sigma_in,
                                                         cfg.epsilon, cfg.epsilon_star);
    d.a1_ok = bc.a1;
    d.a2_ok = bc.a2;

    int cells = 0;
    while (cells < n && g.r[cells] < d.sigma) ++cells;
    d.sigma_cells = static_cast<double>(cells);

    rec.W = s.W;
    rec.V = s.V;
    rec.V1 = V1;
    rec.G1 = g1;
}

} // namespace

RunResult run_simulation(const RunConfig& cfg_in) {
    const auto wall0 = std::chrono::steady_clock::now();
    RunResult res;
    res.config = resolve_config(cfg_in);
    const RunConfig& cfg = res.config;
    const ModelParams& p = cfg.params;

    res.grid = make_grid(cfg.r_max, cfg.n, cfg.grading, cfg.grading_beta);
    const RadialGrid& g = res.grid;

    const RadialGrid rho_in = scaled_grid(g, 1.0 / cfg.sigma_in);
    const std::vector<cplx> z_in =
        make_test_perturbation(cfg.perturb_kind, cfg.perturb_amplitude, rho_in, p.m);
    const std::vector<double> v_in = make_gaussian_vin(cfg.vin_l2, cfg.vin_width, g);
    const std::vector<double> wstar_in = make_wstar_in(cfg.wstar_l2, cfg.wstar_width, g);

    EquivariantState cur =
        build_initial_data(g, p, cfg.sigma_in, cfg.theta_in, z_in, v_in, wstar_in);
    if (cfg.mode == RunMode::HeatFlow) {
        cur.W.assign(g.n(), 0.0);
        cur.V.assign(g.n(), 0.0);
    }

    std::vector<double> V1 = v_in;
    std::vector<double> g1(g.n(), 0.0);
    for (int i = 1; i < g.n(); ++i) g1[i] = wstar_in[i] / (g.r[i] * g.r[i]);
    g1[0] = extrapolate_to_zero(g.r[1], g1[1], g.r[2], g1[2], g.r[3], g1[3]);

    Stepper stepper(g, p, cfg.mode);
    res.status = RunStatus::Completed;

    double sigma_guess = cfg.sigma_in;
    double theta_guess = cfg.theta_in;
    double prev_t = 0.0, prev_integrand = 0.0, prev_weighted = 0.0;
    const double mm = static_cast<double>(p.m) * static_cast<double>(p.m);

    auto record_now = [&](const EquivariantState& s) -> bool {
        TrajectoryRecord rec;
        try {
            rec.frame = extract_modulation(s.phi, g, p.m, sigma_guess, theta_guess);
        } catch (const NoConvergence& e) {
            res.status = RunStatus::Breakdown;
            res.message = e.what();
            return false;
        }
        sigma_guess = rec.frame.sigma;
        theta_guess = rec.frame.theta;
        fill_record(rec, s, g, cfg, V1, g1, prev_t, prev_integrand, prev_weighted);
        prev_t = s.t;
        prev_integrand =
            std::exp(2.0 * p.mu * p.mu * s.t / mm) * rec.diag.x_norm_z * rec.diag.x_norm_z;
        prev_weighted = rec.diag.weighted_z;
        res.traj.records.push_back(std::move(rec));
        const TrajectoryRecord& back = res.traj.records.back();
        if (back.diag.sigma_cells < cfg.min_sigma_cells) {
            res.status = RunStatus::EarlyStop;
            res.message = "bubble scale no longer resolved by the grid";
            return false;
        }
        return true;
    };

    if (!record_now(cur)) {
        res.final_state = cur;
        res.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return res;
    }

    EquivariantState cand;
    double dt_cur = cfg.dt;
    int accepted_streak = 0;
    long step_idx = 0;

    while (cur.t < cfg.t_end - 1e-12) {
        const double dt_eff = std::min(dt_cur, cfg.t_end - cur.t);
        double corr = 0.0;
        try {
            corr = stepper.attempt(cur, dt_eff, cand);
        } catch (const NanDetected& e) {
            res.status = RunStatus::Aborted;
            res.message = e.what();
            break;
        }
        if (corr > kRenormLimit) {
            if (!cfg.adaptive_dt) {
                res.status = RunStatus::Aborted;
                res.message = "renormalization correction exceeded limit at fixed step size";
                break;
            }
            ++res.traj.rejected_steps;
            accepted_streak = 0;
            dt_cur *= 0.5;
            if (dt_cur < kDtFloor) {
                res.status = RunStatus::Aborted;
                res.message = "step size collapsed below floor";
                break;
            }
            continue;
        }

        if (cfg.companion_flows) stepper.advance_companions(V1, g1, dt_eff);
        std::swap(cur, cand);
        res.traj.accepted_dt.push_back(dt_eff);
        ++step_idx;
        ++accepted_streak;
        if (cfg.adaptive_dt && accepted_streak >= 10 && dt_cur < cfg.dt_max) {
            dt_cur = std::min(dt_cur * 1.2, cfg.dt_max);
            accepted_streak = 0;
        }

        const bool at_end = cur.t >= cfg.t_end - 1e-12;
        if (step_idx % cfg.output_cadence == 0 || at_end) {
            if (!record_now(cur)) break;
        }
    }

    // Energy-identity residual by centered differencing across records;
    // one-sided at the ends.
    auto& recs = res.traj.records;
    const std::size_t k = recs.size();
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t lo = (i == 0) ? 0 : i - 1;
        const std::size_t hi = (i + 1 == k) ? i : i + 1;
        if (lo == hi) continue;
        recs[i].diag.residual =
            energy_identity_residual(recs[lo].diag.E, recs[hi].diag.E,
                                     recs[hi].diag.t - recs[lo].diag.t, recs[i].diag.dissipation,
                                     recs[i].diag.forcing);
    }

    res.final_state = cur;
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return res;
}

std::vector<RescaledSample> to_self_similar_frame(const Trajectory& traj, const ModelParams& p) {
    std::vector<RescaledSample> out;
    out.reserve(traj.records.size());
    for (const TrajectoryRecord& rec : traj.records) {
        RescaledSample s;
        s.t = rec.t;
        s.lambda = similarity_lambda(rec.t, p);
        s.s = similarity_time(rec.t, p);
        s.sigma_over_lambda = rec.frame.sigma / s.lambda;
        const int n = rec.frame.rho_grid.n();
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i)
            f[i] = rec.frame.gamma[i] * rec.frame.gamma[i] + std::norm(rec.frame.z[i]);
        s.fit_residual = (rec.frame.sigma / s.lambda) * std::sqrt(integrate_radial(f, rec.frame.rho_grid));
        out.push_back(s);
    }
    return out;
}

} // namespace twistel
