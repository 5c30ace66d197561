#include "twistel/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "twistel/errors.hpp"
#include "twistel/gauge.hpp"

namespace twistel {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for key '" + key + "': " + v);
    }
    if (pos != v.size()) throw ConfigError("trailing characters for key '" + key + "': " + v);
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long x = 0;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for key '" + key + "': " + v);
    }
    if (pos != v.size()) throw ConfigError("trailing characters for key '" + key + "': " + v);
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean for key '" + key + "': " + v);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string fmt(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string fmt_short(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%g", v);
    return b;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const char* status_name(RunStatus st) {
    switch (st) {
        case RunStatus::Completed:
        case RunStatus::EarlyStop: return "completed";
        case RunStatus::Breakdown: return "breakdown";
        case RunStatus::Aborted: return "aborted";
    }
    return "aborted";
}

int status_exit_code(RunStatus st) {
    switch (st) {
        case RunStatus::Completed:
        case RunStatus::EarlyStop: return 0;
        case RunStatus::Breakdown: return 2;
        case RunStatus::Aborted: return 1;
    }
    return 1;
}

} // namespace

std::string apply_config_line(RunRequest& req, const std::string& raw) {
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) return "";
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got: " + raw);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key in line: " + raw);

    RunConfig& c = req.cfg;
    if (key == "m")
        c.params.m = parse_int(key, val);
    else if (key == "mu")
        c.params.mu = parse_double(key, val);
    else if (key == "omega")
        c.params.omega = parse_double(key, val);
    else if (key == "r0")
        c.params.r0 = parse_double(key, val);
    else if (key == "mode") {
        if (val == "coupled")
            c.mode = RunMode::Coupled;
        else if (val == "heat-flow")
            c.mode = RunMode::HeatFlow;
        else
            throw ConfigError("mode must be 'coupled' or 'heat-flow', got: " + val);
    } else if (key == "sigma_in")
        c.sigma_in = parse_double(key, val);
    else if (key == "theta_in")
        c.theta_in = parse_double(key, val);
    else if (key == "r_max")
        c.r_max = parse_double(key, val);
    else if (key == "n")
        c.n = parse_int(key, val);
    else if (key == "grading") {
        if (val == "uniform")
            c.grading = GridKind::Uniform;
        else if (val == "geometric")
            c.grading = GridKind::Geometric;
        else
            throw ConfigError("grading must be 'uniform' or 'geometric', got: " + val);
    } else if (key == "grading_beta")
        c.grading_beta = parse_double(key, val);
    else if (key == "dt")
        c.dt = parse_double(key, val);
    else if (key == "adaptive_dt")
        c.adaptive_dt = parse_bool(key, val);
    else if (key == "dt_max")
        c.dt_max = parse_double(key, val);
    else if (key == "t_end")
        c.t_end = parse_double(key, val);
    else if (key == "output_cadence")
        c.output_cadence = parse_int(key, val);
    else if (key == "companion_flows")
        c.companion_flows = parse_bool(key, val);
    else if (key == "perturb_kind")
        c.perturb_kind = val;
    else if (key == "perturb_amplitude")
        c.perturb_amplitude = parse_double(key, val);
    else if (key == "vin_l2")
        c.vin_l2 = parse_double(key, val);
    else if (key == "vin_width")
        c.vin_width = parse_double(key, val);
    else if (key == "wstar_l2")
        c.wstar_l2 = parse_double(key, val);
    else if (key == "wstar_width")
        c.wstar_width = parse_double(key, val);
    else if (key == "epsilon")
        c.epsilon = parse_double(key, val);
    else if (key == "epsilon_star")
        c.epsilon_star = parse_double(key, val);
    else if (key == "min_sigma_cells")
        c.min_sigma_cells = parse_int(key, val);
    else if (key == "snapshot_times")
        req.snapshot_times = parse_double_list(key, val);
    else
        throw ConfigError("unknown configuration key: " + key);
    return key;
}

RunRequest parse_config_text(const std::string& text) {
    RunRequest req;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const std::string key = apply_config_line(req, line);
        if (!key.empty()) seen.insert(key);
    }
    if (!seen.count("m")) throw ConfigError("missing required key: m");
    if (!seen.count("mu")) throw ConfigError("missing required key: mu");
    return req;
}

RunRequest parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& c) {
    std::ostringstream os;
    os << "m = " << c.params.m << "\n";
    os << "mu = " << fmt(c.params.mu) << "\n";
    os << "omega = " << fmt(c.params.omega) << "\n";
    os << "r0 = " << fmt(c.params.r0) << "\n";
    os << "mode = " << (c.mode == RunMode::Coupled ? "coupled" : "heat-flow") << "\n";
    os << "sigma_in = " << fmt(c.sigma_in) << "\n";
    os << "theta_in = " << fmt(c.theta_in) << "\n";
    os << "r_max = " << fmt(c.r_max) << "\n";
    os << "n = " << c.n << "\n";
    os << "grading = " << (c.grading == GridKind::Uniform ? "uniform" : "geometric") << "\n";
    os << "grading_beta = " << fmt(c.grading_beta) << "\n";
    os << "dt = " << fmt(c.dt) << "\n";
    os << "adaptive_dt = " << (c.adaptive_dt ? 1 : 0) << "\n";
    os << "dt_max = " << fmt(c.dt_max) << "\n";
    os << "t_end = " << fmt(c.t_end) << "\n";
    os << "output_cadence = " << c.output_cadence << "\n";
    os << "companion_flows = " << (c.companion_flows ? 1 : 0) << "\n";
    os << "perturb_kind = " << c.perturb_kind << "\n";
    os << "perturb_amplitude = " << fmt(c.perturb_amplitude) << "\n";
    os << "vin_l2 = " << fmt(c.vin_l2) << "\n";
    os << "vin_width = " << fmt(c.vin_width) << "\n";
    os << "wstar_l2 = " << fmt(c.wstar_l2) << "\n";
    os << "wstar_width = " << fmt(c.wstar_width) << "\n";
    os << "epsilon = " << fmt(c.epsilon) << "\n";
    os << "epsilon_star = " << fmt(c.epsilon_star) << "\n";
    os << "min_sigma_cells = " << c.min_sigma_cells << "\n";
    return os.str();
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a(config_to_text(c)); }

void write_timeseries(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,sigma,theta,x_norm_z,E,Estar,dissipation,forcing,residual,V_L2,V2_L2,"
           "Wstar_over_r_L2,l2_z,v_L2,V1_sup,Wstar1_over_r2_sup,Wstar2_over_r_L2,weighted_z,"
           "a1_ok,a2_ok,sigma_cells\n";
    for (const TrajectoryRecord& rec : traj.records) {
        const DiagnosticsRecord& d = rec.diag;
        out << fmt(d.t) << ',' << fmt(d.sigma) << ',' << fmt(d.theta) << ',' << fmt(d.x_norm_z)
            << ',' << fmt(d.E) << ',' << fmt(d.Estar) << ',' << fmt(d.dissipation) << ','
            << fmt(d.forcing) << ',' << fmt(d.residual) << ',' << fmt(d.V_l2) << ','
            << fmt(d.V2_l2) << ',' << fmt(d.wstar_over_r_l2) << ',' << fmt(d.l2_z) << ','
            << fmt(d.v_l2) << ',' << fmt(d.V1_sup) << ',' << fmt(d.wstar1_over_r2_sup) << ','
            << fmt(d.wstar2_over_r_l2) << ',' << fmt(d.weighted_z) << ',' << (d.a1_ok ? 1 : 0)
            << ',' << (d.a2_ok ? 1 : 0) << ',' << fmt(d.sigma_cells) << '\n';
    }
}

void write_profile(const TrajectoryRecord& rec, const RadialGrid& g, const ModelParams& p,
                   const std::string& path) {
    EquivariantState s;
    s.t = rec.t;
    s.phi = synthesize_director(rec.frame, g, p.m);
    s.W = rec.W;
    s.V = rec.V;
    const GaugeFields gf = compute_gauge(s, g, p);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "r,phi1,phi2,phi3,W,V,q_re,q_im,v_re,v_im\n";
    for (int i = 0; i < g.n(); ++i) {
        out << fmt(g.r[i]) << ',' << fmt(s.phi[i][0]) << ',' << fmt(s.phi[i][1]) << ','
            << fmt(s.phi[i][2]) << ',' << fmt(s.W[i]) << ',' << fmt(s.V[i]) << ','
            << fmt(gf.q[i].real()) << ',' << fmt(gf.q[i].imag()) << ',' << fmt(gf.v[i].real())
            << ',' << fmt(gf.v[i].imag()) << '\n';
    }
}

namespace {

struct RunOutputs {
    int code = 1;
    RunStatus status = RunStatus::Aborted;
    double predicted_rate = 0.0;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
};

RunOutputs do_run(const RunRequest& req, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    const RunResult res = run_simulation(req.cfg);
    const RunConfig& cfg = res.config;
    const ModelParams& p = cfg.params;

    write_timeseries(res.traj, out_dir + "/timeseries.csv");

    // Snapshots: initial and final records plus the nearest record to each
    // requested time.
    std::set<std::size_t> snap_idx;
    const std::size_t nr = res.traj.records.size();
    std::vector<std::string> files{"timeseries.csv", "manifest.txt", "summary.txt"};
    if (nr > 0) {
        snap_idx.insert(0);
        snap_idx.insert(nr - 1);
        for (double tq : req.snapshot_times) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < nr; ++i) {
                const double d = std::abs(res.traj.records[i].t - tq);
                if (d < bd) {
                    bd = d;
                    best = i;
                }
            }
            snap_idx.insert(best);
        }
        for (std::size_t i : snap_idx) {
            const std::string name =
                "profile_t" + std::string(fmt_short(res.traj.records[i].t)) + ".csv";
            write_profile(res.traj.records[i], res.grid, p, out_dir + "/" + name);
            files.push_back(name);
        }
    }

    // Scale-rate fit over the trailing two thirds of the realized time span.
    RunOutputs out;
    const double mm = static_cast<double>(p.m) * static_cast<double>(p.m);
    out.predicted_rate = -p.mu * p.mu / mm;
    double max_x = 0.0, max_dev = 0.0, t_last = 0.0;
    bool a1_all = true, a2_all = true;
    {
        std::vector<double> ts, sg;
        for (const TrajectoryRecord& rec : res.traj.records) {
            ts.push_back(rec.t);
            sg.push_back(rec.diag.sigma);
            max_x = std::max(max_x, rec.diag.x_norm_z);
            const double ref = cfg.sigma_in * std::exp(-p.mu * p.mu * rec.t / mm);
            max_dev = std::max(max_dev, std::abs(rec.diag.sigma / ref - 1.0));
            a1_all = a1_all && rec.diag.a1_ok;
            a2_all = a2_all && rec.diag.a2_ok;
            t_last = rec.t;
        }
        try {
            const FitResult fr = fit_exponential_rate(ts, sg, t_last / 3.0, t_last);
            out.fitted_rate = fr.rate;
        } catch (const std::exception&) {
            // Too few records or a failed run; the rate stays NaN.
        }
    }

    {
        std::ofstream man(out_dir + "/manifest.txt");
        if (!man) throw std::runtime_error("cannot write manifest");
        man << "status = " << status_name(res.status) << "\n";
        man << "early_stop = " << (res.status == RunStatus::EarlyStop ? 1 : 0) << "\n";
        man << "message = " << res.message << "\n";
        char hx[32];
        std::snprintf(hx, sizeof hx, "%016llx",
                      static_cast<unsigned long long>(config_hash(cfg)));
        man << "config_hash = " << hx << "\n";
        man << "records = " << res.traj.records.size() << "\n";
        man << "accepted_steps = " << res.traj.accepted_dt.size() << "\n";
        man << "rejected_steps = " << res.traj.rejected_steps << "\n";
        man << "wall_seconds = " << fmt(res.wall_seconds) << "\n";
        man << "grid_n = " << res.grid.n() << "\n";
        man << "grid_r_max = " << fmt(res.grid.r_max) << "\n";
        man << "grid_beta = " << fmt(res.grid.beta) << "\n";
        for (const std::string& f : files) man << "file = " << f << "\n";
        man << "# config\n" << config_to_text(cfg);
    }

    {
        std::ofstream sum(out_dir + "/summary.txt");
        if (!sum) throw std::runtime_error("cannot write summary");
        sum << "status = " << status_name(res.status) << "\n";
        sum << "early_stop = " << (res.status == RunStatus::EarlyStop ? 1 : 0) << "\n";
        sum << "final_t = " << fmt(t_last) << "\n";
        if (!res.traj.records.empty()) {
            const DiagnosticsRecord& d = res.traj.records.back().diag;
            sum << "final_sigma = " << fmt(d.sigma) << "\n";
            sum << "final_theta = " << fmt(d.theta) << "\n";
            sum << "final_x_norm_z = " << fmt(d.x_norm_z) << "\n";
            sum << "final_E = " << fmt(d.E) << "\n";
            sum << "final_weighted_z = " << fmt(d.weighted_z) << "\n";
        }
        sum << "records = " << res.traj.records.size() << "\n";
        sum << "scale_rate_predicted = " << fmt(out.predicted_rate) << "\n";
        sum << "scale_rate_fitted = " << fmt(out.fitted_rate) << "\n";
        const double rel = std::abs(out.fitted_rate - out.predicted_rate) /
                           std::abs(out.predicted_rate);
        sum << "scale_rate_rel_err = " << fmt(rel) << "\n";
        sum << "max_x_norm_z = " << fmt(max_x) << "\n";
        sum << "max_scale_deviation = " << fmt(max_dev) << "\n";
        sum << "a1_all = " << (a1_all ? 1 : 0) << "\n";
        sum << "a2_all = " << (a2_all ? 1 : 0) << "\n";
    }

    out.status = res.status;
    out.code = status_exit_code(res.status);
    return out;
}

} // namespace

int execute_run(const RunRequest& req, const std::string& out_dir) {
    try {
        const RunOutputs out = do_run(req, out_dir);
        std::printf("status: %s\n", status_name(out.status));
        return out.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

SweepSpec parse_sweep_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file: " + path);
    SweepSpec spec;
    std::string line;
    while (std::getline(in, line)) {
        std::string body = line;
        const std::size_t hash = body.find('#');
        if (hash != std::string::npos) body.erase(hash);
        body = trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value, got: " + line);
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (key == "m_list") {
            for (double v : parse_double_list(key, val))
                spec.m_list.push_back(static_cast<int>(v));
        } else if (key == "mu_list")
            spec.mu_list = parse_double_list(key, val);
        else if (key == "omega_list")
            spec.omega_list = parse_double_list(key, val);
        else if (key == "sigma_list")
            spec.sigma_list = parse_double_list(key, val);
        else if (key == "amplitude_list")
            spec.amplitude_list = parse_double_list(key, val);
        else if (key == "threads")
            spec.threads = parse_int(key, val);
        else
            apply_config_line(spec.base, body);
    }
    auto sort_unique = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    if (spec.m_list.empty()) spec.m_list.push_back(spec.base.cfg.params.m);
    if (spec.mu_list.empty()) spec.mu_list.push_back(spec.base.cfg.params.mu);
    if (spec.omega_list.empty()) spec.omega_list.push_back(spec.base.cfg.params.omega);
    if (spec.sigma_list.empty()) spec.sigma_list.push_back(spec.base.cfg.sigma_in);
    if (spec.amplitude_list.empty())
        spec.amplitude_list.push_back(spec.base.cfg.perturb_amplitude);
    sort_unique(spec.m_list);
    sort_unique(spec.mu_list);
    sort_unique(spec.omega_list);
    sort_unique(spec.sigma_list);
    sort_unique(spec.amplitude_list);
    return spec;
}

int execute_sweep(const SweepSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    struct Job {
        int m;
        double mu, omega, sigma, amp;
        std::string dir;
        RunOutputs out;
    };
    std::vector<Job> jobs;
    for (int m : spec.m_list)
        for (double mu : spec.mu_list)
            for (double om : spec.omega_list)
                for (double sg : spec.sigma_list)
                    for (double am : spec.amplitude_list) {
                        Job j;
                        j.m = m;
                        j.mu = mu;
                        j.omega = om;
                        j.sigma = sg;
                        j.amp = am;
                        j.dir = out_dir + "/case_m" + std::to_string(m) + "_mu" + fmt_short(mu) +
                                "_om" + fmt_short(om) + "_sig" + fmt_short(sg) + "_amp" +
                                fmt_short(am);
                        jobs.push_back(j);
                    }

    int nthreads = spec.threads > 0 ? spec.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min<int>(nthreads, static_cast<int>(jobs.size()));

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::vector<std::string> errors;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            Job& j = jobs[i];
            RunRequest req = spec.base;
            req.cfg.params.m = j.m;
            req.cfg.params.mu = j.mu;
            req.cfg.params.omega = j.omega;
            req.cfg.sigma_in = j.sigma;
            req.cfg.perturb_amplitude = j.amp;
            if (j.amp > 0.0 && req.cfg.perturb_kind == "zero") req.cfg.perturb_kind = "bump";
            try {
                j.out = do_run(req, j.dir);
            } catch (const std::exception& e) {
                j.out.code = 1;
                std::lock_guard<std::mutex> lk(err_mu);
                errors.push_back(j.dir + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();

    std::ofstream rates(out_dir + "/rates.csv");
    if (!rates) throw std::runtime_error("cannot write rates.csv");
    rates << "m,mu,predicted_rate,fitted_rate,rel_err\n";
    int code = 0;
    for (const Job& j : jobs) {
        const double rel =
            std::abs(j.out.fitted_rate - j.out.predicted_rate) / std::abs(j.out.predicted_rate);
        rates << j.m << ',' << fmt(j.mu) << ',' << fmt(j.out.predicted_rate) << ','
              << fmt(j.out.fitted_rate) << ',' << fmt(rel) << '\n';
        code = std::max(code, j.out.code);
    }
    for (const std::string& e : errors) std::fprintf(stderr, "error: %s\n", e.c_str());
    return code;
}

int execute_fit(const std::string& csv_path, const std::string& column, double t_lo,
                double t_hi) {
    std::ifstream in(csv_path);
    if (!in) {
        std::fprintf(stderr, "error: cannot open %s\n", csv_path.c_str());
        return 1;
    }
    std::string header;
    if (!std::getline(in, header)) {
        std::fprintf(stderr, "error: empty file\n");
        return 1;
    }
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(trim(c));
    }
    int t_idx = -1, v_idx = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "t") t_idx = static_cast<int>(i);
        if (cols[i] == column) v_idx = static_cast<int>(i);
    }
    if (t_idx < 0 || v_idx < 0) {
        std::fprintf(stderr, "error: column '%s' not found\n", column.c_str());
        return 1;
    }
    std::vector<double> ts, vs;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int idx = 0;
        double tv = 0.0, vv = 0.0;
        while (std::getline(ss, cell, ',')) {
            if (idx == t_idx) tv = std::strtod(cell.c_str(), nullptr);
            if (idx == v_idx) vv = std::strtod(cell.c_str(), nullptr);
            ++idx;
        }
        ts.push_back(tv);
        vs.push_back(vv);
    }
    if (ts.empty()) {
        std::fprintf(stderr, "error: no data rows\n");
        return 1;
    }
    if (t_hi <= t_lo) {
        t_lo = ts.front();
        t_hi = ts.back();
    }
    try {
        const FitResult fr = fit_exponential_rate(ts, vs, t_lo, t_hi);
        std::printf("rate = %.17g\nr2 = %.17g\nsamples = %d\n", fr.rate, fr.r2, fr.samples);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

namespace {

struct CheckTable {
    int failures = 0;
    void row(const std::string& name, double observed, double tol, bool pass) {
        std::printf("%-46s %14.6g %12.6g %s\n", name.c_str(), observed, tol,
                    pass ? "PASS" : "FAIL");
        if (!pass) ++failures;
    }
};

} // namespace

int execute_verify(bool full) {
    std::printf("%-46s %14s %12s %s\n", "check", "observed", "tolerance", "status");
    CheckTable tab;

    {
        const double h1 = profile_h1(2.0, 3);
        const double h3 = profile_h3(2.0, 3);
        const double err = std::abs(h1 - 16.0 / 65.0) + std::abs(h3 - 63.0 / 65.0);
        tab.row("profile closed form at rho=2 (m=3)", err, 1e-14, err < 1e-14);
    }
    {
        double err = 0.0;
        for (double rho = 0.0; rho <= 40.0; rho += 0.37) {
            const double h1 = profile_h1(rho, 3);
            const double h3 = profile_h3(rho, 3);
            err = std::max(err, std::abs(h1 * h1 + h3 * h3 - 1.0));
        }
        tab.row("profile unit length", err, 1e-13, err < 1e-13);
    }
    {
        const RadialGrid g = make_grid(60.0, 1024, GridKind::Geometric);
        std::vector<double> f(g.n());
        for (int i = 0; i < g.n(); ++i) {
            const double h1 = profile_h1(g.r[i], 3);
            f[i] = h1 * h1;
        }
        const double got = integrate_radial(f, g);
        const double want = 2.0 * M_PI / (9.0 * std::sin(M_PI / 3.0));
        const double rel = std::abs(got - want) / want;
        tab.row("profile mass vs closed form", rel, 1e-5, rel < 1e-5);
    }
    {
        const double got = gamma_of_z(cplx(0.5, 0.0));
        const double err = std::abs(got - (std::sqrt(3.0) / 2.0 - 1.0));
        tab.row("unit-sphere height at |z|=1/2", err, 1e-15, err < 1e-15);
    }
    {
        // d_t W - d_rr W + r^{-1} d_r W for the vortex, finite differences.
        double err = 0.0;
        const double om = 0.7, r0 = 1.3;
        for (double r : {0.5, 1.0, 2.5, 6.0})
            for (double t : {0.0, 0.5, 2.0}) {
                const double e = 1e-5;
                const double dt = (oseen_w(r, t + e, om, r0) - oseen_w(r, t - e, om, r0)) /
                                  (2.0 * e);
                const double drr = (oseen_w(r + e, t, om, r0) - 2.0 * oseen_w(r, t, om, r0) +
                                    oseen_w(r - e, t, om, r0)) /
                                   (e * e);
                const double dr = (oseen_w(r + e, t, om, r0) - oseen_w(r - e, t, om, r0)) /
                                  (2.0 * e);
                err = std::max(err, std::abs(dt - drr + dr / r));
            }
        tab.row("vortex heat residual", err, 1e-4, err < 1e-4);
    }
    {
        const RadialGrid g = make_grid(25.0, 256, GridKind::Geometric);
        ModelParams p;
        p.m = 3;
        p.mu = 1.0;
        const std::vector<cplx> z(g.n(), cplx(0.0, 0.0));
        EquivariantState s = build_initial_data(g, p, 0.7, 0.4, z, std::vector<double>(g.n(), 0.0),
                                                std::vector<double>(g.n(), 0.0));
        const ModulationFrame fr = extract_modulation(s.phi, g, p.m, 0.6, 0.2);
        const double err = std::abs(fr.sigma - 0.7) + std::abs(fr.theta - 0.4);
        tab.row("scale/phase recovery", err, 1e-9, err < 1e-9);
    }

    if (full) {
        {
            RunConfig cfg;
            cfg.params.m = 3;
            cfg.params.mu = 1.0;
            cfg.params.omega = 0.0;
            cfg.mode = RunMode::HeatFlow;
            cfg.sigma_in = 0.5;
            cfg.n = 512;
            cfg.dt = 2.5e-4;
            cfg.dt_max = 2.5e-4;
            cfg.t_end = 3.0;
            cfg.output_cadence = 50;
            cfg.companion_flows = false;
            const RunResult res = run_simulation(cfg);
            std::vector<double> ts, sg;
            for (const TrajectoryRecord& rec : res.traj.records) {
                ts.push_back(rec.t);
                sg.push_back(rec.diag.sigma);
            }
            double rel = std::numeric_limits<double>::infinity();
            if (res.status == RunStatus::Completed && ts.size() >= 10) {
                const FitResult fr = fit_exponential_rate(ts, sg, 0.5, 3.0);
                rel = std::abs(fr.rate - (-1.0 / 9.0)) / (1.0 / 9.0);
            }
            tab.row("heat-flow scale rate", rel, 0.05, rel < 0.05);
        }
        {
            RunConfig cfg;
            cfg.params.m = 3;
            cfg.params.mu = 1.0;
            cfg.params.omega = 0.5;
            cfg.sigma_in = 0.5;
            cfg.n = 384;
            cfg.dt = 1e-3;
            cfg.dt_max = 1e-3;
            cfg.t_end = 1.0;
            cfg.output_cadence = 25;
            const RunResult res = run_simulation(cfg);
            double worst = std::numeric_limits<double>::infinity();
            if (res.status == RunStatus::Completed && res.traj.records.size() > 4) {
                worst = 0.0;
                for (std::size_t i = 1; i + 1 < res.traj.records.size(); ++i)
                    worst = std::max(worst, res.traj.records[i].diag.residual);
            }
            tab.row("energy balance residual", worst, 0.05, worst < 0.05);
        }
        {
            const RadialGrid rho = make_grid(25.0, 256, GridKind::Geometric);
            const CoercivityResult free = coercivity_spectrum(rho, 3, false);
            const CoercivityResult orth = coercivity_spectrum(rho, 3, true);
            tab.row("deformation quotient, unconstrained", free.min_quotient, 1e-5,
                    std::abs(free.min_quotient) < 1e-5);
            tab.row("deformation quotient, constrained", orth.min_quotient, 0.2,
                    orth.min_quotient > 0.2);
        }
    }

    std::printf("%d failure(s)\n", tab.failures);
    return tab.failures;
}

} // namespace twistel
