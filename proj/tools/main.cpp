#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twistel/errors.hpp"
#include "twistel/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"axisymmetric twisted director-fluid simulator"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir = "out";
    std::vector<std::string> overrides;
    CLI::App* run = app.add_subcommand("run", "run one simulation");
    run->add_option("--config", cfg_path, "key = value configuration file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--set", overrides, "override a configuration key, key=value");

    std::string sweep_path, sweep_out = "sweep_out";
    int threads = 0;
    CLI::App* sw = app.add_subcommand("sweep", "cross-product parameter sweep");
    sw->add_option("--config", sweep_path, "sweep description file")->required();
    sw->add_option("--out", sweep_out, "output directory");
    sw->add_option("--threads", threads, "worker thread count (0 = hardware)");

    std::string csv_path, column = "x_norm_z";
    double t_lo = 0.0, t_hi = 0.0;
    CLI::App* ft = app.add_subcommand("fit", "exponential-rate fit of a timeseries column");
    ft->add_option("--csv", csv_path, "timeseries.csv path")->required();
    ft->add_option("--column", column, "column to fit");
    ft->add_option("--t-lo", t_lo, "window start");
    ft->add_option("--t-hi", t_hi, "window end (<= start means full range)");

    bool full = false;
    CLI::App* vf = app.add_subcommand("verify", "built-in consistency checks");
    vf->add_flag("--full", full, "include short simulation-based checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            twistel::RunRequest req = twistel::parse_config_file(cfg_path);
            for (const std::string& s : overrides) twistel::apply_config_line(req, s);
            return twistel::execute_run(req, out_dir);
        }
        if (sw->parsed()) {
            twistel::SweepSpec spec = twistel::parse_sweep_file(sweep_path);
            if (threads > 0) spec.threads = threads;
            return twistel::execute_sweep(spec, sweep_out);
        }
        if (ft->parsed()) return twistel::execute_fit(csv_path, column, t_lo, t_hi);
        if (vf->parsed()) return twistel::execute_verify(full) == 0 ? 0 : 1;
    } catch (const twistel::NoConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
