#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haartv/runner.hpp"

namespace {

using haartv::cli::RunConfig;

void add_grid_options(CLI::App* sub, RunConfig& cfg, bool with_n, bool with_pq) {
    if (with_n) sub->add_option("--n", cfg.n_values, "ambient dimension(s)")->delimiter(',');
    if (with_pq) {
        sub->add_option("--p", cfg.p_values, "block rows")->delimiter(',');
        sub->add_option("--q", cfg.q_values, "block columns")->delimiter(',');
    }
}

void add_mc_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    sub->add_option("--seed", cfg.seed, "RNG seed");
}

CLI::App* make_sub(CLI::App& app, const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help");  // frees -h / --h for the trace power
    return sub;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--workers", cfg.workers, "worker threads (0 = auto)");
    sub->add_option("--output-dir", cfg.output_dir,
                    "output directory (default $HAARTV_OUTPUT_DIR or .)");
    sub->add_flag("--plot", cfg.plot, "also write plot.svg");
    std::string ignored;
    sub->add_option("--config", ignored, "JSON config or manifest to load defaults from");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // --config is applied before flag parsing so explicit flags win.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = haartv::cli::config_from_json_file(argv[i + 1]);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "haartv: %s\n", e.what());
                return 1;
            }
        }
    }

    CLI::App app{"haartv: total-variation laboratory for Haar-orthogonal blocks"};
    app.require_subcommand(1);

    auto* tv = make_sub(app, "tv", "Monte Carlo TV estimate E|K_n L_n - 1|");
    add_grid_options(tv, cfg, true, true);
    add_mc_options(tv, cfg);
    add_common_options(tv, cfg);

    auto* sweep = make_sub(app, "sweep", "TV estimates over an (n, p, q) grid");
    add_grid_options(sweep, cfg, true, true);
    add_mc_options(sweep, cfg);
    sweep->add_flag("--phi-ref", cfg.phi_ref, "fill the phi_reference column");
    sweep->add_option("--phi-x", cfg.phi_x, "x for the phi reference");
    sweep->add_option("--phi-y", cfg.phi_y, "y for the phi reference");
    add_common_options(sweep, cfg);

    auto* moments = make_sub(app, "moments", "exact vs leading-order E[tr(X^T X)^h]");
    add_grid_options(moments, cfg, false, true);
    moments->add_option("--h", cfg.h, "trace power");
    moments->add_option("--budget", cfg.budget, "oracle tuple budget");
    add_common_options(moments, cfg);

    auto* cov = make_sub(app, "cov", "exact vs formula trace covariances");
    add_grid_options(cov, cfg, false, true);
    cov->add_option("--h", cfg.h, "first trace power");
    cov->add_option("--k", cfg.k, "second trace power");
    cov->add_option("--budget", cfg.budget, "oracle tuple-pair budget");
    add_common_options(cov, cfg);

    auto* ballot = make_sub(app, "ballot", "ballot-pair enumeration vs Narayana numbers");
    ballot->add_option("--h", cfg.h, "number of down-edge slots");
    add_common_options(ballot, cfg);

    auto* phi = make_sub(app, "phi", "sharp-threshold profile phi(x, y)");
    phi->add_option("--x", cfg.x, "x");
    phi->add_option("--y", cfg.y, "y");
    add_common_options(phi, cfg);

    auto* dfb = make_sub(app, "df-bound", "Diaconis-Freedman bound 2(k+3)/(n-k-3)");
    add_grid_options(dfb, cfg, true, false);
    dfb->add_option("--k", cfg.k, "number of coordinates");
    add_common_options(dfb, cfg);

    auto* kn = make_sub(app, "kn-check", "log K_n vs its finite expansion");
    add_grid_options(kn, cfg, true, true);
    add_common_options(kn, cfg);

    auto* cancel = make_sub(app, "cancel-check", "log K_n + sum E_j cancellation residual");
    add_grid_options(cancel, cfg, true, true);
    cancel->add_option("--budget", cfg.budget, "oracle tuple budget for moments");
    add_common_options(cancel, cfg);

    auto* eigmax = make_sub(app, "eigmax", "largest-eigenvalue diagnostic for X^T X");
    add_grid_options(eigmax, cfg, false, true);
    add_mc_options(eigmax, cfg);
    add_common_options(eigmax, cfg);

    auto* sphere = make_sub(app, "sphere", "KS distance of sqrt(n) X_1 to the normal");
    add_grid_options(sphere, cfg, true, false);
    add_mc_options(sphere, cfg);
    add_common_options(sphere, cfg);

    CLI11_PARSE(app, argc, argv);

    for (const CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

    try {
        const haartv::cli::RunRecord record = haartv::cli::run(cfg);
        const std::string dir = haartv::cli::resolve_output_dir(cfg);
        haartv::cli::write_outputs(record, dir);
        if (cfg.command == "tv" || cfg.command == "sweep") {
            for (const auto& row : record.rows) {
                const double mean = std::atof(row[5].c_str());
                const double se = std::atof(row[6].c_str());
                std::printf("n=%s p=%s q=%s tv=%.6g 95%% [%.6g, %.6g]\n", row[0].c_str(),
                            row[1].c_str(), row[2].c_str(), mean, mean - 1.96 * se,
                            mean + 1.96 * se);
            }
        }
        std::printf("wrote %zu row(s) to %s\n", record.rows.size(), dir.c_str());
        if (!record.ok) {
            std::fprintf(stderr, "haartv: completed with error rows (see results.csv)\n");
            return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "haartv: %s\n", e.what());
        return 1;
    }
    return 0;
}
