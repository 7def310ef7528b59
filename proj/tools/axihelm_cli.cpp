// Batch driver: modal interior Neumann solves, eigenwavenumber searches,
// field-grid exports and convergence sweeps on surfaces of revolution.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "axihelm/experiments.hpp"

using namespace axihelm;

namespace {

void add_common(CLI::App* cmd, std::string& config_path, RunConfig& overrides,
                bool& have_npan, bool& have_mode) {
    cmd->add_option("-c,--config", config_path, "JSON config file");
    cmd->add_option("--n-pan", overrides.n_pan, "panels on the generating curve")
        ->each([&](const std::string&) { have_npan = true; });
    cmd->add_option("--mode", overrides.mode_n, "azimuthal index n")
        ->each([&](const std::string&) { have_mode = true; });
    cmd->add_option("--table", overrides.table_path, "CSV output path for tables");
    cmd->add_option("--grid", overrides.grid_path, "CSV output path for field grids");
}

RunConfig merged(const std::string& config_path, const RunConfig& overrides, bool have_npan,
                 bool have_mode, ExperimentKind kind) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.experiment = kind;
    if (have_npan) cfg.n_pan = overrides.n_pan;
    if (have_mode) cfg.mode_n = overrides.mode_n;
    if (!overrides.table_path.empty()) cfg.table_path = overrides.table_path;
    if (!overrides.grid_path.empty()) cfg.grid_path = overrides.grid_path;
    cfg.validate();
    return cfg;
}

void print_point_source(const PointSourceResult& r) {
    std::printf("%6s %8s %12s %13s %13s %13s\n", "n_pan", "points", "cond", "avg_err", "l2_u",
                "l2_tdu");
    for (const auto& run : r.runs)
        std::printf("%6d %8d %12.4g %13.5e %13.5e %13.5e\n", run.n_pan, run.n_points, run.cond,
                    run.avg_abs_error, run.l2_err_u, run.l2_err_tdu);
}

void print_eigen(const EigenExperimentResult& r) {
    std::printf("reference k = %.16g\n", r.k_reference);
    std::printf("%6s %18s %12s %12s %12s\n", "n_pan", "k", "cond", "err_k", "err_u");
    for (const auto& run : r.runs)
        std::printf("%6d %18.13f %12.4g %12.4e %12.4e\n", run.n_pan, run.k_star, run.cond,
                    run.err_k, run.err_u);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal Helmholtz Neumann solver for bodies of revolution"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig ov;
    bool have_npan = false, have_mode = false;

    auto* solve = app.add_subcommand("solve", "solve one modal problem with point-source data");
    add_common(solve, config_path, ov, have_npan, have_mode);

    auto* eig = app.add_subcommand("eigensearch", "locate a Neumann eigenwavenumber in a bracket");
    add_common(eig, config_path, ov, have_npan, have_mode);

    auto* field = app.add_subcommand("field", "solve and export the interior field grid");
    add_common(field, config_path, ov, have_npan, have_mode);

    auto* sweep = app.add_subcommand("sweep", "convergence sweep over panel counts");
    add_common(sweep, config_path, ov, have_npan, have_mode);

    auto* oracle = app.add_subcommand("oracle", "reference eigenwavenumbers for the unit sphere");
    int l = 1, m = 1;
    oracle->add_option("-l", l, "spherical harmonic degree");
    oracle->add_option("-m", m, "root index (1-based)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (oracle->parsed()) {
            std::printf("%.16g\n", sphere_bessel_reference(l, m));
            return 0;
        }
        if (solve->parsed()) {
            auto cfg = merged(config_path, ov, have_npan, have_mode, ExperimentKind::Solve);
            cfg.sweep.clear();
            print_point_source(run_point_source_experiment(cfg));
            return 0;
        }
        if (field->parsed()) {
            auto cfg = merged(config_path, ov, have_npan, have_mode, ExperimentKind::FieldGridKind);
            cfg.sweep.clear();
            if (cfg.grid_path.empty()) cfg.grid_path = "field_grid.csv";
            print_point_source(run_point_source_experiment(cfg));
            std::printf("grid written to %s\n", cfg.grid_path.c_str());
            return 0;
        }
        if (eig->parsed()) {
            auto cfg = merged(config_path, ov, have_npan, have_mode, ExperimentKind::EigenSearch);
            cfg.sweep.clear();
            print_eigen(run_eigen_experiment(cfg));
            return 0;
        }
        if (sweep->parsed()) {
            auto cfg = merged(config_path, ov, have_npan, have_mode,
                              ExperimentKind::ConvergenceSweep);
            if (cfg.bracket)
                print_eigen(run_eigen_experiment(cfg));
            else
                print_point_source(run_point_source_experiment(cfg));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
