#include <clocale>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rtrace/config.hpp"
#include "rtrace/errors.hpp"
#include "rtrace/report.hpp"
#include "rtrace/tracer.hpp"

namespace {

using namespace rtrace;

std::string cfmt(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.14e %+.14ei", z.real(), z.imag());
    return buf;
}

struct PotentialFlags {
    std::string kind = "gaussian";
    std::map<std::string, double> params;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--potential", kind,
                        "gaussian | square_well | morse | yukawa | lennard_jones | none")
            ->capture_default_str();
        for (const char* name : {"width", "a", "alpha", "r0", "mu", "sigma"})
            cmd->add_option_function<double>(
                std::string("--") + name,
                [this, name](double v) { params[name] = v; },
                std::string("shape parameter '") + name + "'");
    }
    RadialPotential build() const { return build_potential(kind, params); }
};

struct GridFlags {
    double r_end = 4.8;
    int n_points = 8192;
    void add_to(CLI::App* cmd) {
        cmd->add_option("--grid-end", r_end, "asymptotic boundary R")
            ->capture_default_str();
        cmd->add_option("--grid-points", n_points, "number of grid intervals")
            ->capture_default_str();
    }
    RadialGrid build() const { return RadialGrid{r_end, n_points}; }
};

int run_solve(const PotentialFlags& pot, const GridFlags& grid, int l, double lambda,
              const std::string& k_text) {
    const Complex k = parse_complex(k_text);
    const RadialSolver solver(pot.build(), grid.build(), l);
    const auto amp = solver.amplitudes(k, lambda);
    std::printf("A = %s\n", cfmt(amp.a).c_str());
    std::printf("B = %s\n", cfmt(amp.b).c_str());
    std::printf("S = %s\n", cfmt(amp.s).c_str());
    if (amp.f)
        std::printf("F = %s\n", cfmt(*amp.f).c_str());
    else
        std::printf("F = undefined (S = 1)\n");
    return 0;
}

int run_seeds(const PotentialFlags& pot, const GridFlags& grid, int l, double lambda,
              double lo, double hi) {
    StudyDefinition study;
    study.potential = pot.build();
    study.grid = grid.build();
    study.l = l;
    const auto seed = find_bound_state(study, lambda, lo, hi);
    std::printf("im_k = %.14e\n", seed.im_k);
    std::printf("residual = %.3e\n", seed.residual);
    if (seed.multiple_zeros)
        std::printf("warning: multiple zeros in bracket, kept the one closest to %g\n",
                    hi);
    return 0;
}

int run_trace(const std::string& config_path) {
    const StudyConfig cfg = parse_study_config_file(config_path);
    const StudyDefinition study = to_study(cfg);
    const StudyResult result = run_study(study);
    write_study_outputs(cfg.output_dir, cfg, result);
    std::printf("wrote %zu branch file(s) to %s\n", result.branches.size(),
                cfg.output_dir.c_str());
    for (const auto& f : result.failures)
        std::fprintf(stderr, "failed seed: %s\n", f.c_str());
    return 0;
}

int run_plot(const std::string& study_dir, const std::string& out_dir) {
    write_plot_data(study_dir, out_dir.empty() ? study_dir : out_dir);
    std::printf("plot data written to %s\n",
                (out_dir.empty() ? study_dir : out_dir).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"S-matrix pole trajectory tracer (pseudo-arclength continuation "
                 "of a regularized Jost-like function)"};
    app.require_subcommand(1);

    PotentialFlags solve_pot, seeds_pot;
    GridFlags solve_grid, seeds_grid;
    int solve_l = 0, seeds_l = 0;
    double solve_lambda = 0.0, seeds_lambda = 0.0;
    std::string solve_k;
    double seeds_lo = 0.05, seeds_hi = 3.0;
    std::string trace_config, plot_dir, plot_out;

    auto* solve = app.add_subcommand("solve",
                                     "solve one (k, lambda) point and print "
                                     "A, B, S and the regularized F");
    solve_pot.add_to(solve);
    solve_grid.add_to(solve);
    solve->add_option("--l", solve_l, "angular momentum")->capture_default_str();
    solve->add_option("--lambda", solve_lambda, "potential strength")->required();
    solve->add_option("--k", solve_k, "complex momentum, e.g. 0.5 or 0+0.93i")
        ->required();

    auto* seeds = app.add_subcommand("seeds",
                                     "search a bound-state pole on the positive "
                                     "imaginary k-axis");
    seeds_pot.add_to(seeds);
    seeds_grid.add_to(seeds);
    seeds->add_option("--l", seeds_l, "angular momentum")->capture_default_str();
    seeds->add_option("--lambda", seeds_lambda, "potential strength")->required();
    seeds->add_option("--bracket-lo", seeds_lo, "Im k bracket, lower end")
        ->capture_default_str();
    seeds->add_option("--bracket-hi", seeds_hi, "Im k bracket, upper end")
        ->capture_default_str();

    auto* trace = app.add_subcommand("trace", "run a configured study and write "
                                              "trajectory/event files");
    trace->add_option("config", trace_config, "study configuration file")->required();

    auto* plot = app.add_subcommand("plot", "emit gnuplot data for a traced study");
    plot->add_option("study_dir", plot_dir, "directory written by 'trace'")->required();
    plot->add_option("--out", plot_out, "output directory (default: study_dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed())
            return run_solve(solve_pot, solve_grid, solve_l, solve_lambda, solve_k);
        if (seeds->parsed())
            return run_seeds(seeds_pot, seeds_grid, seeds_l, seeds_lambda, seeds_lo,
                             seeds_hi);
        if (trace->parsed()) return run_trace(trace_config);
        if (plot->parsed()) return run_plot(plot_dir, plot_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 2;
}
