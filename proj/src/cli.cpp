#include "mindex/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "mindex/gd.hpp"
#include "mindex/inference.hpp"
#include "mindex/io.hpp"
#include "mindex/reports.hpp"
#include "mindex/simlab.hpp"

namespace mindex {

namespace {

namespace fs = std::filesystem;

struct GdFlags {
    std::size_t B = 0;  // 0: min(n, 3000)
    double delta = 1.0;
    long burn_in = 2000;
    long follow_T = 3000;
    long stop_window = 0;
    long stop_gap = 0;
    double rho = 0.001;
    int kernel_order = 6;
    double bw_exponent = -0.1;
    std::string trim = "none";
    double phi = 0.0;
    double trim_lo = 0.01;
    double trim_hi = 0.99;
    double c_f = 0.0;  // 0: density-fraction floor
    int threads = 1;
    std::uint64_t seed = 1;
    std::string out = ".";

    GDConfig to_config(std::size_t n) const {
        GDConfig cfg;
        cfg.B = B > 0 ? B : std::min<std::size_t>(n, 3000);
        cfg.delta = delta;
        cfg.burn_in = burn_in;
        cfg.follow_T = follow_T;
        if (stop_window > 0 || stop_gap > 0) {
            StopRule rule;
            rule.window_T = stop_window > 0 ? stop_window : 1;
            rule.gap = stop_gap > 0 ? stop_gap : 1;
            rule.rho = rho;
            cfg.stop = rule;
        }
        cfg.kernel_order = kernel_order;
        cfg.bw.exponent = bw_exponent;
        if (trim == "none") {
            cfg.trimming.mode = TrimmingSpec::Mode::none;
        } else if (trim == "box") {
            cfg.trimming.mode = TrimmingSpec::Mode::box;
            cfg.trimming.phi = phi;
        } else if (trim == "quantile") {
            cfg.trimming.mode = TrimmingSpec::Mode::quantile;
            cfg.trimming.lo = trim_lo;
            cfg.trimming.hi = trim_hi;
        } else {
            throw UsageError("unknown trim mode: " + trim);
        }
        if (c_f > 0.0) {
            cfg.floor.selection_mode = TruncationFloor::Selection::fixed;
            cfg.floor.c_f = c_f;
        }
        cfg.threads = threads;
        cfg.seed = seed;
        return cfg;
    }

    CovarianceConfig to_cov_config(const GDConfig& cfg) const {
        CovarianceConfig cov;
        cov.kernel_order = cfg.kernel_order;
        cov.bw = cfg.bw;
        cov.trimming = cfg.trimming;
        cov.use_fast_nw = cfg.use_fast_nw;
        cov.threads = cfg.threads;
        return cov;
    }
};

void add_gd_flags(CLI::App* cmd, GdFlags& g) {
    cmd->add_option("--B", g.B, "subsample size (0: min(n, 3000))");
    cmd->add_option("--delta", g.delta, "learning rate");
    cmd->add_option("--burn-in", g.burn_in, "burn-in iterations k*");
    cmd->add_option("--follow-T", g.follow_T, "follow-up iterations T averaged");
    cmd->add_option("--stop-window", g.stop_window, "stopping rule window (enables the rule)");
    cmd->add_option("--stop-gap", g.stop_gap, "stopping rule gap");
    cmd->add_option("--rho", g.rho, "stopping rule tolerance");
    cmd->add_option("--kernel-order", g.kernel_order, "kernel order (2, 4 or 6)");
    cmd->add_option("--bw-exponent", g.bw_exponent, "bandwidth exponent on n");
    cmd->add_option("--trim", g.trim, "trimming mode: none|box|quantile");
    cmd->add_option("--phi", g.phi, "box trimming phi");
    cmd->add_option("--trim-lo", g.trim_lo, "quantile trimming lower level");
    cmd->add_option("--trim-hi", g.trim_hi, "quantile trimming upper level");
    cmd->add_option("--c-f", g.c_f, "fixed truncation floor (0: density fraction rule)");
    cmd->add_option("--threads", g.threads, "worker threads");
    cmd->add_option("--seed", g.seed, "base seed")->envname("MINDEX_SEED");
    cmd->add_option("--out", g.out, "output directory");
    cmd->set_config("--config", "", "flat key = value config file");
    cmd->allow_config_extras(false);
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << content;
}

struct KernelCheckArgs {
    int order = 6;
    double tol = 1e-8;
    std::string out;
};

int cmd_kernel_check(const KernelCheckArgs& a) {
    const KernelSpec spec = make_kernel(a.order);
    const MomentReport rep = verify_moments(spec, a.tol);
    const std::string text = moment_report_json(rep);
    std::cout << text;
    if (!a.out.empty()) write_file(a.out, "moments.json", text);
    return 0;
}

struct SimulateArgs {
    std::size_t n = 25000;
    std::size_t p = 10;
    long reps = 100;
    std::string error = "normal";
    GdFlags gd;
};

int cmd_simulate(const SimulateArgs& a) {
    DGPSpec dgp;
    dgp.n = a.n;
    dgp.p = a.p;
    dgp.error_family = parse_error_family(a.error);
    dgp.seed = a.gd.seed;
    const GDConfig cfg = a.gd.to_config(a.n);
    const MCReport rep =
        run_monte_carlo(dgp, cfg, a.reps, a.gd.threads, akmbgd_estimator(cfg, a.gd.to_cov_config(cfg)));
    write_file(a.gd.out, "report.json", mc_report_json(rep, dgp));
    write_file(a.gd.out, "table.txt", mc_report_table(rep, dgp));
    std::cout << mc_report_table(rep, dgp);
    std::cout << "failures: " << rep.failures << "  wall seconds: " << rep.total_seconds << "\n";
    return 0;
}

struct BenchArgs {
    std::size_t n = 20000;
    std::size_t p = 10;
    long iters = 50;
    std::string error = "normal";
    std::vector<std::string> algs;
    GdFlags gd;
};

int cmd_bench(const BenchArgs& a) {
    DGPSpec dgp;
    dgp.n = a.n;
    dgp.p = a.p;
    dgp.error_family = parse_error_family(a.error);
    dgp.seed = a.gd.seed;
    std::vector<std::string> names = a.algs;
    if (names.empty())
        names = {"bgd_known_g", "kbgd_naive", "kbgd_fast", "kmbgd_naive", "kmbgd_fast"};
    std::vector<std::pair<BenchAlgorithm, GDConfig>> configs;
    configs.reserve(names.size());
    if (a.gd.threads != 1)
        std::cerr << "bench: --threads ignored, benchmarks run on one thread\n";
    for (const auto& name : names)
        configs.emplace_back(parse_bench_algorithm(name), a.gd.to_config(a.n));
    const auto traces = run_bench(dgp, configs, a.iters);
    write_file(a.gd.out, "bench.csv", bench_csv(traces));
    for (const auto& tr : traces)
        std::cout << tr.tag << ": " << tr.points.size() << " updates"
                  << (tr.diverged ? " (diverged)" : "")
                  << (tr.points.empty() ? 0.0 : tr.points.back().seconds) << "s total\n";
    return 0;
}

struct EstimateArgs {
    std::string data;
    std::string y_col;
    std::string x0_col;
    std::vector<std::string> x_cols;
    std::vector<std::string> standardize;
    std::vector<std::string> negate_standardize;
    std::size_t grid_points = 201;
    double ci_level = 0.95;
    GdFlags gd;
};

int cmd_estimate(const EstimateArgs& a) {
    CsvSchema schema;
    schema.y_column = a.y_col;
    schema.x0_column = a.x0_col;
    schema.covariate_columns = a.x_cols;
    schema.standardize = a.standardize;
    schema.negate_standardize = a.negate_standardize;
    const IngestResult ingest = ingest_csv(a.data, schema);
    std::cout << "ingested n=" << ingest.data.n << " p=" << ingest.data.p << " from " << a.data
              << "\n";
    for (const auto& tr : ingest.transforms)
        std::cout << "  " << (tr.negated ? "negate-standardize" : "standardize") << " "
                  << tr.column << " (mean " << tr.mean << ", std " << tr.std << ")\n";

    const GDConfig cfg = a.gd.to_config(ingest.data.n);
    const AveragedEstimate est = run_akmbgd(ingest.data, cfg);
    const CovarianceConfig cov_cfg = a.gd.to_cov_config(cfg);
    const CovarianceEstimate cov = covariance(ingest.data, est.beta_bar, cov_cfg);
    const auto ci = confidence_intervals(est.beta_bar, cov, a.ci_level);
    write_file(a.gd.out, "coefficients.json",
               estimate_json(ingest.covariate_names, est.beta_bar, cov, ci, a.ci_level));

    GridSpec grid;
    grid.points = a.grid_points;
    const CDFCurve curve = estimate_cdf_curve(ingest.data, est.beta_bar, grid, cov_cfg);
    write_file(a.gd.out, "cdf_curve.csv", cdf_curve_csv(curve));

    for (std::size_t j = 0; j < est.beta_bar.size(); ++j)
        std::cout << ingest.covariate_names[j] << ": " << est.beta_bar[j] << " (se " << cov.se[j]
                  << ", " << 100 * a.ci_level << "% CI [" << ci[j].lo << ", " << ci[j].hi << "])\n";
    std::cout << "iterations: " << est.iterations << (est.stopped_by_rule ? " (stopped by rule)" : "")
              << "  wall seconds: " << est.seconds << "\n";
    if (curve.dropped > 0)
        std::cout << "cdf curve: " << curve.dropped << " grid points dropped (zero denominator)\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Kernel-based stochastic learning of monotone index models"};
    app.require_subcommand(1);

    KernelCheckArgs kc;
    auto* kernel_check = app.add_subcommand("kernel-check", "verify kernel moment conditions");
    kernel_check->add_option("--order", kc.order, "kernel order (2, 4 or 6)");
    kernel_check->add_option("--tol", kc.tol, "moment tolerance");
    kernel_check->add_option("--out", kc.out, "output directory (optional)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo bias/RMSE/coverage study");
    simulate->add_option("--n", sim.n, "sample size");
    simulate->add_option("--p", sim.p, "number of free covariates");
    simulate->add_option("--reps", sim.reps, "replications");
    simulate->add_option("--error", sim.error, "error family: cauchy|chisq3|normal|logistic");
    add_gd_flags(simulate, sim.gd);

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "timing benchmark traces");
    bench_cmd->add_option("--n", bench.n, "sample size");
    bench_cmd->add_option("--p", bench.p, "number of free covariates");
    bench_cmd->add_option("--iters", bench.iters, "updates per algorithm");
    bench_cmd->add_option("--error", bench.error, "error family");
    bench_cmd->add_option("--algs", bench.algs,
                          "algorithms: bgd_known_g kbgd_naive kbgd_fast kmbgd_naive kmbgd_fast");
    add_gd_flags(bench_cmd, bench.gd);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "estimate a model from a CSV file");
    estimate->add_option("--data", est.data, "input CSV path")->required();
    estimate->add_option("--y-col", est.y_col, "outcome column")->required();
    estimate->add_option("--x0-col", est.x0_col, "normalized covariate column")->required();
    estimate->add_option("--x-cols", est.x_cols, "free covariate columns (default: all others)");
    estimate->add_option("--standardize", est.standardize, "columns to standardize");
    estimate->add_option("--negate-standardize", est.negate_standardize,
                         "columns to negate-standardize");
    estimate->add_option("--grid-points", est.grid_points, "CDF curve grid size");
    estimate->add_option("--ci-level", est.ci_level, "confidence level");
    add_gd_flags(estimate, est.gd);

    std::string out_dir = ".";
    try {
        app.parse(argc, argv);
        if (kernel_check->parsed()) {
            out_dir = kc.out.empty() ? "." : kc.out;
            return cmd_kernel_check(kc);
        }
        if (simulate->parsed()) {
            out_dir = sim.gd.out;
            return cmd_simulate(sim);
        }
        if (bench_cmd->parsed()) {
            out_dir = bench.gd.out;
            return cmd_bench(bench);
        }
        out_dir = est.gd.out;
        return cmd_estimate(est);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        const std::string report = error_report_json("numerical_failure", e.what());
        std::cerr << "numerical failure: " << e.what() << "\n";
        try {
            write_file(out_dir, "error.json", report);
        } catch (const std::exception&) {
            std::cout << report;
        }
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        try {
            write_file(out_dir, "error.json", error_report_json("internal", e.what()));
        } catch (const std::exception&) {
        }
        return 3;
    }
}

}  // namespace mindex
