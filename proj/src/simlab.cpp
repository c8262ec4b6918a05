#include "mindex/simlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mindex {

double error_cdf(ErrorFamily family, double z) {
    switch (family) {
        case ErrorFamily::cauchy:
            return 0.5 + std::atan(z) / 3.14159265358979323846;
        case ErrorFamily::chisq3: {
            if (z <= 0.0) return 0.0;
            // regularized lower incomplete gamma at half-integer shape:
            // P(3/2, z/2) = erf(sqrt(z/2)) - sqrt(2z/pi) exp(-z/2)
            const double s = std::sqrt(0.5 * z);
            return std::erf(s) - std::sqrt(2.0 * z / 3.14159265358979323846) * std::exp(-0.5 * z);
        }
        case ErrorFamily::normal:
            return 0.5 * std::erfc(-z / 1.4142135623730951);
        case ErrorFamily::logistic:
            return 1.0 / (1.0 + std::exp(-z));
    }
    throw UsageError("error_cdf: unknown family");
}

double sample_error(ErrorFamily family, Rng& rng) {
    switch (family) {
        case ErrorFamily::cauchy:
            return rng.cauchy();
        case ErrorFamily::chisq3:
            return rng.chisq(3);
        case ErrorFamily::normal:
            return rng.normal();
        case ErrorFamily::logistic:
            return rng.logistic();
    }
    throw UsageError("sample_error: unknown family");
}

std::string error_family_name(ErrorFamily family) {
    switch (family) {
        case ErrorFamily::cauchy:
            return "cauchy";
        case ErrorFamily::chisq3:
            return "chisq3";
        case ErrorFamily::normal:
            return "normal";
        case ErrorFamily::logistic:
            return "logistic";
    }
    return "?";
}

ErrorFamily parse_error_family(const std::string& name) {
    if (name == "cauchy") return ErrorFamily::cauchy;
    if (name == "chisq3") return ErrorFamily::chisq3;
    if (name == "normal") return ErrorFamily::normal;
    if (name == "logistic") return ErrorFamily::logistic;
    throw UsageError("unknown error family: " + name);
}

Vec DGPSpec::resolved_beta() const {
    if (!beta_star.empty()) {
        if (beta_star.size() != p) throw UsageError("dgp: beta_star length != p");
        return beta_star;
    }
    static const double pattern[] = {1.0, 1.0, 0.5, 2.0, 5.0, -0.5, -1.0, -2.0, -5.0};
    Vec beta(p, 0.0);
    for (std::size_t j = 0; j < p && j < 9; ++j) beta[j] = pattern[j];
    return beta;
}

void DGPSpec::validate() const {
    if (n < 2) throw UsageError("dgp: n >= 2 required");
    if (p < 1) throw UsageError("dgp: p >= 1 required");
    if (!beta_star.empty() && beta_star.size() != p)
        throw UsageError("dgp: beta_star length != p");
}

GeneratedData generate_dataset(const DGPSpec& spec) {
    spec.validate();
    GeneratedData out;
    out.beta_star = spec.resolved_beta();
    out.error_family = spec.error_family;
    Dataset& d = out.data;
    d.n = spec.n;
    d.p = spec.p;
    d.x0.resize(spec.n);
    d.x.resize(spec.n * spec.p);
    d.y.resize(spec.n);

    {
        Rng col(mix_seed(spec.seed, 1));
        for (std::size_t i = 0; i < spec.n; ++i) d.x0[i] = col.normal();
    }
    for (std::size_t j = 0; j < spec.p; ++j) {
        Rng col(mix_seed(spec.seed, 2 + j));
        if (j == 0) {
            for (std::size_t i = 0; i < spec.n; ++i) d.x[i * spec.p] = col.bernoulli_half();
        } else if (j == 1) {
            for (std::size_t i = 0; i < spec.n; ++i) d.x[i * spec.p + 1] = col.poisson(2.0);
        } else {
            for (std::size_t i = 0; i < spec.n; ++i)
                d.x[i * spec.p + j] = (col.chisq(1) - 1.0) / 1.4142135623730951;
        }
    }
    out.z_star = compute_index(d, out.beta_star).z;
    Rng shock(mix_seed(spec.seed, 0));
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double u = sample_error(spec.error_family, shock);
        d.y[i] = (out.z_star[i] - u > 0.0) ? 1 : 0;
    }
    return out;
}

EstimatorFn akmbgd_estimator(const GDConfig& gd, const CovarianceConfig& cov) {
    return [gd, cov](const GeneratedData& gen, std::uint64_t algo_seed) {
        ReplicationOutcome out;
        try {
            GDConfig cfg = gd;
            cfg.seed = algo_seed;
            const AveragedEstimate est = run_akmbgd(gen.data, cfg);
            const CovarianceEstimate ce = covariance(gen.data, est.beta_bar, cov);
            out.beta_hat = est.beta_bar;
            out.se = ce.se;
            out.identity_residual = ce.identity_residual;
            out.ok = true;
        } catch (const std::exception& e) {
            out.ok = false;
            out.error = e.what();
        }
        return out;
    };
}

MCReport run_monte_carlo(const DGPSpec& dgp, const GDConfig& gd, long R, int threads,
                         const EstimatorFn& estimator) {
    if (R < 1) throw UsageError("run_monte_carlo: R >= 1 required");
    dgp.validate();
    const auto t0 = std::chrono::steady_clock::now();

    MCReport rep;
    rep.p = dgp.p;
    rep.reps = R;
    rep.beta_star = dgp.resolved_beta();
    rep.estimates = Mat(static_cast<std::size_t>(R), dgp.p);
    rep.ses = Mat(static_cast<std::size_t>(R), dgp.p);
    rep.rep_ok.assign(static_cast<std::size_t>(R), 0);
    std::vector<std::string> errors(static_cast<std::size_t>(R));
    Vec residuals(static_cast<std::size_t>(R), 0.0);

    parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
        DGPSpec spec = dgp;
        spec.seed = mix_seed(dgp.seed, r);
        const GeneratedData gen = generate_dataset(spec);
        const ReplicationOutcome oc = estimator(gen, mix_seed(gd.seed, r));
        if (oc.ok && oc.beta_hat.size() == dgp.p) {
            rep.rep_ok[r] = 1;
            for (std::size_t j = 0; j < dgp.p; ++j) {
                rep.estimates(r, j) = oc.beta_hat[j];
                rep.ses(r, j) = oc.se.size() == dgp.p ? oc.se[j] : 0.0;
            }
            residuals[r] = oc.identity_residual;
        } else {
            errors[r] = oc.error.empty() ? "estimator failed" : oc.error;
        }
    });

    rep.bias.assign(dgp.p, 0.0);
    rep.rmse.assign(dgp.p, 0.0);
    rep.coverage.assign(dgp.p, 0.0);
    rep.coverage_defined.assign(dgp.p, 1);
    long ok_count = 0;
    for (long r = 0; r < R; ++r) {
        if (!rep.rep_ok[static_cast<std::size_t>(r)]) {
            rep.failures += 1;
            continue;
        }
        ++ok_count;
        rep.max_identity_residual =
            std::max(rep.max_identity_residual, residuals[static_cast<std::size_t>(r)]);
        for (std::size_t j = 0; j < dgp.p; ++j) {
            const double err = rep.estimates(static_cast<std::size_t>(r), j) - rep.beta_star[j];
            rep.bias[j] += err;
            rep.rmse[j] += err * err;
            const double se = rep.ses(static_cast<std::size_t>(r), j);
            if (se == 0.0) rep.coverage_defined[j] = 0;
            if (std::abs(err) <= 1.96 * se) rep.coverage[j] += 1.0;
        }
    }
    rep.partial = rep.failures > 0;
    if (ok_count > 0) {
        for (std::size_t j = 0; j < dgp.p; ++j) {
            rep.bias[j] = std::abs(rep.bias[j] / static_cast<double>(ok_count));
            rep.rmse[j] = std::sqrt(rep.rmse[j] / static_cast<double>(ok_count));
            rep.coverage[j] /= static_cast<double>(ok_count);
        }
    }
    rep.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

MCReport run_monte_carlo(const DGPSpec& dgp, const GDConfig& gd, long R, int threads) {
    CovarianceConfig cov;
    cov.kernel_order = gd.kernel_order;
    cov.bw = gd.bw;
    cov.trimming = gd.trimming;
    cov.use_fast_nw = gd.use_fast_nw;
    cov.threads = gd.threads;
    return run_monte_carlo(dgp, gd, R, threads, akmbgd_estimator(gd, cov));
}

std::string bench_algorithm_name(BenchAlgorithm alg) {
    switch (alg) {
        case BenchAlgorithm::bgd_known_g:
            return "bgd_known_g";
        case BenchAlgorithm::kbgd_naive:
            return "kbgd_naive";
        case BenchAlgorithm::kbgd_fast:
            return "kbgd_fast";
        case BenchAlgorithm::kmbgd_naive:
            return "kmbgd_naive";
        case BenchAlgorithm::kmbgd_fast:
            return "kmbgd_fast";
    }
    return "?";
}

BenchAlgorithm parse_bench_algorithm(const std::string& name) {
    if (name == "bgd_known_g") return BenchAlgorithm::bgd_known_g;
    if (name == "kbgd_naive") return BenchAlgorithm::kbgd_naive;
    if (name == "kbgd_fast") return BenchAlgorithm::kbgd_fast;
    if (name == "kmbgd_naive") return BenchAlgorithm::kmbgd_naive;
    if (name == "kmbgd_fast") return BenchAlgorithm::kmbgd_fast;
    throw UsageError("unknown benchmark algorithm: " + name);
}

std::vector<BenchTrace> run_bench(const DGPSpec& dgp,
                                  const std::vector<std::pair<BenchAlgorithm, GDConfig>>& configs,
                                  long iters) {
    if (iters < 0) throw UsageError("run_bench: iters >= 0 required");
    const GeneratedData gen = generate_dataset(dgp);
    const Vec start = logit_init(gen.data);
    const Vec& truth = gen.beta_star;

    auto rmse_vs_truth = [&](const Vec& beta) {
        double s = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) {
            const double d = beta[j] - truth[j];
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(beta.size()));
    };

    std::vector<BenchTrace> traces;
    traces.reserve(configs.size());
    for (const auto& [alg, gd] : configs) {
        BenchTrace trace;
        trace.algorithm = alg;
        trace.tag = bench_algorithm_name(alg);
        if (iters == 0) {
            traces.push_back(std::move(trace));
            continue;
        }

        GDConfig cfg = gd;
        cfg.use_fast_nw = (alg == BenchAlgorithm::kbgd_fast || alg == BenchAlgorithm::kmbgd_fast);
        // benchmarks stay serial for comparability
        cfg.threads = 1;

        IterationState state;
        state.beta = start;
        state.rng = Rng(mix_seed(cfg.seed, 0));

        try {
            EngineContext ctx = make_engine_context(gen.data, cfg);
            if ((alg == BenchAlgorithm::kmbgd_naive || alg == BenchAlgorithm::kmbgd_fast) &&
                cfg.floor.selection_mode == TruncationFloor::Selection::density_fraction)
                ctx.floor_value = resolve_floor(gen.data, start, cfg, ctx.kernel);

            const ErrorFamily fam = dgp.error_family;
            const LinkFn link = [fam](double zv) { return error_cdf(fam, zv); };
            for (long k = 0; k < iters; ++k) {
                switch (alg) {
                    case BenchAlgorithm::bgd_known_g:
                        bgd_step_known_g(state, gen.data, link, cfg.delta);
                        break;
                    case BenchAlgorithm::kbgd_naive:
                    case BenchAlgorithm::kbgd_fast:
                        kbgd_step(state, gen.data, ctx);
                        break;
                    case BenchAlgorithm::kmbgd_naive:
                    case BenchAlgorithm::kmbgd_fast:
                        kmbgd_step(state, gen.data, ctx);
                        break;
                }
                const double err = rmse_vs_truth(state.beta);
                trace.points.push_back({k + 1, state.cumulative_seconds, err,
                                        err > 0.0 ? std::log(1.0 / err)
                                                  : std::numeric_limits<double>::infinity()});
            }
        } catch (const DivergenceError&) {
            trace.diverged = true;
        }
        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace mindex
