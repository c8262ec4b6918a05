#include "mindex/gd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace mindex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// same accumulation order as compute_index
double index_at(const Dataset& data, std::size_t i, const Vec& beta) {
    const double* row = data.x.data() + i * data.p;
    double z = data.x0[i];
    for (std::size_t j = 0; j < data.p; ++j) z += row[j] * beta[j];
    return z;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_divergence(const Vec& beta, long k) {
    double s = 0.0;
    for (double b : beta) s += b * b;
    const double norm = std::sqrt(s);
    if (!std::isfinite(norm) || norm > 1e6)
        throw DivergenceError("gradient iteration diverged at k=" + std::to_string(k) +
                                  " with |beta|=" + std::to_string(norm),
                              k, norm);
}

}  // namespace

void StopRule::validate() const {
    if (window_T < 1) throw UsageError("stop rule: window_T >= 1 required");
    if (gap < 1) throw UsageError("stop rule: gap >= 1 required");
    if (!(rho > 0.0)) throw UsageError("stop rule: rho > 0 required");
}

void GDConfig::validate(std::size_t n) const {
    if (!(delta > 0.0)) throw UsageError("gd config: delta > 0 required");
    if (burn_in < 0) throw UsageError("gd config: burn_in >= 0 required");
    if (follow_T < 1) throw UsageError("gd config: follow_T >= 1 required");
    if (max_iters < 1) throw UsageError("gd config: max_iters >= 1 required");
    if (threads < 1) throw UsageError("gd config: threads >= 1 required");
    if (B < 1 || B > n) throw UsageError("gd config: need 1 <= B <= n");
    trimming.validate();
    bw.validate();
    floor.validate();
    if (stop) stop->validate();
}

EngineContext make_engine_context(const Dataset& data, const GDConfig& cfg) {
    EngineContext ctx;
    ctx.cfg = cfg;
    ctx.kernel = make_kernel(cfg.kernel_order);
    ctx.mask = trimming_mask(data, cfg.trimming);
    ctx.y.resize(data.n);
    for (std::size_t i = 0; i < data.n; ++i) ctx.y[i] = static_cast<double>(data.y[i]);
    if (cfg.floor.selection_mode == TruncationFloor::Selection::fixed)
        ctx.floor_value = cfg.floor.c_f;
    return ctx;
}

double resolve_floor(const Dataset& data, const Vec& beta_init, const GDConfig& cfg,
                     const KernelSpec& kernel) {
    const Vec z = compute_index(data, beta_init).z;
    const double h = bandwidth(cfg.bw, z, data.n);
    Vec dummy(data.n, 0.0);
    NWEvalConfig nwc{cfg.use_fast_nw ? NWPath::fast : NWPath::naive, cfg.threads};
    const auto comps = nw_components(z, z, dummy, h, kernel, nwc);
    Vec dens(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) dens[i] = comps[i].den;
    std::nth_element(dens.begin(), dens.begin() + dens.size() / 2, dens.end());
    const double median = dens[dens.size() / 2];
    if (!(median > 0.0))
        throw DegenerateDataError("truncation floor: median kernel density not positive");
    return cfg.floor.fraction * median;
}

LogitFit fit_logit(const Dataset& data) {
    data.validate();
    bool any0 = false, any1 = false;
    for (auto v : data.y) (v ? any1 : any0) = true;
    if (!any0 || !any1)
        throw InitializationError("logit: outcomes are all " + std::string(any1 ? "1" : "0"));

    const std::size_t n = data.n;
    const std::size_t q = data.p + 2;  // intercept, x0, free covariates
    auto design = [&](std::size_t i, std::size_t j) -> double {
        if (j == 0) return 1.0;
        if (j == 1) return data.x0[i];
        return data.xat(i, j - 2);
    };
    auto mean_loglik = [&](const Vec& w) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0.0;
            for (std::size_t j = 0; j < q; ++j) eta += design(i, j) * w[j];
            const double sp = eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
            ll += static_cast<double>(data.y[i]) * eta - sp;
        }
        return ll / static_cast<double>(n);
    };

    Vec w(q, 0.0);
    Vec grad(q);
    Mat hess(q, q);
    LogitFit fit;
    double gn = std::numeric_limits<double>::infinity();
    for (long it = 1; it <= 100; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hess.a.begin(), hess.a.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0.0;
            for (std::size_t j = 0; j < q; ++j) eta += design(i, j) * w[j];
            const double mu = 1.0 / (1.0 + std::exp(-eta));
            const double r = mu - static_cast<double>(data.y[i]);
            const double wgt = mu * (1.0 - mu);
            for (std::size_t j = 0; j < q; ++j) {
                const double vj = design(i, j);
                grad[j] += r * vj;
                for (std::size_t l = j; l < q; ++l) hess(j, l) += wgt * vj * design(i, l);
            }
        }
        for (std::size_t j = 0; j < q; ++j) {
            grad[j] /= static_cast<double>(n);
            for (std::size_t l = j; l < q; ++l) {
                hess(j, l) /= static_cast<double>(n);
                hess(l, j) = hess(j, l);
            }
        }
        gn = norm2(grad);
        fit.iterations = it;
        if (gn <= 1e-8) break;

        Vec step;
        try {
            step = solve(hess, grad);
        } catch (const SingularMatrixError&) {
            throw InitializationError(
                "logit: singular Hessian (separation or collinearity suspected); "
                "supply a manual start");
        }
        const double base = mean_loglik(w);
        double t = 1.0;
        Vec cand(q);
        for (;;) {
            for (std::size_t j = 0; j < q; ++j) cand[j] = w[j] - t * step[j];
            if (mean_loglik(cand) >= base || t < 1e-6) break;
            t *= 0.5;
        }
        w = cand;
        const double wn = norm2(w);
        if (!std::isfinite(wn) || wn > 1e4)
            throw InitializationError(
                "logit: coefficient norm diverged (perfect separation suspected); "
                "supply a manual start");
    }
    if (gn > 1e-8)
        throw InitializationError("logit: Newton did not reach gradient tolerance in 100 iterations");

    fit.coef = w;
    fit.grad_norm = gn;
    // covariance = inverse of the total information n * mean Hessian
    std::fill(hess.a.begin(), hess.a.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < q; ++j) eta += design(i, j) * w[j];
        const double mu = 1.0 / (1.0 + std::exp(-eta));
        const double wgt = mu * (1.0 - mu);
        for (std::size_t j = 0; j < q; ++j)
            for (std::size_t l = j; l < q; ++l) hess(j, l) += wgt * design(i, j) * design(i, l);
    }
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t l = j; l < q; ++l) hess(l, j) = hess(j, l);
    Mat eye(q, q);
    for (std::size_t j = 0; j < q; ++j) eye(j, j) = 1.0;
    fit.cov = lu_solve(lu_factor(hess), eye);
    return fit;
}

Vec logit_init(const Dataset& data) {
    const LogitFit fit = fit_logit(data);
    const double b0 = fit.coef[1];
    if (b0 <= 1e-8)
        throw NumericError(
            "logit_init: fitted x0 coefficient <= 1e-8; the normalized covariate must have a "
            "strictly positive coefficient");
    Vec beta(data.p);
    for (std::size_t j = 0; j < data.p; ++j) beta[j] = fit.coef[j + 2] / b0;
    return beta;
}

void bgd_step_known_g(IterationState& state, const Dataset& data, const LinkFn& G, double delta) {
    if (!(delta > 0.0)) throw UsageError("bgd: delta > 0 required");
    if (state.beta.size() != data.p) throw UsageError("bgd: beta length != p");
    const auto t0 = Clock::now();
    Vec grad(data.p, 0.0);
    for (std::size_t i = 0; i < data.n; ++i) {
        const double r = G(index_at(data, i, state.beta)) - static_cast<double>(data.y[i]);
        const double* row = data.x.data() + i * data.p;
        for (std::size_t j = 0; j < data.p; ++j) grad[j] += r * row[j];
    }
    const double scale = delta / static_cast<double>(data.n);
    for (std::size_t j = 0; j < data.p; ++j) state.beta[j] -= scale * grad[j];
    state.k += 1;
    check_divergence(state.beta, state.k);
    state.cumulative_seconds += seconds_since(t0);
}

Vec subsample_gradient(const Dataset& data, const std::vector<std::uint8_t>& mask,
                       const Vec& ghat, const std::vector<std::size_t>& idx) {
    if (ghat.size() != idx.size()) throw UsageError("subsample_gradient: ghat/idx length mismatch");
    if (idx.empty()) throw UsageError("subsample_gradient: empty index set");
    Vec grad(data.p, 0.0);
    for (std::size_t l = 0; l < idx.size(); ++l) {
        const std::size_t i = idx[l];
        if (!mask[i]) continue;  // X_i^phi = 0
        const double r = ghat[l] - static_cast<double>(data.y[i]);
        const double* row = data.x.data() + i * data.p;
        for (std::size_t j = 0; j < data.p; ++j) grad[j] += r * row[j];
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (std::size_t j = 0; j < data.p; ++j) grad[j] *= inv;
    return grad;
}

void kbgd_step(IterationState& state, const Dataset& data, const EngineContext& ctx) {
    if (state.beta.size() != data.p) throw UsageError("kbgd: beta length != p");
    const auto t0 = Clock::now();
    const Vec z = compute_index(data, state.beta).z;
    const double h = bandwidth(ctx.cfg.bw, z, data.n);
    const NWEvalConfig nwc{ctx.cfg.use_fast_nw ? NWPath::fast : NWPath::naive, ctx.cfg.threads};
    const NWResult ghat = nw_full(z, z, ctx.y, h, ctx.kernel, nwc);
    std::vector<std::size_t> identity(data.n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    const Vec grad = subsample_gradient(data, ctx.mask, ghat.value, identity);
    for (std::size_t j = 0; j < data.p; ++j) state.beta[j] -= ctx.cfg.delta * grad[j];
    state.k += 1;
    check_divergence(state.beta, state.k);
    state.cumulative_seconds += seconds_since(t0);
}

SubsampleDraw draw_subsample(IterationState& state, std::size_t n, std::size_t B) {
    if (B < 1 || B > n) throw UsageError("draw_subsample: need 1 <= B <= n");
    SubsampleDraw draw;
    draw.k = state.k;
    draw.indices.resize(B);
    for (std::size_t l = 0; l < B; ++l) draw.indices[l] = state.rng.next_index(n);
    return draw;
}

void kmbgd_step_with_draw(IterationState& state, const Dataset& data, const EngineContext& ctx,
                          const SubsampleDraw& draw) {
    if (state.beta.size() != data.p) throw UsageError("kmbgd: beta length != p");
    if (draw.indices.empty()) throw UsageError("kmbgd: empty subsample");
    if (!(ctx.floor_value > 0.0))
        throw UsageError("kmbgd: truncation floor unresolved; call resolve_floor first");
    const auto t0 = Clock::now();
    const std::size_t B = draw.indices.size();
    Vec z_sub(B), y_sub(B);
    for (std::size_t l = 0; l < B; ++l) {
        const std::size_t i = draw.indices[l];
        z_sub[l] = index_at(data, i, state.beta);
        y_sub[l] = static_cast<double>(data.y[i]);
    }
    // subsample scale c_k, full-sample exponent n^(-1/10)
    const double h = bandwidth(ctx.cfg.bw, z_sub, data.n);
    const NWEvalConfig nwc{ctx.cfg.use_fast_nw ? NWPath::fast : NWPath::naive, ctx.cfg.threads};
    const Vec ghat =
        nw_subsample_truncated(z_sub, z_sub, y_sub, h, ctx.kernel, ctx.floor_value, nwc);
    const Vec grad = subsample_gradient(data, ctx.mask, ghat, draw.indices);
    for (std::size_t j = 0; j < data.p; ++j) state.beta[j] -= ctx.cfg.delta * grad[j];
    state.k += 1;
    check_divergence(state.beta, state.k);
    state.cumulative_seconds += seconds_since(t0);
}

void kmbgd_step(IterationState& state, const Dataset& data, const EngineContext& ctx) {
    const SubsampleDraw draw = draw_subsample(state, data.n, ctx.cfg.B);
    kmbgd_step_with_draw(state, data, ctx, draw);
}

bool check_stop(const IterationState& state, const StopRule& rule) {
    rule.validate();
    const std::size_t need = static_cast<std::size_t>(rule.window_T + rule.gap);
    if (state.ring.size() < need) return false;
    const std::size_t sz = state.ring.size();
    const std::size_t p = state.ring.back().size();
    const std::size_t wt = static_cast<std::size_t>(rule.window_T);
    const std::size_t gap = static_cast<std::size_t>(rule.gap);
    double maxdist = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double a = 0.0, b = 0.0;
        for (std::size_t t = 0; t < wt; ++t) {
            a += state.ring[sz - 1 - t][j];
            b += state.ring[sz - 1 - gap - t][j];
        }
        maxdist = std::max(maxdist, std::abs(a - b) / static_cast<double>(wt));
    }
    return maxdist < rule.rho;
}

AveragedEstimate run_akmbgd(const Dataset& data, const GDConfig& cfg) {
    data.validate();
    cfg.validate(data.n);

    EngineContext ctx = make_engine_context(data, cfg);
    Vec beta1 = cfg.init_beta ? *cfg.init_beta : logit_init(data);
    if (beta1.size() != data.p) throw UsageError("run_akmbgd: initial beta length != p");
    if (cfg.floor.selection_mode == TruncationFloor::Selection::density_fraction)
        ctx.floor_value = resolve_floor(data, beta1, cfg, ctx.kernel);

    IterationState state;
    state.beta = beta1;
    state.rng = Rng(mix_seed(cfg.seed, 0));
    state.ring_capacity =
        cfg.stop ? static_cast<std::size_t>(cfg.stop->window_T + cfg.stop->gap) : 0;

    AveragedEstimate out;
    out.burn_in = cfg.burn_in;
    out.floor_value = ctx.floor_value;
    out.init_beta = beta1;

    const long scheduled = cfg.burn_in + cfg.follow_T;
    long produced = 0;
    for (;;) {
        if (!cfg.stop && produced >= scheduled) break;
        if (produced >= cfg.max_iters) {
            out.incomplete = true;
            break;
        }
        kmbgd_step(state, data, ctx);
        ++produced;
        if (produced > cfg.burn_in) {
            if (state.avg_sum.empty()) state.avg_sum.assign(data.p, 0.0);
            for (std::size_t j = 0; j < data.p; ++j) state.avg_sum[j] += state.beta[j];
            state.avg_count += 1;
        }
        if (state.ring_capacity > 0) {
            state.ring.push_back(state.beta);
            if (state.ring.size() > state.ring_capacity) state.ring.pop_front();
        }
        if (cfg.record_trace)
            out.trace.push_back({produced, state.cumulative_seconds, state.beta});
        if (cfg.stop && check_stop(state, *cfg.stop)) {
            out.stopped_by_rule = true;
            break;
        }
    }

    out.iterations = produced;
    out.final_iterate = state.beta;
    out.seconds = state.cumulative_seconds;

    if (cfg.stop) {
        // final estimator: average of the last window_T + gap iterates
        if (state.ring.empty()) {
            out.beta_bar = state.beta;
            out.incomplete = true;
        } else {
            out.beta_bar.assign(data.p, 0.0);
            for (const Vec& b : state.ring)
                for (std::size_t j = 0; j < data.p; ++j) out.beta_bar[j] += b[j];
            for (std::size_t j = 0; j < data.p; ++j)
                out.beta_bar[j] /= static_cast<double>(state.ring.size());
        }
    } else if (state.avg_count > 0) {
        out.beta_bar.resize(data.p);
        for (std::size_t j = 0; j < data.p; ++j)
            out.beta_bar[j] = state.avg_sum[j] / static_cast<double>(state.avg_count);
        if (produced < scheduled) out.incomplete = true;
    } else {
        out.beta_bar = state.beta;
        out.incomplete = true;
    }
    return out;
}

}  // namespace mindex
