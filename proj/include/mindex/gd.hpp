#ifndef MINDEX_GD_HPP
#define MINDEX_GD_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>

#include "mindex/dataset.hpp"
#include "mindex/kernel.hpp"
#include "mindex/linalg.hpp"
#include "mindex/nw.hpp"
#include "mindex/rng.hpp"

namespace mindex {

// Moving-average stopping rule: compare the mean of the last window_T iterates
// with the mean of the window_T iterates that ended gap steps earlier; fire
// when the max coordinate distance drops below rho.
struct StopRule {
    long window_T = 1;
    long gap = 1;
    double rho = 0.001;

    void validate() const;
};

struct GDConfig {
    double delta = 1.0;            // learning rate, constant across iterations
    TrimmingSpec trimming{};
    TruncationFloor floor{};
    std::size_t B = 0;             // subsample size for the mini-batch engines
    int kernel_order = 6;
    BandwidthRule bw{};
    long burn_in = 2000;           // k*
    long follow_T = 3000;          // T
    std::optional<StopRule> stop;
    long max_iters = 200000;
    std::uint64_t seed = 0;
    bool use_fast_nw = true;
    int threads = 1;
    bool record_trace = false;
    std::optional<Vec> init_beta;  // overrides the logit initializer

    void validate(std::size_t n) const;
};

struct SubsampleDraw {
    std::vector<std::size_t> indices;  // length B, duplicates allowed
    long k = 0;
};

struct IterationState {
    long k = 1;  // 1-based iterate number; beta_1 is the start value
    Vec beta;
    std::deque<Vec> ring;  // recent iterates, newest at back
    std::size_t ring_capacity = 0;
    Vec avg_sum;  // running sum of post-burn-in iterates
    long avg_count = 0;
    double cumulative_seconds = 0.0;
    Rng rng;
};

// Pieces resolved once per estimation run and shared by the steps.
struct EngineContext {
    GDConfig cfg;
    KernelSpec kernel;
    std::vector<std::uint8_t> mask;  // trimming indicator
    Vec y;                           // outcomes as doubles
    double floor_value = 0.0;        // resolved c_f
};

// Builds kernel, mask and outcome vector; a fixed floor is taken as-is, a
// density_fraction floor is left at 0 until resolve_floor is called with the
// run's initial iterate.
EngineContext make_engine_context(const Dataset& data, const GDConfig& cfg);

// c_f = fraction x median full-sample kernel density at the initial index.
double resolve_floor(const Dataset& data, const Vec& beta_init, const GDConfig& cfg,
                     const KernelSpec& kernel);

struct LogitFit {
    Vec coef;  // intercept, x0, x1..xp
    Mat cov;   // inverse observed information
    long iterations = 0;
    double grad_norm = 0.0;  // mean-gradient norm at the solution
};

// Damped Newton MLE of the parametric logit with intercept.
LogitFit fit_logit(const Dataset& data);

// Logit fit normalized by the fitted x0 coefficient; returns the p free
// coefficients. Throws InitializationError on degenerate outcomes or
// separation, NumericError if the x0 coefficient is not positive.
Vec logit_init(const Dataset& data);

using LinkFn = std::function<double(double)>;

// beta <- beta - (delta/n) sum_i (G(z_i) - y_i) x_i   (free coordinates only)
void bgd_step_known_g(IterationState& state, const Dataset& data, const LinkFn& G, double delta);

// Full-sample kernel step: NW estimate of G at every own index point, then the
// trimmed gradient.
void kbgd_step(IterationState& state, const Dataset& data, const EngineContext& ctx);

// B iid uniform draws from [0, n) with replacement; advances the state's rng.
SubsampleDraw draw_subsample(IterationState& state, std::size_t n, std::size_t B);

// Mini-batch kernel step with the given draw (evaluation set = subsample set,
// duplicates kept with multiplicity).
void kmbgd_step_with_draw(IterationState& state, const Dataset& data, const EngineContext& ctx,
                          const SubsampleDraw& draw);

// Draws the subsample internally.
void kmbgd_step(IterationState& state, const Dataset& data, const EngineContext& ctx);

// (1/|idx|) sum over idx of (ghat[l] - y[idx[l]]) * mask[idx[l]] * x[idx[l]];
// ghat is aligned with idx by position. Shared by the batch and mini-batch
// engines and by the enumeration tests.
Vec subsample_gradient(const Dataset& data, const std::vector<std::uint8_t>& mask,
                       const Vec& ghat, const std::vector<std::size_t>& idx);

// True when the two window means are closer than rho in the infinity norm.
// Inactive (false) until the ring holds window_T + gap iterates.
bool check_stop(const IterationState& state, const StopRule& rule);

struct TraceRecord {
    long k = 0;  // produced-update counter
    double seconds = 0.0;
    Vec beta;
};

struct AveragedEstimate {
    Vec beta_bar;
    Vec final_iterate;
    long iterations = 0;  // produced updates
    long burn_in = 0;
    bool stopped_by_rule = false;
    bool incomplete = false;  // max_iters exhausted before the schedule finished
    double seconds = 0.0;
    double floor_value = 0.0;
    Vec init_beta;
    std::vector<TraceRecord> trace;
};

// Algorithm: start from logit_init (or cfg.init_beta), run kmbgd steps for
// burn_in + follow_T updates (or until the stop rule fires when provided),
// average the post-burn-in iterates.
AveragedEstimate run_akmbgd(const Dataset& data, const GDConfig& cfg);

}  // namespace mindex

#endif
