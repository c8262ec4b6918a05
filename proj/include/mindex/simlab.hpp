#ifndef MINDEX_SIMLAB_HPP
#define MINDEX_SIMLAB_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "mindex/dataset.hpp"
#include "mindex/gd.hpp"
#include "mindex/inference.hpp"
#include "mindex/linalg.hpp"
#include "mindex/rng.hpp"

namespace mindex {

enum class ErrorFamily { cauchy, chisq3, normal, logistic };

// CDF of the latent shock: the model's link G
double error_cdf(ErrorFamily family, double z);
double sample_error(ErrorFamily family, Rng& rng);
std::string error_family_name(ErrorFamily family);
ErrorFamily parse_error_family(const std::string& name);

struct DGPSpec {
    std::size_t n = 0;
    std::size_t p = 0;  // number of free covariates
    ErrorFamily error_family = ErrorFamily::normal;
    Vec beta_star;  // empty -> default pattern
    std::uint64_t seed = 0;

    // default free coefficients (1, 1, 0.5, 2, 5, -0.5, -1, -2, -5) padded
    // with zeros / truncated to length p
    Vec resolved_beta() const;
    void validate() const;
};

struct GeneratedData {
    Dataset data;
    Vec z_star;  // true index x0 + x beta*
    Vec beta_star;
    ErrorFamily error_family = ErrorFamily::normal;
};

// Covariate laws: x0 ~ N(0,1), x1 ~ Bernoulli(1/2), x2 ~ Poisson(2),
// xj ~ (chisq(1)-1)/sqrt(2) for j >= 3; y = 1(z* - u > 0). Each column and the
// shock stream draw from their own seed-derived generator, so the draws for a
// column do not depend on p.
GeneratedData generate_dataset(const DGPSpec& spec);

struct ReplicationOutcome {
    Vec beta_hat;
    Vec se;
    double identity_residual = 0.0;
    bool ok = false;
    std::string error;
};

// estimator callback: (generated data, algorithm seed) -> outcome
using EstimatorFn = std::function<ReplicationOutcome(const GeneratedData&, std::uint64_t)>;

// default pipeline: logit_init -> run_akmbgd -> covariance
EstimatorFn akmbgd_estimator(const GDConfig& gd, const CovarianceConfig& cov);

struct MCReport {
    std::size_t p = 0;
    long reps = 0;
    Vec bias;      // |mean(beta_hat) - beta*|
    Vec rmse;      // sqrt(mean((beta_hat - beta*)^2))
    Vec coverage;  // share of replications with |beta_hat - beta*| <= 1.96 se
    std::vector<std::uint8_t> coverage_defined;  // false when some se was exactly 0
    Vec beta_star;
    long failures = 0;
    bool partial = false;
    double total_seconds = 0.0;
    double max_identity_residual = 0.0;
    Mat estimates;  // reps x p, failed rows zero
    Mat ses;        // reps x p
    std::vector<std::uint8_t> rep_ok;
};

// R replications; replication r uses data seed mix(dgp.seed, r) and algorithm
// seed mix(gd.seed, r), so extending R never changes earlier replications.
MCReport run_monte_carlo(const DGPSpec& dgp, const GDConfig& gd, long R, int threads,
                         const EstimatorFn& estimator);
MCReport run_monte_carlo(const DGPSpec& dgp, const GDConfig& gd, long R, int threads = 1);

enum class BenchAlgorithm { bgd_known_g, kbgd_naive, kbgd_fast, kmbgd_naive, kmbgd_fast };
std::string bench_algorithm_name(BenchAlgorithm alg);
BenchAlgorithm parse_bench_algorithm(const std::string& name);

struct BenchPoint {
    long k = 0;
    double seconds = 0.0;       // cumulative
    double rmse = 0.0;          // root mean squared coefficient error vs beta*
    double log_inv_rmse = 0.0;  // log(1/rmse)
};

struct BenchTrace {
    std::string tag;
    BenchAlgorithm algorithm = BenchAlgorithm::kmbgd_fast;
    std::vector<BenchPoint> points;
    bool diverged = false;
};

// Runs `iters` updates of each configured algorithm from the same logit start
// on one generated dataset, recording cumulative wall time and error after
// every update. A diverging trace is cut short and flagged; others continue.
std::vector<BenchTrace> run_bench(const DGPSpec& dgp,
                                  const std::vector<std::pair<BenchAlgorithm, GDConfig>>& configs,
                                  long iters);

}  // namespace mindex

#endif
