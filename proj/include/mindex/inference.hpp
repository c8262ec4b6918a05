#ifndef MINDEX_INFERENCE_HPP
#define MINDEX_INFERENCE_HPP

#include <optional>

#include "mindex/dataset.hpp"
#include "mindex/kernel.hpp"
#include "mindex/linalg.hpp"
#include "mindex/nw.hpp"

namespace mindex {

struct CovarianceConfig {
    int kernel_order = 6;
    BandwidthRule bw{};
    TrimmingSpec trimming{};
    bool use_trimmed_outer = false;  // x^phi instead of x throughout lambda-hat
    bool use_fast_nw = true;
    int threads = 1;
    double clamp_eps = 1e-6;  // clamp for G(1-G) weights
};

// Plug-in slope matrix at beta-hat:
//   (1/n) sum_i mask_i * Ghat'(z_i) * x_i (x_i - Ehat(X|z_i))^T
Mat estimate_lambda(const Dataset& data, const Vec& beta_hat, const CovarianceConfig& cfg);

// Plug-in score covariance:
//   (1/n) sum_i Gc(1-Gc) (x_i^phi - Ehat(X^phi|z_i))(x_i^phi - Ehat(X^phi|z_i))^T
// with Gc the NW estimate clamped to [eps, 1-eps]. Exactly symmetric.
Mat estimate_sigma_xi(const Dataset& data, const Vec& beta_hat, const CovarianceConfig& cfg);

struct CovarianceEstimate {
    Mat lambda_hat;
    Mat sigma_xi_hat;
    Mat sigma_beta_hat;          // lambda^-1 sigma_xi lambda^-T
    Vec se;                      // sqrt(sigma_beta_jj / n)
    double identity_residual = 0.0;  // ||L Sb L^T - Sxi||_F / ||Sxi||_F
};

// Assembles the sandwich from precomputed parts (one LU of lambda).
CovarianceEstimate covariance_from_parts(const Mat& lambda, const Mat& sigma_xi, std::size_t n);

CovarianceEstimate covariance(const Dataset& data, const Vec& beta_hat,
                              const CovarianceConfig& cfg);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

std::vector<ConfidenceInterval> confidence_intervals(const Vec& beta_hat,
                                                     const CovarianceEstimate& cov, double level);

// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement; accurate to near machine precision).
double normal_quantile(double prob);

struct GridSpec {
    std::size_t points = 201;
    std::optional<double> lo;  // default: min fitted index
    std::optional<double> hi;  // default: max fitted index
};

struct CDFCurve {
    Vec grid;
    Vec values;  // clamped to [0,1]
    Vec beta_used;
    std::size_t dropped = 0;  // grid points with zero denominator
};

// NW regression of y on the fitted index over the grid. No monotonicity
// post-processing; the raw curve need not be monotone.
CDFCurve estimate_cdf_curve(const Dataset& data, const Vec& beta_hat, const GridSpec& grid,
                            const CovarianceConfig& cfg);

}  // namespace mindex

#endif
