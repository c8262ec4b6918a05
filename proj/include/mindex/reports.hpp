#ifndef MINDEX_REPORTS_HPP
#define MINDEX_REPORTS_HPP

#include <string>

#include "mindex/inference.hpp"
#include "mindex/kernel.hpp"
#include "mindex/simlab.hpp"

namespace mindex {

// Deterministic serializations: fixed key order, no timestamps. Wall-clock
// measurements appear only in the benchmark CSV.

std::string moment_report_json(const MomentReport& rep);

std::string covariance_json(const CovarianceEstimate& cov);

// estimate output: coefficients, ses, intervals
std::string estimate_json(const std::vector<std::string>& names, const Vec& beta,
                          const CovarianceEstimate& cov,
                          const std::vector<ConfidenceInterval>& ci, double level);

// header "z,G_hat", one row per defined grid point
std::string cdf_curve_csv(const CDFCurve& curve);

std::string mc_report_json(const MCReport& rep, const DGPSpec& dgp);

// aligned Bias/RMSE/CR rows per coefficient
std::string mc_report_table(const MCReport& rep, const DGPSpec& dgp);

// header "algorithm,k,seconds,rmse,log_inv_rmse"
std::string bench_csv(const std::vector<BenchTrace>& traces);

std::string error_report_json(const std::string& kind, const std::string& message);

}  // namespace mindex

#endif
