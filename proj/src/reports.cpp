#include "mindex/reports.hpp"

#include <cstdio>

#include "json.hpp"

namespace mindex {

namespace {

using json = nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json mat_json(const Mat& m) {
    json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["data"] = m.a;  // row-major
    return j;
}

}  // namespace

std::string moment_report_json(const MomentReport& rep) {
    json j;
    j["order"] = rep.order;
    j["tol"] = rep.tol;
    j["moments"] = rep.moments;
    j["pass"] = rep.pass;
    return j.dump(2) + "\n";
}

std::string covariance_json(const CovarianceEstimate& cov) {
    json j;
    j["lambda_hat"] = mat_json(cov.lambda_hat);
    j["sigma_xi_hat"] = mat_json(cov.sigma_xi_hat);
    j["sigma_beta_hat"] = mat_json(cov.sigma_beta_hat);
    j["se"] = cov.se;
    j["identity_residual"] = cov.identity_residual;
    return j.dump(2) + "\n";
}

std::string estimate_json(const std::vector<std::string>& names, const Vec& beta,
                          const CovarianceEstimate& cov,
                          const std::vector<ConfidenceInterval>& ci, double level) {
    json j;
    j["coefficients"] = json::array();
    for (std::size_t k = 0; k < beta.size(); ++k) {
        json row;
        row["name"] = k < names.size() ? names[k] : ("x" + std::to_string(k + 1));
        row["estimate"] = beta[k];
        row["se"] = cov.se[k];
        row["ci_lo"] = ci[k].lo;
        row["ci_hi"] = ci[k].hi;
        j["coefficients"].push_back(row);
    }
    j["ci_level"] = level;
    j["covariance"] = json::parse(covariance_json(cov));
    return j.dump(2) + "\n";
}

std::string cdf_curve_csv(const CDFCurve& curve) {
    std::string out = "z,G_hat\n";
    for (std::size_t g = 0; g < curve.grid.size(); ++g)
        out += fmt_double(curve.grid[g]) + "," + fmt_double(curve.values[g]) + "\n";
    return out;
}

std::string mc_report_json(const MCReport& rep, const DGPSpec& dgp) {
    json j;
    j["n"] = dgp.n;
    j["p"] = dgp.p;
    j["error_family"] = error_family_name(dgp.error_family);
    j["beta_star"] = rep.beta_star;
    j["reps"] = rep.reps;
    j["bias"] = rep.bias;
    j["rmse"] = rep.rmse;
    j["coverage"] = rep.coverage;
    j["coverage_defined"] = rep.coverage_defined;
    j["failures"] = rep.failures;
    j["partial"] = rep.partial;
    j["max_identity_residual"] = rep.max_identity_residual;
    return j.dump(2) + "\n";
}

std::string mc_report_table(const MCReport& rep, const DGPSpec& dgp) {
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "n=%zu  %s  R=%ld\n", dgp.n,
                  error_family_name(dgp.error_family).c_str(), rep.reps);
    out += buf;
    out += "      ";
    for (std::size_t j = 0; j < rep.p; ++j) {
        std::snprintf(buf, sizeof buf, " %9s", ("beta" + std::to_string(j + 1)).c_str());
        out += buf;
    }
    out += "\n";
    auto row = [&](const char* label, const Vec& v) {
        std::snprintf(buf, sizeof buf, "%-6s", label);
        out += buf;
        for (double x : v) {
            std::snprintf(buf, sizeof buf, " %9.4f", x);
            out += buf;
        }
        out += "\n";
    };
    row("Bias", rep.bias);
    row("RMSE", rep.rmse);
    row("CR", rep.coverage);
    return out;
}

std::string bench_csv(const std::vector<BenchTrace>& traces) {
    std::string out = "algorithm,k,seconds,rmse,log_inv_rmse\n";
    for (const auto& tr : traces)
        for (const auto& pt : tr.points)
            out += tr.tag + "," + std::to_string(pt.k) + "," + fmt_double(pt.seconds) + "," +
                   fmt_double(pt.rmse) + "," + fmt_double(pt.log_inv_rmse) + "\n";
    return out;
}

std::string error_report_json(const std::string& kind, const std::string& message) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    return j.dump(2) + "\n";
}

}  // namespace mindex
