#include "mindex/inference.hpp"

#include <algorithm>
#include <cmath>

namespace mindex {

namespace {

struct PlugInPieces {
    Vec z;
    double h = 0.0;
    std::vector<std::uint8_t> mask;
    KernelSpec kernel;
    NWEvalConfig nwc;
    Vec y;
};

PlugInPieces prepare(const Dataset& data, const Vec& beta_hat, const CovarianceConfig& cfg) {
    data.validate();
    if (beta_hat.size() != data.p) throw UsageError("inference: beta length != p");
    for (double b : beta_hat)
        if (!std::isfinite(b)) throw UsageError("inference: non-finite beta");
    PlugInPieces out;
    out.z = compute_index(data, beta_hat).z;
    out.h = bandwidth(cfg.bw, out.z, data.n);
    out.mask = trimming_mask(data, cfg.trimming);
    out.kernel = make_kernel(cfg.kernel_order);
    out.nwc = NWEvalConfig{cfg.use_fast_nw ? NWPath::fast : NWPath::naive, cfg.threads};
    out.y.resize(data.n);
    for (std::size_t i = 0; i < data.n; ++i) out.y[i] = static_cast<double>(data.y[i]);
    return out;
}

// covariate columns as a matrix, optionally masked (x^phi)
Mat covariate_columns(const Dataset& data, const std::vector<std::uint8_t>& mask, bool masked) {
    Mat cols(data.n, data.p);
    for (std::size_t i = 0; i < data.n; ++i) {
        const double w = (!masked || mask[i]) ? 1.0 : 0.0;
        for (std::size_t j = 0; j < data.p; ++j) cols(i, j) = w * data.xat(i, j);
    }
    return cols;
}

}  // namespace

Mat estimate_lambda(const Dataset& data, const Vec& beta_hat, const CovarianceConfig& cfg) {
    const PlugInPieces pi = prepare(data, beta_hat, cfg);
    const NWResult gderiv = nw_deriv(pi.z, pi.z, pi.y, pi.h, pi.kernel, pi.nwc);
    const Mat cols = covariate_columns(data, pi.mask, cfg.use_trimmed_outer);
    const CondMeanResult cm = nw_conditional_mean(pi.z, pi.z, cols, pi.h, pi.kernel, pi.nwc);

    Mat lambda(data.p, data.p);
    for (std::size_t i = 0; i < data.n; ++i) {
        if (!pi.mask[i] || !gderiv.defined[i] || !cm.defined[i]) continue;
        const double w = gderiv.value[i];
        for (std::size_t r = 0; r < data.p; ++r) {
            const double xr = cols(i, r);
            if (xr == 0.0) continue;
            for (std::size_t c = 0; c < data.p; ++c)
                lambda(r, c) += w * xr * (cols(i, c) - cm.values(i, c));
        }
    }
    const double inv = 1.0 / static_cast<double>(data.n);
    for (double& v : lambda.a) v *= inv;
    return lambda;
}

Mat estimate_sigma_xi(const Dataset& data, const Vec& beta_hat, const CovarianceConfig& cfg) {
    const PlugInPieces pi = prepare(data, beta_hat, cfg);
    const NWResult ghat = nw_full(pi.z, pi.z, pi.y, pi.h, pi.kernel, pi.nwc);
    const Mat cols = covariate_columns(data, pi.mask, true);  // x^phi
    const CondMeanResult cm = nw_conditional_mean(pi.z, pi.z, cols, pi.h, pi.kernel, pi.nwc);

    const double eps = cfg.clamp_eps;
    Mat sxi(data.p, data.p);
    Vec centered(data.p);
    for (std::size_t i = 0; i < data.n; ++i) {
        if (!ghat.defined[i] || !cm.defined[i]) continue;
        const double g = std::clamp(ghat.value[i], eps, 1.0 - eps);
        const double w = g * (1.0 - g);
        for (std::size_t j = 0; j < data.p; ++j) centered[j] = cols(i, j) - cm.values(i, j);
        for (std::size_t r = 0; r < data.p; ++r) {
            const double wr = w * centered[r];
            for (std::size_t c = r; c < data.p; ++c) sxi(r, c) += wr * centered[c];
        }
    }
    const double inv = 1.0 / static_cast<double>(data.n);
    for (std::size_t r = 0; r < data.p; ++r)
        for (std::size_t c = r; c < data.p; ++c) {
            sxi(r, c) *= inv;
            sxi(c, r) = sxi(r, c);
        }
    return sxi;
}

CovarianceEstimate covariance_from_parts(const Mat& lambda, const Mat& sigma_xi, std::size_t n) {
    if (lambda.rows != lambda.cols || sigma_xi.rows != sigma_xi.cols ||
        lambda.rows != sigma_xi.rows)
        throw UsageError("covariance: dimension mismatch");
    CovarianceEstimate out;
    out.lambda_hat = lambda;
    out.sigma_xi_hat = sigma_xi;

    LUFactor f;
    try {
        f = lu_factor(lambda);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError(
            "covariance: lambda-hat is singular; consider a larger sample or different bandwidth");
    }
    if (f.pivot_ratio > 1e12)
        throw SingularMatrixError(
            "covariance: lambda-hat is near-singular (pivot ratio > 1e12); consider a larger "
            "sample or different bandwidth");

    const Mat c = lu_solve(f, sigma_xi);            // lambda^-1 sigma_xi
    out.sigma_beta_hat = transpose(lu_solve(f, transpose(c)));  // c lambda^-T

    const std::size_t p = lambda.rows;
    out.se.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        out.se[j] = std::sqrt(std::max(0.0, out.sigma_beta_hat(j, j)) / static_cast<double>(n));

    Mat resid = matmul(matmul(lambda, out.sigma_beta_hat), transpose(lambda));
    for (std::size_t i = 0; i < resid.a.size(); ++i) resid.a[i] -= sigma_xi.a[i];
    const double denom = frobenius_norm(sigma_xi);
    out.identity_residual = denom > 0.0 ? frobenius_norm(resid) / denom : frobenius_norm(resid);
    return out;
}

CovarianceEstimate covariance(const Dataset& data, const Vec& beta_hat,
                              const CovarianceConfig& cfg) {
    const Mat lambda = estimate_lambda(data, beta_hat, cfg);
    const Mat sxi = estimate_sigma_xi(data, beta_hat, cfg);
    return covariance_from_parts(lambda, sxi, data.n);
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw UsageError("normal_quantile: prob in (0,1) required");
    // Acklam (2003) rational approximation
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (prob < plow) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - plow) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley step against the erfc-based CDF
    const double e = 0.5 * std::erfc(-x / 1.4142135623730951) - prob;
    const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

std::vector<ConfidenceInterval> confidence_intervals(const Vec& beta_hat,
                                                     const CovarianceEstimate& cov, double level) {
    if (!(level > 0.0 && level < 1.0)) throw UsageError("confidence_intervals: level in (0,1)");
    if (beta_hat.size() != cov.se.size())
        throw UsageError("confidence_intervals: beta/se length mismatch");
    const double q = normal_quantile(0.5 * (1.0 + level));
    std::vector<ConfidenceInterval> out(beta_hat.size());
    for (std::size_t j = 0; j < beta_hat.size(); ++j) {
        out[j].lo = beta_hat[j] - q * cov.se[j];
        out[j].hi = beta_hat[j] + q * cov.se[j];
    }
    return out;
}

CDFCurve estimate_cdf_curve(const Dataset& data, const Vec& beta_hat, const GridSpec& grid,
                            const CovarianceConfig& cfg) {
    data.validate();
    if (beta_hat.size() != data.p) throw UsageError("estimate_cdf_curve: beta length != p");
    CDFCurve curve;
    curve.beta_used = beta_hat;
    if (grid.points == 0) return curve;

    const Vec z = compute_index(data, beta_hat).z;
    const double lo = grid.lo ? *grid.lo : *std::min_element(z.begin(), z.end());
    const double hi = grid.hi ? *grid.hi : *std::max_element(z.begin(), z.end());
    if (!(lo < hi) && grid.points > 1) throw UsageError("estimate_cdf_curve: need lo < hi");

    Vec gz(grid.points);
    if (grid.points == 1) {
        gz[0] = lo;
    } else {
        const double step = (hi - lo) / static_cast<double>(grid.points - 1);
        for (std::size_t g = 0; g < grid.points; ++g) gz[g] = lo + step * static_cast<double>(g);
    }

    const double h = bandwidth(cfg.bw, z, data.n);
    const KernelSpec kernel = make_kernel(cfg.kernel_order);
    Vec y(data.n);
    for (std::size_t i = 0; i < data.n; ++i) y[i] = static_cast<double>(data.y[i]);
    const NWEvalConfig nwc{cfg.use_fast_nw ? NWPath::fast : NWPath::naive, cfg.threads};
    const NWResult fit = nw_full(gz, z, y, h, kernel, nwc);

    for (std::size_t g = 0; g < gz.size(); ++g) {
        if (!fit.defined[g]) {
            curve.dropped += 1;
            continue;
        }
        curve.grid.push_back(gz[g]);
        curve.values.push_back(std::clamp(fit.value[g], 0.0, 1.0));
    }
    return curve;
}

}  // namespace mindex
