#include "mindex/nw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mindex {

void TruncationFloor::validate() const {
    if (selection_mode == Selection::fixed && !(c_f > 0.0))
        throw UsageError("truncation floor: fixed mode needs c_f > 0");
    if (selection_mode == Selection::density_fraction && !(fraction > 0.0))
        throw UsageError("truncation floor: fraction must be positive");
}

namespace {

struct SortedData {
    Vec z;                           // ascending, ties broken by original index
    std::vector<std::size_t> order;  // original index per sorted slot
};

SortedData sort_data(const Vec& data_z) {
    SortedData s;
    const std::size_t m = data_z.size();
    s.order.resize(m);
    std::iota(s.order.begin(), s.order.end(), std::size_t{0});
    std::sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
        if (data_z[a] != data_z[b]) return data_z[a] < data_z[b];
        return a < b;
    });
    s.z.resize(m);
    for (std::size_t j = 0; j < m; ++j) s.z[j] = data_z[s.order[j]];
    return s;
}

inline double horner(const double* c, std::size_t nc, double t) {
    double acc = 0.0;
    for (std::size_t j = nc; j-- > 0;) acc = acc * t + c[j];
    return acc;
}

// Unscaled kernel-weighted sums per eval point, ascending data-z order. The
// fast path restricts the scan to the [e-h, e+h] window; the per-term |u| <= 1
// check makes the accumulated term set identical in both paths.
void accumulate_sums(const Vec& eval_z, const SortedData& sd, const std::vector<Vec>& cols,
                     double h, const KernelSpec& kernel, bool with_deriv, const NWEvalConfig& cfg,
                     Vec* den, Vec* num, Vec* dden, Vec* dnum) {
    const std::size_t ne = eval_z.size();
    const std::size_t m = sd.z.size();
    const std::size_t q = cols.size();
    const double inv_h = 1.0 / h;
    const double* poly = kernel.poly.data();
    const std::size_t np = kernel.poly.size();
    const double* dpoly = kernel.deriv.data();
    const std::size_t nd = kernel.deriv.size();

    den->assign(ne, 0.0);
    num->assign(ne * q, 0.0);
    if (with_deriv) {
        dden->assign(ne, 0.0);
        dnum->assign(ne * q, 0.0);
    }

    parallel_for(ne, cfg.threads, [&](std::size_t e) {
        const double ze = eval_z[e];
        std::size_t lo = 0, hi = m;
        if (cfg.path == NWPath::fast) {
            lo = static_cast<std::size_t>(
                std::lower_bound(sd.z.begin(), sd.z.end(), ze - h) - sd.z.begin());
            hi = static_cast<std::size_t>(
                std::upper_bound(sd.z.begin(), sd.z.end(), ze + h) - sd.z.begin());
        }
        double sden = 0.0, sdden = 0.0;
        double* nrow = num->data() + e * q;
        double* drow = with_deriv ? dnum->data() + e * q : nullptr;
        for (std::size_t j = lo; j < hi; ++j) {
            const double u = (ze - sd.z[j]) * inv_h;
            if (u < -1.0 || u > 1.0) continue;
            const double t = u * u;
            const double k = horner(poly, np, t);
            sden += k;
            for (std::size_t c = 0; c < q; ++c) nrow[c] += k * cols[c][j];
            if (with_deriv) {
                const double kd = horner(dpoly, nd, t) * u;
                sdden += kd;
                for (std::size_t c = 0; c < q; ++c) drow[c] += kd * cols[c][j];
            }
        }
        (*den)[e] = sden;
        if (with_deriv) (*dden)[e] = sdden;
    });
}

void check_inputs(const Vec& data_z, std::size_t weights_len, double h) {
    if (!(h > 0.0)) throw UsageError("nw: bandwidth h must be positive");
    if (data_z.empty()) throw UsageError("nw: empty data");
    if (data_z.size() != weights_len) throw UsageError("nw: data and weight lengths differ");
}

Vec gather(const Vec& src, const std::vector<std::size_t>& order) {
    Vec out(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = src[order[j]];
    return out;
}

}  // namespace

std::vector<NWComponents> nw_components(const Vec& eval_z, const Vec& data_z, const Vec& y,
                                        double h, const KernelSpec& kernel,
                                        const NWEvalConfig& cfg) {
    check_inputs(data_z, y.size(), h);
    const SortedData sd = sort_data(data_z);
    std::vector<Vec> cols;
    cols.push_back(gather(y, sd.order));
    Vec den, num, dden, dnum;
    accumulate_sums(eval_z, sd, cols, h, kernel, false, cfg, &den, &num, &dden, &dnum);
    const double scale = 1.0 / (static_cast<double>(data_z.size()) * h);
    std::vector<NWComponents> out(eval_z.size());
    for (std::size_t e = 0; e < out.size(); ++e) {
        out[e].num = num[e] * scale;
        out[e].den = den[e] * scale;
    }
    return out;
}

NWResult nw_full(const Vec& eval_z, const Vec& data_z, const Vec& y, double h,
                 const KernelSpec& kernel, const NWEvalConfig& cfg) {
    const auto comps = nw_components(eval_z, data_z, y, h, kernel, cfg);
    NWResult res;
    res.value.resize(comps.size());
    res.defined.resize(comps.size());
    for (std::size_t e = 0; e < comps.size(); ++e) {
        if (comps[e].den != 0.0) {
            res.value[e] = comps[e].num / comps[e].den;
            res.defined[e] = 1;
        } else {
            res.value[e] = 0.0;
            res.defined[e] = 0;
        }
    }
    return res;
}

Vec nw_subsample_truncated(const Vec& eval_z, const Vec& sub_z, const Vec& sub_y, double h,
                           const KernelSpec& kernel, double c_f, const NWEvalConfig& cfg) {
    if (!(c_f > 0.0)) throw UsageError("nw_subsample_truncated: c_f must be positive");
    if (sub_z.empty()) throw UsageError("nw_subsample_truncated: empty subsample");
    const auto comps = nw_components(eval_z, sub_z, sub_y, h, kernel, cfg);
    Vec out(comps.size());
    for (std::size_t e = 0; e < comps.size(); ++e)
        out[e] = comps[e].num / std::max(comps[e].den, c_f);
    return out;
}

NWResult nw_deriv(const Vec& eval_z, const Vec& data_z, const Vec& y, double h,
                  const KernelSpec& kernel, const NWEvalConfig& cfg) {
    check_inputs(data_z, y.size(), h);
    const SortedData sd = sort_data(data_z);
    std::vector<Vec> cols;
    cols.push_back(gather(y, sd.order));
    Vec den, num, dden, dnum;
    accumulate_sums(eval_z, sd, cols, h, kernel, true, cfg, &den, &num, &dden, &dnum);
    const double m = static_cast<double>(data_z.size());
    const double s1 = 1.0 / (m * h);
    const double s2 = 1.0 / (m * h * h);
    NWResult res;
    res.value.resize(eval_z.size());
    res.defined.resize(eval_z.size());
    for (std::size_t e = 0; e < eval_z.size(); ++e) {
        const double a1 = den[e] * s1;
        if (a1 == 0.0) {
            res.value[e] = 0.0;
            res.defined[e] = 0;
            continue;
        }
        const double ay = num[e] * s1;
        const double da1 = dden[e] * s2;
        const double day = dnum[e] * s2;
        res.value[e] = (day * a1 - ay * da1) / (a1 * a1);
        res.defined[e] = 1;
    }
    return res;
}

CondMeanResult nw_conditional_mean(const Vec& eval_z, const Vec& data_z, const Mat& columns,
                                   double h, const KernelSpec& kernel, const NWEvalConfig& cfg) {
    if (!(h > 0.0)) throw UsageError("nw: bandwidth h must be positive");
    if (data_z.empty()) throw UsageError("nw: empty data");
    if (columns.rows != data_z.size() && columns.cols > 0)
        throw UsageError("nw_conditional_mean: column rows != data length");
    CondMeanResult res;
    res.values = Mat(eval_z.size(), columns.cols);
    res.defined.assign(eval_z.size(), 0);
    const SortedData sd = sort_data(data_z);
    std::vector<Vec> cols(columns.cols);
    for (std::size_t c = 0; c < columns.cols; ++c) {
        cols[c].resize(data_z.size());
        for (std::size_t j = 0; j < data_z.size(); ++j) cols[c][j] = columns(sd.order[j], c);
    }
    Vec den, num, dden, dnum;
    accumulate_sums(eval_z, sd, cols, h, kernel, false, cfg, &den, &num, &dden, &dnum);
    const std::size_t q = columns.cols;
    for (std::size_t e = 0; e < eval_z.size(); ++e) {
        if (den[e] != 0.0) {
            res.defined[e] = 1;
            for (std::size_t c = 0; c < q; ++c) res.values(e, c) = num[e * q + c] / den[e];
        }
    }
    return res;
}

}  // namespace mindex
