#include "mindex/kernel.hpp"

#include <cmath>

namespace mindex {

double kernel_eval(const KernelSpec& spec, double u) {
    if (!(u >= -1.0 && u <= 1.0)) return 0.0;
    const double t = u * u;
    double acc = 0.0;
    for (std::size_t j = spec.poly.size(); j-- > 0;) acc = acc * t + spec.poly[j];
    return acc;
}

double kernel_deriv(const KernelSpec& spec, double u) {
    if (!(u >= -1.0 && u <= 1.0)) return 0.0;
    const double t = u * u;
    double acc = 0.0;
    for (std::size_t j = spec.deriv.size(); j-- > 0;) acc = acc * t + spec.deriv[j];
    return acc * u;
}

KernelSpec make_kernel(int order) {
    KernelSpec spec;
    spec.order = order;
    switch (order) {
        case 2:
            spec.poly = {3.0 / 4.0, -3.0 / 4.0};
            break;
        case 4:
            // (15/32)(1-u^2)(3-7u^2) = (15/32)(3 - 10u^2 + 7u^4)
            spec.poly = {45.0 / 32.0, -150.0 / 32.0, 105.0 / 32.0};
            break;
        case 6:
            // (525/256)(1-u^2)(1-6u^2+(33/5)u^4)
            //   = (525/256)(1 - 7u^2 + (63/5)u^4 - (33/5)u^6)
            spec.poly = {525.0 / 256.0, -3675.0 / 256.0, 6615.0 / 256.0, -3465.0 / 256.0};
            break;
        default:
            throw UsageError("make_kernel: order must be 2, 4 or 6");
    }
    // d/du sum c_j u^(2j) = sum 2j c_j u^(2j-1)
    spec.deriv.resize(spec.poly.size() - 1);
    for (std::size_t j = 1; j < spec.poly.size(); ++j)
        spec.deriv[j - 1] = 2.0 * static_cast<double>(j) * spec.poly[j];
    return spec;
}

double kernel_moment(const KernelSpec& spec, int v) {
    if (v < 0) throw UsageError("kernel_moment: v >= 0 required");
    if (v % 2 == 1) return 0.0;  // odd power of an even polynomial
    // integral over [-1,1] of u^v u^(2j) du = 2 / (v + 2j + 1)
    double m = 0.0;
    for (std::size_t j = 0; j < spec.poly.size(); ++j)
        m += spec.poly[j] * 2.0 / static_cast<double>(v + 2 * static_cast<int>(j) + 1);
    return m;
}

MomentReport verify_moments(const KernelSpec& spec, double tol) {
    if (!(tol > 0.0)) throw UsageError("verify_moments: tol > 0 required");
    MomentReport rep;
    rep.order = spec.order;
    rep.tol = tol;
    rep.moments.resize(static_cast<std::size_t>(spec.order) + 1);
    for (int v = 0; v <= spec.order; ++v)
        rep.moments[static_cast<std::size_t>(v)] = kernel_moment(spec, v);

    bool ok = std::abs(rep.moments[0] - 1.0) < tol;
    for (int v = 1; v < spec.order; ++v)
        ok = ok && std::abs(rep.moments[static_cast<std::size_t>(v)]) < tol;
    ok = ok && std::abs(rep.moments[static_cast<std::size_t>(spec.order)]) > 1e-3;
    rep.pass = ok;
    return rep;
}

void BandwidthRule::validate() const {
    if (!(exponent < 0.0)) throw UsageError("bandwidth rule: exponent must be negative");
    if (scale_mode == Scale::fixed && (!fixed_value || !(*fixed_value > 0.0)))
        throw UsageError("bandwidth rule: fixed mode needs fixed_value > 0");
}

double sample_std(const Vec& v) {
    if (v.size() < 2) throw UsageError("sample_std: need at least 2 values");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double bandwidth(const BandwidthRule& rule, const Vec& index_z, std::size_t n) {
    rule.validate();
    if (n < 2) throw UsageError("bandwidth: n >= 2 required");
    if (rule.scale_mode == BandwidthRule::Scale::fixed) return *rule.fixed_value;
    const double sd = sample_std(index_z);
    if (!(sd > 0.0)) throw DegenerateDataError("bandwidth: index has zero variance");
    return sd * std::pow(static_cast<double>(n), rule.exponent);
}

}  // namespace mindex
