#include "mindex/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace mindex {

void Dataset::validate() const {
    if (n < 2) throw UsageError("dataset: need n >= 2");
    if (p < 1) throw UsageError("dataset: need p >= 1");
    if (x0.size() != n || y.size() != n || x.size() != n * p)
        throw UsageError("dataset: field lengths inconsistent with n, p");
    for (double v : x0)
        if (!std::isfinite(v)) throw UsageError("dataset: non-finite entry in x0");
    for (double v : x)
        if (!std::isfinite(v)) throw UsageError("dataset: non-finite entry in x");
    for (auto v : y)
        if (v != 0 && v != 1) throw UsageError("dataset: y entries must be 0 or 1");
}

void TrimmingSpec::validate() const {
    switch (mode) {
        case Mode::none:
            return;
        case Mode::box:
            if (!(phi >= 0.0 && phi < 1.0)) throw UsageError("trimming: box mode needs 0 <= phi < 1");
            return;
        case Mode::quantile:
            if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
                throw UsageError("trimming: quantile mode needs 0 <= lo < hi <= 1");
            return;
    }
    throw UsageError("trimming: unknown mode");
}

IndexValues compute_index(const Dataset& data, const Vec& beta) {
    if (beta.size() != data.p) throw UsageError("compute_index: beta length != p");
    IndexValues out;
    out.beta_used = beta;
    out.z.resize(data.n);
    const double* row = data.x.data();
    for (std::size_t i = 0; i < data.n; ++i, row += data.p) {
        double z = data.x0[i];
        for (std::size_t j = 0; j < data.p; ++j) z += row[j] * beta[j];
        out.z[i] = z;
    }
    return out;
}

namespace {

// type-7 (linear interpolation) sample quantile on a sorted copy
double quantile_sorted(const Vec& sorted, double level) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = level * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<std::uint8_t> trimming_mask(const Dataset& data, const TrimmingSpec& spec) {
    spec.validate();
    std::vector<std::uint8_t> mask(data.n, 1);
    if (spec.mode == TrimmingSpec::Mode::none) return mask;

    if (spec.mode == TrimmingSpec::Mode::box) {
        const double bound = 1.0 - spec.phi;
        for (std::size_t i = 0; i < data.n; ++i) {
            bool keep = std::abs(data.x0[i]) <= bound;
            for (std::size_t j = 0; keep && j < data.p; ++j)
                keep = std::abs(data.xat(i, j)) <= bound;
            mask[i] = keep ? 1 : 0;
        }
        return mask;
    }

    // quantile mode: per-column bands over x0 and each free covariate
    Vec col(data.n);
    auto apply_band = [&](auto getter) {
        for (std::size_t i = 0; i < data.n; ++i) col[i] = getter(i);
        Vec sorted = col;
        std::sort(sorted.begin(), sorted.end());
        const double lo = quantile_sorted(sorted, spec.lo);
        const double hi = quantile_sorted(sorted, spec.hi);
        for (std::size_t i = 0; i < data.n; ++i)
            if (col[i] < lo || col[i] > hi) mask[i] = 0;
    };
    apply_band([&](std::size_t i) { return data.x0[i]; });
    for (std::size_t j = 0; j < data.p; ++j)
        apply_band([&](std::size_t i) { return data.xat(i, j); });
    return mask;
}

}  // namespace mindex
