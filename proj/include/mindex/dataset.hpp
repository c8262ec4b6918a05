#ifndef MINDEX_DATASET_HPP
#define MINDEX_DATASET_HPP

#include <cstdint>
#include <cstddef>

#include "mindex/common.hpp"

namespace mindex {

// Design data for the binary choice model. The covariate whose coefficient is
// normalized to one lives in x0; the p free covariates are stored row-major in
// x. Immutable after validate(); all operations on it are pure.
struct Dataset {
    Vec x0;                       // length n
    Vec x;                        // n x p, row-major
    std::vector<std::uint8_t> y;  // 0/1 outcomes, length n
    std::size_t n = 0;
    std::size_t p = 0;

    double xat(std::size_t i, std::size_t j) const { return x[i * p + j]; }

    // Checks n >= 2, p >= 1, finite covariates, binary y. Throws UsageError.
    void validate() const;
};

struct TrimmingSpec {
    enum class Mode { none, box, quantile };
    Mode mode = Mode::none;
    double phi = 0.0;      // box mode: keep |covariate| <= 1 - phi
    double lo = 0.0;       // quantile mode band
    double hi = 1.0;

    void validate() const;
};

struct Coefficients {
    Vec beta;  // length p; the unit coefficient on x0 is implicit
};

struct IndexValues {
    Vec z;  // z_i = x0_i + <x_i, beta>
    Vec beta_used;
};

// z_i = x0_i + sum_j x_ij * beta_j, accumulated in ascending column order so
// repeated runs are bit-reproducible.
IndexValues compute_index(const Dataset& data, const Vec& beta);

// 1 = keep, 0 = trimmed. box: every covariate (x0 and x) within [-(1-phi), 1-phi].
// quantile: every covariate of observation i inside its per-column empirical
// [lo, hi] quantile band.
std::vector<std::uint8_t> trimming_mask(const Dataset& data, const TrimmingSpec& spec);

}  // namespace mindex

#endif
