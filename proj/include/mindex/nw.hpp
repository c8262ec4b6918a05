#ifndef MINDEX_NW_HPP
#define MINDEX_NW_HPP

#include <cstdint>

#include "mindex/common.hpp"
#include "mindex/kernel.hpp"
#include "mindex/linalg.hpp"

namespace mindex {

// Kernel-weighted mean (num) and density (den) at one evaluation point, both
// scaled by 1/(m h). With high-order kernels either component may be negative.
struct NWComponents {
    double num = 0.0;
    double den = 0.0;
};

// Lower bound for the subsample estimator's denominator.
struct TruncationFloor {
    enum class Selection { fixed, density_fraction };
    Selection selection_mode = Selection::density_fraction;
    double c_f = 0.0;         // fixed mode: the floor itself
    double fraction = 0.01;   // density_fraction: share of the median full-sample density

    void validate() const;
};

enum class NWPath { naive, fast };

struct NWEvalConfig {
    NWPath path = NWPath::fast;
    int threads = 1;
};

// Ratio estimates with an explicit defined flag; value 0 where the denominator
// vanished (possible only off the data support).
struct NWResult {
    Vec value;
    std::vector<std::uint8_t> defined;
};

struct CondMeanResult {
    Mat values;  // eval points x columns
    std::vector<std::uint8_t> defined;
};

// Sorts data once, then either windows [z-h, z+h] via binary search (fast) or
// scans all points (naive). Both paths accumulate in ascending data-z order, so
// they agree bitwise whenever the window spans the whole sample.
std::vector<NWComponents> nw_components(const Vec& eval_z, const Vec& data_z, const Vec& y,
                                        double h, const KernelSpec& kernel,
                                        const NWEvalConfig& cfg = {});

// Full-sample Nadaraya-Watson regression of y on z.
NWResult nw_full(const Vec& eval_z, const Vec& data_z, const Vec& y, double h,
                 const KernelSpec& kernel, const NWEvalConfig& cfg = {});

// Subsample estimator with truncated denominator: num / max(den, c_f).
// Always finite; |result| <= max|y| * den/c_f <= C/h.
Vec nw_subsample_truncated(const Vec& eval_z, const Vec& sub_z, const Vec& sub_y, double h,
                           const KernelSpec& kernel, double c_f, const NWEvalConfig& cfg = {});

// Plug-in derivative d/dz of the NW ratio: (A'_y A_1 - A_y A'_1) / A_1^2 with
// A'_c(z) = (1/(m h^2)) sum_j K'((z - z_j)/h) w_j.
NWResult nw_deriv(const Vec& eval_z, const Vec& data_z, const Vec& y, double h,
                  const KernelSpec& kernel, const NWEvalConfig& cfg = {});

// Column-wise NW regression sharing one denominator pass per eval point.
// columns is m x q row-major.
CondMeanResult nw_conditional_mean(const Vec& eval_z, const Vec& data_z, const Mat& columns,
                                   double h, const KernelSpec& kernel,
                                   const NWEvalConfig& cfg = {});

}  // namespace mindex

#endif
