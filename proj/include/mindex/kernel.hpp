#ifndef MINDEX_KERNEL_HPP
#define MINDEX_KERNEL_HPP

#include <cstddef>
#include <optional>

#include "mindex/common.hpp"

namespace mindex {

// Compactly supported even polynomial kernel K(u) = q(u)·1(|u|<=1) of order D:
// moments 1..D-1 vanish, moment D does not. poly[j] is the coefficient of
// u^(2j). deriv is the odd polynomial K' on (-1,1): deriv[j] multiplies
// u^(2j+1).
struct KernelSpec {
    int order = 0;
    Vec poly;
    Vec deriv;
};

// K(u); zero outside [-1,1]
double kernel_eval(const KernelSpec& spec, double u);

// K'(u); zero outside, interior one-sided limit at |u| = 1
double kernel_deriv(const KernelSpec& spec, double u);

// Epanechnikov family:
//   D=2: (3/4)(1-u^2)
//   D=4: (15/32)(1-u^2)(3-7u^2)
//   D=6: (525/256)(1-u^2)(1-6u^2+(33/5)u^4)
// The order-6 quartic sign is +33/5; with the flipped sign the kernel cannot
// integrate to one (see verify_moments tests).
KernelSpec make_kernel(int order);

struct MomentReport {
    int order = 0;
    Vec moments;  // integral of u^v K(u) du for v = 0..order
    bool pass = false;
    double tol = 0.0;
};

// Exact polynomial moments on [-1,1] via the closed-form antiderivative.
// pass requires |m0 - 1| < tol, |m_v| < tol for 1 <= v <= D-1, |m_D| > 1e-3.
MomentReport verify_moments(const KernelSpec& spec, double tol);

// v-th moment of the kernel polynomial on [-1,1], exact up to rounding
double kernel_moment(const KernelSpec& spec, int v);

struct BandwidthRule {
    enum class Scale { index_std, fixed };
    double exponent = -0.1;
    Scale scale_mode = Scale::index_std;
    std::optional<double> fixed_value;

    void validate() const;
};

// index_std: h = sample_std(z) * n^exponent (n-1 denominator in the std).
// fixed: h = fixed_value regardless of the data.
double bandwidth(const BandwidthRule& rule, const Vec& index_z, std::size_t n);

double sample_std(const Vec& v);

}  // namespace mindex

#endif
