#ifndef MINDEX_LINALG_HPP
#define MINDEX_LINALG_HPP

#include <cstddef>

#include "mindex/common.hpp"

namespace mindex {

// Minimal row-major dense matrix for the small (p x p) systems in this
// project. Not meant as a general linear-algebra layer.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

Mat matmul(const Mat& x, const Mat& y);
Mat transpose(const Mat& x);
double frobenius_norm(const Mat& x);

// LU decomposition with partial pivoting (in place).
struct LUFactor {
    Mat lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    // ratio of largest to smallest |U_kk|; crude conditioning proxy
    double pivot_ratio = 0.0;
};

// Throws SingularMatrixError on an exactly zero pivot.
LUFactor lu_factor(const Mat& m);

Vec lu_solve(const LUFactor& f, const Vec& b);
Mat lu_solve(const LUFactor& f, const Mat& b);

// Convenience: solve a*x = b once.
Vec solve(const Mat& a, const Vec& b);

}  // namespace mindex

#endif
