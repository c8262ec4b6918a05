#include "mindex/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace mindex {

Mat matmul(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw UsageError("matmul: dimension mismatch");
    Mat out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t k = 0; k < x.cols; ++k) {
            const double v = x(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) out(i, j) += v * y(k, j);
        }
    }
    return out;
}

Mat transpose(const Mat& x) {
    Mat out(x.cols, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
    return out;
}

double frobenius_norm(const Mat& x) {
    double s = 0.0;
    for (double v : x.a) s += v * v;
    return std::sqrt(s);
}

LUFactor lu_factor(const Mat& m) {
    if (m.rows != m.cols) throw UsageError("lu_factor: matrix not square");
    const std::size_t n = m.rows;
    LUFactor f;
    f.lu = m;
    f.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

    double max_piv = 0.0, min_piv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(f.lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(f.lu(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) throw SingularMatrixError("lu_factor: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        const double d = f.lu(k, k);
        if (k == 0) {
            max_piv = min_piv = std::abs(d);
        } else {
            max_piv = std::max(max_piv, std::abs(d));
            min_piv = std::min(min_piv, std::abs(d));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = f.lu(i, k) / d;
            f.lu(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
        }
    }
    f.pivot_ratio = (min_piv > 0.0) ? max_piv / min_piv : std::numeric_limits<double>::infinity();
    return f;
}

Vec lu_solve(const LUFactor& f, const Vec& b) {
    const std::size_t n = f.lu.rows;
    if (b.size() != n) throw UsageError("lu_solve: rhs length mismatch");
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * x[j];
        x[ii] = s / f.lu(ii, ii);
    }
    return x;
}

Mat lu_solve(const LUFactor& f, const Mat& b) {
    if (b.rows != f.lu.rows) throw UsageError("lu_solve: rhs rows mismatch");
    Mat out(b.rows, b.cols);
    Vec col(b.rows);
    for (std::size_t j = 0; j < b.cols; ++j) {
        for (std::size_t i = 0; i < b.rows; ++i) col[i] = b(i, j);
        Vec x = lu_solve(f, col);
        for (std::size_t i = 0; i < b.rows; ++i) out(i, j) = x[i];
    }
    return out;
}

Vec solve(const Mat& a, const Vec& b) { return lu_solve(lu_factor(a), b); }

}  // namespace mindex
