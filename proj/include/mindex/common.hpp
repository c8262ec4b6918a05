#ifndef MINDEX_COMMON_HPP
#define MINDEX_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mindex {

using Vec = std::vector<double>;

// Caller errors: bad dimensions, invalid options, malformed input. CLI exit 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failures: divergence, singularity, degenerate data. CLI exit 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergenceError : NumericError {
    long iteration = 0;
    double beta_norm = 0.0;
    DivergenceError(const std::string& msg, long k, double norm)
        : NumericError(msg), iteration(k), beta_norm(norm) {}
};

struct SingularMatrixError : NumericError {
    using NumericError::NumericError;
};

struct DegenerateDataError : NumericError {
    using NumericError::NumericError;
};

struct InitializationError : NumericError {
    using NumericError::NumericError;
};

// Runs fn(i) for i in [0, count). Each index writes only its own output slots,
// so the result is independent of the partitioning.
template <typename F>
void parallel_for(std::size_t count, int threads, F&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (count + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace mindex

#endif
