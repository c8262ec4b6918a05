#ifndef MINDEX_RNG_HPP
#define MINDEX_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mindex {

// SplitMix64 step (Steele, Lea, Flood 2014). Also used as the seed-mixing hash.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Fixed 64-bit hash combining a base seed with a stream index. Adding streams
// never perturbs earlier ones.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    splitmix64_next(s);
    return splitmix64_next(s);
}

// Small copyable deterministic generator. Distribution samplers are hand-rolled
// on top of the uniform stream so sequences do not depend on the standard
// library's unspecified algorithms.
class Rng {
public:
    Rng() : state_(0x853c49e6748fea9bULL) {}
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // one warm-up step decorrelates small seeds
        splitmix64_next(state_);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform on [0,1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1), safe for log/tan
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // uniform index in [0, n) via multiply-shift
    std::size_t next_index(std::size_t n) {
        const unsigned __int128 m =
            static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        return static_cast<std::size_t>(m >> 64);
    }

    double normal() {
        const double u1 = next_open01();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double chisq(int df) {
        double s = 0.0;
        for (int i = 0; i < df; ++i) {
            const double z = normal();
            s += z * z;
        }
        return s;
    }

    double cauchy() { return std::tan(3.14159265358979323846 * (next_open01() - 0.5)); }

    double logistic() {
        const double u = next_open01();
        return std::log(u / (1.0 - u));
    }

    double bernoulli_half() { return (next_u64() >> 63) ? 1.0 : 0.0; }

    // Knuth multiplication method; fine for small lambda
    double poisson(double lambda) {
        const double limit = std::exp(-lambda);
        double prod = 1.0;
        long k = 0;
        do {
            ++k;
            prod *= next_open01();
        } while (prod > limit);
        return static_cast<double>(k - 1);
    }

private:
    std::uint64_t state_;
};

}  // namespace mindex

#endif
