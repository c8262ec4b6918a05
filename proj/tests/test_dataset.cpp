#include "doctest.h"

#include <cmath>
#include <limits>

#include "mindex/dataset.hpp"
#include "mindex/rng.hpp"

using namespace mindex;

namespace {

Dataset make_data(Vec x0, Vec x_rowmajor, std::vector<std::uint8_t> y, std::size_t p) {
    Dataset d;
    d.x0 = std::move(x0);
    d.x = std::move(x_rowmajor);
    d.y = std::move(y);
    d.n = d.x0.size();
    d.p = p;
    return d;
}

}  // namespace

TEST_CASE("compute_index hand examples") {
    SUBCASE("zero covariates") {
        const Dataset d = make_data({1, 2}, {0, 0}, {0, 1}, 1);
        const IndexValues iv = compute_index(d, {5});
        CHECK(iv.z[0] == 1.0);
        CHECK(iv.z[1] == 2.0);
    }
    SUBCASE("zero x0") {
        const Dataset d = make_data({0, 0}, {1, 2}, {0, 1}, 1);
        const IndexValues iv = compute_index(d, {3});
        CHECK(iv.z[0] == 3.0);
        CHECK(iv.z[1] == 6.0);
    }
    SUBCASE("hand dot product") {
        const Dataset d = make_data({1, 0}, {2, 3, 0, 0}, {0, 1}, 2);
        const IndexValues iv = compute_index(d, {0.5, -1});
        CHECK(iv.z[0] == doctest::Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("dimension mismatch") {
        const Dataset d = make_data({1, 2}, {0, 0}, {0, 1}, 1);
        CHECK_THROWS_AS(compute_index(d, {1, 2}), UsageError);
    }
}

TEST_CASE("compute_index is linear in beta") {
    Rng rng(7);
    Dataset d;
    d.n = 40;
    d.p = 3;
    d.x0.resize(d.n);
    d.x.resize(d.n * d.p);
    d.y.assign(d.n, 0);
    d.y[0] = 1;
    for (auto& v : d.x0) v = rng.normal();
    for (auto& v : d.x) v = rng.normal();
    Vec b1(d.p), b2(d.p);
    for (auto& v : b1) v = rng.normal();
    for (auto& v : b2) v = rng.normal();

    const double a = 2.0, b = -3.0;
    Vec combo(d.p);
    for (std::size_t j = 0; j < d.p; ++j) combo[j] = a * b1[j] + b * b2[j];
    const Vec z1 = compute_index(d, b1).z;
    const Vec z2 = compute_index(d, b2).z;
    const Vec zc = compute_index(d, combo).z;
    for (std::size_t i = 0; i < d.n; ++i) {
        const double expected = a * z1[i] + b * z2[i] + (1.0 - a - b) * d.x0[i];
        CHECK(zc[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("trimming masks") {
    SUBCASE("none keeps everything") {
        const Dataset d = make_data({10, -20}, {100, -5}, {0, 1}, 1);
        const auto mask = trimming_mask(d, TrimmingSpec{});
        CHECK(mask == std::vector<std::uint8_t>{1, 1});
    }
    SUBCASE("box with phi 0.5") {
        const Dataset d = make_data({0.4, 0.9}, {0, 0}, {0, 1}, 1);
        TrimmingSpec spec;
        spec.mode = TrimmingSpec::Mode::box;
        spec.phi = 0.5;
        const auto mask = trimming_mask(d, spec);
        CHECK(mask == std::vector<std::uint8_t>{1, 0});
    }
    SUBCASE("box with phi to 0 trims only beyond one") {
        const Dataset d = make_data({0.99, 1.01, -1.0}, {0.5, 0.5, 0.5}, {0, 1, 0}, 1);
        TrimmingSpec spec;
        spec.mode = TrimmingSpec::Mode::box;
        spec.phi = 0.0;
        const auto mask = trimming_mask(d, spec);
        CHECK(mask == std::vector<std::uint8_t>{1, 0, 1});
    }
    SUBCASE("quantile band on an even grid") {
        Dataset d;
        d.n = 10;
        d.p = 1;
        d.x0.resize(10);
        d.x.assign(10, 0.0);
        d.y.assign(10, 0);
        d.y[0] = 1;
        for (std::size_t i = 0; i < 10; ++i) d.x0[i] = static_cast<double>(i);
        TrimmingSpec spec;
        spec.mode = TrimmingSpec::Mode::quantile;
        spec.lo = 0.1;
        spec.hi = 0.9;
        const auto mask = trimming_mask(d, spec);
        int kept = 0;
        for (auto m : mask) kept += m;
        CHECK(kept == 8);
        CHECK(mask[0] == 0);
        CHECK(mask[9] == 0);
    }
    SUBCASE("idempotent") {
        Rng rng(3);
        Dataset d;
        d.n = 50;
        d.p = 2;
        d.x0.resize(d.n);
        d.x.resize(d.n * d.p);
        d.y.assign(d.n, 0);
        d.y[1] = 1;
        for (auto& v : d.x0) v = rng.normal();
        for (auto& v : d.x) v = rng.normal();
        TrimmingSpec spec;
        spec.mode = TrimmingSpec::Mode::quantile;
        spec.lo = 0.2;
        spec.hi = 0.8;
        CHECK(trimming_mask(d, spec) == trimming_mask(d, spec));
    }
    SUBCASE("invalid specs") {
        TrimmingSpec spec;
        spec.mode = TrimmingSpec::Mode::box;
        spec.phi = 1.0;
        CHECK_THROWS_AS(spec.validate(), UsageError);
        spec.mode = TrimmingSpec::Mode::quantile;
        spec.lo = 0.9;
        spec.hi = 0.1;
        CHECK_THROWS_AS(spec.validate(), UsageError);
    }
}

TEST_CASE("dataset validation") {
    Dataset d = make_data({1, 2}, {0, 0}, {0, 1}, 1);
    CHECK_NOTHROW(d.validate());
    SUBCASE("non-binary y") {
        d.y[0] = 2;
        CHECK_THROWS_AS(d.validate(), UsageError);
    }
    SUBCASE("non-finite covariate") {
        d.x[0] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(d.validate(), UsageError);
    }
    SUBCASE("too small") {
        d.n = 1;
        d.x0.resize(1);
        d.x.resize(1);
        d.y.resize(1);
        CHECK_THROWS_AS(d.validate(), UsageError);
    }
}
