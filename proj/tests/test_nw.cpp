#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mindex/nw.hpp"
#include "mindex/rng.hpp"

using namespace mindex;

namespace {

double logistic_cdf(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("nw_full hand examples") {
    const KernelSpec k2 = make_kernel(2);
    SUBCASE("constant y returns the constant") {
        Rng rng(1);
        Vec z(30), y(30, 3.5);
        for (auto& v : z) v = rng.normal();
        const NWResult res = nw_full(z, z, y, 0.7, k2);
        for (std::size_t i = 0; i < z.size(); ++i) {
            REQUIRE(res.defined[i] == 1);
            CHECK(res.value[i] == doctest::Approx(3.5).epsilon(1e-12));
        }
    }
    SUBCASE("single data point") {
        const NWResult res = nw_full({0.0}, {0.0}, {1.0}, 1.0, k2);
        REQUIRE(res.defined[0] == 1);
        CHECK(res.value[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("two symmetric points") {
        const NWResult res = nw_full({0.0}, {-0.5, 0.5}, {0.0, 1.0}, 1.0, k2);
        REQUIRE(res.defined[0] == 1);
        CHECK(res.value[0] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("eval point outside every window is flagged") {
        const NWResult res = nw_full({10.0}, {0.0}, {1.0}, 1.0, k2);
        CHECK(res.defined[0] == 0);
        CHECK(res.value[0] == 0.0);
    }
    SUBCASE("bad bandwidth") {
        CHECK_THROWS_AS(nw_full({0.0}, {0.0}, {1.0}, 0.0, k2), UsageError);
        CHECK_THROWS_AS(nw_full({0.0}, {0.0}, {1.0}, -1.0, k2), UsageError);
    }
}

TEST_CASE("nw_subsample_truncated") {
    const KernelSpec k2 = make_kernel(2);
    SUBCASE("inactive floor reproduces nw_full bitwise") {
        Rng rng(2);
        Vec z(50), y(50);
        for (auto& v : z) v = rng.normal();
        for (auto& v : y) v = rng.next_double();
        const double h = 0.8;
        const auto comps = nw_components(z, z, y, h, k2);
        double min_den = 1e300;
        for (const auto& c : comps) min_den = std::min(min_den, c.den);
        REQUIRE(min_den > 0.0);
        const NWResult full = nw_full(z, z, y, h, k2);
        const Vec trunc = nw_subsample_truncated(z, z, y, h, k2, 0.5 * min_den);
        for (std::size_t i = 0; i < z.size(); ++i) CHECK(trunc[i] == full.value[i]);
    }
    SUBCASE("far point gives zero, not NaN") {
        const Vec out = nw_subsample_truncated({5.0}, {0.0}, {1.0}, 1.0, k2, 0.01);
        CHECK(out[0] == 0.0);
    }
    SUBCASE("active truncation") {
        // single point at distance 0: den = K(0)/(1*1) = 0.75 < c_f = 2
        const Vec out = nw_subsample_truncated({0.0}, {0.0}, {1.0}, 1.0, k2, 2.0);
        CHECK(out[0] == doctest::Approx(0.375).epsilon(1e-15));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(nw_subsample_truncated({0.0}, {}, {}, 1.0, k2, 0.1), UsageError);
        CHECK_THROWS_AS(nw_subsample_truncated({0.0}, {0.0}, {1.0}, 1.0, k2, 0.0), UsageError);
    }
}

TEST_CASE("nw_deriv") {
    const KernelSpec k2 = make_kernel(2);
    SUBCASE("constant y has zero derivative") {
        Rng rng(3);
        Vec z(40), y(40, 2.0);
        for (auto& v : z) v = rng.normal();
        const NWResult res = nw_deriv(z, z, y, 0.6, k2);
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (!res.defined[i]) continue;
            CHECK(std::abs(res.value[i]) < 1e-10);
        }
    }
    SUBCASE("matches a central finite difference of nw_full") {
        const Vec dataz = {-0.4, 0.4};
        const Vec y = {0.0, 1.0};
        const double h = 1.0;
        const double eps = 1e-6;
        const NWResult d = nw_deriv({0.0}, dataz, y, h, k2);
        const NWResult up = nw_full({eps}, dataz, y, h, k2);
        const NWResult dn = nw_full({-eps}, dataz, y, h, k2);
        REQUIRE(d.defined[0] == 1);
        const double fd = (up.value[0] - dn.value[0]) / (2 * eps);
        CHECK(std::abs(d.value[0] - fd) < 1e-5);
    }
    SUBCASE("linear function has unit slope") {
        Vec z(2001);
        for (int i = 0; i <= 2000; ++i) z[static_cast<std::size_t>(i)] = -1.0 + 0.001 * i;
        const Vec y = z;
        const NWResult d = nw_deriv({0.0, 0.2, -0.3}, z, y, 0.05, k2);
        for (std::size_t g = 0; g < 3; ++g) {
            REQUIRE(d.defined[g] == 1);
            CHECK(d.value[g] == doctest::Approx(1.0).epsilon(0.05));
        }
    }
}

TEST_CASE("nw_conditional_mean") {
    const KernelSpec k2 = make_kernel(2);
    SUBCASE("constant column") {
        Rng rng(4);
        Vec z(30);
        for (auto& v : z) v = rng.normal();
        Mat cols(30, 2);
        for (std::size_t i = 0; i < 30; ++i) {
            cols(i, 0) = 7.0;
            cols(i, 1) = -1.5;
        }
        const CondMeanResult cm = nw_conditional_mean(z, z, cols, 0.5, k2);
        for (std::size_t i = 0; i < 30; ++i) {
            if (!cm.defined[i]) continue;
            CHECK(cm.values(i, 0) == doctest::Approx(7.0).epsilon(1e-12));
            CHECK(cm.values(i, 1) == doctest::Approx(-1.5).epsilon(1e-12));
        }
    }
    SUBCASE("identity column on a dense grid") {
        Vec z(4001);
        for (int i = 0; i <= 4000; ++i) z[static_cast<std::size_t>(i)] = -2.0 + 0.001 * i;
        Mat cols(z.size(), 1);
        for (std::size_t i = 0; i < z.size(); ++i) cols(i, 0) = z[i];
        const CondMeanResult cm = nw_conditional_mean({0.25}, z, cols, 0.08, k2);
        REQUIRE(cm.defined[0] == 1);
        CHECK(cm.values(0, 0) == doctest::Approx(0.25).epsilon(0.05));
    }
    SUBCASE("zero columns is fine") {
        const CondMeanResult cm = nw_conditional_mean({0.0}, {0.0, 0.1}, Mat(2, 0), 1.0, k2);
        CHECK(cm.values.cols == 0);
        CHECK(cm.defined[0] == 1);
    }
}

TEST_CASE("fast window path equals the naive quadratic loop") {
    Rng rng(5);
    for (int order : {2, 6}) {
        const KernelSpec spec = make_kernel(order);
        for (int trial = 0; trial < 12; ++trial) {
            const std::size_t m = 20 + rng.next_index(300);
            const std::size_t ne = 1 + rng.next_index(80);
            Vec z(m), y(m), ev(ne);
            for (auto& v : z) v = rng.normal() * (0.5 + rng.next_double());
            for (auto& v : y) v = rng.next_double();
            for (auto& v : ev) v = rng.normal();
            const double h = 0.05 + rng.next_double();
            const auto fast = nw_components(ev, z, y, h, spec, {NWPath::fast, 1});
            const auto naive = nw_components(ev, z, y, h, spec, {NWPath::naive, 1});
            for (std::size_t e = 0; e < ne; ++e) {
                const double dden = std::abs(fast[e].den - naive[e].den);
                const double dnum = std::abs(fast[e].num - naive[e].num);
                CHECK(dden <= 1e-10 * std::max(1.0, std::abs(naive[e].den)));
                CHECK(dnum <= 1e-10 * std::max(1.0, std::abs(naive[e].num)));
            }
        }
    }
}

TEST_CASE("fast path is bitwise equal to naive when one window spans the data") {
    Rng rng(6);
    Vec z(200), y(200), ev(40);
    for (auto& v : z) v = rng.next_double();  // all in [0,1)
    for (auto& v : y) v = rng.next_double();
    for (auto& v : ev) v = rng.next_double();
    const double h = 5.0;  // window covers everything
    const auto fast = nw_components(ev, z, y, h, make_kernel(6), {NWPath::fast, 1});
    const auto naive = nw_components(ev, z, y, h, make_kernel(6), {NWPath::naive, 1});
    for (std::size_t e = 0; e < ev.size(); ++e) {
        CHECK(fast[e].den == naive[e].den);
        CHECK(fast[e].num == naive[e].num);
    }
}

TEST_CASE("threaded evaluation is bitwise deterministic") {
    Rng rng(7);
    Vec z(500), y(500), ev(130);
    for (auto& v : z) v = rng.normal();
    for (auto& v : y) v = rng.next_double();
    for (auto& v : ev) v = rng.normal();
    const auto one = nw_components(ev, z, y, 0.4, make_kernel(6), {NWPath::fast, 1});
    const auto four = nw_components(ev, z, y, 0.4, make_kernel(6), {NWPath::fast, 4});
    for (std::size_t e = 0; e < ev.size(); ++e) {
        CHECK(one[e].den == four[e].den);
        CHECK(one[e].num == four[e].num);
    }
}

TEST_CASE("order-2 estimates stay inside the y range") {
    Rng rng(8);
    Vec z(300), y(300);
    for (auto& v : z) v = rng.normal();
    for (auto& v : y) v = 2.0 * rng.next_double() - 0.5;
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    const NWResult res = nw_full(z, z, y, 0.3, make_kernel(2));
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!res.defined[i]) continue;
        CHECK(res.value[i] >= lo - 1e-12);
        CHECK(res.value[i] <= hi + 1e-12);
    }
}

TEST_CASE("shift equivariance") {
    Rng rng(9);
    Vec z(200), y(200), ev(50);
    for (auto& v : z) v = rng.normal();
    for (auto& v : y) v = rng.next_double();
    for (auto& v : ev) v = rng.normal();
    const NWResult base = nw_full(ev, z, y, 0.5, make_kernel(6));
    const double c = 10.0;
    Vec zs = z, evs = ev;
    for (auto& v : zs) v += c;
    for (auto& v : evs) v += c;
    const NWResult shifted = nw_full(evs, zs, y, 0.5, make_kernel(6));
    for (std::size_t e = 0; e < ev.size(); ++e) {
        REQUIRE(base.defined[e] == shifted.defined[e]);
        if (!base.defined[e]) continue;
        CHECK(shifted.value[e] == doctest::Approx(base.value[e]).epsilon(1e-9));
    }
}

TEST_CASE("smaller bandwidth improves the fit on a smooth target") {
    // y = Phi(z) + bounded noise on uniform z; sup error on the central 80%
    // grid shrinks as h goes 0.5 -> 0.1
    const std::size_t n = 10000;
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(1000 + seed);
        Vec z(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = -3.0 + 6.0 * rng.next_double();
            y[i] = phi_cdf(z[i]) + 0.2 * (rng.next_double() - 0.5);
        }
        Vec grid;
        for (int g = 0; g <= 100; ++g) grid.push_back(-2.4 + 4.8 * g / 100.0);
        auto sup_err = [&](double h) {
            const NWResult fit = nw_full(grid, z, y, h, make_kernel(2));
            double worst = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                REQUIRE(fit.defined[g] == 1);
                worst = std::max(worst, std::abs(fit.value[g] - phi_cdf(grid[g])));
            }
            return worst;
        };
        if (sup_err(0.5) > sup_err(0.1)) ++improved;
    }
    CHECK(improved >= 4);
}

TEST_CASE("nw consistency on the logistic link") {
    // binary y with P(y=1|z) = logistic(z): the regression recovers the link
    const std::size_t n = 20000;
    Rng rng(11);
    Vec z(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = rng.normal() * 1.5;
        y[i] = rng.next_double() < logistic_cdf(z[i]) ? 1.0 : 0.0;
    }
    Vec grid;
    for (int g = 0; g <= 60; ++g) grid.push_back(-1.8 + 3.6 * g / 60.0);
    const NWResult fit = nw_full(grid, z, y, 0.25, make_kernel(2));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        REQUIRE(fit.defined[g] == 1);
        CHECK(std::abs(fit.value[g] - logistic_cdf(grid[g])) < 0.05);
    }
}
