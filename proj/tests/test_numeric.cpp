#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fhnet/numeric.hpp"

using namespace fhnet;

TEST_CASE("pairwise_sum agrees with long double accumulation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {0u, 1u, 31u, 32u, 33u, 1000u, 4097u}) {
        std::vector<double> v(n);
        long double ref = 0.0L;
        for (auto& x : v) {
            x = u(rng);
            ref += x;
        }
        CHECK(pairwise_sum(v) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    }
}

TEST_CASE("isotonic fit pools adjacent violators") {
    const std::vector<double> in{1.0, 3.0, 2.0, 4.0, 0.0};
    const auto out = isotonic_nondecreasing(in);
    // {3,2} pool to 2.5; then {4,0} pool to 2, which violates 2.5 and pools to (3+2+4+0)/4.
    REQUIRE(out.size() == 5);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == doctest::Approx(2.25));
    CHECK(out[4] == doctest::Approx(2.25));
    for (std::size_t i = 1; i < out.size(); ++i) {
        CHECK(out[i] >= out[i - 1]);
    }
    // Already sorted input is returned unchanged.
    const std::vector<double> sorted{0.0, 0.1, 0.1, 0.7};
    CHECK(isotonic_nondecreasing(sorted) == sorted);
}

TEST_CASE("log_bessel_i0 matches the standard library below overflow") {
    for (double x : {0.0, 1e-3, 0.5, 2.0, 10.0, 100.0, 650.0}) {
        CHECK(log_bessel_i0(x) == doctest::Approx(std::log(std::cyl_bessel_i(0.0, x))).epsilon(1e-12));
    }
    // Continuity across the switch to the asymptotic form; log I0 grows like x there.
    const double below = log_bessel_i0(699.999);
    const double above = log_bessel_i0(700.001);
    CHECK(above - below == doctest::Approx(0.002).epsilon(1e-3));
    CHECK(std::isfinite(log_bessel_i0(1e6)));
}

TEST_CASE("log_sum_exp is stable for large arguments") {
    const std::vector<double> v{1000.0, 1000.0};
    CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
    const std::vector<double> w{-2.0, 0.5, 3.0};
    CHECK(log_sum_exp(w) == doctest::Approx(std::log(std::exp(-2.0) + std::exp(0.5) + std::exp(3.0))));
}

TEST_CASE("make_grid snaps to round values") {
    const auto g = make_grid(0.90, 0.99, 0.01);
    REQUIRE(g.size() == 10);
    CHECK(g.front() == 0.90);
    CHECK(g[6] == 0.96);
    CHECK(g.back() == 0.99);
    const auto h = make_grid(0.01, 1.0, 0.01);
    CHECK(h.size() == 100);
    CHECK(h[79] == 0.8);
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("fnv1a known vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}
