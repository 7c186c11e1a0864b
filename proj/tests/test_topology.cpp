#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fhnet/errors.hpp"
#include "fhnet/topology.hpp"

using namespace fhnet;

TEST_CASE("path loss") {
    CHECK(path_loss(1.0, 1.0, 3.0) == 1.0);
    CHECK(path_loss(2.0, 1.0, 3.0) == 0.125);
    CHECK(path_loss(4.0, 1.0, 3.0) == 0.015625);
    CHECK_THROWS_AS(path_loss(0.5, 1.0, 3.0), DomainError);
    double prev = path_loss(1.0, 1.0, 3.5);
    for (double d = 1.1; d < 10.0; d += 0.1) {
        const double now = path_loss(d, 1.0, 3.5);
        CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("annulus sampling") {
    const AnnulusRegion region{0.25, 2.0};
    RandomStream rng(11, 1);
    CHECK(sample_annulus(region, 0, rng).empty());

    SUBCASE("support and mean radius") {
        const std::size_t n = 100000;
        const auto pts = sample_annulus(region, n, rng);
        REQUIRE(pts.size() == n);
        double sum = 0.0;
        for (const auto& p : pts) {
            REQUIRE(p.r >= 0.25);
            REQUIRE(p.r <= 2.0);
            REQUIRE(p.theta >= 0.0);
            REQUIRE(p.theta < 2.0 * M_PI);
            sum += p.r;
        }
        // Density 2r / (b^2 - a^2) on [a, b]: E[r] and E[r^2] in closed form.
        const double a = 0.25, b = 2.0, span = b * b - a * a;
        const double mean = 2.0 * (b * b * b - a * a * a) / (3.0 * span);
        const double second = (b * b * b * b - a * a * a * a) / (2.0 * span);
        const double sd = std::sqrt(second - mean * mean);
        CHECK(mean == doctest::Approx(1.351852).epsilon(1e-6));
        CHECK(std::fabs(sum / n - mean) < 3.0 * sd / std::sqrt(double(n)));
    }

    SUBCASE("Kolmogorov-Smirnov against the radius CDF") {
        const std::size_t n = 10000;
        auto pts = sample_annulus(region, n, rng);
        std::vector<double> r;
        for (const auto& p : pts) {
            r.push_back(p.r);
        }
        std::sort(r.begin(), r.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = (r[i] * r[i] - 0.0625) / (4.0 - 0.0625);
            d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
        }
        // Asymptotic critical value at the 1% level.
        CHECK(d < 1.628 / std::sqrt(double(n)));
    }
}

TEST_CASE("realize_network without shadowing") {
    ChannelConfig cfg;
    cfg.alpha = 3.0;
    cfg.d0 = 0.25;
    RandomStream rng(1, 1);
    const std::vector<PolarPosition> pos{{2.0, 0.3}};
    const auto net = realize_network(pos, cfg, 1.0, rng);
    CHECK(net.omega0 == 1.0);
    REQUIRE(net.omegas.size() == 1);
    CHECK(net.omegas[0] == 0.125);

    // Deterministic in the positions: a different stream changes nothing.
    RandomStream other(99, 7);
    const auto again = realize_network(pos, cfg, 1.0, other);
    CHECK(again.omegas == net.omegas);

    const std::vector<PolarPosition> inside{{0.1, 0.0}};
    CHECK_THROWS_AS(realize_network(inside, cfg, 1.0, rng), DomainError);
    CHECK_THROWS_AS(realize_network(pos, cfg, 0.1, rng), DomainError);
}

TEST_CASE("shadowing statistics") {
    ChannelConfig cfg;
    cfg.sigma_s = 8.0;
    const std::size_t n = 20000;
    std::vector<PolarPosition> pos(n, PolarPosition{1.0, 0.0});
    RandomStream rng(5, 2);
    const auto net = realize_network(pos, cfg, 1.0, rng);
    // At unit distance Omega_i = 10^(xi/10).
    double s = 0.0, s2 = 0.0;
    for (double w : net.omegas) {
        const double xi = 10.0 * std::log10(w);
        s += xi;
        s2 += xi * xi;
    }
    const double mean = s / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    CHECK(std::fabs(mean) < 3.0 * 8.0 / std::sqrt(double(n)));
    CHECK(std::fabs(sd - 8.0) < 3.0 * 8.0 / std::sqrt(2.0 * n));
}

TEST_CASE("power ratios scale interferers only") {
    ChannelConfig cfg;
    cfg.sigma_s = 6.0;
    const std::vector<PolarPosition> pos{{0.5, 0.0}, {1.5, 1.0}, {1.9, 2.0}};
    RandomStream r1(8, 3);
    const auto base = realize_network(pos, cfg, 1.0, r1);
    cfg.power_ratios = {2.0};
    RandomStream r2(8, 3);
    const auto doubled = realize_network(pos, cfg, 1.0, r2);
    CHECK(doubled.omega0 == base.omega0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(doubled.omegas[i] == doctest::Approx(2.0 * base.omegas[i]).epsilon(1e-15));
    }
}

TEST_CASE("unshadowed source keeps interferer draws") {
    TopologySpec spec;
    spec.interferers = 10;
    spec.channel.sigma_s = 8.0;
    const auto shadowed = draw_topology(spec, 4, 9);
    spec.channel.shadow_source = false;
    const auto plain = draw_topology(spec, 4, 9);
    CHECK(plain.omega0 == 1.0);
    CHECK(shadowed.omega0 != 1.0);
    CHECK(plain.omegas == shadowed.omegas);
}

TEST_CASE("draw_topology is a pure function of (seed, stream)") {
    TopologySpec spec;
    spec.interferers = 30;
    spec.channel.sigma_s = 8.0;
    const auto a = draw_topology(spec, 42, 17);
    const auto b = draw_topology(spec, 42, 17);
    const auto c = draw_topology(spec, 42, 18);
    CHECK(a.omega0 == b.omega0);
    CHECK(a.omegas == b.omegas);
    CHECK(a.omegas != c.omegas);
    CHECK(a.interferers() == 30);
}

TEST_CASE("config validation names the field") {
    AnnulusRegion bad{2.0, 1.0};
    try {
        bad.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "region.r_net");
    }
    ChannelConfig ch;
    ch.alpha = 2.0;
    try {
        ch.validate(3);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "channel.alpha");
    }
    ch.alpha = 3.0;
    ch.m_i = {1.0, 2.0};
    CHECK_THROWS_AS(ch.validate(3), ConfigError);
    CHECK_NOTHROW(ch.validate(2));
    ch.m0 = 0;
    CHECK_THROWS_AS(ch.validate(2), ConfigError);
}
