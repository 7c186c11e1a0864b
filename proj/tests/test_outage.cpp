#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fhnet/errors.hpp"
#include "fhnet/outage.hpp"

using namespace fhnet;

namespace {

LinkParams make_link(int L, double psi, int m0, std::vector<double> m_i, double snr) {
    LinkParams link;
    link.probs = collision_probabilities(L, 1.0);
    link.splatter = SplatterModel::from_psi(psi);
    link.m0 = m0;
    link.m_i = std::move(m_i);
    link.snr = snr;
    return link;
}

NetworkRealization random_network(std::mt19937_64& rng, int M) {
    std::uniform_real_distribution<double> r(0.25, 2.0);
    std::normal_distribution<double> xi(0.0, 4.0);
    NetworkRealization net;
    net.omega0 = std::pow(10.0, xi(rng) / 10.0);
    for (int i = 0; i < M; ++i) {
        net.omegas.push_back(std::pow(10.0, xi(rng) / 10.0) * std::pow(r(rng), -3.0));
    }
    return net;
}

// Direct evaluation of the per-interferer coefficient in long double.
long double g_reference(int ell, long double omega, long double m, long double beta0, const CollisionProbs& p,
                        const SplatterModel& s) {
    auto phi = [&](long double x) {
        return std::pow(x * omega / m, (long double)ell) * std::pow(x * beta0 * omega / m + 1.0L, -(m + ell));
    };
    const long double c = std::tgamma((long double)ell + m) / (std::tgamma((long double)ell + 1) * std::tgamma(m));
    return (ell == 0 ? (long double)p.p_n : 0.0L) + c * (p.p_c * phi(s.psi) + p.p_a * phi(s.k_s));
}

// Sum over all (l_1..l_M) >= 0 with sum t of prod G_{l_i}(Omega_i).
double h_brute(const OutageContext& ctx, int t) {
    const auto& om = ctx.realization.omegas;
    const double b0 = ctx.beta0();
    std::function<double(std::size_t, int)> rec = [&](std::size_t i, int left) -> double {
        if (i == om.size()) {
            return left == 0 ? 1.0 : 0.0;
        }
        double s = 0.0;
        for (int l = 0; l <= left; ++l) {
            s += g_coefficient(l, om[i], ctx.link.interferer_m(i), b0, ctx.link.probs, ctx.link.splatter) *
                 rec(i + 1, left - l);
        }
        return s;
    };
    return rec(0, t);
}

// Success probability written as a double sum over (s, t). `printed` puts
// SNR^t in the denominator; otherwise SNR^t multiplies H_t.
double success_double_sum(const OutageContext& ctx, bool printed) {
    const int m0 = ctx.link.m0;
    const auto h = h_coefficients(ctx, m0 - 1);
    const double b0 = ctx.beta0();
    const double snr = ctx.link.snr;
    double total = 0.0;
    for (int s = 0; s < m0; ++s) {
        double inner = 0.0;
        for (int t = 0; t <= s; ++t) {
            const double snr_t = printed ? std::pow(snr, -t) : std::pow(snr, t);
            inner += snr_t * h[t] / std::tgamma(s - t + 1.0);
        }
        total += std::pow(b0 / snr, s) * inner;
    }
    return std::exp(-b0 / snr) * total;
}

}  // namespace

TEST_CASE("g coefficient") {
    const auto probs = collision_probabilities(200, 1.0);
    const auto spl = SplatterModel::from_psi(0.96);
    CHECK(g_coefficient(0, 0.7, 1.5, 0.0, probs, spl) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g_coefficient(1, 0.0, 1.0, 2.0, probs, spl) == 0.0);
    const double ref = static_cast<double>(g_reference(2, 0.125L, 1.0L, 1.0L, probs, spl));
    CHECK(g_coefficient(2, 0.125, 1.0, 1.0, probs, spl) == doctest::Approx(ref).epsilon(1e-13));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int i = 0; i < 200; ++i) {
        const int ell = i % 6;
        const double om = u(rng), m = u(rng), b0 = u(rng);
        const double g = g_coefficient(ell, om, m, b0, probs, spl);
        CHECK(g >= 0.0);
        CHECK(g == doctest::Approx(static_cast<double>(g_reference(ell, om, m, b0, probs, spl))).epsilon(1e-11));
    }
}

TEST_CASE("h coefficients equal brute-force composition sums") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> Lpick(0, 2);
    const int Ls[] = {2, 50, 200};
    for (int draw = 0; draw < 50; ++draw) {
        for (int M = 0; M <= 5; ++M) {
            const int t_max = 4;
            std::uniform_real_distribution<double> mu(0.5, 4.0);
            std::vector<double> m_i;
            for (int i = 0; i < M; ++i) {
                m_i.push_back(mu(rng));
            }
            if (m_i.empty()) {
                m_i.push_back(1.0);
            }
            OutageContext ctx{random_network(rng, M), make_link(Ls[Lpick(rng)], 0.96, t_max + 1, m_i, 10.0), 1.3};
            const auto h = h_coefficients(ctx, t_max);
            REQUIRE(h.size() == 5);
            for (int t = 0; t <= t_max; ++t) {
                const double ref = h_brute(ctx, t);
                CHECK(std::fabs(h[t] - ref) <= 1e-10 * std::fabs(ref) + 1e-300);
            }
        }
    }
}

TEST_CASE("h coefficients trivial cases") {
    NetworkRealization empty;
    OutageContext ctx{empty, make_link(10, 0.96, 3, {1.0}, 10.0), 1.0};
    const auto h = h_coefficients(ctx, 2);
    CHECK(h[0] == 1.0);
    CHECK(h[1] == 0.0);
    CHECK(h[2] == 0.0);

    std::mt19937_64 rng(4);
    OutageContext ctx2{random_network(rng, 6), make_link(10, 0.96, 1, {2.0}, 10.0), 0.8};
    double prod = 1.0;
    for (double om : ctx2.realization.omegas) {
        prod *= g_coefficient(0, om, 2.0, ctx2.beta0(), ctx2.link.probs, ctx2.link.splatter);
    }
    CHECK(h_coefficients(ctx2, 0)[0] == doctest::Approx(prod).epsilon(1e-14));
}

TEST_CASE("analytic single-link cases") {
    NetworkRealization net;
    OutageContext ctx{net, make_link(200, 0.96, 1, {1.0}, 10.0), 0.96 * 10.0 * std::log(10.0 / 9.0)};
    CHECK(conditional_outage(ctx) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(success_probability(ctx) == doctest::Approx(std::exp(-ctx.beta0() / 10.0)).epsilon(1e-14));
    ctx.beta = 1.01146;
    CHECK(conditional_outage(ctx) == doctest::Approx(0.1).epsilon(1e-4));

    // m0 = 3: P[Gamma(3, 1/3) * psi * Omega0 <= beta / SNR] via the Erlang CDF.
    OutageContext c3{net, make_link(200, 0.9, 3, {1.0}, 5.0), 0.7};
    const double x = 3.0 * 0.7 / (0.9 * 5.0);
    CHECK(conditional_outage(c3) == doctest::Approx(1.0 - std::exp(-x) * (1.0 + x + x * x / 2.0)).epsilon(1e-13));
}

TEST_CASE("limits in beta") {
    std::mt19937_64 rng(8);
    OutageContext ctx{random_network(rng, 5), make_link(50, 0.96, 3, {1.0}, 10.0), 0.0};
    CHECK(success_probability(ctx) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(conditional_outage(ctx) == doctest::Approx(0.0).epsilon(1e-14));
    ctx.beta = 1e12;
    CHECK(conditional_outage(ctx) == doctest::Approx(1.0).epsilon(1e-12));
    ctx.beta = INFINITY;
    CHECK(conditional_outage(ctx) == 1.0);
}

TEST_CASE("double-sum form: SNR^t multiplies H_t") {
    std::mt19937_64 rng(10);
    for (int i = 0; i < 40; ++i) {
        const int m0 = 1 + i % 4;
        OutageContext ctx{random_network(rng, i % 7), make_link(50, 0.96, m0, {1.0}, 10.0), 0.5 + 0.1 * i};
        CHECK(success_probability_unclamped(ctx) == doctest::Approx(success_double_sum(ctx, false)).epsilon(1e-11));
    }
}

TEST_CASE("Monte Carlo oracle separates the two SNR placements") {
    // With interferers and m0 >= 2 the placements differ; only one agrees with simulation.
    std::mt19937_64 rng(12);
    NetworkRealization net;
    net.omega0 = 1.0;
    net.omegas = {0.5, 0.2, 0.9};
    OutageContext ctx{net, make_link(2, 0.96, 3, {1.0}, 10.0), 1.0};
    const auto mc = monte_carlo_outage(ctx, 400000, {21, 1});
    const double good = 1.0 - success_double_sum(ctx, false);
    const double printed = 1.0 - success_double_sum(ctx, true);
    CHECK(std::fabs(conditional_outage(ctx) - mc.estimate) < 4.0 * mc.std_error);
    CHECK(std::fabs(good - mc.estimate) < 4.0 * mc.std_error);
    CHECK(std::fabs(printed - mc.estimate) > 20.0 * mc.std_error);
}

TEST_CASE("closed form agrees with simulation on random contexts") {
    std::mt19937_64 rng(13);
    const int Ls[] = {2, 50, 200};
    const double psis[] = {0.95, 0.96, 0.99, 1.0};
    for (int i = 0; i < 20; ++i) {
        const int m0 = 1 + i % 4;
        const int M = i % 7;
        std::vector<double> m_i{0.5 + (i % 3)};
        OutageContext ctx{random_network(rng, M), make_link(Ls[i % 3], psis[i % 4], m0, m_i, 10.0), 0.0};
        ctx.beta = 0.3 + 0.2 * (i % 5);
        const double closed = conditional_outage(ctx);
        const auto mc = monte_carlo_outage(ctx, 100000, {99, static_cast<std::uint64_t>(i)});
        const double se = std::max(mc.std_error, 1e-5);
        CHECK_MESSAGE(std::fabs(closed - mc.estimate) < 4.0 * se, "context ", i, " closed ", closed, " mc ",
                      mc.estimate);
    }
}

TEST_CASE("single-link Monte Carlo") {
    NetworkRealization net;
    OutageContext ctx{net, make_link(200, 0.96, 1, {1.0}, 10.0), 1.01146};
    const auto mc = monte_carlo_outage(ctx, 1000000, {1, 2});
    CHECK(std::fabs(mc.estimate - 0.1) < 3.0 * mc.std_error);
    const auto one = monte_carlo_outage(ctx, 1, {1, 3});
    CHECK((one.estimate == 0.0 || one.estimate == 1.0));
    CHECK_THROWS_AS(monte_carlo_outage(ctx, 0, {1, 3}), DomainError);
}

TEST_CASE("psi = 1 reduces to co-channel interference only") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i) {
        auto net = random_network(rng, 1 + i % 6);
        auto link = make_link(20, 1.0, 1 + i % 3, {1.0}, 10.0);
        OutageContext full{net, link, 0.9};
        // Reference: adjacent channels become interference-free, so fold p_a into p_n.
        auto cci = link;
        cci.probs.p_n += cci.probs.p_a;
        cci.probs.p_a = 0.0;
        OutageContext ref{net, cci, 0.9};
        CHECK(conditional_outage(full) == doctest::Approx(conditional_outage(ref)).epsilon(1e-13));
    }
    NetworkRealization net;
    net.omegas = {0.8, 1.2};
    OutageContext ctx{net, make_link(2, 1.0, 2, {1.0}, 10.0), 0.8};
    const auto mc = monte_carlo_outage(ctx, 300000, {3, 3});
    CHECK(std::fabs(conditional_outage(ctx) - mc.estimate) < 4.0 * mc.std_error);
}

TEST_CASE("monotonicity") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const int m0 = 1 + trial % 4;
        OutageContext ctx{random_network(rng, 1 + trial % 6), make_link(30, 0.95, m0, {1.5}, 10.0), 0.0};
        double prev = -1.0;
        for (double b = 0.01; b < 100.0; b *= 1.3) {
            ctx.beta = b;
            const double now = conditional_outage(ctx);
            CHECK(now >= prev - 1e-14);
            prev = now;
        }
        ctx.beta = 1.0;
        const double base = conditional_outage(ctx);
        auto more_snr = ctx;
        more_snr.link.snr *= 2.0;
        CHECK(conditional_outage(more_snr) <= base + 1e-14);
        auto stronger = ctx;
        stronger.realization.omega0 *= 1.5;
        CHECK(conditional_outage(stronger) <= base + 1e-14);
        auto louder = ctx;
        louder.realization.omegas[0] *= 1.5;
        CHECK(conditional_outage(louder) >= base - 1e-14);
    }
}

TEST_CASE("unclamped values stay within rounding of [0, 1]") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> lb(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const int m0 = 1 + i % 6;
        OutageContext ctx{random_network(rng, i % 12), make_link(2 + i % 300, 0.9 + 0.01 * (i % 11), m0, {0.7}, 10.0),
                          std::pow(10.0, lb(rng))};
        const double s = success_probability_unclamped(ctx);
        CHECK(s >= -1e-12);
        CHECK(s <= 1.0 + 1e-12);
    }
    // Far tail where exp(-beta0/SNR) underflows.
    NetworkRealization net;
    OutageContext tail{net, make_link(10, 0.96, 4, {1.0}, 1e-3), 1.0};
    CHECK(conditional_outage(tail) == 1.0);
    CHECK(std::isfinite(success_probability_unclamped(tail)));
}

TEST_CASE("evaluator matches the context API") {
    std::mt19937_64 rng(18);
    for (int i = 0; i < 50; ++i) {
        const auto net = random_network(rng, i % 9);
        const auto link = make_link(2 + i * 7, i % 5 == 0 ? 1.0 : 0.96, 1 + i % 4, {i % 2 ? 1.0 : 2.5}, 10.0);
        const OutageEvaluator eval(net, link);
        for (double b : {0.05, 0.4, 1.0, 3.0, 20.0}) {
            OutageContext ctx{net, link, b};
            CHECK(eval.outage(b) == doctest::Approx(conditional_outage(ctx)).epsilon(1e-12));
        }
    }
}

TEST_CASE("argument checks") {
    NetworkRealization net;
    OutageContext ctx{net, make_link(10, 0.96, 0, {1.0}, 10.0), 1.0};
    CHECK_THROWS_AS(conditional_outage(ctx), DomainError);
    ctx.link.m0 = 1;
    ctx.beta = -1.0;
    CHECK_THROWS_AS(conditional_outage(ctx), DomainError);
    ctx.beta = 1.0;
    ctx.realization.omega0 = 0.0;
    CHECK_THROWS_AS(conditional_outage(ctx), DomainError);
}
