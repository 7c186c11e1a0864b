#include <doctest.h>

#include <cstring>

#include "fhnet/kernels.hpp"

using namespace fhnet;

namespace {

TopologySpec spec_for(std::size_t M, double sigma) {
    TopologySpec s;
    s.interferers = M;
    s.channel.m0 = 4;
    s.channel.sigma_s = sigma;
    return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("serial and OpenMP kernels are bit-identical") {
    const auto spec = spec_for(20, 8.0);
    for (int threads : {1, 2, 3, 4}) {
        kernels::set_threads(threads);
        const auto a = kernels::serial::draw_topologies(spec, 3, 64);
        const auto b = kernels::omp::draw_topologies(spec, 3, 64);
        REQUIRE(a.size() == b.size());
        for (std::size_t n = 0; n < a.size(); ++n) {
            CHECK(same_bits(a[n].omega0, b[n].omega0));
            CHECK(a[n].omegas == b[n].omegas);
        }

        LinkParams link;
        link.probs = collision_probabilities(50, 1.0);
        link.splatter = SplatterModel::from_psi(0.96);
        link.m0 = 4;
        const auto ia = kernels::serial::invert_all(a, link, 0.1);
        const auto ib = kernels::omp::invert_all(b, link, 0.1);
        for (std::size_t n = 0; n < ia.size(); ++n) {
            CHECK(same_bits(ia[n].beta, ib[n].beta));
            CHECK(ia[n].status == ib[n].status);
        }

        const OutageContext ctx{a[0], link, 1.0};
        const auto ma = kernels::serial::monte_carlo_outage(ctx, 30000, {4, 4});
        const auto mb = kernels::omp::monte_carlo_outage(ctx, 30000, {4, 4});
        CHECK(ma.events == mb.events);
        CHECK(same_bits(ma.std_error, mb.std_error));

        const auto ca = kernels::serial::estimate_capacity({2, 0.7}, 3.0, 20000, {5, 5});
        const auto cb = kernels::omp::estimate_capacity({2, 0.7}, 3.0, 20000, {5, 5});
        CHECK(same_bits(ca.rate, cb.rate));
        CHECK(same_bits(ca.std_error, cb.std_error));
    }
    kernels::set_threads(0);
}

TEST_CASE("block decomposition covers every trial") {
    LinkParams link;
    link.probs = collision_probabilities(10, 1.0);
    link.splatter = SplatterModel::from_psi(0.96);
    NetworkRealization net;
    net.omegas = {1.0};
    const OutageContext ctx{net, link, 1.0};
    for (std::uint64_t trials : {1ull, 8191ull, 8192ull, 8193ull, 20000ull}) {
        const auto e = kernels::omp::monte_carlo_outage(ctx, trials, {1, 1});
        CHECK(e.trials == trials);
        CHECK(e.events <= trials);
    }
}

TEST_CASE("topology draws are addressable by index") {
    const auto spec = spec_for(5, 4.0);
    const auto all = kernels::omp::draw_topologies(spec, 11, 10);
    const auto one = draw_topology(spec, 11, stream_id(StreamTag::topology, 7, 0));
    CHECK(one.omegas == all[7].omegas);
    const auto salted = kernels::omp::draw_topologies(spec, 11, 10, StreamTag::redraw, 99);
    CHECK(salted[7].omegas != all[7].omegas);
}
