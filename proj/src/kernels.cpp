#include "fhnet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <omp.h>

#include "fhnet/errors.hpp"
#include "fhnet/numeric.hpp"

namespace fhnet::kernels {

namespace {

using cplx = std::complex<double>;

// Tone-correlator geometry: R[k][j] = <tone j, tone k> over one symbol, and its
// lower Cholesky factor used to colour the correlator noise.
struct CorrelatorModel {
    int q;
    std::vector<cplx> corr;  // row-major q x q
    std::vector<cplx> chol;  // row-major lower triangle

    explicit CorrelatorModel(const ModulationSpec& spec) : q(spec.q), corr(q * q), chol(q * q) {
        const double pi = std::numbers::pi;
        for (int k = 0; k < q; ++k) {
            for (int j = 0; j < q; ++j) {
                const double delta = (j - k) * spec.h;
                const double px = pi * delta;
                const double mag = std::fabs(px) < 1e-12 ? 1.0 : std::sin(px) / px;
                corr[k * q + j] = std::polar(mag, px);
            }
        }
        for (int i = 0; i < q; ++i) {
            double d = corr[i * q + i].real();
            for (int k = 0; k < i; ++k) {
                d -= std::norm(chol[i * q + k]);
            }
            if (!(d > 0.0)) {
                throw DomainError("tone correlation matrix is singular; h too close to an integer spacing of zero");
            }
            chol[i * q + i] = std::sqrt(d);
            for (int j = i + 1; j < q; ++j) {
                cplx s = corr[j * q + i];
                for (int k = 0; k < i; ++k) {
                    s -= chol[j * q + k] * std::conj(chol[i * q + k]);
                }
                chol[j * q + i] = s / chol[i * q + i].real();
            }
        }
    }
};

std::uint64_t block_count(std::uint64_t trials, std::uint64_t block) { return (trials + block - 1) / block; }

std::uint64_t block_size(std::uint64_t b, std::uint64_t trials, std::uint64_t block) {
    return std::min(block, trials - b * block);
}

MonteCarloEstimate finish_outage(std::uint64_t events, std::uint64_t trials) {
    MonteCarloEstimate est;
    est.trials = trials;
    est.events = events;
    est.estimate = static_cast<double>(events) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
    return est;
}

CapacityEstimate finish_capacity(const ModulationSpec& spec, std::span<const MomentSums> blocks,
                                 std::uint64_t trials) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& b : blocks) {
        sum += b.sum;
        sum_sq += b.sum_sq;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    CapacityEstimate est;
    est.rate = std::clamp(mean, 0.0, std::log2(static_cast<double>(spec.q)));
    est.std_error = std::sqrt(var / n);
    return est;
}

void check_capacity_args(const ModulationSpec& spec, double gamma, std::uint64_t trials) {
    spec.validate();
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw DomainError("estimate_capacity: gamma must be finite and >= 0");
    }
    if (trials < 2) {
        throw DomainError("estimate_capacity: need at least two trials");
    }
}

}  // namespace

std::uint64_t outage_events_in_block(const OutageContext& context, std::uint64_t trials, StreamKey key) {
    RandomStream rng = key.make();
    const auto& link = context.link;
    const auto& omegas = context.realization.omegas;
    const double psi = link.splatter.psi;
    const double k_s = link.splatter.k_s;
    const double noise = 1.0 / link.snr;
    const double p_c = link.probs.p_c;
    const double p_ca = link.probs.p_c + link.probs.p_a;

    std::gamma_distribution<double> source_gain(link.m0, 1.0 / link.m0);
    std::vector<std::gamma_distribution<double>> gains;
    gains.reserve(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double m = link.interferer_m(i);
        gains.emplace_back(m, 1.0 / m);
    }

    std::uint64_t events = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double signal = psi * source_gain(rng) * context.realization.omega0;
        double interference = 0.0;
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const double u = rng.uniform();
            const double level = u < p_c ? psi : (u < p_ca ? k_s : 0.0);
            if (level > 0.0) {
                interference += level * gains[i](rng) * omegas[i];
            }
        }
        if (signal <= context.beta * (noise + interference)) {
            ++events;
        }
    }
    return events;
}

MomentSums capacity_moments_in_block(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key) {
    const CorrelatorModel model(spec);
    const int q = model.q;
    RandomStream rng = key.make();
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double noise_scale = std::sqrt(1.0 / gamma);
    const double log2q = std::log2(static_cast<double>(q));
    constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

    std::vector<cplx> w(static_cast<std::size_t>(q));
    std::vector<double> metric(static_cast<std::size_t>(q));
    MomentSums sums;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const int x = static_cast<int>(rng.uniform() * q);
        for (auto& v : w) {
            const double re = normal(rng);
            const double im = normal(rng);
            v = cplx(re, im);
        }
        for (int k = 0; k < q; ++k) {
            cplx n{0.0, 0.0};
            for (int j = 0; j <= k; ++j) {
                n += model.chol[k * q + j] * w[static_cast<std::size_t>(j)];
            }
            const cplx y = model.corr[k * q + x] + noise_scale * n;
            metric[static_cast<std::size_t>(k)] = log_bessel_i0(2.0 * gamma * std::abs(y));
        }
        const double info = log2q + (metric[static_cast<std::size_t>(x)] - log_sum_exp(metric)) * inv_ln2;
        sums.sum += info;
        sums.sum_sq += info * info;
    }
    return sums;
}

namespace serial {

MonteCarloEstimate monte_carlo_outage(const OutageContext& context, std::uint64_t trials, StreamKey key) {
    std::uint64_t events = 0;
    const auto blocks = block_count(trials, outage_block);
    for (std::uint64_t b = 0; b < blocks; ++b) {
        events += outage_events_in_block(context, block_size(b, trials, outage_block), key.child(b));
    }
    return finish_outage(events, trials);
}

CapacityEstimate estimate_capacity(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key) {
    check_capacity_args(spec, gamma, trials);
    if (gamma == 0.0) {
        return {0.0, 0.0};
    }
    const auto blocks = block_count(trials, capacity_block);
    std::vector<MomentSums> partial(blocks);
    for (std::uint64_t b = 0; b < blocks; ++b) {
        partial[b] = capacity_moments_in_block(spec, gamma, block_size(b, trials, capacity_block), key.child(b));
    }
    return finish_capacity(spec, partial, trials);
}

std::vector<NetworkRealization> draw_topologies(const TopologySpec& spec, std::uint64_t seed, std::size_t count,
                                                StreamTag tag, std::uint64_t salt) {
    std::vector<NetworkRealization> out(count);
    for (std::size_t n = 0; n < count; ++n) {
        out[n] = draw_topology(spec, seed, stream_id(tag, n, salt));
    }
    return out;
}

std::vector<AdaptationResult> invert_all(std::span<const NetworkRealization> topologies, const LinkParams& link,
                                         double eps_hat, const InversionOptions& options) {
    std::vector<AdaptationResult> out(topologies.size());
    for (std::size_t n = 0; n < topologies.size(); ++n) {
        out[n] = invert_outage(topologies[n], link, eps_hat, options);
    }
    return out;
}

}  // namespace serial

namespace omp {

MonteCarloEstimate monte_carlo_outage(const OutageContext& context, std::uint64_t trials, StreamKey key) {
    const auto blocks = static_cast<std::int64_t>(block_count(trials, outage_block));
    std::uint64_t events = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : events)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto ub = static_cast<std::uint64_t>(b);
        events += outage_events_in_block(context, block_size(ub, trials, outage_block), key.child(ub));
    }
    return finish_outage(events, trials);
}

CapacityEstimate estimate_capacity(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key) {
    check_capacity_args(spec, gamma, trials);
    if (gamma == 0.0) {
        return {0.0, 0.0};
    }
    const auto blocks = static_cast<std::int64_t>(block_count(trials, capacity_block));
    std::vector<MomentSums> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto ub = static_cast<std::uint64_t>(b);
        partial[ub] = capacity_moments_in_block(spec, gamma, block_size(ub, trials, capacity_block), key.child(ub));
    }
    return finish_capacity(spec, partial, trials);
}

std::vector<NetworkRealization> draw_topologies(const TopologySpec& spec, std::uint64_t seed, std::size_t count,
                                                StreamTag tag, std::uint64_t salt) {
    std::vector<NetworkRealization> out(count);
    const auto n_items = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < n_items; ++n) {
        const auto un = static_cast<std::size_t>(n);
        out[un] = draw_topology(spec, seed, stream_id(tag, un, salt));
    }
    return out;
}

std::vector<AdaptationResult> invert_all(std::span<const NetworkRealization> topologies, const LinkParams& link,
                                         double eps_hat, const InversionOptions& options) {
    // Exceptions cannot cross the parallel region, so surface argument errors here.
    if (!(eps_hat > 0.0 && eps_hat < 1.0)) {
        throw DomainError("invert_outage: outage constraint must lie in (0, 1)");
    }
    for (const auto& topology : topologies) {
        link.validate(topology.omegas.size());
        if (!(topology.omega0 > 0.0)) {
            throw DomainError("outage: Omega_0 must be positive");
        }
    }
    std::vector<AdaptationResult> out(topologies.size());
    const auto n_items = static_cast<std::int64_t>(topologies.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t n = 0; n < n_items; ++n) {
        const auto un = static_cast<std::size_t>(n);
        out[un] = invert_outage(topologies[un], link, eps_hat, options);
    }
    return out;
}

}  // namespace omp

void set_threads(int threads) {
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fhnet::kernels
