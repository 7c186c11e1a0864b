#include "fhnet/topology.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fhnet/errors.hpp"

namespace fhnet {

void AnnulusRegion::validate() const {
    if (!(r_ex > 0.0)) {
        throw ConfigError("region.r_ex", "must be > 0");
    }
    if (!(r_net > r_ex)) {
        throw ConfigError("region.r_net", "must exceed r_ex");
    }
}

double AnnulusRegion::area() const noexcept { return std::numbers::pi * (r_net * r_net - r_ex * r_ex); }

void ChannelConfig::validate(std::size_t interferers) const {
    if (!(alpha > 2.0)) {
        throw ConfigError("channel.alpha", "path-loss exponent must be > 2");
    }
    if (!(d0 > 0.0)) {
        throw ConfigError("channel.d0", "must be > 0");
    }
    if (!(sigma_s >= 0.0)) {
        throw ConfigError("channel.sigma_s", "must be >= 0");
    }
    if (m0 < 1) {
        throw ConfigError("channel.m0", "must be an integer >= 1");
    }
    if (m_i.empty() || (m_i.size() != 1 && m_i.size() != interferers)) {
        throw ConfigError("channel.m_i", "need one common value or one per interferer");
    }
    for (double m : m_i) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw ConfigError("channel.m_i", "Nakagami parameters must be positive");
        }
    }
    if (power_ratios.empty() || (power_ratios.size() != 1 && power_ratios.size() != interferers)) {
        throw ConfigError("channel.power_ratios", "need one common value or one per interferer");
    }
    for (double p : power_ratios) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ConfigError("channel.power_ratios", "must be finite and >= 0");
        }
    }
    if (!std::isfinite(snr_db)) {
        throw ConfigError("channel.snr_db", "must be finite");
    }
}

double ChannelConfig::snr_linear() const noexcept { return std::pow(10.0, snr_db / 10.0); }

double path_loss(double d, double d0, double alpha) {
    if (!(d0 > 0.0)) {
        throw DomainError("path_loss: reference distance must be positive");
    }
    if (d < d0) {
        throw DomainError("path_loss: distance " + std::to_string(d) + " inside far-field distance " +
                          std::to_string(d0));
    }
    return std::pow(d / d0, -alpha);
}

std::vector<PolarPosition> sample_annulus(const AnnulusRegion& region, std::size_t count, RandomStream& rng) {
    region.validate();
    const double inner2 = region.r_ex * region.r_ex;
    const double span2 = region.r_net * region.r_net - inner2;
    std::vector<PolarPosition> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform();
        const double r = std::min(region.r_net, std::sqrt(inner2 + u * span2));
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        points.push_back({r, theta});
    }
    return points;
}

NetworkRealization realize_network(std::span<const PolarPosition> positions, const ChannelConfig& config,
                                   double source_distance, RandomStream& rng) {
    if (source_distance < config.d0) {
        throw DomainError("realize_network: source inside far-field distance");
    }
    std::normal_distribution<double> shadow(0.0, config.sigma_s);
    auto shadowing = [&]() { return config.sigma_s > 0.0 ? std::pow(10.0, shadow(rng) / 10.0) : 1.0; };

    NetworkRealization out;
    // Drawn even when unused so interferer draws do not depend on the flag.
    const double source_shadow = shadowing();
    out.omega0 = (config.shadow_source ? source_shadow : 1.0) * std::pow(source_distance, -config.alpha);
    out.omegas.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const double d = positions[i].r;
        if (d < config.d0) {
            throw DomainError("realize_network: interferer inside far-field distance");
        }
        out.omegas.push_back(config.power_ratio(i) * shadowing() * std::pow(d, -config.alpha));
    }
    out.positions.assign(positions.begin(), positions.end());
    return out;
}

NetworkRealization draw_topology(const TopologySpec& spec, std::uint64_t seed, std::uint64_t stream) {
    RandomStream rng(seed, stream);
    const auto positions = sample_annulus(spec.region, spec.interferers, rng);
    return realize_network(positions, spec.channel, spec.source_distance, rng);
}

}  // namespace fhnet
