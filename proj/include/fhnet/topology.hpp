#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fhnet/rng.hpp"

namespace fhnet {

/// Annulus centred on the reference receiver; interferers live here.
struct AnnulusRegion {
    double r_ex = 0.25;
    double r_net = 2.0;

    void validate() const;
    double area() const noexcept;
};

/// Propagation and fading parameters shared by every link.
struct ChannelConfig {
    double alpha = 3.0;       // path-loss exponent, > 2
    double d0 = 0.25;         // far-field reference distance
    double sigma_s = 0.0;     // shadowing std-dev in dB
    int m0 = 1;               // source Nakagami parameter (integer)
    std::vector<double> m_i{1.0};           // one entry (common) or one per interferer
    double snr_db = 10.0;     // SNR at unit distance
    std::vector<double> power_ratios{1.0};  // P_i/P_0, one entry (common) or one per interferer
    bool shadow_source = true;  // false leaves the source link unshadowed

    /// Throws ConfigError naming the offending field. `interferers` is M.
    void validate(std::size_t interferers) const;

    double snr_linear() const noexcept;
    double interferer_m(std::size_t i) const noexcept { return m_i.size() == 1 ? m_i[0] : m_i[i]; }
    double power_ratio(std::size_t i) const noexcept {
        return power_ratios.size() == 1 ? power_ratios[0] : power_ratios[i];
    }
};

struct PolarPosition {
    double r = 0.0;
    double theta = 0.0;
};

/// One topology snapshot reduced to normalized received powers.
struct NetworkRealization {
    double omega0 = 1.0;
    std::vector<double> omegas;
    std::vector<PolarPosition> positions;  // diagnostics only

    std::size_t interferers() const noexcept { return omegas.size(); }
};

/// (d/d0)^-alpha. Throws DomainError when d < d0.
double path_loss(double d, double d0, double alpha);

/// M points i.i.d. uniform over the annulus area.
std::vector<PolarPosition> sample_annulus(const AnnulusRegion& region, std::size_t count, RandomStream& rng);

/// Applies path loss and lognormal shadowing to the positions. The source link
/// is shadowed with the same law as the interferers; its shadowing draw comes
/// first in the stream.
NetworkRealization realize_network(std::span<const PolarPosition> positions, const ChannelConfig& config,
                                   double source_distance, RandomStream& rng);

/// Everything needed to regenerate topology `index` of a run.
struct TopologySpec {
    AnnulusRegion region;
    ChannelConfig channel;
    std::size_t interferers = 0;
    double source_distance = 1.0;
};

/// Topology `index` under `seed`; the same (seed, index) always yields the same realization.
NetworkRealization draw_topology(const TopologySpec& spec, std::uint64_t seed, std::uint64_t stream);

}  // namespace fhnet
