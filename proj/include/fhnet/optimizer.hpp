#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fhnet/adapt.hpp"
#include "fhnet/capacity.hpp"
#include "fhnet/topology.hpp"

namespace fhnet {

/// One operating point plus the fixed system constants.
struct SystemParams {
    int L = 200;
    double h = 0.5;
    double psi = 0.96;
    double duty = 1.0;
    double eps_hat = 0.1;
    int q = 2;
};

struct SweepConfig {
    std::vector<double> h_grid = make_default_h_grid();
    std::vector<double> psi_grid = make_default_psi_grid();
    std::vector<int> L_grid = make_default_L_grid(500);
    std::size_t topologies = 10000;
    TopologySpec topology;   // region, channel, M, source distance
    double duty = 1.0;
    double eps_hat = 0.1;
    int q = 2;
    bool reuse_topologies = true;  // false: fresh draws for every (h, psi, L)
    InversionOptions inversion;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    static std::vector<double> make_default_h_grid();
    static std::vector<double> make_default_psi_grid();
    static std::vector<int> make_default_L_grid(int l_max);
};

struct SweepPoint {
    int L = 0;
    double h = 0.0;
    double psi = 0.0;
    double mean_rate = 0.0;  // bits/symbol
    double eta = 0.0;
    double mase = 0.0;       // bps/Hz/m^2
    std::size_t n_infeasible = 0;
    std::size_t n_capped = 0;
    std::size_t n_clamped = 0;
    std::vector<double> rate_samples;  // kept only for the best point

    double mase_per_khz() const noexcept { return mase * 1e3; }
};

struct RateAverage {
    double mean = 0.0;
    std::vector<double> samples;
    std::size_t n_infeasible = 0;
    std::size_t n_capped = 0;
    std::size_t n_clamped = 0;
};

/// Transmitter density M / area.
double network_density(const AnnulusRegion& region, std::size_t interferers);

/// lambda * E[R] * eta * D * (1 - eps_hat) / L, in bps/Hz/m^2.
double normalized_mase(double mean_rate, double eta, int L, double duty, double eps_hat, double lambda);

/// Rates from already inverted thresholds; infeasible realizations score zero.
RateAverage rates_from_thresholds(std::span<const AdaptationResult> thresholds, const CapacityCurve& curve);

/// E[R] over the topologies: invert the outage for every realization, read the
/// rate off `curve`, average.
RateAverage average_rate(const SystemParams& params, const ChannelConfig& channel,
                         std::span<const NetworkRealization> topologies, const CapacityCurve& curve,
                         const InversionOptions& options = {});

/// Link parameters for one (L, psi) pair.
LinkParams make_link(const SystemParams& params, const ChannelConfig& channel);

using CurveSource = std::function<CapacityCurve(const ModulationSpec&)>;

struct SearchOptions {
    std::uint64_t seed = 1;
    CurveSource curves;                        // required
    std::filesystem::path checkpoint;          // empty: no checkpointing
    std::string checkpoint_tag;                // must match to resume (config hash)
    std::size_t checkpoint_every = 16;         // blocks between checkpoint writes
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct SweepResult {
    SweepPoint best;               // with rate_samples
    std::vector<SweepPoint> table; // h outermost, then psi, then L
    std::size_t resumed_blocks = 0;
};

/// Exhaustive search over every (h, psi, L) of the config.
///
/// Thresholds depend on (psi, L) and the topology but not on h, so work is done
/// in (psi, L) blocks: one inversion pass, then every h is scored from it. With
/// topology reuse the same N realizations serve every block.
SweepResult grid_search(const SweepConfig& config, const SearchOptions& options);

/// Recomputes the rate samples of one table point.
std::vector<double> point_rate_samples(const SweepConfig& config, const SearchOptions& options,
                                       const SweepPoint& point);

/// Right-continuous empirical CDF as sorted (rate, F(rate)) pairs, one per distinct value.
std::vector<std::pair<double, double>> rate_cdf(std::vector<double> samples);

/// Smallest sample x with F(x) >= p.
double empirical_quantile(std::vector<double> samples, double p);

/// Q(0.9) - Q(0.1).
double interdecile_range(const std::vector<double>& samples);

enum class SweepAxis { L, h, psi };

/// For each distinct value of `axis`, the best row over the other two parameters.
std::vector<SweepPoint> marginal_best(const std::vector<SweepPoint>& table, SweepAxis axis);

/// Sweep table CSV; `comment` becomes a leading '#' line.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& table,
                     const std::string& comment = {});
std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path);

}  // namespace fhnet
