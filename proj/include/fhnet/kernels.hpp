#pragma once

// Data-parallel kernels. Every kernel exists twice: a plain serial loop kept as
// the reference, and an OpenMP version. Both split work into the same fixed
// blocks with per-block random streams and reduce in block order, so their
// outputs are bit-identical for any thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "fhnet/adapt.hpp"
#include "fhnet/capacity.hpp"
#include "fhnet/outage.hpp"
#include "fhnet/topology.hpp"

namespace fhnet::kernels {

inline constexpr std::uint64_t outage_block = 8192;
inline constexpr std::uint64_t capacity_block = 4096;

/// Outage events in one block of Monte Carlo trials.
std::uint64_t outage_events_in_block(const OutageContext& context, std::uint64_t trials, StreamKey key);

/// Sum and sum of squares of per-trial information samples (bits) in one block.
struct MomentSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};
MomentSums capacity_moments_in_block(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key);

namespace serial {

MonteCarloEstimate monte_carlo_outage(const OutageContext& context, std::uint64_t trials, StreamKey key);
CapacityEstimate estimate_capacity(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key);

/// Topology n is drawn from stream `stream_id(tag, n, salt)`.
std::vector<NetworkRealization> draw_topologies(const TopologySpec& spec, std::uint64_t seed, std::size_t count,
                                                StreamTag tag = StreamTag::topology, std::uint64_t salt = 0);

/// Threshold inversion for every topology (rate left at zero).
std::vector<AdaptationResult> invert_all(std::span<const NetworkRealization> topologies, const LinkParams& link,
                                         double eps_hat, const InversionOptions& options = {});

}  // namespace serial

namespace omp {

MonteCarloEstimate monte_carlo_outage(const OutageContext& context, std::uint64_t trials, StreamKey key);
CapacityEstimate estimate_capacity(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key);
std::vector<NetworkRealization> draw_topologies(const TopologySpec& spec, std::uint64_t seed, std::size_t count,
                                                StreamTag tag = StreamTag::topology, std::uint64_t salt = 0);
std::vector<AdaptationResult> invert_all(std::span<const NetworkRealization> topologies, const LinkParams& link,
                                         double eps_hat, const InversionOptions& options = {});

}  // namespace omp

/// Sets the OpenMP thread count (0 keeps the runtime default).
void set_threads(int threads);
int max_threads();

}  // namespace fhnet::kernels
