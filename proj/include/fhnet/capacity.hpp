#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fhnet/cpfsk.hpp"
#include "fhnet/rng.hpp"

namespace fhnet {

struct CapacityEstimate {
    double rate = 0.0;       // bits/symbol
    double std_error = 0.0;
};

/// Monte Carlo symmetric information rate of q-ary CPFSK over AWGN with
/// noncoherent symbol-by-symbol detection. `gamma` is the linear Es/N0.
///
/// The receiver sees the q tone-correlator outputs; the carrier phase is
/// marginalized analytically, so the likelihood of tone x depends only on
/// I0(2 |y_x| / N0) even though the correlator noise is correlated for
/// non-orthogonal tones.
CapacityEstimate estimate_capacity(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key);

/// Tabulated C(h, gamma), monotone after isotonic post-processing.
struct CapacityCurve {
    int q = 2;
    double h = 0.5;
    std::vector<double> gamma_db;    // ascending
    std::vector<double> rates;       // isotonic, bits/symbol
    std::vector<double> raw_rates;   // before isotonic fit (empty when loaded from file)
    std::vector<double> std_errors;  // per point (empty when loaded from file)
    std::uint64_t trials = 0;        // per point; 0 when loaded from file
    std::uint64_t seed = 0;
    std::string noise_model = "awgn-noncoherent-symbolwise";

    /// Throws DomainError on unsorted grid, mismatched sizes, or rates outside [0, log2 q].
    void validate() const;
};

struct RateLookup {
    double rate = 0.0;
    bool clamped = false;  // gamma fell outside the tabulated range
};

/// Linear interpolation in dB between grid points; clamps (and flags) outside the grid.
RateLookup lookup(const CapacityCurve& curve, double gamma_linear) noexcept;

/// Estimates every grid point (parallel over points) and applies the isotonic fit.
CapacityCurve build_capacity_table(const ModulationSpec& spec, std::span<const double> gamma_db,
                                   std::uint64_t trials, std::uint64_t seed);

/// Default SINR grid: -10 dB to 30 dB in 0.5 dB steps.
std::vector<double> default_gamma_grid_db();

/// CSV `h,gamma_db,rate`, one row per point; lines starting with '#' are comments.
void write_capacity_csv(const std::filesystem::path& path, std::span<const CapacityCurve> curves,
                        const std::string& comment = {});

/// Reads curves grouped by h, validating monotonicity and range. `q` is the
/// modulation order the rates refer to.
std::vector<CapacityCurve> read_capacity_csv(const std::filesystem::path& path, int q = 2);

/// Disk cache of built curves: one file per (q, h), named by a hash of every build parameter.
class CapacityCache {
public:
    explicit CapacityCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path path_for(const ModulationSpec& spec, std::span<const double> gamma_db,
                                   std::uint64_t trials, std::uint64_t seed) const;

    /// Loads the curve if cached, otherwise builds it and writes it atomically.
    CapacityCurve load_or_build(const ModulationSpec& spec, std::span<const double> gamma_db,
                                std::uint64_t trials, std::uint64_t seed) const;

private:
    std::filesystem::path dir_;
};

}  // namespace fhnet
