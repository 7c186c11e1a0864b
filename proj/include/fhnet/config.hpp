#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fhnet/optimizer.hpp"

namespace fhnet {

/// A grid written either as an inclusive range or as explicit values.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    std::vector<double> values;  // non-empty: explicit form, range ignored

    std::vector<double> expand() const;
    static GridSpec range(double start, double stop, double step) { return {start, stop, step, {}}; }
    static GridSpec list(std::vector<double> v) { return {0.0, 0.0, 0.0, std::move(v)}; }
};

enum class CapacitySource { build, file };

struct ExperimentConfig {
    std::uint64_t seed = 1;

    // network
    std::size_t interferers = 50;
    double source_distance = 1.0;
    AnnulusRegion region;
    ChannelConfig channel;

    // system
    double duty = 1.0;
    double eps_hat = 0.1;
    int q = 2;

    // sweep
    GridSpec h_grid = GridSpec::range(0.01, 1.0, 0.01);
    GridSpec psi_grid = GridSpec::range(0.90, 0.99, 0.005);
    GridSpec L_grid = GridSpec::range(2, 500, 1);
    std::size_t topologies = 10000;
    bool reuse_topologies = true;

    InversionOptions inversion;

    // capacity
    CapacitySource capacity_source = CapacitySource::build;
    std::string capacity_file;
    std::string capacity_cache = "capacity_cache";
    GridSpec gamma_db = GridSpec::range(-10.0, 30.0, 0.5);
    std::uint64_t capacity_trials = 100000;
    std::uint64_t capacity_seed = 1;

    // outage command
    double outage_beta = 1.0;
    int outage_L = 200;
    double outage_psi = 0.96;
    std::uint64_t outage_trials = 100000;
    std::uint64_t outage_topology = 0;

    // output
    std::string out_dir = "out";
    std::size_t checkpoint_every = 16;

    /// Throws ConfigError with the dotted key of the first bad field.
    void validate() const;

    SweepConfig sweep() const;
};

/// Parses YAML text. Unknown keys are rejected. `overrides` are `a.b.c=value`
/// strings applied on top of the file (value parsed as YAML, so `[0.8]` works).
ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical YAML: fixed key order, shortest round-trip numbers.
std::string to_yaml(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the canonical YAML, output paths excluded.
std::string config_hash(const ExperimentConfig& config);

}  // namespace fhnet
