#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fhnet/config.hpp"
#include "fhnet/errors.hpp"

using namespace fhnet;

namespace {

std::string field_of(const std::string& yaml, const std::vector<std::string>& overrides = {}) {
    try {
        parse_config(yaml, overrides);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults parse from an empty document") {
    const auto c = parse_config("");
    CHECK(c.interferers == 50);
    CHECK(c.channel.shadow_source);
    CHECK(c.h_grid.expand().size() == 100);
    CHECK(c.psi_grid.expand().size() == 19);
    CHECK(c.L_grid.expand().size() == 499);
    const auto s = c.sweep();
    CHECK(s.L_grid.front() == 2);
    CHECK(s.L_grid.back() == 500);
    CHECK(s.topology.interferers == 50);
}

TEST_CASE("values and grids are read") {
    const auto c = parse_config(R"(
seed: 42
network: {interferers: 5, source_distance: 1.5}
channel: {m0: 4, m_i: [1], sigma_s: 8, shadow_source: false, snr_db: 12}
system: {eps_hat: 0.05}
sweep:
  h_grid: [0.8, 0.5]
  psi_grid: {start: 0.9, stop: 0.99, step: 0.01}
  L_grid: 200
  topologies: 100
)");
    CHECK(c.seed == 42);
    CHECK(c.interferers == 5);
    CHECK(c.source_distance == 1.5);
    CHECK(c.channel.m0 == 4);
    CHECK(c.channel.sigma_s == 8.0);
    CHECK_FALSE(c.channel.shadow_source);
    CHECK(c.eps_hat == 0.05);
    CHECK(c.h_grid.expand() == std::vector<double>{0.8, 0.5});
    const auto psi = c.psi_grid.expand();
    CHECK(psi.size() == 10);
    CHECK(psi[8] == 0.98);
    CHECK(c.L_grid.expand() == std::vector<double>{200.0});
    CHECK(c.sweep().topologies == 100);
}

TEST_CASE("canonical YAML round trips") {
    const auto c = parse_config("sweep: {h_grid: [0.1, 0.35], L_grid: {start: 10, stop: 50, step: 10}}\n"
                                "channel: {power_ratios: [1, 2, 0.5], m_i: [1, 2, 3], sigma_s: 4.5}\n"
                                "network: {interferers: 3}\ncapacity: {cache_dir: 'my cache'}\n");
    const auto text = to_yaml(c);
    const auto back = parse_config(text);
    CHECK(to_yaml(back) == text);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(back.capacity_cache == "my cache");
}

TEST_CASE("overrides") {
    const auto c = parse_config("channel: {m0: 2}\n", {"channel.m0=4", "sweep.h_grid=[0.8]", "seed=9",
                                                       "output.dir=elsewhere"});
    CHECK(c.channel.m0 == 4);
    CHECK(c.h_grid.expand() == std::vector<double>{0.8});
    CHECK(c.seed == 9);
    CHECK(c.out_dir == "elsewhere");
    // Siblings survive a nested override.
    const auto d = parse_config("channel: {m0: 3, snr_db: 7}\n", {"channel.sigma_s=2"});
    CHECK(d.channel.m0 == 3);
    CHECK(d.channel.snr_db == 7.0);
    CHECK(d.channel.sigma_s == 2.0);
    CHECK(field_of("", {"nonsense"}) == "nonsense");
    CHECK(field_of("channel: {m0: 2}\n", {"channel.m0.x=1"}) == "channel.m0.x");
}

TEST_CASE("errors name the offending key") {
    CHECK(field_of("chanel: {m0: 1}\n") == "chanel");
    CHECK(field_of("channel: {mo: 1}\n") == "channel.mo");
    CHECK(field_of("channel: {m0: abc}\n") == "channel.m0");
    CHECK(field_of("channel: {alpha: 2}\n") == "channel.alpha");
    CHECK(field_of("system: {eps_hat: 1.5}\n") == "system.eps_hat");
    CHECK(field_of("sweep: {h_grid: [0]}\n") == "sweep.h_grid");
    CHECK(field_of("sweep: {L_grid: [2.5]}\n") == "sweep.L_grid");
    CHECK(field_of("capacity: {source: file}\n") == "capacity.file");
    CHECK(field_of("capacity: {trials: 10}\n") == "capacity.trials");
    CHECK(field_of("region: {r_ex: 3}\n") .rfind("region", 0) == 0);
    CHECK(field_of("- 1\n- 2\n") == "<root>");
    CHECK(field_of("a: [\n") == "<file>");
}

TEST_CASE("hash ignores output locations and tracks everything else") {
    auto a = parse_config("");
    auto b = a;
    b.out_dir = "other";
    b.capacity_cache = "/tmp/x";
    b.checkpoint_every = 99;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.channel.shadow_source = false;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("load from disk") {
    const auto p = std::filesystem::temp_directory_path() / "fhnet_test_cfg.yaml";
    std::ofstream(p) << "seed: 5\n";
    CHECK(load_config(p.string()).seed == 5);
    std::filesystem::remove(p);
    CHECK_THROWS_AS(load_config(p.string()), IoError);
}
