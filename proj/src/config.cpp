#include "fhnet/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <type_traits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fhnet/errors.hpp"
#include "fhnet/numeric.hpp"

namespace fhnet {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected a table");
    }
    std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) {
            throw ConfigError(join(path, key), "unknown key");
        }
    }
}

template <class T>
T convert(const YAML::Node& node, const std::string& path, const char* what) {
    if (!node.IsScalar()) {
        throw ConfigError(path, std::string("expected ") + what);
    }
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
    }
}

// Reads node[key] into `out` when present.
void read(const YAML::Node& node, const std::string& path, const char* key, double& out) {
    if (const auto n = node[key]) {
        out = convert<double>(n, join(path, key), "a number");
    }
}

void read(const YAML::Node& node, const std::string& path, const char* key, bool& out) {
    if (const auto n = node[key]) {
        out = convert<bool>(n, join(path, key), "true or false");
    }
}

void read(const YAML::Node& node, const std::string& path, const char* key, std::string& out) {
    if (const auto n = node[key]) {
        out = convert<std::string>(n, join(path, key), "a string");
    }
}

void read(const YAML::Node& node, const std::string& path, const char* key, int& out) {
    if (const auto n = node[key]) {
        out = convert<int>(n, join(path, key), "an integer");
    }
}

void read(const YAML::Node& node, const std::string& path, const char* key, std::uint64_t& out) {
    if (const auto n = node[key]) {
        const auto full = join(path, key);
        if (!n.IsScalar() || (!n.Scalar().empty() && n.Scalar().front() == '-')) {
            throw ConfigError(full, "expected a non-negative integer");
        }
        out = convert<std::uint64_t>(n, full, "a non-negative integer");
    }
}

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t fields are read as uint64");

void read_list(const YAML::Node& node, const std::string& path, const char* key, std::vector<double>& out) {
    const auto n = node[key];
    if (!n) {
        return;
    }
    const auto full = join(path, key);
    out.clear();
    if (n.IsScalar()) {
        out.push_back(convert<double>(n, full, "a number"));
        return;
    }
    if (!n.IsSequence()) {
        throw ConfigError(full, "expected a number or a list of numbers");
    }
    for (std::size_t i = 0; i < n.size(); ++i) {
        out.push_back(convert<double>(n[i], full + "[" + std::to_string(i) + "]", "a number"));
    }
}

void read_grid(const YAML::Node& node, const std::string& path, const char* key, GridSpec& out) {
    const auto n = node[key];
    if (!n) {
        return;
    }
    const auto full = join(path, key);
    if (n.IsMap()) {
        check_keys(n, full, {"start", "stop", "step"});
        GridSpec g;
        if (!n["start"] || !n["stop"] || !n["step"]) {
            throw ConfigError(full, "a range needs start, stop and step");
        }
        read(n, full, "start", g.start);
        read(n, full, "stop", g.stop);
        read(n, full, "step", g.step);
        out = g;
        return;
    }
    GridSpec g;
    read_list(node, path, key, g.values);
    if (g.values.empty()) {
        throw ConfigError(full, "must not be empty");
    }
    out = g;
}

// Recursive on purpose: reassigning a YAML::Node variable rebinds the node it
// refers to inside the tree, so an iterative walk would clobber parents.
void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t i, const YAML::Node& value,
              const std::string& key) {
    if (i + 1 == parts.size()) {
        node[parts[i]] = value;
        return;
    }
    YAML::Node child = node[parts[i]];
    if (!child.IsDefined() || child.IsNull()) {
        node[parts[i]] = YAML::Node(YAML::NodeType::Map);
    } else if (!child.IsMap()) {
        throw ConfigError(key, "'" + parts[i] + "' is not a table");
    }
    set_path(node[parts[i]], parts, i + 1, value, key);
}

// Applies one `a.b.c=value` override to the tree, creating tables as needed.
void apply_override(YAML::Node& root, const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(text, "override must look like key.path=value");
    }
    const std::string key = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) {
            throw ConfigError(key, "empty path component");
        }
        parts.push_back(part);
    }
    YAML::Node parsed;
    try {
        parsed = YAML::Load(value);
    } catch (const YAML::Exception& e) {
        throw ConfigError(key, std::string("cannot parse override value: ") + e.what());
    }
    set_path(root, parts, 0, parsed, key);
}

ExperimentConfig from_node(const YAML::Node& root) {
    ExperimentConfig c;
    if (!root || root.IsNull()) {
        return c;
    }
    check_keys(root, "", {"seed", "network", "region", "channel", "system", "sweep", "inversion", "capacity",
                          "outage", "output"});
    read(root, "", "seed", c.seed);

    if (const auto n = root["network"]) {
        check_keys(n, "network", {"interferers", "source_distance"});
        read(n, "network", "interferers", c.interferers);
        read(n, "network", "source_distance", c.source_distance);
    }
    if (const auto n = root["region"]) {
        check_keys(n, "region", {"r_ex", "r_net"});
        read(n, "region", "r_ex", c.region.r_ex);
        read(n, "region", "r_net", c.region.r_net);
    }
    if (const auto n = root["channel"]) {
        check_keys(n, "channel", {"alpha", "d0", "sigma_s", "m0", "m_i", "snr_db", "power_ratios", "shadow_source"});
        read(n, "channel", "alpha", c.channel.alpha);
        read(n, "channel", "d0", c.channel.d0);
        read(n, "channel", "sigma_s", c.channel.sigma_s);
        read(n, "channel", "m0", c.channel.m0);
        read_list(n, "channel", "m_i", c.channel.m_i);
        read(n, "channel", "snr_db", c.channel.snr_db);
        read_list(n, "channel", "power_ratios", c.channel.power_ratios);
        read(n, "channel", "shadow_source", c.channel.shadow_source);
    }
    if (const auto n = root["system"]) {
        check_keys(n, "system", {"duty", "eps_hat", "q"});
        read(n, "system", "duty", c.duty);
        read(n, "system", "eps_hat", c.eps_hat);
        read(n, "system", "q", c.q);
    }
    if (const auto n = root["sweep"]) {
        check_keys(n, "sweep", {"h_grid", "psi_grid", "L_grid", "topologies", "reuse_topologies"});
        read_grid(n, "sweep", "h_grid", c.h_grid);
        read_grid(n, "sweep", "psi_grid", c.psi_grid);
        read_grid(n, "sweep", "L_grid", c.L_grid);
        read(n, "sweep", "topologies", c.topologies);
        read(n, "sweep", "reuse_topologies", c.reuse_topologies);
    }
    if (const auto n = root["inversion"]) {
        check_keys(n, "inversion", {"beta_lo", "beta_hi", "tolerance", "max_iterations", "max_expansions"});
        read(n, "inversion", "beta_lo", c.inversion.beta_lo);
        read(n, "inversion", "beta_hi", c.inversion.beta_hi);
        read(n, "inversion", "tolerance", c.inversion.tolerance);
        read(n, "inversion", "max_iterations", c.inversion.max_iterations);
        read(n, "inversion", "max_expansions", c.inversion.max_expansions);
    }
    if (const auto n = root["capacity"]) {
        check_keys(n, "capacity", {"source", "file", "cache_dir", "gamma_db", "trials", "seed"});
        std::string source = c.capacity_source == CapacitySource::build ? "build" : "file";
        read(n, "capacity", "source", source);
        if (source == "build") {
            c.capacity_source = CapacitySource::build;
        } else if (source == "file") {
            c.capacity_source = CapacitySource::file;
        } else {
            throw ConfigError("capacity.source", "must be 'build' or 'file'");
        }
        read(n, "capacity", "file", c.capacity_file);
        read(n, "capacity", "cache_dir", c.capacity_cache);
        read_grid(n, "capacity", "gamma_db", c.gamma_db);
        read(n, "capacity", "trials", c.capacity_trials);
        read(n, "capacity", "seed", c.capacity_seed);
    }
    if (const auto n = root["outage"]) {
        check_keys(n, "outage", {"beta", "L", "psi", "trials", "topology"});
        read(n, "outage", "beta", c.outage_beta);
        read(n, "outage", "L", c.outage_L);
        read(n, "outage", "psi", c.outage_psi);
        read(n, "outage", "trials", c.outage_trials);
        read(n, "outage", "topology", c.outage_topology);
    }
    if (const auto n = root["output"]) {
        check_keys(n, "output", {"dir", "checkpoint_every"});
        read(n, "output", "dir", c.out_dir);
        read(n, "output", "checkpoint_every", c.checkpoint_every);
    }
    return c;
}

std::string num(double v) { return format_double(v); }

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch;
    }
    return out + "\"";
}

std::string list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + num(v[i]);
    }
    return out + "]";
}

std::string grid(const GridSpec& g) {
    if (!g.values.empty()) {
        return list(g.values);
    }
    return "{start: " + num(g.start) + ", stop: " + num(g.stop) + ", step: " + num(g.step) + "}";
}

void validate_grid(const GridSpec& g, const std::string& path) {
    if (!g.values.empty()) {
        for (double v : g.values) {
            if (!std::isfinite(v)) {
                throw ConfigError(path, "values must be finite");
            }
        }
        return;
    }
    if (!(g.step > 0.0) || !(g.stop >= g.start) || !std::isfinite(g.start) || !std::isfinite(g.stop)) {
        throw ConfigError(path, "range needs finite start <= stop and step > 0");
    }
    if ((g.stop - g.start) / g.step > 1e7) {
        throw ConfigError(path, "range has too many points");
    }
}

}  // namespace

std::vector<double> GridSpec::expand() const {
    if (!values.empty()) {
        return values;
    }
    return make_grid(start, stop, step);
}

void ExperimentConfig::validate() const {
    validate_grid(h_grid, "sweep.h_grid");
    validate_grid(psi_grid, "sweep.psi_grid");
    validate_grid(L_grid, "sweep.L_grid");
    validate_grid(gamma_db, "capacity.gamma_db");
    for (double L : L_grid.expand()) {
        if (L != std::round(L)) {
            throw ConfigError("sweep.L_grid", "channel counts must be integers");
        }
    }
    if (!(source_distance > 0.0)) {
        throw ConfigError("network.source_distance", "must be > 0");
    }
    sweep().validate();
    const auto g = gamma_db.expand();
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) {
            throw ConfigError("capacity.gamma_db", "must be strictly ascending");
        }
    }
    if (capacity_trials < 1000) {
        throw ConfigError("capacity.trials", "must be >= 1000");
    }
    if (capacity_source == CapacitySource::file && capacity_file.empty()) {
        throw ConfigError("capacity.file", "required when capacity.source is 'file'");
    }
    if (!(outage_beta > 0.0) || !std::isfinite(outage_beta)) {
        throw ConfigError("outage.beta", "must be finite and > 0");
    }
    if (outage_L < 2) {
        throw ConfigError("outage.L", "must be >= 2");
    }
    if (!(outage_psi > 0.0 && outage_psi <= 1.0)) {
        throw ConfigError("outage.psi", "must lie in (0, 1]");
    }
    if (outage_trials < 1) {
        throw ConfigError("outage.trials", "must be >= 1");
    }
    if (checkpoint_every < 1) {
        throw ConfigError("output.checkpoint_every", "must be >= 1");
    }
    if (out_dir.empty()) {
        throw ConfigError("output.dir", "must not be empty");
    }
}

SweepConfig ExperimentConfig::sweep() const {
    SweepConfig s;
    s.h_grid = h_grid.expand();
    s.psi_grid = psi_grid.expand();
    s.L_grid.clear();
    for (double L : L_grid.expand()) {
        s.L_grid.push_back(static_cast<int>(std::lround(L)));
    }
    s.topologies = topologies;
    s.topology.region = region;
    s.topology.channel = channel;
    s.topology.interferers = interferers;
    s.topology.source_distance = source_distance;
    s.duty = duty;
    s.eps_hat = eps_hat;
    s.q = q;
    s.reuse_topologies = reuse_topologies;
    s.inversion = inversion;
    return s;
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("<file>", std::string("YAML syntax error: ") + e.what());
    }
    if (!root.IsDefined() || root.IsNull()) {
        root = YAML::Node(YAML::NodeType::Map);
    }
    if (!root.IsMap()) {
        throw ConfigError("<root>", "expected a table");
    }
    for (const auto& o : overrides) {
        apply_override(root, o);
    }
    ExperimentConfig c = from_node(root);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

std::string to_yaml(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "seed: " << c.seed << "\n"
      << "network:\n"
      << "  interferers: " << c.interferers << "\n"
      << "  source_distance: " << num(c.source_distance) << "\n"
      << "region:\n"
      << "  r_ex: " << num(c.region.r_ex) << "\n"
      << "  r_net: " << num(c.region.r_net) << "\n"
      << "channel:\n"
      << "  alpha: " << num(c.channel.alpha) << "\n"
      << "  d0: " << num(c.channel.d0) << "\n"
      << "  sigma_s: " << num(c.channel.sigma_s) << "\n"
      << "  shadow_source: " << (c.channel.shadow_source ? "true" : "false") << "\n"
      << "  m0: " << c.channel.m0 << "\n"
      << "  m_i: " << list(c.channel.m_i) << "\n"
      << "  snr_db: " << num(c.channel.snr_db) << "\n"
      << "  power_ratios: " << list(c.channel.power_ratios) << "\n"
      << "system:\n"
      << "  duty: " << num(c.duty) << "\n"
      << "  eps_hat: " << num(c.eps_hat) << "\n"
      << "  q: " << c.q << "\n"
      << "sweep:\n"
      << "  h_grid: " << grid(c.h_grid) << "\n"
      << "  psi_grid: " << grid(c.psi_grid) << "\n"
      << "  L_grid: " << grid(c.L_grid) << "\n"
      << "  topologies: " << c.topologies << "\n"
      << "  reuse_topologies: " << (c.reuse_topologies ? "true" : "false") << "\n"
      << "inversion:\n"
      << "  beta_lo: " << num(c.inversion.beta_lo) << "\n"
      << "  beta_hi: " << num(c.inversion.beta_hi) << "\n"
      << "  tolerance: " << num(c.inversion.tolerance) << "\n"
      << "  max_iterations: " << c.inversion.max_iterations << "\n"
      << "  max_expansions: " << c.inversion.max_expansions << "\n"
      << "capacity:\n"
      << "  source: " << (c.capacity_source == CapacitySource::build ? "build" : "file") << "\n"
      << "  file: " << quoted(c.capacity_file) << "\n"
      << "  cache_dir: " << quoted(c.capacity_cache) << "\n"
      << "  gamma_db: " << grid(c.gamma_db) << "\n"
      << "  trials: " << c.capacity_trials << "\n"
      << "  seed: " << c.capacity_seed << "\n"
      << "outage:\n"
      << "  beta: " << num(c.outage_beta) << "\n"
      << "  L: " << c.outage_L << "\n"
      << "  psi: " << num(c.outage_psi) << "\n"
      << "  trials: " << c.outage_trials << "\n"
      << "  topology: " << c.outage_topology << "\n"
      << "output:\n"
      << "  dir: " << quoted(c.out_dir) << "\n"
      << "  checkpoint_every: " << c.checkpoint_every << "\n";
    return o.str();
}

std::string config_hash(const ExperimentConfig& config) {
    // Where results go does not change them, so output and cache paths stay out of the hash.
    ExperimentConfig c = config;
    c.out_dir = "-";
    c.checkpoint_every = 1;
    c.capacity_cache = "-";
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(to_yaml(c))));
    return buf;
}

}  // namespace fhnet
