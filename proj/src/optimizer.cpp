#include "fhnet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fhnet/collision.hpp"
#include "fhnet/cpfsk.hpp"
#include "fhnet/errors.hpp"
#include "fhnet/kernels.hpp"
#include "fhnet/numeric.hpp"

namespace fhnet {

namespace {

using json = nlohmann::json;

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Stream salt for the redraw mode; depends only on the triple's values so a
// point gets the same topologies whatever grid it sits in.
std::uint64_t triple_salt(int L, double h, double psi) {
    return fnv1a(std::to_string(L) + "|" + format_double(h) + "|" + format_double(psi));
}

std::vector<NetworkRealization> topologies_for(const SweepConfig& config, std::uint64_t seed, int L, double h,
                                               double psi) {
    if (config.reuse_topologies) {
        return kernels::omp::draw_topologies(config.topology, seed, config.topologies);
    }
    return kernels::omp::draw_topologies(config.topology, seed, config.topologies, StreamTag::redraw,
                                         triple_salt(L, h, psi));
}

json point_to_json(const SweepPoint& p) {
    return json{{"L", p.L},
                {"h", p.h},
                {"psi", p.psi},
                {"mean_rate", p.mean_rate},
                {"eta", p.eta},
                {"mase", p.mase},
                {"n_infeasible", p.n_infeasible},
                {"n_capped", p.n_capped},
                {"n_clamped", p.n_clamped}};
}

SweepPoint point_from_json(const json& j) {
    SweepPoint p;
    p.L = j.at("L").get<int>();
    p.h = j.at("h").get<double>();
    p.psi = j.at("psi").get<double>();
    p.mean_rate = j.at("mean_rate").get<double>();
    p.eta = j.at("eta").get<double>();
    p.mase = j.at("mase").get<double>();
    p.n_infeasible = j.at("n_infeasible").get<std::size_t>();
    p.n_capped = j.at("n_capped").get<std::size_t>();
    p.n_clamped = j.at("n_clamped").get<std::size_t>();
    return p;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << text;
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

struct Checkpoint {
    std::set<std::size_t> done;
    std::map<std::size_t, SweepPoint> rows;
};

std::optional<Checkpoint> load_checkpoint(const SearchOptions& options, std::size_t blocks, std::size_t rows) {
    if (options.checkpoint.empty() || !std::filesystem::exists(options.checkpoint)) {
        return std::nullopt;
    }
    std::ifstream in(options.checkpoint, std::ios::binary);
    json j;
    try {
        in >> j;
        if (j.at("tag").get<std::string>() != options.checkpoint_tag || j.at("blocks").get<std::size_t>() != blocks ||
            j.at("rows").get<std::size_t>() != rows) {
            return std::nullopt;  // belongs to a different run
        }
        Checkpoint cp;
        for (const auto& b : j.at("completed")) {
            cp.done.insert(b.get<std::size_t>());
        }
        for (const auto& r : j.at("table")) {
            cp.rows.emplace(r.at("index").get<std::size_t>(), point_from_json(r.at("point")));
        }
        return cp;
    } catch (const json::exception&) {
        return std::nullopt;  // torn or foreign file; start over
    }
}

void save_checkpoint(const SearchOptions& options, std::size_t blocks, std::size_t rows,
                     const std::vector<char>& done, const std::vector<SweepPoint>& table, std::size_t n_h,
                     std::size_t block_stride) {
    json j;
    j["tag"] = options.checkpoint_tag;
    j["blocks"] = blocks;
    j["rows"] = rows;
    j["completed"] = json::array();
    j["table"] = json::array();
    for (std::size_t b = 0; b < done.size(); ++b) {
        if (!done[b]) {
            continue;
        }
        j["completed"].push_back(b);
        for (std::size_t ih = 0; ih < n_h; ++ih) {
            const std::size_t idx = ih * block_stride + b;
            j["table"].push_back({{"index", idx}, {"point", point_to_json(table[idx])}});
        }
    }
    write_atomic(options.checkpoint, j.dump());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    return out;
}

constexpr const char* sweep_header = "L,h,psi,mean_rate,eta,mase_bps_per_khz_m2,n_infeasible,n_capped";

}  // namespace

std::vector<double> SweepConfig::make_default_h_grid() { return make_grid(0.01, 1.0, 0.01); }

std::vector<double> SweepConfig::make_default_psi_grid() { return make_grid(0.90, 0.99, 0.005); }

std::vector<int> SweepConfig::make_default_L_grid(int l_max) {
    std::vector<int> out;
    for (int L = 2; L <= l_max; ++L) {
        out.push_back(L);
    }
    return out;
}

void SweepConfig::validate() const {
    if (h_grid.empty()) {
        throw ConfigError("sweep.h_grid", "must not be empty");
    }
    for (double h : h_grid) {
        if (!(h > 0.0 && h <= 1.0)) {
            throw ConfigError("sweep.h_grid", "values must lie in (0, 1]");
        }
    }
    if (psi_grid.empty()) {
        throw ConfigError("sweep.psi_grid", "must not be empty");
    }
    for (double psi : psi_grid) {
        if (!(psi > 0.0 && psi < 1.0)) {
            throw ConfigError("sweep.psi_grid", "values must lie in (0, 1)");
        }
    }
    if (L_grid.empty()) {
        throw ConfigError("sweep.L_grid", "must not be empty");
    }
    for (int L : L_grid) {
        if (L < 2) {
            throw ConfigError("sweep.L_grid", "channel counts must be >= 2");
        }
    }
    if (topologies < 1) {
        throw ConfigError("sweep.topologies", "must be >= 1");
    }
    if (!(duty > 0.0 && duty <= 1.0)) {
        throw ConfigError("system.duty", "must lie in (0, 1]");
    }
    if (!(eps_hat > 0.0 && eps_hat < 1.0)) {
        throw ConfigError("system.eps_hat", "must lie in (0, 1)");
    }
    if (q < 2) {
        throw ConfigError("system.q", "must be >= 2");
    }
    topology.region.validate();
    topology.channel.validate(topology.interferers);
    if (!(topology.source_distance >= topology.channel.d0)) {
        throw ConfigError("network.source_distance", "must be >= channel.d0");
    }
    const auto& inv = inversion;
    if (!(inv.beta_lo > 0.0 && inv.beta_hi > inv.beta_lo)) {
        throw ConfigError("inversion.beta_lo", "need 0 < beta_lo < beta_hi");
    }
    if (!(inv.tolerance > 0.0) || inv.max_iterations < 1 || inv.max_expansions < 0) {
        throw ConfigError("inversion.tolerance", "tolerance and iteration limits must be positive");
    }
}

double network_density(const AnnulusRegion& region, std::size_t interferers) {
    return static_cast<double>(interferers) / region.area();
}

double normalized_mase(double mean_rate, double eta, int L, double duty, double eps_hat, double lambda) {
    return lambda * mean_rate * eta * duty * (1.0 - eps_hat) / static_cast<double>(L);
}

RateAverage rates_from_thresholds(std::span<const AdaptationResult> thresholds, const CapacityCurve& curve) {
    RateAverage out;
    out.samples.resize(thresholds.size());
    for (std::size_t n = 0; n < thresholds.size(); ++n) {
        const auto& t = thresholds[n];
        if (t.status == AdaptStatus::infeasible) {
            ++out.n_infeasible;
            out.samples[n] = 0.0;
            continue;
        }
        if (t.status == AdaptStatus::rate_capped) {
            ++out.n_capped;
        }
        const RateLookup r = lookup(curve, t.beta);
        out.n_clamped += r.clamped ? 1 : 0;
        out.samples[n] = r.rate;
    }
    if (!out.samples.empty()) {
        out.mean = pairwise_sum(out.samples) / static_cast<double>(out.samples.size());
    }
    return out;
}

LinkParams make_link(const SystemParams& params, const ChannelConfig& channel) {
    LinkParams link;
    link.probs = collision_probabilities(params.L, params.duty);
    link.splatter = SplatterModel::from_psi(params.psi);
    link.m0 = channel.m0;
    link.m_i = channel.m_i;
    link.snr = channel.snr_linear();
    return link;
}

RateAverage average_rate(const SystemParams& params, const ChannelConfig& channel,
                         std::span<const NetworkRealization> topologies, const CapacityCurve& curve,
                         const InversionOptions& options) {
    const LinkParams link = make_link(params, channel);
    const auto thresholds = kernels::omp::invert_all(topologies, link, params.eps_hat, options);
    return rates_from_thresholds(thresholds, curve);
}

SweepResult grid_search(const SweepConfig& input, const SearchOptions& options) {
    input.validate();
    if (!options.curves) {
        throw DomainError("grid_search: no capacity curve source");
    }
    SweepConfig config = input;
    config.h_grid = sorted_unique(config.h_grid);
    config.psi_grid = sorted_unique(config.psi_grid);
    config.L_grid = sorted_unique(config.L_grid);
    const std::size_t n_h = config.h_grid.size();
    const std::size_t n_psi = config.psi_grid.size();
    const std::size_t n_L = config.L_grid.size();
    const std::size_t blocks = n_psi * n_L;
    const std::size_t rows = n_h * blocks;

    // Curves and spectral efficiencies per h, built h-outermost.
    std::vector<CapacityCurve> curves;
    std::vector<std::vector<double>> eta(n_h, std::vector<double>(n_psi));
    curves.reserve(n_h);
    for (std::size_t ih = 0; ih < n_h; ++ih) {
        const ModulationSpec spec{config.q, config.h_grid[ih]};
        curves.push_back(options.curves(spec));
        const CpfskSpectrum spectrum(spec);
        for (std::size_t ip = 0; ip < n_psi; ++ip) {
            eta[ih][ip] = 1.0 / spectrum.fractional_power_bandwidth(config.psi_grid[ip]);
        }
    }

    const double lambda = network_density(config.topology.region, config.topology.interferers);
    std::vector<SweepPoint> table(rows);
    std::vector<char> done(blocks, 0);
    SweepResult result;
    if (auto cp = load_checkpoint(options, blocks, rows)) {
        for (std::size_t b : cp->done) {
            if (b < blocks) {
                done[b] = 1;
                ++result.resumed_blocks;
            }
        }
        for (auto& [idx, point] : cp->rows) {
            if (idx < rows) {
                table[idx] = point;
            }
        }
    }

    std::vector<NetworkRealization> shared;
    if (config.reuse_topologies) {
        shared = kernels::omp::draw_topologies(config.topology, options.seed, config.topologies);
    }

    std::size_t since_save = 0;
    std::size_t finished = result.resumed_blocks;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (done[b]) {
            continue;
        }
        const std::size_t ip = b / n_L;
        const std::size_t il = b % n_L;
        SystemParams params;
        params.L = config.L_grid[il];
        params.psi = config.psi_grid[ip];
        params.duty = config.duty;
        params.eps_hat = config.eps_hat;
        params.q = config.q;
        const LinkParams link = make_link(params, config.topology.channel);

        std::vector<AdaptationResult> thresholds;
        if (config.reuse_topologies) {
            thresholds = kernels::omp::invert_all(shared, link, config.eps_hat, config.inversion);
        }
        for (std::size_t ih = 0; ih < n_h; ++ih) {
            if (!config.reuse_topologies) {
                const auto fresh = topologies_for(config, options.seed, params.L, config.h_grid[ih], params.psi);
                thresholds = kernels::omp::invert_all(fresh, link, config.eps_hat, config.inversion);
            }
            const RateAverage avg = rates_from_thresholds(thresholds, curves[ih]);
            SweepPoint& p = table[ih * blocks + b];
            p.L = params.L;
            p.h = config.h_grid[ih];
            p.psi = params.psi;
            p.mean_rate = avg.mean;
            p.eta = eta[ih][ip];
            p.mase = normalized_mase(avg.mean, p.eta, p.L, config.duty, config.eps_hat, lambda);
            p.n_infeasible = avg.n_infeasible;
            p.n_capped = avg.n_capped;
            p.n_clamped = avg.n_clamped;
        }
        done[b] = 1;
        ++finished;
        if (options.progress) {
            options.progress(finished, blocks);
        }
        if (!options.checkpoint.empty() && ++since_save >= std::max<std::size_t>(1, options.checkpoint_every)) {
            save_checkpoint(options, blocks, rows, done, table, n_h, blocks);
            since_save = 0;
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < rows; ++i) {
        if (table[i].mase > table[best].mase) {
            best = i;
        }
    }
    result.table = std::move(table);
    result.best = result.table[best];
    result.best.rate_samples = point_rate_samples(config, options, result.best);
    if (!options.checkpoint.empty()) {
        std::error_code ec;
        std::filesystem::remove(options.checkpoint, ec);
    }
    return result;
}

std::vector<double> point_rate_samples(const SweepConfig& config, const SearchOptions& options,
                                       const SweepPoint& point) {
    SystemParams params;
    params.L = point.L;
    params.h = point.h;
    params.psi = point.psi;
    params.duty = config.duty;
    params.eps_hat = config.eps_hat;
    params.q = config.q;
    const auto tops = topologies_for(config, options.seed, point.L, point.h, point.psi);
    const CapacityCurve curve = options.curves(ModulationSpec{config.q, point.h});
    return average_rate(params, config.topology.channel, tops, curve, config.inversion).samples;
}

std::vector<std::pair<double, double>> rate_cdf(std::vector<double> samples) {
    if (samples.empty()) {
        throw DomainError("rate_cdf: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) {
            continue;
        }
        out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

double empirical_quantile(std::vector<double> samples, double p) {
    if (samples.empty()) {
        throw DomainError("empirical_quantile: no samples");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("empirical_quantile: p must lie in [0, 1]");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    auto k = static_cast<std::size_t>(std::ceil(p * n));
    k = std::clamp<std::size_t>(k, 1, samples.size());
    return samples[k - 1];
}

double interdecile_range(const std::vector<double>& samples) {
    return empirical_quantile(samples, 0.9) - empirical_quantile(samples, 0.1);
}

std::vector<SweepPoint> marginal_best(const std::vector<SweepPoint>& table, SweepAxis axis) {
    auto key = [axis](const SweepPoint& p) {
        switch (axis) {
            case SweepAxis::L:
                return static_cast<double>(p.L);
            case SweepAxis::h:
                return p.h;
            case SweepAxis::psi:
                return p.psi;
        }
        return 0.0;
    };
    std::map<double, SweepPoint> best;
    for (const auto& p : table) {
        auto [it, inserted] = best.try_emplace(key(p), p);
        if (!inserted && p.mase > it->second.mase) {
            it->second = p;
        }
    }
    std::vector<SweepPoint> out;
    out.reserve(best.size());
    for (auto& [x, p] : best) {
        out.push_back(p);
    }
    return out;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& table,
                     const std::string& comment) {
    std::ostringstream out;
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << sweep_header << '\n';
    for (const auto& p : table) {
        out << p.L << ',' << format_double(p.h) << ',' << format_double(p.psi) << ',' << format_double(p.mean_rate)
            << ',' << format_double(p.eta) << ',' << format_double(p.mase_per_khz()) << ',' << p.n_infeasible << ','
            << p.n_capped << '\n';
    }
    write_atomic(path, out.str());
}

std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::vector<SweepPoint> out;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != sweep_header) {
                throw DomainError(path.string() + ": unexpected sweep header");
            }
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 8) {
            throw DomainError(path.string() + ":" + std::to_string(line_no) + ": expected 8 fields");
        }
        try {
            SweepPoint p;
            p.L = std::stoi(f[0]);
            p.h = std::stod(f[1]);
            p.psi = std::stod(f[2]);
            p.mean_rate = std::stod(f[3]);
            p.eta = std::stod(f[4]);
            p.mase = std::stod(f[5]) / 1e3;
            p.n_infeasible = std::stoul(f[6]);
            p.n_capped = std::stoul(f[7]);
            out.push_back(p);
        } catch (const std::logic_error&) {
            throw DomainError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    if (!header_seen) {
        throw DomainError(path.string() + ": missing header");
    }
    return out;
}

}  // namespace fhnet
