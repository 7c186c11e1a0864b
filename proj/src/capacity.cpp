#include "fhnet/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fhnet/errors.hpp"
#include "fhnet/kernels.hpp"
#include "fhnet/numeric.hpp"

namespace fhnet {

namespace {

std::uint64_t curve_stream(const ModulationSpec& spec, std::size_t point) {
    const auto spec_tag = fnv1a(std::to_string(spec.q) + ":" + format_double(spec.h));
    return stream_id(StreamTag::capacity, spec_tag, point);
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw DomainError(where + ": not a number: '" + text + "'");
    }
}

}  // namespace

CapacityEstimate estimate_capacity(const ModulationSpec& spec, double gamma, std::uint64_t trials, StreamKey key) {
    return kernels::omp::estimate_capacity(spec, gamma, trials, key);
}

void CapacityCurve::validate() const {
    if (gamma_db.empty() || gamma_db.size() != rates.size()) {
        throw DomainError("capacity curve: grid and rates must be nonempty and equal length");
    }
    for (std::size_t i = 1; i < gamma_db.size(); ++i) {
        if (!(gamma_db[i] > gamma_db[i - 1])) {
            throw DomainError("capacity curve: gamma grid must be strictly ascending");
        }
    }
    const double cap = std::log2(static_cast<double>(q));
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] >= 0.0 && rates[i] <= cap)) {
            throw DomainError("capacity curve: rate outside [0, log2 q]");
        }
        if (i > 0 && rates[i] < rates[i - 1]) {
            throw DomainError("capacity curve: rates must be nondecreasing in gamma");
        }
    }
}

RateLookup lookup(const CapacityCurve& curve, double gamma_linear) noexcept {
    const auto& g = curve.gamma_db;
    const auto& r = curve.rates;
    if (!(gamma_linear > 0.0)) {
        return {r.front(), true};
    }
    const double db = 10.0 * std::log10(gamma_linear);
    if (db <= g.front()) {
        return {r.front(), db < g.front()};
    }
    if (db >= g.back()) {
        return {r.back(), db > g.back()};
    }
    const auto it = std::upper_bound(g.begin(), g.end(), db);
    const auto k = static_cast<std::size_t>(it - g.begin());
    const double t = (db - g[k - 1]) / (g[k] - g[k - 1]);
    return {r[k - 1] + t * (r[k] - r[k - 1]), false};
}

CapacityCurve build_capacity_table(const ModulationSpec& spec, std::span<const double> gamma_db,
                                   std::uint64_t trials, std::uint64_t seed) {
    spec.validate();
    if (gamma_db.empty()) {
        throw DomainError("build_capacity_table: empty grid");
    }
    CapacityCurve curve;
    curve.q = spec.q;
    curve.h = spec.h;
    curve.gamma_db.assign(gamma_db.begin(), gamma_db.end());
    curve.trials = trials;
    curve.seed = seed;
    curve.raw_rates.resize(gamma_db.size());
    curve.std_errors.resize(gamma_db.size());
    for (std::size_t i = 1; i < gamma_db.size(); ++i) {
        if (!(gamma_db[i] > gamma_db[i - 1])) {
            throw DomainError("build_capacity_table: grid must be strictly ascending");
        }
    }
    // Argument checks happen here because exceptions cannot leave the parallel loop.
    if (trials < 2) {
        throw DomainError("build_capacity_table: need at least two trials per point");
    }

    const auto points = static_cast<std::int64_t>(gamma_db.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < points; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double gamma = std::pow(10.0, gamma_db[ui] / 10.0);
        const auto est = kernels::serial::estimate_capacity(spec, gamma, trials, {seed, curve_stream(spec, ui)});
        curve.raw_rates[ui] = est.rate;
        curve.std_errors[ui] = est.std_error;
    }
    curve.rates = isotonic_nondecreasing(curve.raw_rates);
    return curve;
}

std::vector<double> default_gamma_grid_db() { return make_grid(-10.0, 30.0, 0.5); }

void write_capacity_csv(const std::filesystem::path& path, std::span<const CapacityCurve> curves,
                        const std::string& comment) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "h,gamma_db,rate\n";
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.gamma_db.size(); ++i) {
            out << format_double(c.h) << ',' << format_double(c.gamma_db[i]) << ',' << format_double(c.rates[i])
                << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::vector<CapacityCurve> read_capacity_csv(const std::filesystem::path& path, int q) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::map<double, CapacityCurve> by_h;
    std::vector<double> order;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != "h,gamma_db,rate") {
                throw DomainError(path.string() + ": expected header 'h,gamma_db,rate'");
            }
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',')) {
            throw DomainError(path.string() + ":" + std::to_string(line_no) + ": expected three fields");
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const double h = parse_double(trim(a), where);
        auto [it, inserted] = by_h.try_emplace(h);
        if (inserted) {
            it->second.q = q;
            it->second.h = h;
            it->second.noise_model = "file";
            order.push_back(h);
        }
        it->second.gamma_db.push_back(parse_double(trim(b), where));
        it->second.rates.push_back(parse_double(trim(c), where));
    }
    if (!header_seen) {
        throw DomainError(path.string() + ": missing header");
    }
    std::vector<CapacityCurve> curves;
    for (double h : order) {
        auto& c = by_h.at(h);
        c.validate();
        curves.push_back(std::move(c));
    }
    return curves;
}

std::filesystem::path CapacityCache::path_for(const ModulationSpec& spec, std::span<const double> gamma_db,
                                              std::uint64_t trials, std::uint64_t seed) const {
    std::string key = "v1|q=" + std::to_string(spec.q) + "|h=" + format_double(spec.h) +
                      "|trials=" + std::to_string(trials) + "|seed=" + std::to_string(seed) + "|grid=";
    for (double g : gamma_db) {
        key += format_double(g) + ";";
    }
    char name[96];
    std::snprintf(name, sizeof(name), "cap_q%d_h%s_%016llx.csv", spec.q, format_double(spec.h).c_str(),
                  static_cast<unsigned long long>(fnv1a(key)));
    return dir_ / name;
}

CapacityCurve CapacityCache::load_or_build(const ModulationSpec& spec, std::span<const double> gamma_db,
                                           std::uint64_t trials, std::uint64_t seed) const {
    const auto path = path_for(spec, gamma_db, trials, seed);
    if (std::filesystem::exists(path)) {
        auto curves = read_capacity_csv(path, spec.q);
        if (curves.size() == 1 && curves[0].gamma_db.size() == gamma_db.size()) {
            auto curve = std::move(curves[0]);
            curve.trials = trials;
            curve.seed = seed;
            curve.noise_model = "awgn-noncoherent-symbolwise";
            return curve;
        }
    }
    auto curve = build_capacity_table(spec, gamma_db, trials, seed);
    std::filesystem::create_directories(dir_);
    auto tmp = path;
    tmp += ".tmp";
    const CapacityCurve one[] = {curve};
    write_capacity_csv(tmp, one);
    std::filesystem::rename(tmp, path);
    return curve;
}

}  // namespace fhnet
