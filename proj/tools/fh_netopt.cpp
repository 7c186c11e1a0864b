// fh-netopt: command-line front end for the outage, rate-adaptation and
// network-parameter search code in fhnet_core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhnet/capacity.hpp"
#include "fhnet/config.hpp"
#include "fhnet/cpfsk.hpp"
#include "fhnet/errors.hpp"
#include "fhnet/kernels.hpp"
#include "fhnet/numeric.hpp"
#include "fhnet/optimizer.hpp"
#include "fhnet/outage.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fhnet;

namespace {

enum Exit { ok = 0, config_error = 2, self_check_failed = 3, io_error = 4 };

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string out;
    std::vector<std::string> sets;
};

ExperimentConfig resolve(const Common& common) {
    auto overrides = common.sets;
    if (common.seed) {
        overrides.push_back("seed=" + std::to_string(*common.seed));
    }
    if (!common.out.empty()) {
        overrides.push_back("output.dir=\"" + common.out + "\"");
    }
    if (common.config_path.empty()) {
        return parse_config("", overrides);
    }
    return load_config(common.config_path, overrides);
}

std::string provenance(const ExperimentConfig& config) {
    return "config_hash=" + config_hash(config) + " seed=" + std::to_string(config.seed);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + path.string());
    }
}

fs::path prepare_out(const ExperimentConfig& config) {
    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "config.yaml", to_yaml(config));
    return dir;
}

CurveSource curve_source(const ExperimentConfig& config) {
    const auto grid = config.gamma_db.expand();
    if (config.capacity_source == CapacitySource::file) {
        auto curves = std::make_shared<std::vector<CapacityCurve>>(read_capacity_csv(config.capacity_file, config.q));
        return [curves](const ModulationSpec& spec) {
            for (const auto& c : *curves) {
                if (std::fabs(c.h - spec.h) < 1e-9) {
                    return c;
                }
            }
            throw ConfigError("capacity.file", "no curve for h=" + format_double(spec.h));
        };
    }
    auto cache = std::make_shared<CapacityCache>(config.capacity_cache);
    return [cache, grid, trials = config.capacity_trials, seed = config.capacity_seed](const ModulationSpec& spec) {
        return cache->load_or_build(spec, grid, trials, seed);
    };
}

json point_json(const SweepPoint& p) {
    return json{{"L", p.L},
                {"h", p.h},
                {"psi", p.psi},
                {"mean_rate", p.mean_rate},
                {"eta", p.eta},
                {"mase_bps_per_khz_m2", p.mase_per_khz()},
                {"n_infeasible", p.n_infeasible},
                {"n_capped", p.n_capped},
                {"n_clamped", p.n_clamped}};
}

// ---- outage ---------------------------------------------------------------

struct OutageArgs {
    std::optional<double> beta;
    std::optional<std::uint64_t> topology_seed;
    std::optional<std::uint64_t> trials;
    bool self_check = false;
};

int cmd_outage(const Common& common, const OutageArgs& args) {
    auto sets = common;
    if (args.beta) {
        sets.sets.push_back("outage.beta=" + format_double(*args.beta));
    }
    if (args.trials) {
        sets.sets.push_back("outage.trials=" + std::to_string(*args.trials));
    }
    const ExperimentConfig config = resolve(sets);
    kernels::set_threads(common.threads);
    const std::uint64_t topo_seed = args.topology_seed.value_or(config.seed);
    const SweepConfig sweep = config.sweep();

    const NetworkRealization topology =
        draw_topology(sweep.topology, topo_seed, stream_id(StreamTag::topology, config.outage_topology, 0));
    SystemParams params;
    params.L = config.outage_L;
    params.psi = config.outage_psi;
    params.duty = config.duty;
    const OutageContext context{topology, make_link(params, config.channel), config.outage_beta};

    const double closed = conditional_outage(context);
    const auto mc = monte_carlo_outage(context, config.outage_trials,
                                       {config.seed, stream_id(StreamTag::outage_mc, config.outage_topology, 0)});
    const double se = std::max(mc.std_error, 1.0 / static_cast<double>(mc.trials));
    const double z = (mc.estimate - closed) / se;

    json out{{"config_hash", config_hash(config)},
             {"seed", config.seed},
             {"topology_seed", topo_seed},
             {"topology", config.outage_topology},
             {"beta", config.outage_beta},
             {"L", config.outage_L},
             {"psi", config.outage_psi},
             {"omega0", topology.omega0},
             {"closed_form", closed},
             {"monte_carlo", {{"estimate", mc.estimate}, {"std_error", mc.std_error}, {"trials", mc.trials}}},
             {"z", z}};
    std::cout << out.dump(2) << '\n';
    if (args.self_check && std::fabs(z) > 4.0) {
        std::cerr << "self-check failed: closed form and Monte Carlo differ by " << std::fabs(z)
                  << " standard errors\n";
        return self_check_failed;
    }
    return ok;
}

// ---- optimize -------------------------------------------------------------

int cmd_optimize(const Common& common) {
    const ExperimentConfig config = resolve(common);
    kernels::set_threads(common.threads);
    const fs::path dir = prepare_out(config);
    const SweepConfig sweep = config.sweep();

    SearchOptions options;
    options.seed = config.seed;
    options.curves = curve_source(config);
    options.checkpoint = dir / "sweep.checkpoint.json";
    options.checkpoint_tag = config_hash(config);
    options.checkpoint_every = config.checkpoint_every;
    options.progress = [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
        const std::size_t pct = 100 * done / total;
        if (pct >= last + 10 || done == total) {
            std::cerr << "sweep " << pct << "% (" << done << "/" << total << " blocks)\n";
            last = pct;
        }
    };

    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult result = grid_search(sweep, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string tag = provenance(config);
    write_sweep_csv(dir / "sweep.csv", result.table, tag);

    std::ostringstream samples;
    samples << "# " << tag << " L=" << result.best.L << " h=" << format_double(result.best.h)
            << " psi=" << format_double(result.best.psi) << "\nrate\n";
    for (double r : result.best.rate_samples) {
        samples << format_double(r) << '\n';
    }
    write_text(dir / "rate_samples.csv", samples.str());

    json summary{{"config_hash", config_hash(config)},
                 {"seed", config.seed},
                 {"best", point_json(result.best)},
                 {"rows", result.table.size()},
                 {"topologies", sweep.topologies},
                 {"density_per_m2", network_density(sweep.topology.region, sweep.topology.interferers)},
                 {"config", to_yaml(config)}};
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    const auto& b = result.best;
    std::cout << "best L=" << b.L << " h=" << format_double(b.h) << " psi=" << format_double(b.psi)
              << " E[R]=" << b.mean_rate << " eta=" << b.eta << " mase=" << b.mase_per_khz() << " bps/kHz-m2\n";
    // Timing and resume counts stay out of the files so reruns reproduce them exactly.
    std::cout << "runtime " << seconds << " s, " << result.resumed_blocks << " blocks resumed from checkpoint\n";
    return ok;
}

// ---- figures --------------------------------------------------------------

struct FigureArgs {
    std::string figure;
    std::string table;
    std::string samples;
};

std::string first_comment(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '#') {
            return line;
        }
        if (!line.empty()) {
            break;
        }
    }
    return {};
}

std::vector<double> read_samples(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::vector<double> out;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header) {
            if (line != "rate") {
                throw DomainError(path.string() + ": expected header 'rate'");
            }
            header = true;
            continue;
        }
        try {
            out.push_back(std::stod(line));
        } catch (const std::logic_error&) {
            throw DomainError(path.string() + ": malformed rate '" + line + "'");
        }
    }
    return out;
}

int cmd_figures(const Common& common, const FigureArgs& args) {
    const ExperimentConfig config = resolve(common);
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    std::ostringstream out;

    if (args.figure == "rate-cdf") {
        const fs::path src = args.samples.empty() ? fs::path(args.table).parent_path() / "rate_samples.csv"
                                                  : fs::path(args.samples);
        const auto cdf = rate_cdf(read_samples(src));
        if (const auto c = first_comment(src); !c.empty()) {
            out << c << '\n';
        }
        out << "rate,cdf\n";
        for (const auto& [r, f] : cdf) {
            out << format_double(r) << ',' << format_double(f) << '\n';
        }
    } else {
        const SweepAxis axis = args.figure == "L" ? SweepAxis::L : args.figure == "h" ? SweepAxis::h : SweepAxis::psi;
        const auto table = read_sweep_csv(args.table);
        if (const auto c = first_comment(args.table); !c.empty()) {
            out << c << '\n';
        }
        out << "L,h,psi,max_mase_bps_per_khz_m2,mean_rate\n";
        for (const auto& p : marginal_best(table, axis)) {
            out << p.L << ',' << format_double(p.h) << ',' << format_double(p.psi) << ','
                << format_double(p.mase_per_khz()) << ',' << format_double(p.mean_rate) << '\n';
        }
    }
    const fs::path target = dir / ("figure_" + args.figure + ".csv");
    write_text(target, out.str());
    std::cout << target.string() << '\n';
    return ok;
}

// ---- capacity-table -------------------------------------------------------

int cmd_capacity_table(const Common& common, const std::vector<double>& h_values) {
    const ExperimentConfig config = resolve(common);
    kernels::set_threads(common.threads);
    const fs::path dir = prepare_out(config);
    const auto hs = h_values.empty() ? config.h_grid.expand() : h_values;
    const auto source = curve_source(config);
    std::vector<CapacityCurve> curves;
    for (double h : hs) {
        const ModulationSpec spec{config.q, h};
        spec.validate();
        curves.push_back(source(spec));
    }
    const std::string comment = provenance(config) + " trials=" + std::to_string(config.capacity_trials) +
                                " capacity_seed=" + std::to_string(config.capacity_seed);
    write_capacity_csv(dir / "capacity.csv", curves, comment);
    std::cout << (dir / "capacity.csv").string() << '\n';
    return ok;
}

// ---- psd ------------------------------------------------------------------

struct PsdArgs {
    double h = 0.8;
    double psi = 0.96;
    double fmax = 3.0;
    int points = 601;
};

int cmd_psd(const Common& common, const PsdArgs& args) {
    const ExperimentConfig config = resolve(common);
    const fs::path dir = prepare_out(config);
    const ModulationSpec spec{config.q, args.h};
    spec.validate();
    if (args.points < 2 || !(args.fmax > 0.0)) {
        throw ConfigError("psd", "--points must be >= 2 and --fmax > 0");
    }
    const CpfskSpectrum spectrum(spec);
    const double bandwidth = spectrum.fractional_power_bandwidth(args.psi);

    std::ostringstream csv;
    csv << "# " << provenance(config) << " q=" << spec.q << " h=" << format_double(spec.h) << "\n";
    csv << "f,density\n";
    for (int i = 0; i < args.points; ++i) {
        const double f = -args.fmax + 2.0 * args.fmax * i / (args.points - 1);
        csv << format_double(f) << ',' << format_double(spectrum.density(f)) << '\n';
    }
    const fs::path target = dir / ("psd_h" + format_double(spec.h) + ".csv");
    write_text(target, csv.str());

    json lines = json::array();
    for (const auto& l : spectrum.lines()) {
        lines.push_back({{"frequency", l.frequency}, {"power", l.power}});
    }
    json out{{"config_hash", config_hash(config)},
             {"q", spec.q},
             {"h", spec.h},
             {"psi", args.psi},
             {"bandwidth", bandwidth},
             {"eta", 1.0 / bandwidth},
             {"total_power", spectrum.total_power()},
             {"lines", lines},
             {"csv", target.string()}};
    std::cout << out.dump(2) << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-hopping ad hoc network outage and parameter search"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--config", common.config_path, "YAML configuration file");
    app.add_option("--seed", common.seed, "Master seed (overrides the config)");
    app.add_option("--threads", common.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", common.out, "Output directory (overrides output.dir)");
    app.add_option("--set", common.sets, "Override a config key, e.g. --set sweep.topologies=1000");

    OutageArgs outage_args;
    auto* outage = app.add_subcommand("outage", "Closed-form and Monte Carlo outage for one topology");
    outage->add_option("--beta", outage_args.beta, "SINR threshold (linear)");
    outage->add_option("--topology-seed", outage_args.topology_seed, "Seed used to draw the topology");
    outage->add_option("--trials", outage_args.trials, "Monte Carlo trials");
    outage->add_flag("--self-check", outage_args.self_check, "Exit 3 when the estimates differ by more than 4 sigma");

    auto* optimize = app.add_subcommand("optimize", "Exhaustive (L, h, psi) search");

    FigureArgs figure_args;
    auto* figures = app.add_subcommand("figures", "Plot data from a sweep table");
    figures->add_option("--figure", figure_args.figure, "L, h, psi or rate-cdf")
        ->required()
        ->check(CLI::IsMember({"L", "h", "psi", "rate-cdf"}));
    figures->add_option("--table", figure_args.table, "Sweep CSV written by optimize")->required();
    figures->add_option("--samples", figure_args.samples, "Rate samples CSV (rate-cdf only)");

    std::vector<double> cap_h;
    auto* capacity = app.add_subcommand("capacity-table", "Build or load capacity curves and write them as CSV");
    capacity->add_option("--index", cap_h, "Modulation indices (default: the sweep h grid)")->delimiter(',');

    PsdArgs psd_args;
    auto* psd = app.add_subcommand("psd", "CPFSK power spectrum and fractional-power bandwidth");
    psd->add_option("--index", psd_args.h, "Modulation index");
    psd->add_option("--psi", psd_args.psi, "Fractional in-band power");
    psd->add_option("--fmax", psd_args.fmax, "Half-width of the tabulated frequency range");
    psd->add_option("--points", psd_args.points, "Number of frequency samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*outage) {
            return cmd_outage(common, outage_args);
        }
        if (*optimize) {
            return cmd_optimize(common);
        }
        if (*figures) {
            return cmd_figures(common, figure_args);
        }
        if (*capacity) {
            return cmd_capacity_table(common, cap_h);
        }
        if (*psd) {
            return cmd_psd(common, psd_args);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    }
    return ok;
}
