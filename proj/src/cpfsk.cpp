#include "fhnet/cpfsk.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "fhnet/errors.hpp"

namespace fhnet {

namespace {

constexpr double pi = std::numbers::pi;

double sinc(double x) {
    const double px = pi * x;
    if (std::fabs(px) < 1e-8) {
        return 1.0 - px * px / 6.0;
    }
    return std::sin(px) / px;
}

// Integral of exp(j 2 pi x tau) over one symbol.
std::complex<double> tone_transform(double x) { return std::polar(sinc(x), pi * x); }

double density_impl(const ModulationSpec& spec, bool integer_h, double beta, double f) {
    const int q = spec.q;
    const double h = spec.h;
    if (integer_h) {
        double mean_sq = 0.0;
        std::complex<double> mean{0.0, 0.0};
        for (int a = 1 - q; a <= q - 1; a += 2) {
            const auto x = tone_transform(a * h / 2.0 - f);
            mean_sq += std::norm(x);
            mean += x;
        }
        mean_sq /= q;
        mean /= static_cast<double>(q);
        return std::max(0.0, mean_sq - std::norm(mean));
    }

    // Closed form for CPFSK with equiprobable symbols (Proakis).
    std::vector<double> amp(static_cast<std::size_t>(q));
    double diag = 0.0;
    for (int n = 1; n <= q; ++n) {
        amp[static_cast<std::size_t>(n - 1)] = sinc(f - 0.5 * (2 * n - 1 - q) * h);
        diag += amp[static_cast<std::size_t>(n - 1)] * amp[static_cast<std::size_t>(n - 1)];
    }
    const double b = beta;
    const double denom = 1.0 + b * b - 2.0 * b * std::cos(2.0 * pi * f);
    double cross = 0.0;
    for (int n = 1; n <= q; ++n) {
        for (int m = 1; m <= q; ++m) {
            const double alpha = pi * h * (m + n - 1 - q);
            const double bnm = (std::cos(2.0 * pi * f - alpha) - b * std::cos(alpha)) / denom;
            cross += bnm * amp[static_cast<std::size_t>(n - 1)] * amp[static_cast<std::size_t>(m - 1)];
        }
    }
    return std::max(0.0, diag / q + 2.0 * cross / (q * q));
}

bool is_integer_index(double h) { return std::fabs(h - std::round(h)) < 1e-12; }

double resonance(const ModulationSpec& spec) {
    return std::sin(spec.q * pi * spec.h) / (spec.q * std::sin(pi * spec.h));
}

}  // namespace

void ModulationSpec::validate() const {
    if (q < 2) {
        throw DomainError("modulation order q must be >= 2");
    }
    if (!(h > 0.0 && h <= 1.0)) {
        throw DomainError("modulation index h must lie in (0, 1]");
    }
}

CpfskSpectrum::CpfskSpectrum(ModulationSpec spec) : spec_(spec) {
    spec_.validate();
    const double h = spec_.h;
    const int q = spec_.q;
    integer_h_ = is_integer_index(h);
    if (!integer_h_) {
        beta_ = resonance(spec_);
    } else {
        // The mean waveform is a sum of q unit tones at +-a h / 2 (a odd), each carrying 1/q^2.
        for (int a = -(q - 1); a <= q - 1; a += 2) {
            lines_.push_back({a * h / 2.0, 1.0 / (q * q)});
        }
    }

    // Panel edges: half-integers (where the resonant denominator peaks), tone
    // centres, and geometric clusters around both so narrow peaks at small h or
    // h near 1 are resolved.
    std::vector<double> anchors;
    for (double f = 0.0; f <= max_frequency; f += 0.5) {
        breaks_.push_back(f);
        if (f <= 3.0) {
            anchors.push_back(f);
        }
    }
    for (int a = 1 - q; a <= q - 1; a += 2) {
        anchors.push_back(std::fabs(a * h / 2.0));
    }
    for (double p : anchors) {
        breaks_.push_back(p);
        for (int k = 1; k <= 8; ++k) {
            const double d = std::pow(10.0, -k);
            breaks_.push_back(p + d);
            if (p - d > 0.0) {
                breaks_.push_back(p - d);
            }
        }
    }
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end(),
                              [](double x, double y) { return std::fabs(x - y) < 1e-15; }),
                  breaks_.end());
    breaks_.erase(std::remove_if(breaks_.begin(), breaks_.end(), [](double f) { return f > max_frequency; }),
                  breaks_.end());

    auto line_power_at = [&](double f) {
        double p = 0.0;
        for (const auto& line : lines_) {
            if (std::fabs(std::fabs(line.frequency) - f) < 1e-12) {
                p += line.power;
            }
        }
        return p;
    };
    cumulative_.resize(breaks_.size());
    cumulative_[0] = line_power_at(0.0);
    for (std::size_t k = 1; k < breaks_.size(); ++k) {
        cumulative_[k] = cumulative_[k - 1] + 2.0 * integrate(breaks_[k - 1], breaks_[k]) + line_power_at(breaks_[k]);
    }
    total_ = cumulative_.back();
}

double CpfskSpectrum::density(double f) const { return density_impl(spec_, integer_h_, beta_, f); }

double CpfskSpectrum::integrate(double a, double b) const {
    if (b <= a) {
        return 0.0;
    }
    static const bool quiet = (gsl_set_error_handler_off(), true);
    (void)quiet;
    constexpr std::size_t limit = 200;
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> work(
        gsl_integration_workspace_alloc(limit), &gsl_integration_workspace_free);
    gsl_function fn;
    fn.function = [](double x, void* self) { return static_cast<const CpfskSpectrum*>(self)->density(x); };
    fn.params = const_cast<CpfskSpectrum*>(this);
    double result = 0.0;
    double error = 0.0;
    // Status is ignored: a roundoff-limited panel still returns its best estimate.
    gsl_integration_qag(&fn, a, b, 1e-15, 1e-11, limit, GSL_INTEG_GAUSS31, work.get(), &result, &error);
    return result;
}

double CpfskSpectrum::cumulative(double half_width) const {
    if (half_width <= 0.0) {
        return cumulative_[0];
    }
    if (half_width >= breaks_.back()) {
        return total_;
    }
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), half_width);
    const auto k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    double c = cumulative_[k] + 2.0 * integrate(breaks_[k], half_width);
    for (const auto& line : lines_) {
        if (std::fabs(line.frequency) > breaks_[k] + 1e-12 && std::fabs(line.frequency) <= half_width) {
            c += line.power;
        }
    }
    return c;
}

double CpfskSpectrum::in_band_power(double bandwidth) const { return cumulative(bandwidth / 2.0) / total_; }

double CpfskSpectrum::fractional_power_bandwidth(double psi) const {
    if (!(psi > 0.0 && psi < 1.0)) {
        throw DomainError("fractional_power_bandwidth: psi must lie in (0, 1); psi = 1 has unbounded support");
    }
    const double target = psi * total_;
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
    const auto k = static_cast<std::size_t>(it - cumulative_.begin());
    if (k == 0) {
        return 0.0;
    }
    const double lo_edge = breaks_[k - 1];
    const double hi_edge = breaks_[k];
    // If a line sits on the upper edge and the continuous part alone falls short, the line decides.
    const double continuous_to_edge = cumulative_[k - 1] + 2.0 * integrate(lo_edge, hi_edge);
    if (continuous_to_edge < target) {
        return 2.0 * hi_edge;
    }
    double lo = lo_edge;
    double hi = hi_edge;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(hi, 1e-6); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (cumulative_[k - 1] + 2.0 * integrate(lo_edge, mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 2.0 * hi;
}

double cpfsk_psd(const ModulationSpec& spec, double f) {
    spec.validate();
    const bool integer_h = is_integer_index(spec.h);
    return density_impl(spec, integer_h, integer_h ? 0.0 : resonance(spec), f);
}

double fractional_power_bandwidth(const ModulationSpec& spec, double psi) {
    return CpfskSpectrum(spec).fractional_power_bandwidth(psi);
}

double spectral_efficiency(const ModulationSpec& spec, double psi) {
    return 1.0 / fractional_power_bandwidth(spec, psi);
}

}  // namespace fhnet
