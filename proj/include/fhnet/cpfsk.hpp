#pragma once

#include <vector>

namespace fhnet {

struct ModulationSpec {
    int q = 2;        // number of tones
    double h = 0.5;   // modulation index, (0, 1]

    void validate() const;
};

/// A discrete component of the spectrum (present only for integer h).
struct SpectralLine {
    double frequency;  // in symbol rates
    double power;      // fraction of total power
};

/// Baseband power spectrum of q-ary CPFSK with equiprobable symbols and unit
/// total power; frequencies are normalized to the symbol rate.
///
/// For non-integer h the spectrum is continuous. For integer h the phase state
/// becomes deterministic and part of the power collapses into lines at the
/// tone frequencies; `density` then returns the continuous part only and
/// `lines` lists the rest.
class CpfskSpectrum {
public:
    explicit CpfskSpectrum(ModulationSpec spec);

    const ModulationSpec& spec() const noexcept { return spec_; }

    /// Continuous spectral density at normalized frequency f (even in f).
    double density(double f) const;

    const std::vector<SpectralLine>& lines() const noexcept { return lines_; }

    /// Fraction of total power within |f| <= bandwidth / 2.
    double in_band_power(double bandwidth) const;

    /// Numerically integrated total power (continuous part over |f| <= max_frequency, plus lines).
    double total_power() const noexcept { return total_; }

    /// Smallest two-sided bandwidth holding fraction psi of the power.
    /// Throws DomainError unless 0 < psi < 1.
    double fractional_power_bandwidth(double psi) const;

    static constexpr double max_frequency = 50.0;

private:
    bool integer_index() const noexcept { return integer_h_; }
    double integrate(double a, double b) const;
    double cumulative(double half_width) const;  // power within |f| <= half_width

    ModulationSpec spec_;
    bool integer_h_ = false;
    double beta_ = 0.0;  // sin(q pi h) / (q sin(pi h))
    std::vector<SpectralLine> lines_;
    std::vector<double> breaks_;      // panel edges on [0, max_frequency]
    std::vector<double> cumulative_;  // power within |f| <= breaks_[k], lines included
    double total_ = 0.0;
};

/// Convenience wrappers around CpfskSpectrum.
double cpfsk_psd(const ModulationSpec& spec, double f);
double fractional_power_bandwidth(const ModulationSpec& spec, double psi);

/// Symbol rate over the 100 psi % power bandwidth.
double spectral_efficiency(const ModulationSpec& spec, double psi);

}  // namespace fhnet
