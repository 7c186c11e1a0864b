#pragma once

#include <cstdint>
#include <vector>

#include "fhnet/collision.hpp"
#include "fhnet/rng.hpp"
#include "fhnet/topology.hpp"

namespace fhnet {

/// Link-level parameters that do not depend on the topology or the threshold.
struct LinkParams {
    CollisionProbs probs;
    SplatterModel splatter;
    int m0 = 1;                    // source Nakagami parameter, integer >= 1
    std::vector<double> m_i{1.0};  // one common value or one per interferer
    double snr = 10.0;             // linear

    double interferer_m(std::size_t i) const noexcept { return m_i.size() == 1 ? m_i[0] : m_i[i]; }
    void validate(std::size_t interferers) const;
};

/// Everything the conditional outage depends on.
struct OutageContext {
    NetworkRealization realization;
    LinkParams link;
    double beta = 1.0;  // SINR threshold, linear

    /// beta * m0 / (psi * Omega_0)
    double beta0() const noexcept;
};

/// Coefficient G_ell for one interferer with normalized power `omega`.
double g_coefficient(int ell, double omega, double m, double beta0, const CollisionProbs& probs,
                     const SplatterModel& splatter);

/// H_0..H_{t_max}: the truncated product over interferers of the polynomials
/// sum_ell G_ell(Omega_i) z^ell.
std::vector<double> h_coefficients(const OutageContext& context, int t_max);

/// P[SINR > beta | Omega], clamped to [0, 1].
double success_probability(const OutageContext& context);

/// Same quantity before clamping (for bound checks).
double success_probability_unclamped(const OutageContext& context);

/// P[SINR <= beta | Omega].
double conditional_outage(const OutageContext& context);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t events = 0;
};

/// Simulates fading gains and channel collisions with Omega held fixed and counts SINR <= beta.
MonteCarloEstimate monte_carlo_outage(const OutageContext& context, std::uint64_t trials, StreamKey key);

/// Closed-form evaluator specialised for repeated threshold queries on one
/// (topology, link) pair. Holds references; both must outlive it.
class OutageEvaluator {
public:
    OutageEvaluator(const NetworkRealization& realization, const LinkParams& link);

    double success(double beta) const;
    double outage(double beta) const { return 1.0 - success(beta); }

private:
    struct Interferer {
        double a_co;   // psi * Omega / m
        double a_adj;  // K_s * Omega / m
        double m;
        int coeff_set;  // index into coeffs_
    };

    const NetworkRealization& realization_;
    const LinkParams& link_;
    int t_max_;
    std::vector<Interferer> interferers_;
    std::vector<std::vector<double>> coeffs_;  // Gamma(l+m)/(Gamma(l+1)Gamma(m)) per distinct m
};

}  // namespace fhnet
