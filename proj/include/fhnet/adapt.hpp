#pragma once

#include "fhnet/capacity.hpp"
#include "fhnet/outage.hpp"

namespace fhnet {

enum class AdaptStatus {
    ok,
    rate_capped,  // outage stays below target even at the largest threshold tried
    infeasible,   // outage exceeds target even at the smallest threshold tried
};

struct InversionOptions {
    double beta_lo = 1e-6;
    double beta_hi = 1e6;
    double tolerance = 1e-6;   // absolute, on the outage probability
    int max_iterations = 200;
    int max_expansions = 3;    // each widens the bracket by 1e3 on the failing side
};

struct AdaptationResult {
    double beta = 0.0;             // SINR threshold, linear
    double rate = 0.0;             // bits/symbol
    double achieved_outage = 0.0;  // outage at beta
    AdaptStatus status = AdaptStatus::ok;
    bool rate_clamped = false;     // beta fell outside the capacity table
};

/// Largest threshold whose conditional outage does not exceed `eps_hat`,
/// within `tolerance` from below. Bisection on log(beta).
AdaptationResult invert_outage(const NetworkRealization& realization, const LinkParams& link, double eps_hat,
                               const InversionOptions& options = {});

/// Code rate for a threshold: the capacity curve read at beta; zero when infeasible.
double adapted_rate(const AdaptationResult& threshold, const CapacityCurve& curve);

/// invert_outage followed by adapted_rate, with the rate stored in the result.
AdaptationResult adapt(const NetworkRealization& realization, const LinkParams& link, double eps_hat,
                       const CapacityCurve& curve, const InversionOptions& options = {});

}  // namespace fhnet
