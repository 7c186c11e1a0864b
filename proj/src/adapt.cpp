#include "fhnet/adapt.hpp"

#include <cmath>

#include "fhnet/errors.hpp"

namespace fhnet {

AdaptationResult invert_outage(const NetworkRealization& realization, const LinkParams& link, double eps_hat,
                               const InversionOptions& options) {
    if (!(eps_hat > 0.0 && eps_hat < 1.0)) {
        throw DomainError("invert_outage: outage constraint must lie in (0, 1)");
    }
    const OutageEvaluator eval(realization, link);

    double lo = options.beta_lo;
    double hi = options.beta_hi;
    double out_lo = eval.outage(lo);
    double out_hi = eval.outage(hi);
    for (int i = 0; i < options.max_expansions && out_lo > eps_hat; ++i) {
        hi = lo;
        out_hi = out_lo;
        lo *= 1e-3;
        out_lo = eval.outage(lo);
    }
    for (int i = 0; i < options.max_expansions && out_hi < eps_hat; ++i) {
        lo = hi;
        out_lo = out_hi;
        hi *= 1e3;
        out_hi = eval.outage(hi);
    }

    AdaptationResult result;
    if (out_lo > eps_hat) {
        result.beta = lo;
        result.achieved_outage = out_lo;
        result.status = AdaptStatus::infeasible;
        return result;
    }
    if (out_hi < eps_hat) {
        result.beta = hi;
        result.achieved_outage = out_hi;
        result.status = AdaptStatus::rate_capped;
        return result;
    }

    // Invariant: outage(lo) <= eps_hat <= outage(hi).
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    double beta_at_lo = lo;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (eps_hat - out_lo <= options.tolerance) {
            break;
        }
        const double mid = 0.5 * (log_lo + log_hi);
        if (mid <= log_lo || mid >= log_hi) {
            break;
        }
        const double beta_mid = std::exp(mid);
        const double out_mid = eval.outage(beta_mid);
        if (out_mid <= eps_hat) {
            log_lo = mid;
            out_lo = out_mid;
            beta_at_lo = beta_mid;
        } else {
            log_hi = mid;
        }
    }
    result.beta = beta_at_lo;
    result.achieved_outage = out_lo;
    return result;
}

double adapted_rate(const AdaptationResult& threshold, const CapacityCurve& curve) {
    if (threshold.status == AdaptStatus::infeasible) {
        return 0.0;
    }
    return lookup(curve, threshold.beta).rate;
}

AdaptationResult adapt(const NetworkRealization& realization, const LinkParams& link, double eps_hat,
                       const CapacityCurve& curve, const InversionOptions& options) {
    AdaptationResult result = invert_outage(realization, link, eps_hat, options);
    if (result.status == AdaptStatus::infeasible) {
        result.rate = 0.0;
        return result;
    }
    const RateLookup r = lookup(curve, result.beta);
    result.rate = r.rate;
    result.rate_clamped = r.clamped;
    return result;
}

}  // namespace fhnet
