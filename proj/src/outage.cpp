#include "fhnet/outage.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fhnet/errors.hpp"
#include "fhnet/kernels.hpp"
#include "fhnet/numeric.hpp"

namespace fhnet {

namespace {

// P[Gamma(k, 1) > x] = e^-x sum_{j<k} x^j / j!, evaluated in log space past
// the point where e^-x underflows.
double poisson_cdf(int k, double x) {
    if (x <= 700.0) {
        double term = 1.0;
        double sum = 1.0;
        for (int j = 1; j < k; ++j) {
            term *= x / j;
            sum += term;
        }
        return std::exp(-x) * sum;
    }
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        logs.push_back(j * std::log(x) - std::lgamma(j + 1.0));
    }
    return std::exp(-x + log_sum_exp(logs));
}

// Success probability from scaled coefficients K_t = beta0^t H_t:
//   sum_t K_t * P[Gamma(m0 - t, 1) > beta0 / SNR].
double success_from_scaled(const std::vector<double>& scaled_h, double beta0, double snr, int m0) {
    const double x = beta0 / snr;
    double s = 0.0;
    for (int t = 0; t < m0; ++t) {
        if (scaled_h[static_cast<std::size_t>(t)] != 0.0) {
            s += scaled_h[static_cast<std::size_t>(t)] * poisson_cdf(m0 - t, x);
        }
    }
    return s;
}

// Multiplies `poly` in place by `factor`, keeping degrees 0..poly.size()-1.
void truncated_multiply(std::vector<double>& poly, const double* factor) {
    for (std::size_t d = poly.size(); d-- > 0;) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= d; ++j) {
            acc += poly[d - j] * factor[j];
        }
        poly[d] = acc;
    }
}

std::vector<double> binomial_like_coeffs(double m, int t_max) {
    std::vector<double> c(static_cast<std::size_t>(t_max) + 1);
    for (int l = 0; l <= t_max; ++l) {
        c[static_cast<std::size_t>(l)] = std::exp(std::lgamma(l + m) - std::lgamma(l + 1.0) - std::lgamma(m));
    }
    return c;
}

// beta0^t H_t for t = 0..t_max.
std::vector<double> scaled_h(const OutageContext& context, int t_max) {
    const auto& link = context.link;
    const double beta0 = context.beta0();
    std::vector<double> poly(static_cast<std::size_t>(t_max) + 1, 0.0);
    poly[0] = 1.0;
    std::vector<double> g(poly.size());
    for (std::size_t i = 0; i < context.realization.omegas.size(); ++i) {
        const double omega = context.realization.omegas[i];
        const double m = link.interferer_m(i);
        const auto c = binomial_like_coeffs(m, t_max);
        const double b_co = beta0 * link.splatter.psi * omega / m;
        const double b_adj = beta0 * link.splatter.k_s * omega / m;
        const double base_co = std::pow(1.0 + b_co, -m);
        const double base_adj = std::pow(1.0 + b_adj, -m);
        const double r_co = b_co / (1.0 + b_co);
        const double r_adj = b_adj / (1.0 + b_adj);
        double p_co = 1.0;
        double p_adj = 1.0;
        for (std::size_t l = 0; l < g.size(); ++l) {
            g[l] = c[l] * (link.probs.p_c * base_co * p_co + link.probs.p_a * base_adj * p_adj);
            p_co *= r_co;
            p_adj *= r_adj;
        }
        g[0] += link.probs.p_n;
        truncated_multiply(poly, g.data());
    }
    return poly;
}

}  // namespace

void LinkParams::validate(std::size_t interferers) const {
    if (m0 < 1) {
        throw DomainError("outage: m0 must be an integer >= 1");
    }
    if (!(snr > 0.0)) {
        throw DomainError("outage: SNR must be positive");
    }
    if (m_i.empty() || (m_i.size() != 1 && m_i.size() != interferers)) {
        throw DomainError("outage: m_i needs one common value or one per interferer");
    }
    for (double m : m_i) {
        if (!(m > 0.0)) {
            throw DomainError("outage: interferer Nakagami parameters must be positive");
        }
    }
    if (!(splatter.psi > 0.0 && splatter.psi <= 1.0)) {
        throw DomainError("outage: psi must lie in (0, 1]");
    }
}

double OutageContext::beta0() const noexcept {
    return beta * link.m0 / (link.splatter.psi * realization.omega0);
}

double g_coefficient(int ell, double omega, double m, double beta0, const CollisionProbs& probs,
                     const SplatterModel& splatter) {
    if (ell < 0) {
        throw DomainError("g_coefficient: ell must be >= 0");
    }
    const double coeff = std::exp(std::lgamma(ell + m) - std::lgamma(ell + 1.0) - std::lgamma(m));
    auto phi = [&](double x) {
        return std::pow(x * omega / m, ell) * std::pow(x * beta0 * omega / m + 1.0, -(m + ell));
    };
    const double delta = ell == 0 ? probs.p_n : 0.0;
    return delta + coeff * (probs.p_c * phi(splatter.psi) + probs.p_a * phi(splatter.k_s));
}

std::vector<double> h_coefficients(const OutageContext& context, int t_max) {
    if (t_max < 0) {
        throw DomainError("h_coefficients: t_max must be >= 0");
    }
    const auto& link = context.link;
    const double beta0 = context.beta0();
    std::vector<double> poly(static_cast<std::size_t>(t_max) + 1, 0.0);
    poly[0] = 1.0;
    std::vector<double> g(poly.size());
    for (std::size_t i = 0; i < context.realization.omegas.size(); ++i) {
        for (int l = 0; l <= t_max; ++l) {
            g[static_cast<std::size_t>(l)] = g_coefficient(l, context.realization.omegas[i], link.interferer_m(i),
                                                           beta0, link.probs, link.splatter);
        }
        truncated_multiply(poly, g.data());
    }
    return poly;
}

double success_probability_unclamped(const OutageContext& context) {
    context.link.validate(context.realization.omegas.size());
    if (!(context.beta >= 0.0)) {
        throw DomainError("outage: beta must be >= 0");
    }
    if (!(context.realization.omega0 > 0.0)) {
        throw DomainError("outage: Omega_0 must be positive");
    }
    if (std::isinf(context.beta)) {
        return 0.0;
    }
    const int t_max = context.link.m0 - 1;
    return success_from_scaled(scaled_h(context, t_max), context.beta0(), context.link.snr, context.link.m0);
}

double success_probability(const OutageContext& context) {
    return std::clamp(success_probability_unclamped(context), 0.0, 1.0);
}

double conditional_outage(const OutageContext& context) { return 1.0 - success_probability(context); }

MonteCarloEstimate monte_carlo_outage(const OutageContext& context, std::uint64_t trials, StreamKey key) {
    if (trials < 1) {
        throw DomainError("monte_carlo_outage: need at least one trial");
    }
    context.link.validate(context.realization.omegas.size());
    return kernels::omp::monte_carlo_outage(context, trials, key);
}

OutageEvaluator::OutageEvaluator(const NetworkRealization& realization, const LinkParams& link)
    : realization_(realization), link_(link), t_max_(link.m0 - 1) {
    link.validate(realization.omegas.size());
    if (!(realization.omega0 > 0.0)) {
        throw DomainError("outage: Omega_0 must be positive");
    }
    std::vector<double> distinct_m;
    interferers_.reserve(realization.omegas.size());
    for (std::size_t i = 0; i < realization.omegas.size(); ++i) {
        const double m = link.interferer_m(i);
        auto it = std::find(distinct_m.begin(), distinct_m.end(), m);
        int set = static_cast<int>(it - distinct_m.begin());
        if (it == distinct_m.end()) {
            distinct_m.push_back(m);
            coeffs_.push_back(binomial_like_coeffs(m, t_max_));
        }
        const double omega = realization.omegas[i];
        interferers_.push_back({link.splatter.psi * omega / m, link.splatter.k_s * omega / m, m, set});
    }
}

double OutageEvaluator::success(double beta) const {
    if (std::isinf(beta)) {
        return 0.0;
    }
    const double beta0 = beta * link_.m0 / (link_.splatter.psi * realization_.omega0);
    const auto& probs = link_.probs;
    const bool has_adjacent = probs.p_a > 0.0 && link_.splatter.k_s > 0.0;

    if (t_max_ == 0) {
        double h0 = 1.0;
        for (const auto& it : interferers_) {
            double g = probs.p_n + probs.p_c * std::pow(1.0 + beta0 * it.a_co, -it.m);
            g += has_adjacent ? probs.p_a * std::pow(1.0 + beta0 * it.a_adj, -it.m) : probs.p_a;
            h0 *= g;
        }
        return std::clamp(h0 * std::exp(-beta0 / link_.snr), 0.0, 1.0);
    }

    const auto n = static_cast<std::size_t>(t_max_) + 1;
    std::vector<double> poly(n, 0.0);
    std::vector<double> g(n);
    poly[0] = 1.0;
    for (const auto& it : interferers_) {
        const auto& c = coeffs_[static_cast<std::size_t>(it.coeff_set)];
        const double b_co = beta0 * it.a_co;
        const double u_co = 1.0 / (1.0 + b_co);
        const double base_co = it.m == 1.0 ? u_co : std::pow(u_co, it.m);
        const double r_co = b_co * u_co;
        double w_co = probs.p_c * base_co;
        if (has_adjacent) {
            const double b_adj = beta0 * it.a_adj;
            const double u_adj = 1.0 / (1.0 + b_adj);
            const double r_adj = b_adj * u_adj;
            double w_adj = probs.p_a * (it.m == 1.0 ? u_adj : std::pow(u_adj, it.m));
            for (std::size_t l = 0; l < n; ++l) {
                g[l] = c[l] * (w_co + w_adj);
                w_co *= r_co;
                w_adj *= r_adj;
            }
        } else {
            for (std::size_t l = 0; l < n; ++l) {
                g[l] = c[l] * w_co;
                w_co *= r_co;
            }
            g[0] += probs.p_a;
        }
        g[0] += probs.p_n;
        truncated_multiply(poly, g.data());
    }
    return std::clamp(success_from_scaled(poly, beta0, link_.snr, link_.m0), 0.0, 1.0);
}

}  // namespace fhnet
