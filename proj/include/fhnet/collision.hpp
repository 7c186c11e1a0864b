#pragma once

namespace fhnet {

/// Per-interferer channel-overlap probabilities for one hop.
struct CollisionProbs {
    double p_c = 0.0;  // same channel as the source
    double p_a = 0.0;  // adjacent channel
    double p_n = 1.0;  // no overlap
};

/// Fractional in-band power and the resulting splatter into each adjacent channel.
struct SplatterModel {
    double psi = 1.0;
    double k_s = 0.0;

    static SplatterModel from_psi(double psi);
};

/// Channel-selection probabilities for L channels and duty factor D.
/// Throws DomainError for L < 2 or D outside (0, 1].
CollisionProbs collision_probabilities(int channels, double duty);

/// (1 - psi) / 2. Throws DomainError for psi outside (0, 1].
double splatter_ratio(double psi);

}  // namespace fhnet
