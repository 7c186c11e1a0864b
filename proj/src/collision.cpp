#include "fhnet/collision.hpp"

#include "fhnet/errors.hpp"

namespace fhnet {

CollisionProbs collision_probabilities(int channels, double duty) {
    if (channels < 2) {
        throw DomainError("collision_probabilities: need at least two channels");
    }
    if (!(duty > 0.0 && duty <= 1.0)) {
        throw DomainError("collision_probabilities: duty factor must lie in (0, 1]");
    }
    const double l = channels;
    CollisionProbs p;
    p.p_c = duty / l;
    p.p_a = 2.0 * duty * (l - 1.0) / (l * l);
    // Complement of the rounded sum, so (p_c + p_a) + p_n == 1 holds exactly.
    p.p_n = 1.0 - (p.p_c + p.p_a);
    return p;
}

double splatter_ratio(double psi) {
    if (!(psi > 0.0 && psi <= 1.0)) {
        throw DomainError("splatter_ratio: psi must lie in (0, 1]");
    }
    return (1.0 - psi) / 2.0;
}

SplatterModel SplatterModel::from_psi(double psi) { return {psi, splatter_ratio(psi)}; }

}  // namespace fhnet
