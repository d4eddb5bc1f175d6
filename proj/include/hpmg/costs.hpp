#pragma once

#include "hpmg/action_profile.hpp"
#include "hpmg/infection.hpp"
#include "hpmg/player_tree.hpp"

namespace hpmg {

// One-sided: only exceeding the parent's policy is penalized.
// Two-sided: any deviation is penalized, regardless of direction.
enum class ComplianceMode { OneSided, TwoSided };

// Implementation cost: 1 - alpha for a leaf, the share-weighted aggregate of
// the children's costs otherwise. Aggregation walks children in tree order.
double implementation_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree);

// Squared deviation from the parent's policy, clamped at zero from below in
// the one-sided variant.
double noncompliance_cost(double alpha, double alpha_parent, ComplianceMode mode);

// Expected new infections normalized by population for a leaf; share-weighted
// aggregate of the children's costs otherwise.
double impact_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree,
                   const EpidemicParams& epi);

// kappa * impact + eta * implementation + gamma * noncompliance. The root has
// no compliance term. Components with zero weight are not evaluated, so games
// that never touch the epidemic model need no epidemic parameters.
double overall_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree,
                    const EpidemicParams* epi, ComplianceMode mode);

// Share-weighted aggregate of the children's overall costs; the welfare
// measure an indifferent player uses to pick among its equilibrium actions.
double social_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree,
                   const EpidemicParams* epi, ComplianceMode mode);

}  // namespace hpmg
