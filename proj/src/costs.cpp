#include "hpmg/costs.hpp"

#include <algorithm>
#include <stdexcept>

namespace hpmg {

double implementation_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree) {
  profile.require_complete();
  const PlayerNode& node = tree.node(a);
  if (tree.is_leaf(a)) return 1.0 - profile.at(a);
  double sum = 0.0;
  for (int c : node.children)
    sum += tree.node({a.level + 1, c}).share *
           implementation_cost({a.level + 1, c}, profile, tree);
  return sum / node.share;
}

double noncompliance_cost(double alpha, double alpha_parent, ComplianceMode mode) {
  const double d = mode == ComplianceMode::OneSided
                       ? std::max(0.0, alpha - alpha_parent)
                       : alpha - alpha_parent;
  return d * d;
}

double impact_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree,
                   const EpidemicParams& epi) {
  profile.require_complete();
  const PlayerNode& node = tree.node(a);
  if (tree.is_leaf(a)) {
    const auto leaf_actions = profile.level(tree.num_levels());
    return expected_new_infections(a.index, leaf_actions, epi) /
           static_cast<double>(epi.population[a.index]);
  }
  double sum = 0.0;
  for (int c : node.children)
    sum += tree.node({a.level + 1, c}).share *
           impact_cost({a.level + 1, c}, profile, tree, epi);
  return sum / node.share;
}

double overall_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree,
                    const EpidemicParams* epi, ComplianceMode mode) {
  profile.require_complete();
  const WeightVector& w = tree.node(a).weights;
  double cost = 0.0;
  if (w.kappa > 0.0) {
    if (!epi)
      throw std::invalid_argument("overall_cost: player '" + tree.node(a).name +
                                  "' weights the impact cost but no epidemic parameters were given");
    cost += w.kappa * impact_cost(a, profile, tree, *epi);
  }
  if (w.eta > 0.0) cost += w.eta * implementation_cost(a, profile, tree);
  if (tree.is_root(a)) return cost;
  const double gamma = w.gamma();
  if (gamma > 0.0)
    cost += gamma * noncompliance_cost(profile.at(a), profile.at(tree.parent_of(a)), mode);
  return cost;
}

double social_cost(PlayerId a, const ActionProfile& profile, const PlayerTree& tree,
                   const EpidemicParams* epi, ComplianceMode mode) {
  profile.require_complete();
  if (tree.is_leaf(a))
    throw std::invalid_argument("social_cost: lowest-level players have no children");
  const PlayerNode& node = tree.node(a);
  double sum = 0.0;
  for (int c : node.children)
    sum += tree.node({a.level + 1, c}).share *
           overall_cost({a.level + 1, c}, profile, tree, epi, mode);
  return sum / node.share;
}

}  // namespace hpmg
