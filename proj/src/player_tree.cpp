#include "hpmg/player_tree.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace hpmg {

namespace {

constexpr double kShareTolerance = 1e-9;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("hierarchy: " + where + ": " + what);
}

}  // namespace

PlayerTree PlayerTree::build(const HierarchySpec& spec) {
  const int num_levels = static_cast<int>(spec.levels.size());
  if (num_levels <= 1) fail("levels", "a hierarchy needs at least 2 levels");
  if (spec.levels[0].size() != 1) fail("levels[0]", "level 1 must contain exactly one root player");

  PlayerTree tree;
  tree.levels_.resize(num_levels);
  std::unordered_map<std::string, PlayerId> by_name;

  for (int l = 0; l < num_levels; ++l) {
    const auto& level_spec = spec.levels[l];
    if (level_spec.empty()) fail("levels[" + std::to_string(l) + "]", "level has no players");
    auto& level = tree.levels_[l];
    level.reserve(level_spec.size());
    for (int i = 0; i < static_cast<int>(level_spec.size()); ++i) {
      const PlayerSpec& ps = level_spec[i];
      const std::string where = ps.name.empty()
          ? "levels[" + std::to_string(l) + "][" + std::to_string(i) + "]"
          : ps.name;
      if (ps.name.empty()) fail(where, "player has no name");
      if (by_name.count(ps.name)) fail(where, "duplicate player name");

      PlayerNode node;
      node.name = ps.name;
      node.weights.kappa = ps.kappa;
      node.weights.eta = ps.eta.value_or(l == 0 ? 1.0 - ps.kappa : -1.0);
      if (l != 0 && !ps.eta) fail(where, "eta is required for non-root players");
      if (node.weights.kappa < 0.0 || node.weights.eta < 0.0)
        fail(where, "weights must be non-negative");
      if (node.weights.kappa + node.weights.eta > 1.0 + 1e-12)
        fail(where, "kappa + eta exceeds 1");
      if (l == 0 && std::abs(node.weights.kappa + node.weights.eta - 1.0) > 1e-12)
        fail(where, "the root trades off impact and implementation only; kappa + eta must equal 1");

      if (l == 0) {
        if (ps.parent) fail(where, "the root has no parent");
      } else {
        if (!ps.parent) fail(where, "orphan node: no parent given");
        auto it = by_name.find(*ps.parent);
        if (it == by_name.end() || it->second.level != l)
          fail(where, "orphan node: parent '" + *ps.parent + "' not found in level " + std::to_string(l));
        node.parent = it->second.index;
        tree.levels_[l - 1][node.parent].children.push_back(i);
      }

      const bool leaf = (l == num_levels - 1);
      if (!leaf && (ps.population || ps.initial_infected))
        fail(where, "population counts are only valid on lowest-level players");
      if (leaf) {
        node.has_population = ps.population.has_value();
        node.population = ps.population.value_or(0);
        node.initial_infected = ps.initial_infected.value_or(0);
        if (node.population < 0) fail(where, "population must be non-negative");
        if (node.initial_infected < 0) fail(where, "initial_infected must be non-negative");
        if (node.initial_infected > node.population)
          fail(where, "initial_infected exceeds population");
        if (!ps.population && ps.initial_infected)
          fail(where, "initial_infected given without population");
      }
      level.push_back(std::move(node));
      by_name.emplace(ps.name, PlayerId{l + 1, i});
    }
  }

  // Leaf shares: explicit, or derived from populations as N_a / sum(N).
  auto& leaves = tree.levels_.back();
  const auto& leaf_specs = spec.levels.back();
  const bool all_pop = tree.has_populations();
  bool any_explicit = false, all_explicit = true;
  for (const auto& ps : leaf_specs) {
    any_explicit |= ps.share.has_value();
    all_explicit &= ps.share.has_value();
  }
  if (!all_explicit && !all_pop)
    fail("leaves", "leaf shares must be given explicitly or derivable from populations");

  long long total_pop = 0;
  if (all_pop)
    for (const auto& leaf : leaves) total_pop += leaf.population;
  if (all_pop && total_pop <= 0 && !all_explicit)
    fail("leaves", "total population is zero; cannot derive shares");

  for (size_t i = 0; i < leaves.size(); ++i) {
    const double derived = (all_pop && total_pop > 0)
        ? static_cast<double>(leaves[i].population) / static_cast<double>(total_pop)
        : -1.0;
    if (leaf_specs[i].share) {
      leaves[i].share = *leaf_specs[i].share;
      if (leaves[i].share < 0.0 || leaves[i].share > 1.0)
        fail(leaves[i].name, "share must lie in [0, 1]");
      if (derived >= 0.0 && std::abs(leaves[i].share - derived) > kShareTolerance)
        fail(leaves[i].name, "explicit share disagrees with population-derived share");
    } else {
      leaves[i].share = derived;
    }
  }
  if (any_explicit || !all_pop) {
    double sum = 0.0;
    for (const auto& leaf : leaves) sum += leaf.share;
    if (std::abs(sum - 1.0) > kShareTolerance)
      fail("leaves", "leaf shares sum to " + std::to_string(sum) + ", expected 1");
  }

  // Shares of non-leaf players accumulate bottom-up, in child order.
  for (int l = num_levels - 2; l >= 0; --l) {
    for (size_t i = 0; i < tree.levels_[l].size(); ++i) {
      auto& node = tree.levels_[l][i];
      if (node.children.empty()) fail(node.name, "non-leaf player has no children");
      double sum = 0.0;
      for (int c : node.children) sum += tree.levels_[l + 1][c].share;
      node.share = sum;
      if (spec.levels[l][i].share && std::abs(*spec.levels[l][i].share - sum) > kShareTolerance)
        fail(node.name, "explicit share disagrees with the sum of child shares");
    }
  }
  return tree;
}

bool PlayerTree::has_populations() const {
  for (const auto& leaf : levels_.back())
    if (!leaf.has_population) return false;
  return true;
}

std::optional<PlayerId> PlayerTree::find(const std::string& name) const {
  for (int l = 0; l < num_levels(); ++l)
    for (int i = 0; i < static_cast<int>(levels_[l].size()); ++i)
      if (levels_[l][i].name == name) return PlayerId{l + 1, i};
  return std::nullopt;
}

std::vector<int> PlayerTree::descendant_leaves(PlayerId id) const {
  if (is_leaf(id)) return {id.index};
  std::vector<int> out;
  for (int c : node(id).children) {
    const auto sub = descendant_leaves({id.level + 1, c});
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

}  // namespace hpmg
