#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hpmg {

// Levels are 1-based (level 1 = root), indices within a level are 0-based.
struct PlayerId {
  int level = 0;
  int index = 0;
  bool operator==(const PlayerId&) const = default;
};

// Per-player trade-off weights. kappa scales the policy impact cost, eta the
// implementation cost; the non-compliance weight is the remainder. The root
// has no parent to comply with, so its kappa + eta must equal 1.
struct WeightVector {
  double kappa = 0.0;
  double eta = 0.0;
  double gamma() const { return 1.0 - kappa - eta; }
};

struct PlayerNode {
  std::string name;
  WeightVector weights;
  double share = 0.0;
  int parent = -1;                  // index in the level above; -1 for the root
  std::vector<int> children;        // indices in the level below
  long long population = 0;         // leaves only
  long long initial_infected = 0;   // leaves only
  bool has_population = false;
};

// Declarative description of one player, as read from a configuration file.
struct PlayerSpec {
  std::string name;
  std::optional<std::string> parent;
  double kappa = 0.0;
  std::optional<double> eta;        // defaults to 1 - kappa for the root
  std::optional<double> share;
  std::optional<long long> population;
  std::optional<long long> initial_infected;
};

struct HierarchySpec {
  std::vector<std::vector<PlayerSpec>> levels;
};

// Immutable rooted tree of policy-makers. Construction validates all share,
// weight and parentage constraints; shares of non-leaf players are always the
// exact sum of their children's.
class PlayerTree {
 public:
  static PlayerTree build(const HierarchySpec& spec);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  int level_size(int level) const { return static_cast<int>(levels_[level - 1].size()); }
  int num_leaves() const { return level_size(num_levels()); }

  const PlayerNode& node(PlayerId id) const { return levels_[id.level - 1][id.index]; }
  std::span<const PlayerNode> level(int l) const { return levels_[l - 1]; }

  bool is_leaf(PlayerId id) const { return id.level == num_levels(); }
  bool is_root(PlayerId id) const { return id.level == 1; }
  PlayerId parent_of(PlayerId id) const { return {id.level - 1, node(id).parent}; }

  // True when every leaf carries a population count (required by the
  // epidemic impact model).
  bool has_populations() const;

  std::optional<PlayerId> find(const std::string& name) const;

  // Leaf indices (within level L) under a player, in tree order.
  std::vector<int> descendant_leaves(PlayerId id) const;

 private:
  std::vector<std::vector<PlayerNode>> levels_;
};

}  // namespace hpmg
