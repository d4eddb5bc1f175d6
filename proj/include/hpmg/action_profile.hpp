#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hpmg/player_tree.hpp"

namespace hpmg {

// One scalar policy in [0,1] per player. A profile may be partial: defined
// only for levels 1..depth, which is how backward induction carries the
// upper-level context downward. Cost evaluation requires a complete profile.
class ActionProfile {
 public:
  ActionProfile() = default;

  static ActionProfile complete(const PlayerTree& tree, double fill = 0.0) {
    return ActionProfile(tree, tree.num_levels(), fill);
  }
  static ActionProfile partial(const PlayerTree& tree, int depth, double fill = 0.0) {
    return ActionProfile(tree, depth, fill);
  }

  int depth() const { return static_cast<int>(levels_.size()); }
  int full_depth() const { return full_depth_; }
  bool is_complete() const { return depth() == full_depth_; }

  double at(PlayerId id) const {
    check_level(id.level);
    return levels_[id.level - 1][id.index];
  }
  void set(PlayerId id, double alpha) {
    check_level(id.level);
    if (alpha < 0.0 || alpha > 1.0)
      throw std::invalid_argument("action must lie in [0, 1]");
    levels_[id.level - 1][id.index] = alpha;
  }

  std::span<const double> level(int l) const {
    check_level(l);
    return levels_[l - 1];
  }
  std::span<double> mutable_level(int l) {
    check_level(l);
    return levels_[l - 1];
  }

  // Extends a partial profile by one level, initialised with `fill`.
  void push_level(int size, double fill = 0.0) {
    if (depth() >= full_depth_)
      throw std::logic_error("profile already complete");
    levels_.emplace_back(size, fill);
  }

  void require_complete() const {
    if (!is_complete())
      throw std::invalid_argument(
          "cost evaluation requires a complete action profile (defined down to the lowest level)");
  }

 private:
  ActionProfile(const PlayerTree& tree, int depth, double fill)
      : full_depth_(tree.num_levels()) {
    if (depth < 1 || depth > full_depth_)
      throw std::invalid_argument("profile depth out of range");
    levels_.reserve(depth);
    for (int l = 1; l <= depth; ++l)
      levels_.emplace_back(tree.level_size(l), fill);
  }

  void check_level(int l) const {
    if (l < 1 || l > depth())
      throw std::invalid_argument("profile is not defined at level " + std::to_string(l));
  }

  std::vector<std::vector<double>> levels_;
  int full_depth_ = 0;
};

}  // namespace hpmg
