#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "hpmg/action_profile.hpp"
#include "hpmg/costs.hpp"
#include "hpmg/grid.hpp"
#include "hpmg/player_tree.hpp"
#include "hpmg/rng.hpp"

namespace hpmg {

enum class SearchMethod { Grid, Bisection };

// Tunables for the backward-induction solver. Per-level vectors are indexed
// by level (entry 0 unused); level 1 is always solved by an exhaustive grid
// scan, and bisection is only valid at the lowest level.
struct SolverParams {
  GridSpec grid{100};
  std::vector<int> max_steps;          // BRD rounds per level
  std::vector<int> responders;         // k_l; 0 means all players
  std::vector<double> eps_limits;      // stop once the level epsilon drops this low
  std::vector<SearchMethod> search;
  int restart_limit = 20;              // random jumps after detected cycles
  double tie_tolerance = 1e-9;         // cost units
  std::uint64_t seed = 0;

  static SolverParams defaults(const PlayerTree& tree, GridSpec grid, std::uint64_t seed = 0);
  void validate(const PlayerTree& tree) const;
};

struct LevelDiagnostics {
  int steps = 0;           // BRD rounds executed
  int steps_to_best = 0;   // round at which the returned profile was found
  int cycles = 0;
  int restarts = 0;
  bool budget_exhausted = false;

  void absorb(const LevelDiagnostics& other);
};

struct EquilibriumResult {
  ActionProfile profile;
  std::vector<double> epsilon;  // per level, 1-based via index l-1
  // Dynamics that produced the returned profile (the chosen backward-induction
  // path); budget flags here mean the result itself is best-effort.
  std::vector<LevelDiagnostics> diagnostics;
  // Aggregates over every sub-solve the backward induction touched, including
  // rejected candidates' subgames.
  std::vector<LevelDiagnostics> search_totals;
  int root_tie_count = 0;  // grid actions tied for the root's optimum
  double wall_seconds = 0.0;
};

// Exact set of visited level profiles (grid coordinates), used for cycle
// detection.
class ProfileMemory {
 public:
  bool insert(std::span<const int> profile) {
    return seen_.emplace(profile.begin(), profile.end()).second;
  }
  bool contains(std::span<const int> profile) const {
    probe_.assign(profile.begin(), profile.end());
    return seen_.count(probe_) != 0;
  }
  std::size_t size() const { return seen_.size(); }

 private:
  struct Hash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b9ULL;
        h *= 1099511628211ULL;
      }
      return h;
    }
  };
  std::unordered_set<std::vector<int>, Hash> seen_;
  mutable std::vector<int> probe_;
};

// Cost view of one level's simultaneous game with everything above fixed and
// everything below resolved internally. Kept abstract so the best-response
// machinery can be exercised on hand-built cost tables in tests.
class LevelGameView {
 public:
  virtual ~LevelGameView() = default;
  virtual int num_players() const = 0;
  virtual bool leaf_level() const = 0;
  virtual double cost(int player, std::span<const int> level_actions) = 0;
  // Share-weighted children cost used by the minimal-impact tie rule;
  // only queried on non-leaf levels.
  virtual double social_cost(int player, std::span<const int> level_actions) = 0;
};

struct BestResponse {
  int action = 0;
  double br_cost = 0.0;
  double current_cost = 0.0;
  int tie_count = 1;
  bool used_fallback = false;  // bisection detected non-unimodality and rescanned
};

// Best grid action for one player holding the rest of the level fixed.
// Exact-cost ties (within tie_tolerance) resolve to the largest action on
// leaf levels and through the minimal-impact rule above them. Deterministic:
// repeated calls return the identical action.
BestResponse best_response(LevelGameView& view, int player, std::span<const int> level_actions,
                           const GridSpec& grid, double tie_tolerance, SearchMethod method);

// Largest deviation gain on the level: max over players of
// current cost minus best-response cost (clamped at zero).
double level_epsilon(LevelGameView& view, std::span<const int> level_actions,
                     const GridSpec& grid, double tie_tolerance);

struct BrdParams {
  int max_steps = 64;
  int responders = 0;  // 0 = synchronous
  double eps_limit = 0.0;
  int restart_limit = 20;
  double tie_tolerance = 1e-9;
  SearchMethod method = SearchMethod::Grid;
};

struct BrdOutcome {
  std::vector<int> actions;
  double eps = 0.0;
  LevelDiagnostics diag;
};

// Best-response dynamics over one level: starts from a random grid profile,
// each round lets a random subset of the strict improvers move to their best
// responses, jumps to a fresh random profile when a visited profile recurs,
// and returns the lowest-epsilon profile seen.
BrdOutcome run_brd(LevelGameView& view, const GridSpec& grid, const BrdParams& params,
                   RngStream& rng, ProfileMemory& memory);

// --- Hierarchy-bound entry points ---------------------------------------

// Best response of one player given fixed actions for everyone else. For
// non-leaf players every candidate triggers a recursive solve of the levels
// below, so `context` only needs to reach the player's level.
BestResponse best_response(const PlayerTree& tree, const EpidemicParams* epi,
                           ComplianceMode mode, const SolverParams& params,
                           PlayerId player, const ActionProfile& context);

// Epsilon of a complete profile at one level (deviations re-solve the levels
// below the deviating player).
double epsilon_of_profile(const PlayerTree& tree, const EpidemicParams* epi,
                          ComplianceMode mode, const SolverParams& params,
                          int level, const ActionProfile& profile);

// One level of best-response dynamics under fixed upper actions (partial
// profile of depth level-1). Exposed for experimentation with responder
// counts; solve_subgame_perfect drives it internally.
BrdOutcome brd_level(const PlayerTree& tree, const EpidemicParams* epi, ComplianceMode mode,
                     const SolverParams& params, int level, const ActionProfile& upper,
                     ProfileMemory& memory);

// Backward induction over the hierarchy: the root's action minimizes its own
// cost over the grid with each candidate's value obtained by recursively
// solving the levels below; root-level ties resolve by minimal social cost,
// then by the larger action.
EquilibriumResult solve_subgame_perfect(const PlayerTree& tree, const EpidemicParams* epi,
                                 ComplianceMode mode, const SolverParams& params);

struct LevelCheck {
  int level = 0;
  double reported_eps = 0.0;
  double recomputed_eps = 0.0;
  bool ok = false;
};

struct MiCheck {
  PlayerId player;
  int tie_count = 0;
  bool ok = false;
};

struct VerificationReport {
  std::vector<LevelCheck> levels;
  std::vector<MiCheck> mi_checks;  // one per non-leaf player
  bool eps_pass = false;           // every recomputed eps within tolerance of reported
  bool mi_pass = false;
  double tolerance = 0.0;
};

// Independent check of a solver result: recomputes every level's epsilon by
// exhaustive grid deviation and reports whether each non-leaf player's choice
// satisfies the minimal-impact rule on its detected indifference set.
VerificationReport verify_equilibrium(const EquilibriumResult& result, const PlayerTree& tree,
                                      const EpidemicParams* epi, ComplianceMode mode,
                                      const SolverParams& params, double tolerance);

}  // namespace hpmg
