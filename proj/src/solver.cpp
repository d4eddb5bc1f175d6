#include "hpmg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace hpmg {

namespace {

constexpr std::uint64_t kBrdTag = 0x627264ULL;     // "brd"
constexpr std::uint64_t kInitTag = 0x696e6974ULL;  // "init"

std::uint64_t fold_coords(std::uint64_t h, std::span<const int> coords) {
  for (int c : coords) h = RngStream::mix(h ^ static_cast<std::uint64_t>(c + 1));
  return h;
}

struct VecIntHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b9ULL;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

void LevelDiagnostics::absorb(const LevelDiagnostics& other) {
  steps += other.steps;
  steps_to_best += other.steps_to_best;
  cycles += other.cycles;
  restarts += other.restarts;
  budget_exhausted |= other.budget_exhausted;
}

SolverParams SolverParams::defaults(const PlayerTree& tree, GridSpec grid, std::uint64_t seed) {
  SolverParams p;
  p.grid = grid;
  const int levels = tree.num_levels();
  p.max_steps.assign(levels + 1, 64);
  p.responders.assign(levels + 1, 0);
  p.eps_limits.assign(levels + 1, 0.0);
  p.search.assign(levels + 1, SearchMethod::Grid);
  p.seed = seed;
  return p;
}

void SolverParams::validate(const PlayerTree& tree) const {
  const int levels = tree.num_levels();
  auto check_size = [&](size_t got, const char* what) {
    if (got != static_cast<size_t>(levels) + 1)
      throw std::invalid_argument(std::string("solver: ") + what +
                                  " must have one entry per level");
  };
  check_size(max_steps.size(), "max_steps");
  check_size(responders.size(), "responders");
  check_size(eps_limits.size(), "eps_limits");
  check_size(search.size(), "search");
  for (int l = 2; l <= levels; ++l) {
    if (max_steps[l] < 1)
      throw std::invalid_argument("solver: max_steps must be >= 1 at every level");
    if (responders[l] < 0 || responders[l] > tree.level_size(l))
      throw std::invalid_argument("solver: responders must lie in [0, n_l] at level " +
                                  std::to_string(l));
    if (eps_limits[l] < 0.0)
      throw std::invalid_argument("solver: eps_limits must be non-negative");
    if (search[l] == SearchMethod::Bisection && l != levels)
      throw std::invalid_argument("solver: bisection search is only supported at the lowest level");
  }
  if (restart_limit < 0) throw std::invalid_argument("solver: restart_limit must be >= 0");
  if (tie_tolerance < 0.0) throw std::invalid_argument("solver: tie_tolerance must be >= 0");
  if (grid.m < 1) throw std::invalid_argument("solver: grid needs at least two points");
}

// --- best response ----------------------------------------------------------

namespace {

// Winner within the exact-cost tie band: the largest action on leaf levels,
// minimal social cost (then the largest action) above them.
int resolve_ties(LevelGameView& view, int player, std::vector<int>& scratch,
                 const std::vector<double>& costs, double min_cost, double tie_tolerance,
                 int* tie_count_out) {
  const int m = static_cast<int>(costs.size()) - 1;
  int tie_count = 0;
  int winner = -1;
  if (view.leaf_level()) {
    for (int i = 0; i <= m; ++i) {
      if (costs[i] > min_cost + tie_tolerance) continue;
      ++tie_count;
      winner = i;
    }
  } else {
    std::vector<int> tied;
    std::vector<double> socials;
    double min_sc = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= m; ++i) {
      if (costs[i] > min_cost + tie_tolerance) continue;
      scratch[player] = i;
      const double sc = view.social_cost(player, scratch);
      tied.push_back(i);
      socials.push_back(sc);
      min_sc = std::min(min_sc, sc);
    }
    tie_count = static_cast<int>(tied.size());
    for (size_t j = 0; j < tied.size(); ++j)
      if (socials[j] <= min_sc + tie_tolerance) winner = tied[j];
  }
  if (tie_count_out) *tie_count_out = tie_count;
  return winner;
}

BestResponse grid_best_response(LevelGameView& view, int player,
                                std::span<const int> level_actions, const GridSpec& grid,
                                double tie_tolerance) {
  std::vector<int> scratch(level_actions.begin(), level_actions.end());
  const int current = scratch[player];
  std::vector<double> costs(grid.points());
  double min_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid.m; ++i) {
    scratch[player] = i;
    costs[i] = view.cost(player, scratch);
    min_cost = std::min(min_cost, costs[i]);
  }
  BestResponse out;
  out.current_cost = costs[current];
  out.action = resolve_ties(view, player, scratch, costs, min_cost, tie_tolerance, &out.tie_count);
  out.br_cost = costs[out.action];
  return out;
}

BestResponse bisection_best_response(LevelGameView& view, int player,
                                     std::span<const int> level_actions, const GridSpec& grid,
                                     double tie_tolerance) {
  std::vector<int> scratch(level_actions.begin(), level_actions.end());
  const int current = scratch[player];
  const int m = grid.m;

  std::vector<double> cache(m + 1);
  std::vector<bool> known(m + 1, false);
  std::vector<int> evaluated;
  auto f = [&](int i) {
    if (!known[i]) {
      scratch[player] = i;
      cache[i] = view.cost(player, scratch);
      known[i] = true;
      evaluated.push_back(i);
    }
    return cache[i];
  };

  // Binary search for the first index where the cost strictly rises; under a
  // valley shape (non-increasing, then strictly increasing) that index is the
  // rightmost minimizer.
  int lo = 0, hi = m - 1, valley = m;
  while (lo <= hi) {
    const int mid = lo + (hi - lo) / 2;
    if (f(mid + 1) > f(mid)) {
      valley = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }

  // Extend through near-ties to the right, mirroring the grid rule of taking
  // the largest action within the tolerance band of the minimum.
  int action = valley;
  while (action < m && f(action + 1) <= f(valley) + tie_tolerance) ++action;

  // Violation probes: an interior bump among the sampled points, or any
  // sampled point cheaper than the claimed valley, disproves the valley shape
  // and forces a full scan.
  bool violated = f(0) < f(valley) || f(m) < f(valley);
  if (valley > 0 && f(valley - 1) < f(valley)) violated = true;
  if (!violated) {
    std::sort(evaluated.begin(), evaluated.end());
    for (size_t j = 1; j + 1 < evaluated.size(); ++j) {
      const double prev = cache[evaluated[j - 1]];
      const double here = cache[evaluated[j]];
      const double next = cache[evaluated[j + 1]];
      if ((here > prev && here > next) || cache[evaluated[j]] < f(valley)) {
        violated = true;
        break;
      }
    }
  }

  if (violated) {
    BestResponse out = grid_best_response(view, player, level_actions, grid, tie_tolerance);
    out.used_fallback = true;
    return out;
  }

  BestResponse out;
  out.action = action;
  out.br_cost = f(action);
  out.current_cost = f(current);
  out.tie_count = action - valley + 1;
  return out;
}

}  // namespace

BestResponse best_response(LevelGameView& view, int player, std::span<const int> level_actions,
                           const GridSpec& grid, double tie_tolerance, SearchMethod method) {
  if (method == SearchMethod::Bisection && view.leaf_level())
    return bisection_best_response(view, player, level_actions, grid, tie_tolerance);
  return grid_best_response(view, player, level_actions, grid, tie_tolerance);
}

double level_epsilon(LevelGameView& view, std::span<const int> level_actions,
                     const GridSpec& grid, double tie_tolerance) {
  double eps = 0.0;
  for (int i = 0; i < view.num_players(); ++i) {
    const BestResponse br =
        best_response(view, i, level_actions, grid, tie_tolerance, SearchMethod::Grid);
    eps = std::max(eps, br.current_cost - br.br_cost);
  }
  return std::max(eps, 0.0);
}

// --- best response dynamics ---------------------------------------------------

BrdOutcome run_brd(LevelGameView& view, const GridSpec& grid, const BrdParams& params,
                   RngStream& rng, ProfileMemory& memory) {
  const int n = view.num_players();
  const int k = params.responders <= 0 ? n : std::min(params.responders, n);

  auto random_profile = [&] {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = static_cast<int>(rng.next_below(grid.m + 1));
    return p;
  };

  std::vector<int> actions = random_profile();
  memory.insert(actions);

  BrdOutcome out;
  std::vector<BestResponse> responses(n);
  auto scan = [&] {
    double eps = 0.0;
    for (int i = 0; i < n; ++i) {
      responses[i] = best_response(view, i, actions, grid, params.tie_tolerance, params.method);
      eps = std::max(eps, responses[i].current_cost - responses[i].br_cost);
    }
    return std::max(eps, 0.0);
  };

  out.eps = scan();
  out.actions = actions;
  out.diag.steps = 1;
  out.diag.steps_to_best = 1;

  std::vector<int> improvers;
  while (out.eps > params.eps_limit && out.diag.steps < params.max_steps) {
    improvers.clear();
    for (int i = 0; i < n; ++i)
      if (responses[i].current_cost - responses[i].br_cost > 0.0) improvers.push_back(i);
    if (improvers.empty()) break;  // the current profile is a grid equilibrium

    if (static_cast<int>(improvers.size()) > k) {
      // Partial Fisher-Yates: uniform k-subset of the improvers.
      for (int j = 0; j < k; ++j) {
        const int pick = j + static_cast<int>(rng.next_below(improvers.size() - j));
        std::swap(improvers[j], improvers[pick]);
      }
      improvers.resize(k);
    }

    std::vector<int> next = actions;
    for (int i : improvers) next[i] = responses[i].action;

    if (memory.contains(next)) {
      ++out.diag.cycles;
      if (out.diag.restarts >= params.restart_limit) {
        out.diag.budget_exhausted = true;
        break;
      }
      ++out.diag.restarts;
      next = random_profile();
    }
    memory.insert(next);
    actions = std::move(next);

    const double eps = scan();
    ++out.diag.steps;
    if (eps < out.eps) {
      out.eps = eps;
      out.actions = actions;
      out.diag.steps_to_best = out.diag.steps;
    }
  }

  // Tie polish: an exact equilibrium can sit anywhere inside an indifference
  // plateau (a random start that nobody can strictly improve on). Walk
  // indifferent players onto their tie-rule best responses so payoff-
  // equivalent equilibria resolve to the same profile, keeping only moves
  // that preserve eps = 0.
  if (out.eps == 0.0) {
    std::vector<int> current = out.actions;
    for (int round = 0; round < n + 2; ++round) {
      double eps = 0.0;
      for (int i = 0; i < n; ++i) {
        responses[i] =
            best_response(view, i, current, grid, params.tie_tolerance, params.method);
        eps = std::max(eps, responses[i].current_cost - responses[i].br_cost);
      }
      if (eps > 0.0) break;  // a previous nudge broke the equilibrium; keep the last good one
      out.actions = current;
      bool moved = false;
      for (int i = 0; i < n; ++i)
        if (responses[i].action != current[i]) {
          current[i] = responses[i].action;
          moved = true;
        }
      if (!moved) break;
    }
  }
  return out;
}

// --- hierarchy adapter --------------------------------------------------------

namespace {

// Profiles for levels l..L produced by a recursive solve, with the dynamics
// diagnostics of the chosen path.
struct SubSolution {
  std::vector<std::vector<int>> actions;
  std::vector<double> eps;
  std::vector<LevelDiagnostics> diag;
};

class HierarchyLevelGame;

// Drives backward induction below a fixed upper context and memoizes the
// results. A sub-game at level l depends on the upper actions only through
// the parent level l-1 (compliance penalties look one level up; impact and
// implementation costs only read the lowest level), so memo keys are the
// parent-level coordinates. Each (level, parent profile) pair draws from its
// own derived random stream, which makes sub-solves reproducible regardless
// of memo hits or evaluation order.
class SubSolver {
 public:
  SubSolver(const PlayerTree& tree, const EpidemicParams* epi, ComplianceMode mode,
            const SolverParams& params)
      : tree_(tree),
        epi_(epi),
        mode_(mode),
        params_(params),
        scratch_(ActionProfile::complete(tree)),
        memo_(tree.num_levels() + 2),
        totals_(tree.num_levels() + 1) {}

  const SubSolution& solve_below(int level, std::span<const int> parent_actions);

  double player_cost(PlayerId id, const ActionProfile& profile) {
    return overall_cost(id, profile, tree_, epi_, mode_);
  }
  double player_social_cost(PlayerId id, const ActionProfile& profile) {
    return social_cost(id, profile, tree_, epi_, mode_);
  }

  void fill_level(int level, std::span<const int> coords) {
    auto row = scratch_.mutable_level(level);
    for (size_t i = 0; i < coords.size(); ++i) row[i] = params_.grid.alpha(coords[i]);
  }

  ActionProfile& scratch() { return scratch_; }
  const PlayerTree& tree() const { return tree_; }
  const SolverParams& params() const { return params_; }
  const std::vector<LevelDiagnostics>& totals() const { return totals_; }

 private:
  const PlayerTree& tree_;
  const EpidemicParams* epi_;
  ComplianceMode mode_;
  const SolverParams& params_;
  ActionProfile scratch_;
  std::vector<std::unordered_map<std::vector<int>, SubSolution, VecIntHash>> memo_;
  std::vector<LevelDiagnostics> totals_;
};

// LevelGameView over one level of the tree with fixed parent actions. Costs
// of non-leaf players are priced by recursively solving the levels below.
class HierarchyLevelGame : public LevelGameView {
 public:
  HierarchyLevelGame(SubSolver& solver, int level, std::span<const int> parent_actions)
      : solver_(solver), level_(level), parent_(parent_actions) {}

  int num_players() const override { return solver_.tree().level_size(level_); }
  bool leaf_level() const override { return level_ == solver_.tree().num_levels(); }

  double cost(int player, std::span<const int> level_actions) override {
    return solver_.player_cost({level_, player}, materialize(level_actions));
  }
  double social_cost(int player, std::span<const int> level_actions) override {
    return solver_.player_social_cost({level_, player}, materialize(level_actions));
  }

 private:
  // Fills the scratch profile for every level a level_ player's cost can
  // read: the parent level, this level, and everything solved below.
  ActionProfile& materialize(std::span<const int> level_actions) {
    if (level_ >= 2) solver_.fill_level(level_ - 1, parent_);
    solver_.fill_level(level_, level_actions);
    if (!leaf_level()) {
      const SubSolution& sub = solver_.solve_below(level_ + 1, level_actions);
      for (size_t i = 0; i < sub.actions.size(); ++i)
        solver_.fill_level(level_ + 1 + static_cast<int>(i), sub.actions[i]);
    }
    return solver_.scratch();
  }

  SubSolver& solver_;
  int level_;
  std::span<const int> parent_;
};

const SubSolution& SubSolver::solve_below(int level, std::span<const int> parent_actions) {
  auto& cache = memo_[level];
  std::vector<int> key(parent_actions.begin(), parent_actions.end());
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  HierarchyLevelGame view(*this, level, parent_actions);
  BrdParams brd;
  brd.max_steps = params_.max_steps[level];
  brd.responders = params_.responders[level];
  brd.eps_limit = params_.eps_limits[level];
  brd.restart_limit = params_.restart_limit;
  brd.tie_tolerance = params_.tie_tolerance;
  brd.method = params_.search[level];

  RngStream rng = RngStream::derive(
      params_.seed,
      {kBrdTag, static_cast<std::uint64_t>(level), fold_coords(kInitTag, parent_actions)});
  ProfileMemory memory;
  BrdOutcome outcome = run_brd(view, params_.grid, brd, rng, memory);
  totals_[level].absorb(outcome.diag);

  SubSolution solution;
  solution.actions.push_back(outcome.actions);
  solution.eps.push_back(outcome.eps);
  solution.diag.push_back(outcome.diag);
  if (level < tree_.num_levels()) {
    // Re-fetch the levels below the chosen profile (memo hit by construction).
    const SubSolution& lower = solve_below(level + 1, outcome.actions);
    for (const auto& row : lower.actions) solution.actions.push_back(row);
    for (double e : lower.eps) solution.eps.push_back(e);
    for (const auto& d : lower.diag) solution.diag.push_back(d);
  }
  auto [it, inserted] = cache.emplace(std::move(key), std::move(solution));
  return it->second;
}

// Single-player view of the root's choice.
class RootGame : public LevelGameView {
 public:
  explicit RootGame(SubSolver& solver) : solver_(solver) {}

  int num_players() const override { return 1; }
  bool leaf_level() const override { return false; }

  double cost(int, std::span<const int> level_actions) override {
    return solver_.player_cost({1, 0}, materialize(level_actions));
  }
  double social_cost(int, std::span<const int> level_actions) override {
    return solver_.player_social_cost({1, 0}, materialize(level_actions));
  }

 private:
  ActionProfile& materialize(std::span<const int> level_actions) {
    solver_.fill_level(1, level_actions);
    const SubSolution& sub = solver_.solve_below(2, level_actions);
    for (size_t i = 0; i < sub.actions.size(); ++i)
      solver_.fill_level(2 + static_cast<int>(i), sub.actions[i]);
    return solver_.scratch();
  }

  SubSolver& solver_;
};

std::vector<int> profile_coords(const ActionProfile& profile, int level, const GridSpec& grid) {
  const auto row = profile.level(level);
  std::vector<int> coords(row.size());
  for (size_t i = 0; i < row.size(); ++i) coords[i] = grid.index_of(row[i]);
  return coords;
}

// Epsilon of one level of a full profile, by exhaustive grid deviation.
// Above the lowest level, the current action is priced the same way the
// deviations are (with the subtree re-solved), so a perturbation planted at a
// lower level surfaces there and not at every ancestor.
double recompute_level_epsilon(SubSolver& solver, int level, const ActionProfile& profile) {
  const PlayerTree& tree = solver.tree();
  const GridSpec& grid = solver.params().grid;
  const double tie_tol = solver.params().tie_tolerance;

  std::vector<int> parent =
      level >= 2 ? profile_coords(profile, level - 1, grid) : std::vector<int>{};
  const std::vector<int> actions = profile_coords(profile, level, grid);

  if (level == tree.num_levels()) {
    HierarchyLevelGame view(solver, level, parent);
    return level_epsilon(view, actions, grid, tie_tol);
  }

  double eps = 0.0;
  RootGame root_view(solver);
  HierarchyLevelGame mid_view(solver, level, parent);
  LevelGameView& view = level == 1 ? static_cast<LevelGameView&>(root_view)
                                   : static_cast<LevelGameView&>(mid_view);
  for (int i = 0; i < tree.level_size(level); ++i) {
    std::vector<int> scratch = actions;
    const double current = view.cost(i, scratch);
    double best = current;
    for (int g = 0; g <= grid.m; ++g) {
      scratch[i] = g;
      best = std::min(best, view.cost(i, scratch));
    }
    eps = std::max(eps, current - best);
  }
  return std::max(eps, 0.0);
}

}  // namespace

// --- public entry points --------------------------------------------------------

BestResponse best_response(const PlayerTree& tree, const EpidemicParams* epi,
                           ComplianceMode mode, const SolverParams& params,
                           PlayerId player, const ActionProfile& context) {
  params.validate(tree);
  if (context.depth() < player.level)
    throw std::invalid_argument("best_response: context must cover the player's level");
  SubSolver solver(tree, epi, mode, params);

  if (player.level == 1) {
    RootGame view(solver);
    const std::vector<int> actions = {params.grid.index_of(context.at({1, 0}))};
    return best_response(view, 0, actions, params.grid, params.tie_tolerance,
                         SearchMethod::Grid);
  }
  if (player.level == tree.num_levels()) context.require_complete();
  const std::vector<int> parent = profile_coords(context, player.level - 1, params.grid);
  HierarchyLevelGame view(solver, player.level, parent);
  const std::vector<int> actions = profile_coords(context, player.level, params.grid);
  return best_response(view, player.index, actions, params.grid, params.tie_tolerance,
                       params.search[player.level]);
}

double epsilon_of_profile(const PlayerTree& tree, const EpidemicParams* epi,
                          ComplianceMode mode, const SolverParams& params,
                          int level, const ActionProfile& profile) {
  params.validate(tree);
  profile.require_complete();
  if (level < 1 || level > tree.num_levels())
    throw std::invalid_argument("epsilon_of_profile: level out of range");
  SubSolver solver(tree, epi, mode, params);
  return recompute_level_epsilon(solver, level, profile);
}

BrdOutcome brd_level(const PlayerTree& tree, const EpidemicParams* epi, ComplianceMode mode,
                     const SolverParams& params, int level, const ActionProfile& upper,
                     ProfileMemory& memory) {
  params.validate(tree);
  if (level < 2 || level > tree.num_levels())
    throw std::invalid_argument("brd_level: level must lie in [2, L]");
  if (upper.depth() < level - 1)
    throw std::invalid_argument("brd_level: upper actions must cover the levels above");
  SubSolver solver(tree, epi, mode, params);
  const std::vector<int> parent = profile_coords(upper, level - 1, params.grid);
  HierarchyLevelGame view(solver, level, parent);

  BrdParams brd;
  brd.max_steps = params.max_steps[level];
  brd.responders = params.responders[level];
  brd.eps_limit = params.eps_limits[level];
  brd.restart_limit = params.restart_limit;
  brd.tie_tolerance = params.tie_tolerance;
  brd.method = params.search[level];

  RngStream rng = RngStream::derive(
      params.seed, {kBrdTag, static_cast<std::uint64_t>(level), fold_coords(kInitTag, parent)});
  return run_brd(view, params.grid, brd, rng, memory);
}

EquilibriumResult solve_subgame_perfect(const PlayerTree& tree, const EpidemicParams* epi,
                                 ComplianceMode mode, const SolverParams& params) {
  params.validate(tree);
  const auto start = std::chrono::steady_clock::now();
  SubSolver solver(tree, epi, mode, params);

  RootGame root_view(solver);
  const std::vector<int> placeholder = {0};
  const BestResponse root = best_response(root_view, 0, placeholder, params.grid,
                                          params.tie_tolerance, SearchMethod::Grid);

  const std::vector<int> root_coords = {root.action};
  const SubSolution& sub = solver.solve_below(2, root_coords);

  const int levels = tree.num_levels();
  EquilibriumResult result;
  result.profile = ActionProfile::complete(tree);
  result.profile.set({1, 0}, params.grid.alpha(root.action));
  for (int l = 2; l <= levels; ++l) {
    auto row = result.profile.mutable_level(l);
    const auto& coords = sub.actions[l - 2];
    for (size_t i = 0; i < coords.size(); ++i) row[i] = params.grid.alpha(coords[i]);
  }

  result.epsilon.assign(levels, 0.0);  // the root scan is exhaustive, so eps_1 = 0
  for (int l = 2; l <= levels; ++l) result.epsilon[l - 1] = sub.eps[l - 2];
  result.root_tie_count = root.tie_count;
  result.diagnostics.assign(levels, LevelDiagnostics{});
  result.search_totals.assign(levels, LevelDiagnostics{});
  for (int l = 2; l <= levels; ++l) {
    result.diagnostics[l - 1] = sub.diag[l - 2];
    result.search_totals[l - 1] = solver.totals()[l];
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

VerificationReport verify_equilibrium(const EquilibriumResult& result, const PlayerTree& tree,
                                      const EpidemicParams* epi, ComplianceMode mode,
                                      const SolverParams& params, double tolerance) {
  params.validate(tree);
  result.profile.require_complete();
  if (result.epsilon.size() != static_cast<size_t>(tree.num_levels()))
    throw std::invalid_argument("verify_equilibrium: result has wrong epsilon count");

  SubSolver solver(tree, epi, mode, params);
  VerificationReport report;
  report.tolerance = tolerance;
  report.eps_pass = true;
  report.mi_pass = true;

  for (int l = 1; l <= tree.num_levels(); ++l) {
    LevelCheck check;
    check.level = l;
    check.reported_eps = result.epsilon[l - 1];
    check.recomputed_eps = recompute_level_epsilon(solver, l, result.profile);
    check.ok = check.recomputed_eps <= check.reported_eps + tolerance;
    report.eps_pass = report.eps_pass && check.ok;
    report.levels.push_back(check);
  }

  // Minimal-impact rule on every non-leaf player's detected indifference set:
  // the chosen action must minimize social cost within the own-cost tie band,
  // with any social-cost tie resolved toward the larger action.
  const double tie_tol = params.tie_tolerance;
  for (int l = 1; l < tree.num_levels(); ++l) {
    const std::vector<int> parent =
        l >= 2 ? profile_coords(result.profile, l - 1, params.grid) : std::vector<int>{};
    const std::vector<int> actions = profile_coords(result.profile, l, params.grid);
    for (int i = 0; i < tree.level_size(l); ++i) {
      RootGame root_view(solver);
      HierarchyLevelGame mid_view(solver, l, parent);
      LevelGameView& view = l == 1 ? static_cast<LevelGameView&>(root_view)
                                   : static_cast<LevelGameView&>(mid_view);
      std::vector<int> scratch = actions;
      std::vector<double> costs(params.grid.points());
      double min_cost = std::numeric_limits<double>::infinity();
      for (int g = 0; g <= params.grid.m; ++g) {
        scratch[i] = g;
        costs[g] = view.cost(i, scratch);
        min_cost = std::min(min_cost, costs[g]);
      }
      MiCheck check;
      check.player = {l, i};
      double min_sc = std::numeric_limits<double>::infinity();
      std::vector<int> tied;
      std::vector<double> socials;
      for (int g = 0; g <= params.grid.m; ++g) {
        if (costs[g] > min_cost + tie_tol) continue;
        scratch[i] = g;
        const double sc = view.social_cost(i, scratch);
        tied.push_back(g);
        socials.push_back(sc);
        min_sc = std::min(min_sc, sc);
      }
      check.tie_count = static_cast<int>(tied.size());
      int expected = -1;
      for (size_t j = 0; j < tied.size(); ++j)
        if (socials[j] <= min_sc + tie_tol) expected = tied[j];
      check.ok = actions[i] == expected;
      report.mi_pass = report.mi_pass && check.ok;
      report.mi_checks.push_back(check);
    }
  }
  return report;
}

}  // namespace hpmg
