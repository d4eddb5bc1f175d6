#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hpmg/config.hpp"
#include "hpmg/solver.hpp"

namespace hpmg {

// Weighted Gini coefficient: sum_{i,j} w_i w_j |x_i - x_j| / (2 sum_i w_i x_i).
// Values must be non-negative; uniform weights when omitted; all-zero values
// give 0.
double gini(std::span<const double> values, std::span<const double> weights = {});

// Merges the lowest level into its parents: populations and infections
// aggregate, parent-level players become the new leaves, and the transport
// matrix collapses by summing destination rows within each new leaf and
// population-averaging origin columns. This realizes "counties comply exactly
// with their states" as the equivalent shallower game.
std::pair<PlayerTree, std::optional<EpidemicParams>> collapse_lowest_level(
    const GameConfig& config);

// --- free-riding sweeps ------------------------------------------------------

// Sweep description: the level-2 players ("states") get weights
// kappa = kappa_fraction * (1 - gamma), eta = (1 - kappa_fraction) * (1 - gamma)
// at every gamma grid point; counties, when free to act, inherit their
// state's weight vector and initial infection rate.
struct FreerideExperiment {
  std::vector<double> gamma_grid;
  double state1_init_rate = 0.1;
  std::vector<double> state2_init_rates;
  std::vector<double> kappa_fractions;  // one per state
  bool counties_constrained = true;
  std::string output = "freeride.csv";
};

struct FreerideRow {
  double gamma = 0.0;
  double init_rate_2 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double state_diff = 0.0;        // alpha1 - alpha2
  double county_avg_diff = 0.0;   // mean county policy difference
  double eps_max = 0.0;
};

FreerideExperiment parse_freeride_experiment(const nlohmann::json& j);

// Solver seed used for one sweep grid point; every row is replayable from
// the config seed and its grid indices.
std::uint64_t freeride_row_seed(std::uint64_t config_seed, int gamma_index, int rate_index);

std::vector<FreerideRow> run_freeride_sweep(const GameConfig& config,
                                            const FreerideExperiment& exp, int threads = 1,
                                            int* failures = nullptr);

// Builds the per-grid-point game (weights, infection rates, optional county
// collapse). Exposed so tests can inspect exactly what a sweep solves.
struct FreerideGame {
  PlayerTree tree;
  std::optional<EpidemicParams> epi;
  SolverParams params;
};
FreerideGame make_freeride_game(const GameConfig& config, const FreerideExperiment& exp,
                                double gamma, double state2_rate, std::uint64_t solve_seed);

std::string freeride_csv(std::span<const FreerideRow> rows);

// --- fairness trials ---------------------------------------------------------

// Named scenario preset. Each trial draws (gamma, state rates) uniformly
// from the configured ranges; states get the fraction-parameterized weights
// and counties inherit their state's weights and rate.
struct FairnessScenario {
  std::string name;
  std::vector<double> kappa_fractions;
  std::array<double, 2> gamma_range = {0.0, 0.5};
  std::array<double, 2> init_rate_range = {0.05, 0.95};
  std::optional<int> trials;
};

struct FairnessExperiment {
  int trials = 50;
  std::string gini_base = "cost";  // or "policy"
  std::vector<FairnessScenario> scenarios;
  std::string output = "fairness.csv";
};

struct FairnessTrialRow {
  int trial = 0;
  std::string scenario;
  double gini_value = 0.0;
  std::vector<double> county_policies;
  double eps_max = 0.0;
  // The drawn parameters, logged so any trial can be replayed exactly.
  double gamma = 0.0;
  std::vector<double> state_rates;
};

struct FairnessOutput {
  std::vector<FairnessTrialRow> rows;
  int failures = 0;
};

FairnessExperiment parse_fairness_experiment(const nlohmann::json& j);

FairnessOutput run_fairness_trials(const GameConfig& config, const FairnessExperiment& exp,
                                   int threads = 1);

std::string fairness_csv(const FairnessOutput& out, int num_counties);
std::string fairness_draws_csv(const FairnessOutput& out, int num_states);

// --- abm comparison ----------------------------------------------------------

struct AbmCompareExperiment {
  std::vector<double> alpha_grid;
  std::vector<double> init_rate_grid;
  int periods = 8;
  int incubation_delay = 7;
  int replications = 1000;
  std::string output = "abm_compare.csv";
};

AbmCompareExperiment parse_abm_experiment(const nlohmann::json& j);

}  // namespace hpmg
