#include "hpmg/examples_builtin.hpp"

#include <array>

namespace hpmg {

namespace {

// Two states under one government; the states ignore infections entirely
// (kappa = 0) and trade implementation cost against a two-sided compliance
// penalty. Every recommendation above 0.25 leaves the states at full
// activity, so the minimal-impact rule decides the root's action.
constexpr std::string_view kTwoStates = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.0, "eta": 0.6, "population": 500, "initial_infected": 250},
        {"name": "state2", "parent": "gov", "kappa": 0.0, "eta": 0.6, "population": 500, "initial_infected": 250}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.01, "seed": 7}
})";

// Three-level demonstration game: a government, two states, two counties
// under each state.
constexpr std::string_view kThreeLevel = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.7, "eta": 0.2},
        {"name": "state2", "parent": "gov", "kappa": 0.7, "eta": 0.2}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.8, "eta": 0.1, "population": 250, "initial_infected": 25},
        {"name": "c12", "parent": "state1", "kappa": 0.8, "eta": 0.1, "population": 250, "initial_infected": 25},
        {"name": "c21", "parent": "state2", "kappa": 0.8, "eta": 0.1, "population": 250, "initial_infected": 125},
        {"name": "c22", "parent": "state2", "kappa": 0.8, "eta": 0.1, "population": 250, "initial_infected": 125}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.05, "seed": 11}
})";

// Closed form vs simulation, sweeping the shared policy at three fixed
// initial infection rates (four counties of 250, uniform transport).
constexpr std::string_view kAbmPolicySweep = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.45, "eta": 0.45},
        {"name": "state2", "parent": "gov", "kappa": 0.45, "eta": 0.45}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125},
        {"name": "c12", "parent": "state1", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125},
        {"name": "c21", "parent": "state2", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125},
        {"name": "c22", "parent": "state2", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.05, "seed": 2},
  "experiment": {
    "type": "abm_compare",
    "alpha_grid": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
    "init_rate_grid": [0.1, 0.3, 0.5],
    "periods": 8,
    "incubation_delay": 7,
    "replications": 500,
    "output": "abm_policy_sweep.csv"
  }
})";

// Closed form vs simulation, sweeping the shared initial infection rate at
// two fixed policies.
constexpr std::string_view kAbmSeedingSweep = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.45, "eta": 0.45},
        {"name": "state2", "parent": "gov", "kappa": 0.45, "eta": 0.45}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125},
        {"name": "c12", "parent": "state1", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125},
        {"name": "c21", "parent": "state2", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125},
        {"name": "c22", "parent": "state2", "kappa": 0.4, "eta": 0.4, "population": 250, "initial_infected": 125}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.05, "seed": 3},
  "experiment": {
    "type": "abm_compare",
    "alpha_grid": [0.5, 1.0],
    "init_rate_grid": [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5,
                       0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95],
    "periods": 8,
    "incubation_delay": 7,
    "replications": 500,
    "output": "abm_seeding_sweep.csv"
  }
})";

// Free-riding sweep under uniform transport with counties bound to state
// policy: state 1 lightly seeded, state 2 heavily seeded, weights swept along
// the non-compliance axis. State and county weights listed below are
// placeholders that the sweep overwrites at every grid point.
constexpr std::string_view kFreerideSymmetric = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.9, "eta": 0.1},
        {"name": "state2", "parent": "gov", "kappa": 0.9, "eta": 0.1}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c12", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c13", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c14", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c15", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c21", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c22", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c23", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c24", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c25", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.02, "seed": 31},
  "experiment": {
    "type": "freeride",
    "gamma_grid": [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
    "state1_init_rate": 0.1,
    "state2_init_rates": [0.7, 0.8, 0.9],
    "kappa_fractions": [0.9, 0.9],
    "counties_constrained": true,
    "output": "freeride_symmetric.csv"
  }
})";

// Same sweep with counties free to deviate from their states; coarser grid
// because every state evaluation now prices a full county sub-game.
constexpr std::string_view kFreerideAutonomous = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.9, "eta": 0.1},
        {"name": "state2", "parent": "gov", "kappa": 0.9, "eta": 0.1}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c12", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c13", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c14", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c15", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c21", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c22", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c23", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c24", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70},
        {"name": "c25", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 70}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.1, "seed": 37},
  "experiment": {
    "type": "freeride",
    "gamma_grid": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
    "state1_init_rate": 0.1,
    "state2_init_rates": [0.7, 0.9],
    "kappa_fractions": [0.9, 0.9],
    "counties_constrained": false,
    "output": "freeride_autonomous.csv"
  }
})";

// Free-riding sweep where state 1 is the globally favorite destination,
// receiving 0.8 of every county's activity in aggregate; state 1 starts at a
// moderate infection rate while state 2's rate sweeps across a wide range.
constexpr std::string_view kFreerideFavorites = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.8, "eta": 0.2},
        {"name": "state2", "parent": "gov", "kappa": 0.9, "eta": 0.1}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.8, "eta": 0.2, "population": 100, "initial_infected": 50},
        {"name": "c12", "parent": "state1", "kappa": 0.8, "eta": 0.2, "population": 100, "initial_infected": 50},
        {"name": "c13", "parent": "state1", "kappa": 0.8, "eta": 0.2, "population": 100, "initial_infected": 50},
        {"name": "c14", "parent": "state1", "kappa": 0.8, "eta": 0.2, "population": 100, "initial_infected": 50},
        {"name": "c15", "parent": "state1", "kappa": 0.8, "eta": 0.2, "population": 100, "initial_infected": 50},
        {"name": "c21", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 50},
        {"name": "c22", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 50},
        {"name": "c23", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 50},
        {"name": "c24", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 50},
        {"name": "c25", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 50}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "favorites", "favorites": ["state1"], "aggregate_share": 0.8}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.02, "seed": 41},
  "experiment": {
    "type": "freeride",
    "gamma_grid": [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
    "state1_init_rate": 0.5,
    "state2_init_rates": [0.1, 0.5, 0.6, 0.7, 0.8, 0.9],
    "kappa_fractions": [0.8, 0.9],
    "counties_constrained": true,
    "output": "freeride_favorites.csv"
  }
})";

// Randomized fairness trials under uniform transport. The scenario presets
// are reconstructions: aligned states share one priority profile, polarized
// states disagree sharply, and the decentralized preset keeps compliance
// weights near zero.
constexpr std::string_view kFairnessSymmetric = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.9, "eta": 0.1},
        {"name": "state2", "parent": "gov", "kappa": 0.9, "eta": 0.1}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c12", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c13", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c14", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c15", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c21", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c22", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c23", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c24", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c25", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.1, "seed": 53},
  "experiment": {
    "type": "fairness",
    "trials": 50,
    "gini_base": "cost",
    "scenarios": [
      {"name": "aligned_states", "kappa_fractions": [0.9, 0.9],
       "gamma_range": [0.0, 0.5], "init_rate_range": [0.05, 0.95]},
      {"name": "polarized_states", "kappa_fractions": [0.9, 0.1],
       "gamma_range": [0.0, 0.5], "init_rate_range": [0.05, 0.95]},
      {"name": "decentralized", "kappa_fractions": [0.9, 0.9],
       "gamma_range": [0.0, 0.05], "init_rate_range": [0.05, 0.95]}
    ],
    "output": "fairness_symmetric.csv"
  }
})";

// Fairness trials with state 1 as the favorite destination; the aligned
// preset runs fewer trials than the rest.
constexpr std::string_view kFairnessFavorites = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "state1", "parent": "gov", "kappa": 0.9, "eta": 0.1},
        {"name": "state2", "parent": "gov", "kappa": 0.9, "eta": 0.1}
      ],
      [
        {"name": "c11", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c12", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c13", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c14", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c15", "parent": "state1", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c21", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c22", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c23", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c24", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10},
        {"name": "c25", "parent": "state2", "kappa": 0.9, "eta": 0.1, "population": 100, "initial_infected": 10}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "favorites", "favorites": ["state1"], "aggregate_share": 0.8}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.1, "seed": 59},
  "experiment": {
    "type": "fairness",
    "trials": 50,
    "gini_base": "cost",
    "scenarios": [
      {"name": "aligned_states", "kappa_fractions": [0.9, 0.9],
       "gamma_range": [0.0, 0.5], "init_rate_range": [0.05, 0.95], "trials": 30},
      {"name": "polarized_states", "kappa_fractions": [0.9, 0.1],
       "gamma_range": [0.0, 0.5], "init_rate_range": [0.05, 0.95]},
      {"name": "decentralized", "kappa_fractions": [0.9, 0.9],
       "gamma_range": [0.0, 0.05], "init_rate_range": [0.05, 0.95]}
    ],
    "output": "fairness_favorites.csv"
  }
})";

// Symmetric two-level game (five identical states) solved with synchronous
// best-response dynamics and bisection search at the lowest level.
constexpr std::string_view kTwoLevelSymmetric = R"({
  "hierarchy": {
    "levels": [
      [{"name": "gov", "kappa": 0.5, "eta": 0.5}],
      [
        {"name": "s1", "parent": "gov", "kappa": 0.6, "eta": 0.2, "population": 200, "initial_infected": 60},
        {"name": "s2", "parent": "gov", "kappa": 0.6, "eta": 0.2, "population": 200, "initial_infected": 60},
        {"name": "s3", "parent": "gov", "kappa": 0.6, "eta": 0.2, "population": 200, "initial_infected": 60},
        {"name": "s4", "parent": "gov", "kappa": 0.6, "eta": 0.2, "population": 200, "initial_infected": 60},
        {"name": "s5", "parent": "gov", "kappa": 0.6, "eta": 0.2, "population": 200, "initial_infected": 60}
      ]
    ]
  },
  "epidemic": {
    "contact_mean": 15.0,
    "transmission_prob": 0.047,
    "transport": {"kind": "symmetric"}
  },
  "compliance": "two_sided",
  "solver": {"grid_delta": 0.02, "seed": 61, "responders": "all", "search": "bisection"}
})";

constexpr std::array<BuiltinExample, 10> kExamples = {{
    {"two_states", "Two indifferent-to-infection states under one government", kTwoStates},
    {"three_level", "Three-level demonstration game (2 states, 4 counties)", kThreeLevel},
    {"abm_policy_sweep", "Closed form vs simulation across shared policies", kAbmPolicySweep},
    {"abm_seeding_sweep", "Closed form vs simulation across initial infection rates",
     kAbmSeedingSweep},
    {"freeride_symmetric", "Free-riding sweep, uniform transport, counties constrained",
     kFreerideSymmetric},
    {"freeride_autonomous", "Free-riding sweep with counties free to deviate",
     kFreerideAutonomous},
    {"freeride_favorites", "Free-riding sweep with state 1 as favorite destination",
     kFreerideFavorites},
    {"fairness_symmetric", "Randomized fairness trials, uniform transport", kFairnessSymmetric},
    {"fairness_favorites", "Randomized fairness trials, favorite-destination transport",
     kFairnessFavorites},
    {"two_level_symmetric", "Symmetric two-level game, synchronous dynamics",
     kTwoLevelSymmetric},
}};

}  // namespace

std::span<const BuiltinExample> builtin_examples() { return kExamples; }

const BuiltinExample* find_builtin_example(std::string_view name) {
  for (const auto& e : kExamples)
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace hpmg
