#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hpmg/examples_builtin.hpp"
#include "hpmg/experiments.hpp"
#include "hpmg/rng.hpp"

using namespace hpmg;

namespace {

GameConfig builtin(const char* name) {
  return parse_game_config(nlohmann::json::parse(find_builtin_example(name)->text));
}

// Two-level config equivalent to the constrained three-level sweep game.
GameConfig explicit_two_level(double kappa_frac, double gamma, double rate1, double rate2) {
  nlohmann::json j;
  j["hierarchy"]["levels"] = nlohmann::json::array();
  j["hierarchy"]["levels"].push_back({{{"name", "gov"}, {"kappa", 0.5}, {"eta", 0.5}}});
  const double kappa = kappa_frac * (1.0 - gamma);
  const double eta = (1.0 - kappa_frac) * (1.0 - gamma);
  j["hierarchy"]["levels"].push_back(
      {{{"name", "state1"}, {"parent", "gov"}, {"kappa", kappa}, {"eta", eta},
        {"population", 500}, {"initial_infected", std::llround(rate1 * 500)}},
       {{"name", "state2"}, {"parent", "gov"}, {"kappa", kappa}, {"eta", eta},
        {"population", 500}, {"initial_infected", std::llround(rate2 * 500)}}});
  j["epidemic"] = {{"contact_mean", 15.0},
                   {"transmission_prob", 0.047},
                   {"transport", {{"kind", "symmetric"}}}};
  j["compliance"] = "two_sided";
  j["solver"] = {{"grid_delta", 0.02}, {"seed", 0}};
  return parse_game_config(j);
}

}  // namespace

TEST_CASE("gini coefficient") {
  SUBCASE("worked values") {
    const std::vector<double> equal = {0.4, 0.4, 0.4};
    CHECK(gini(equal) == 0.0);
    const std::vector<double> single = {0.0, 0.0, 0.0, 1.0};
    CHECK(gini(single) == doctest::Approx(0.75).epsilon(1e-12));
    const std::vector<double> ramp = {1.0, 2.0, 3.0, 4.0};
    CHECK(gini(ramp) == doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("zero values give zero inequality") {
    const std::vector<double> zeros = {0.0, 0.0};
    CHECK(gini(zeros) == 0.0);
  }

  SUBCASE("scale invariance") {
    RngStream rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_below(8));
      std::vector<double> values(n);
      for (auto& v : values) v = rng.next_double();
      const double scale = rng.next_uniform(0.001, 1000.0);
      std::vector<double> scaled = values;
      for (auto& v : scaled) v *= scale;
      CHECK(std::abs(gini(values) - gini(scaled)) <= 1e-12);
    }
  }

  SUBCASE("weighted version respects shares") {
    const std::vector<double> values = {1.0, 0.0};
    const std::vector<double> weights = {0.5, 0.5};
    CHECK(gini(values, weights) == doctest::Approx(0.5).epsilon(1e-12));
    // A dominant share holding everything is near-equality for the population.
    const std::vector<double> skewed = {0.99, 0.01};
    CHECK(gini(values, skewed) < 0.05);
  }

  SUBCASE("invalid inputs") {
    const std::vector<double> negative = {0.5, -0.1};
    CHECK_THROWS_AS(gini(negative), std::invalid_argument);
    const std::vector<double> values = {0.5, 0.1};
    const std::vector<double> bad_weights = {0.5, 0.4};
    CHECK_THROWS_AS(gini(values, bad_weights), std::invalid_argument);
    CHECK_THROWS_AS(gini({}), std::invalid_argument);
  }
}

TEST_CASE("constrained counties solve exactly like the explicit two-level game") {
  const GameConfig config = builtin("freeride_symmetric");
  const FreerideExperiment exp = parse_freeride_experiment(config.experiment);

  for (const double gamma : {0.1, 0.3}) {
    FreerideGame collapsed = make_freeride_game(config, exp, gamma, 0.9, 99);

    const GameConfig two = explicit_two_level(0.9, gamma, 0.1, 0.9);
    const PlayerTree tree2 = two.build_tree();
    const auto epi2 = two.build_epidemic(tree2);
    SolverParams params2 = two.build_solver_params(tree2);
    params2.seed = 99;

    // Identical games, bit for bit: populations, infections, transport.
    REQUIRE(collapsed.tree.num_levels() == 2);
    CHECK(collapsed.epi->population == epi2->population);
    CHECK(collapsed.epi->initial_infected == epi2->initial_infected);
    for (int d = 0; d < 2; ++d)
      for (int o = 0; o < 2; ++o)
        CHECK(collapsed.epi->transport.at(d, o) == epi2->transport.at(d, o));

    const EquilibriumResult a =
        solve_subgame_perfect(collapsed.tree, &*collapsed.epi, config.compliance, collapsed.params);
    const EquilibriumResult b = solve_subgame_perfect(tree2, &*epi2, two.compliance, params2);
    CHECK(a.profile.at({2, 0}) == b.profile.at({2, 0}));
    CHECK(a.profile.at({2, 1}) == b.profile.at({2, 1}));
    CHECK(a.profile.at({1, 0}) == b.profile.at({1, 0}));
  }
}

TEST_CASE("collapsing a favorites matrix concentrates flows by state") {
  const GameConfig config = builtin("freeride_favorites");
  auto [tree, epi] = collapse_lowest_level(config);
  REQUIRE(tree.num_levels() == 2);
  REQUIRE(epi.has_value());
  for (int origin = 0; origin < 2; ++origin) {
    CHECK(epi->transport.at(0, origin) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(epi->transport.at(1, origin) == doctest::Approx(0.2).epsilon(1e-12));
  }
  CHECK(epi->population == std::vector<long long>{500, 500});
}

TEST_CASE("free-riding measures are antisymmetric under a state swap") {
  const GameConfig config = builtin("freeride_symmetric");
  FreerideExperiment exp = parse_freeride_experiment(config.experiment);
  exp.gamma_grid = {0.0, 0.15, 0.3};
  exp.state2_init_rates = {0.9};
  const auto rows = run_freeride_sweep(config, exp, 1);

  // Swap: state 1 heavily seeded, state 2 lightly.
  FreerideExperiment swapped = exp;
  swapped.state1_init_rate = 0.9;
  swapped.state2_init_rates = {0.1};
  const auto srows = run_freeride_sweep(config, swapped, 1);

  REQUIRE(rows.size() == srows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].state_diff == doctest::Approx(-srows[i].state_diff).epsilon(1e-9));
    CHECK(rows[i].alpha1 == doctest::Approx(srows[i].alpha2).epsilon(1e-9));
    CHECK(rows[i].alpha2 == doctest::Approx(srows[i].alpha1).epsilon(1e-9));
  }
}

TEST_CASE("fully symmetric states never free-ride") {
  const GameConfig config = builtin("freeride_symmetric");
  FreerideExperiment exp = parse_freeride_experiment(config.experiment);
  exp.gamma_grid = {0.0, 0.2, 0.4};
  exp.state1_init_rate = 0.5;
  exp.state2_init_rates = {0.5};
  const auto rows = run_freeride_sweep(config, exp, 1);
  for (const auto& row : rows) {
    CHECK(row.state_diff == 0.0);
    CHECK(row.county_avg_diff == 0.0);
  }
}

TEST_CASE("free-riding appears at low compliance weight and fades at high") {
  const GameConfig config = builtin("freeride_symmetric");
  FreerideExperiment exp = parse_freeride_experiment(config.experiment);
  exp.gamma_grid = {0.0, 0.4};
  exp.state2_init_rates = {0.9};
  const auto rows = run_freeride_sweep(config, exp, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].state_diff <= -0.5);             // heavy free-riding at gamma 0
  CHECK(std::abs(rows[1].state_diff) <= 0.1);    // largely mitigated at gamma 0.4
}

TEST_CASE("every sweep row passes independent verification") {
  const GameConfig config = builtin("freeride_symmetric");
  FreerideExperiment exp = parse_freeride_experiment(config.experiment);
  exp.gamma_grid = {0.0, 0.25, 0.5};
  exp.state2_init_rates = {0.8};
  const auto rows = run_freeride_sweep(config, exp, 1);
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    const std::uint64_t seed =
        freeride_row_seed(config.solver.seed, static_cast<int>(i), 0);
    FreerideGame game = make_freeride_game(config, exp, rows[i].gamma, 0.8, seed);
    EquilibriumResult result =
        solve_subgame_perfect(game.tree, &*game.epi, config.compliance, game.params);
    CHECK(result.profile.at({2, 0}) == rows[i].alpha1);
    const VerificationReport report = verify_equilibrium(
        result, game.tree, &*game.epi, config.compliance, game.params, 1e-9);
    CHECK(report.eps_pass);
  }
}

TEST_CASE("favorite-destination sweep shows the free-rider changing status") {
  const GameConfig config = builtin("freeride_favorites");
  FreerideExperiment exp = parse_freeride_experiment(config.experiment);
  exp.gamma_grid = {0.0};
  exp.state2_init_rates = {0.1, 0.9};
  const auto rows = run_freeride_sweep(config, exp, 1);
  REQUIRE(rows.size() == 2);
  // Lightly seeded state 2 locks down while the moderately seeded favorite
  // stays open: state 1 free-rides. Once state 2 is overwhelmed it stops
  // distancing too and the free-riding gap collapses.
  CHECK(rows[0].state_diff >= 0.5);
  CHECK(std::abs(rows[1].state_diff) <= 0.1);
}

TEST_CASE("freeride csv format") {
  std::vector<FreerideRow> rows = {{0.5, 0.9, 1.0, 0.25, 0.75, 0.75, 0.0}};
  const std::string csv = freeride_csv(rows);
  CHECK(csv ==
        "gamma,init_rate_2,alpha1,alpha2,state_diff,county_avg_diff,eps_max\n"
        "0.5,0.9,1,0.25,0.75,0.75,0\n");
}

TEST_CASE("one-sided sweeps run end to end") {
  GameConfig config = builtin("freeride_symmetric");
  config.compliance = ComplianceMode::OneSided;
  FreerideExperiment exp = parse_freeride_experiment(config.experiment);
  exp.gamma_grid = {0.0, 0.3};
  exp.state2_init_rates = {0.9};
  int failures = 0;
  const auto rows = run_freeride_sweep(config, exp, 1, &failures);
  CHECK(failures == 0);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.alpha1 >= 0.0);
    CHECK(row.alpha1 <= 1.0);
    CHECK(row.state_diff >= -1.0);
    CHECK(row.state_diff <= 1.0);
  }
}

TEST_CASE("sweeps accept hierarchies that are already two levels deep") {
  // States as leaves: rates apply to the states directly and the constrained
  // flag has nothing to collapse.
  nlohmann::json j;
  j["hierarchy"]["levels"] = nlohmann::json::array();
  j["hierarchy"]["levels"].push_back({{{"name", "gov"}, {"kappa", 0.5}, {"eta", 0.5}}});
  j["hierarchy"]["levels"].push_back(
      {{{"name", "state1"}, {"parent", "gov"}, {"kappa", 0.9}, {"eta", 0.1},
        {"population", 500}, {"initial_infected", 50}},
       {{"name", "state2"}, {"parent", "gov"}, {"kappa", 0.9}, {"eta", 0.1},
        {"population", 500}, {"initial_infected", 450}}});
  j["epidemic"] = {{"contact_mean", 15.0},
                   {"transmission_prob", 0.047},
                   {"transport", {{"kind", "symmetric"}}}};
  j["compliance"] = "two_sided";
  j["solver"] = {{"grid_delta", 0.02}, {"seed", 31}};
  const GameConfig two_level = parse_game_config(j);

  FreerideExperiment exp;
  exp.gamma_grid = {0.0, 0.4};
  exp.state1_init_rate = 0.1;
  exp.state2_init_rates = {0.9};
  exp.kappa_fractions = {0.9, 0.9};
  exp.counties_constrained = true;
  const auto direct = run_freeride_sweep(two_level, exp, 1);

  // Must agree exactly with the collapsed three-level run.
  const GameConfig three_level = builtin("freeride_symmetric");
  const auto collapsed = run_freeride_sweep(three_level, exp, 1);
  REQUIRE(direct.size() == collapsed.size());
  for (size_t i = 0; i < direct.size(); ++i) {
    CHECK(direct[i].alpha1 == collapsed[i].alpha1);
    CHECK(direct[i].alpha2 == collapsed[i].alpha2);
  }
}

TEST_CASE("identical counties give zero inequality in every trial") {
  GameConfig config = builtin("fairness_symmetric");
  FairnessExperiment exp = parse_fairness_experiment(config.experiment);
  exp.trials = 6;
  exp.scenarios = {exp.scenarios[0]};  // aligned states
  // Symmetric draws: collapse both states' rate range to a point per trial.
  exp.scenarios[0].init_rate_range = {0.4, 0.4};
  const FairnessOutput out = run_fairness_trials(config, exp, 1);
  REQUIRE(out.rows.size() == 6);
  CHECK(out.failures == 0);
  for (const auto& row : out.rows) {
    CHECK(row.gini_value == 0.0);
    for (double p : row.county_policies) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("fairness trials are deterministic and within range") {
  GameConfig config = builtin("fairness_symmetric");
  FairnessExperiment exp = parse_fairness_experiment(config.experiment);
  exp.trials = 5;
  const FairnessOutput a = run_fairness_trials(config, exp, 1);
  const FairnessOutput b = run_fairness_trials(config, exp, 2);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].gini_value == b.rows[i].gini_value);
    CHECK(a.rows[i].county_policies == b.rows[i].county_policies);
    CHECK(a.rows[i].gamma == b.rows[i].gamma);
    CHECK(a.rows[i].gini_value >= 0.0);
    CHECK(a.rows[i].gini_value <= 1.0);
  }
  const std::string csv = fairness_csv(a, 10);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "trial,scenario,gini,policy_1,policy_2,policy_3,policy_4,policy_5,policy_6,policy_7,"
        "policy_8,policy_9,policy_10,eps_max");
  const std::string draws = fairness_draws_csv(a, 2);
  CHECK(draws.substr(0, draws.find('\n')) == "trial,scenario,gamma,init_rate_1,init_rate_2");
}

TEST_CASE("gini can be computed over policies instead of costs") {
  GameConfig config = builtin("fairness_symmetric");
  FairnessExperiment exp = parse_fairness_experiment(config.experiment);
  exp.trials = 4;
  exp.scenarios = {exp.scenarios[1]};  // polarized states
  exp.gini_base = "policy";
  const FairnessOutput out = run_fairness_trials(config, exp, 1);
  REQUIRE(out.rows.size() == 4);
  for (const auto& row : out.rows) {
    // Equal county populations mean uniform shares, so the recorded gini must
    // equal the unweighted gini of the recorded policies.
    CHECK(row.gini_value ==
          doctest::Approx(gini(row.county_policies)).epsilon(1e-12));
  }
}

TEST_CASE("symmetric fairness trials cluster policies at the grid extremes") {
  GameConfig config = builtin("fairness_symmetric");
  FairnessExperiment exp = parse_fairness_experiment(config.experiment);
  exp.trials = 25;
  exp.scenarios = {exp.scenarios[0]};
  const FairnessOutput out = run_fairness_trials(config, exp, 1);
  REQUIRE(out.rows.size() == 25);
  int extreme = 0, total = 0;
  for (const auto& row : out.rows)
    for (double p : row.county_policies) {
      ++total;
      if (p == 0.0 || p == 1.0) ++extreme;
    }
  CHECK(extreme >= total / 2);
}
