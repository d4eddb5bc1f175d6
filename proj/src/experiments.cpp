#include "hpmg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "hpmg/csv.hpp"
#include "hpmg/parallel.hpp"
#include "hpmg/rng.hpp"

namespace hpmg {

namespace {

constexpr std::uint64_t kFreerideTag = 0x66726565ULL;  // "free"
constexpr std::uint64_t kFairTag = 0x66616972ULL;      // "fair"
constexpr std::uint64_t kDrawTag = 1;
constexpr std::uint64_t kSolveTag = 2;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("experiment: " + where + ": " + what);
}

double number_at(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) fail(where + "." + key, "expected a number");
  return j.at(key).get<double>();
}

std::vector<double> number_list(const nlohmann::json& j, const char* key,
                                const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty())
    fail(where, std::string("missing or empty array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) fail(where + "." + key, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// States are the level-2 players in config order; counties inherit their
// state's weight vector and initial infection rate.
void apply_state_parameters(GameConfig& config, std::span<const double> kappa_fractions,
                            double gamma, std::span<const double> state_rates) {
  auto& levels = config.hierarchy.levels;
  if (levels.size() < 2) fail("hierarchy", "state parameterization needs at least two levels");
  auto& states = levels[1];
  if (kappa_fractions.size() != states.size())
    fail("kappa_fractions", "expected one entry per level-2 player (" +
                                std::to_string(states.size()) + ")");
  if (state_rates.size() != states.size())
    fail("init rates", "expected one entry per level-2 player");
  if (gamma < 0.0 || gamma > 1.0) fail("gamma", "gamma must lie in [0, 1]");

  for (size_t s = 0; s < states.size(); ++s) {
    states[s].kappa = kappa_fractions[s] * (1.0 - gamma);
    states[s].eta = (1.0 - kappa_fractions[s]) * (1.0 - gamma);
  }
  const bool two_level = levels.size() == 2;
  for (size_t s = 0; s < states.size(); ++s) {
    if (two_level) {
      if (!states[s].population) fail(states[s].name, "state needs a population count");
      states[s].initial_infected = std::llround(state_rates[s] * *states[s].population);
    }
  }
  if (!two_level) {
    auto& counties = levels[2];
    for (auto& county : counties) {
      if (!county.parent) fail(county.name, "county has no parent");
      size_t s = states.size();
      for (size_t i = 0; i < states.size(); ++i)
        if (states[i].name == *county.parent) s = i;
      if (s == states.size()) fail(county.name, "parent is not a level-2 player");
      county.kappa = states[s].kappa;
      county.eta = states[s].eta;
      if (!county.population) fail(county.name, "county needs a population count");
      county.initial_infected = std::llround(state_rates[s] * *county.population);
    }
  }
}

}  // namespace

double gini(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw std::invalid_argument("gini: no values");
  std::vector<double> uniform;
  if (weights.empty()) {
    uniform.assign(values.size(), 1.0 / static_cast<double>(values.size()));
    weights = uniform;
  }
  if (weights.size() != values.size())
    throw std::invalid_argument("gini: weight count does not match value count");
  double wsum = 0.0, mean = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) throw std::invalid_argument("gini: negative value");
    if (weights[i] < 0.0) throw std::invalid_argument("gini: negative weight");
    wsum += weights[i];
    mean += weights[i] * values[i];
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("gini: weights must sum to 1");
  if (mean == 0.0) return 0.0;
  double spread = 0.0;
  for (size_t i = 0; i < values.size(); ++i)
    for (size_t j = 0; j < values.size(); ++j)
      spread += weights[i] * weights[j] * std::abs(values[i] - values[j]);
  return spread / (2.0 * mean);
}

std::pair<PlayerTree, std::optional<EpidemicParams>> collapse_lowest_level(
    const GameConfig& config) {
  const PlayerTree tree = config.build_tree();
  const int levels = tree.num_levels();
  if (levels < 3)
    return {tree, config.build_epidemic(tree)};  // already effectively collapsed

  HierarchySpec spec;
  for (int l = 1; l <= levels - 1; ++l) {
    std::vector<PlayerSpec> row;
    for (const auto& node : tree.level(l)) {
      PlayerSpec p;
      p.name = node.name;
      if (l > 1) p.parent = tree.level(l - 1)[node.parent].name;
      p.kappa = node.weights.kappa;
      p.eta = node.weights.eta;
      if (l == levels - 1) {
        long long pop = 0, inf = 0;
        for (int leaf : tree.descendant_leaves(tree.find(node.name).value())) {
          pop += tree.level(levels)[leaf].population;
          inf += tree.level(levels)[leaf].initial_infected;
        }
        p.population = pop;
        p.initial_infected = inf;
      }
      row.push_back(std::move(p));
    }
    spec.levels.push_back(std::move(row));
  }
  PlayerTree collapsed = PlayerTree::build(spec);

  std::optional<EpidemicParams> epi;
  if (config.epidemic) {
    const EpidemicParams fine = *config.build_epidemic(tree);
    const int n = collapsed.num_leaves();
    std::vector<std::vector<int>> members(n);
    for (int s = 0; s < n; ++s)
      members[s] = tree.descendant_leaves({levels - 1, s});

    // New entry (dest s', origin s): population-weighted average over origin
    // counties of the total flow into destination s'.
    std::vector<double> entries(static_cast<size_t>(n) * n, 0.0);
    for (int origin = 0; origin < n; ++origin) {
      double origin_pop = 0.0;
      for (int c0 : members[origin]) origin_pop += static_cast<double>(fine.population[c0]);
      for (int dest = 0; dest < n; ++dest) {
        double acc = 0.0;
        for (int c0 : members[origin]) {
          double into_dest = 0.0;
          for (int c : members[dest]) into_dest += fine.transport.at(c, c0);
          acc += static_cast<double>(fine.population[c0]) * into_dest;
        }
        entries[static_cast<size_t>(dest) * n + origin] = acc / origin_pop;
      }
    }
    epi = EpidemicParams::from_tree(collapsed, TransportMatrix(n, std::move(entries)),
                                    fine.contact_mean, fine.transmission_prob);
  }
  return {std::move(collapsed), std::move(epi)};
}

// --- free-riding sweeps ---------------------------------------------------------

FreerideExperiment parse_freeride_experiment(const nlohmann::json& j) {
  FreerideExperiment exp;
  const std::string where = "freeride";
  exp.gamma_grid = number_list(j, "gamma_grid", where);
  exp.state1_init_rate = number_at(j, "state1_init_rate", where);
  exp.state2_init_rates = number_list(j, "state2_init_rates", where);
  exp.kappa_fractions = number_list(j, "kappa_fractions", where);
  if (j.contains("counties_constrained")) {
    if (!j.at("counties_constrained").is_boolean())
      fail(where + ".counties_constrained", "expected a boolean");
    exp.counties_constrained = j.at("counties_constrained").get<bool>();
  }
  if (j.contains("output")) exp.output = j.at("output").get<std::string>();
  for (double g : exp.gamma_grid)
    if (g < 0.0 || g > 1.0) fail(where + ".gamma_grid", "gamma values must lie in [0, 1]");
  for (double r : exp.state2_init_rates)
    if (r < 0.0 || r > 1.0) fail(where + ".state2_init_rates", "rates must lie in [0, 1]");
  if (exp.state1_init_rate < 0.0 || exp.state1_init_rate > 1.0)
    fail(where + ".state1_init_rate", "rates must lie in [0, 1]");
  for (double f : exp.kappa_fractions)
    if (f < 0.0 || f > 1.0) fail(where + ".kappa_fractions", "fractions must lie in [0, 1]");
  return exp;
}

FreerideGame make_freeride_game(const GameConfig& config, const FreerideExperiment& exp,
                                double gamma, double state2_rate, std::uint64_t solve_seed) {
  GameConfig point = config;
  std::vector<double> rates(config.hierarchy.levels[1].size(), exp.state1_init_rate);
  if (rates.size() < 2) fail("hierarchy", "the free-riding sweep expects two level-2 players");
  rates[1] = state2_rate;
  apply_state_parameters(point, exp.kappa_fractions, gamma, rates);

  FreerideGame game;
  if (exp.counties_constrained) {
    auto [tree, epi] = collapse_lowest_level(point);
    game.tree = std::move(tree);
    game.epi = std::move(epi);
  } else {
    game.tree = point.build_tree();
    game.epi = point.build_epidemic(game.tree);
  }
  GameConfig for_params = point;
  if (exp.counties_constrained && config.hierarchy.levels.size() >= 3) {
    // Per-level solver vectors shrink with the collapsed hierarchy.
    auto shrink = [](auto& v) { if (v.size() > 1) v.resize(v.size() - 1); };
    shrink(for_params.solver.max_steps);
    shrink(for_params.solver.responders);
    shrink(for_params.solver.eps_limits);
    shrink(for_params.solver.search);
  }
  game.params = for_params.build_solver_params(game.tree);
  game.params.seed = solve_seed;
  return game;
}

std::uint64_t freeride_row_seed(std::uint64_t config_seed, int gamma_index, int rate_index) {
  return RngStream::derive(config_seed, {kFreerideTag, static_cast<std::uint64_t>(gamma_index),
                                         static_cast<std::uint64_t>(rate_index)})
      .next_u64();
}

std::vector<FreerideRow> run_freeride_sweep(const GameConfig& config,
                                            const FreerideExperiment& exp, int threads,
                                            int* failures) {
  const int num_gamma = static_cast<int>(exp.gamma_grid.size());
  const int num_rates = static_cast<int>(exp.state2_init_rates.size());
  const int total = num_gamma * num_rates;
  std::vector<std::optional<FreerideRow>> slots(total);
  std::vector<std::string> errors(total);

  parallel_for(total, threads, [&](int idx) {
    const int gi = idx / num_rates;
    const int ri = idx % num_rates;
    const double gamma = exp.gamma_grid[gi];
    const double rate2 = exp.state2_init_rates[ri];
    try {
      const std::uint64_t seed = freeride_row_seed(config.solver.seed, gi, ri);
      FreerideGame game = make_freeride_game(config, exp, gamma, rate2, seed);
      const EquilibriumResult result =
          solve_subgame_perfect(game.tree, game.epi ? &*game.epi : nullptr, config.compliance,
                         game.params);
      FreerideRow row;
      row.gamma = gamma;
      row.init_rate_2 = rate2;
      const auto states = result.profile.level(2);
      row.alpha1 = states[0];
      row.alpha2 = states[1];
      row.state_diff = row.alpha1 - row.alpha2;
      if (game.tree.num_levels() >= 3) {
        double avg1 = 0.0, avg2 = 0.0;
        const auto counties = result.profile.level(3);
        const auto l1 = game.tree.descendant_leaves({2, 0});
        const auto l2 = game.tree.descendant_leaves({2, 1});
        for (int c : l1) avg1 += counties[c];
        for (int c : l2) avg2 += counties[c];
        row.county_avg_diff = avg1 / l1.size() - avg2 / l2.size();
      } else {
        row.county_avg_diff = row.state_diff;  // constrained counties mirror their state
      }
      row.eps_max = *std::max_element(result.epsilon.begin(), result.epsilon.end());
      slots[idx] = row;
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  });

  std::vector<FreerideRow> rows;
  int failed = 0;
  for (int idx = 0; idx < total; ++idx) {
    if (slots[idx]) {
      rows.push_back(*slots[idx]);
    } else {
      ++failed;
      std::cerr << "freeride: grid point " << idx << " failed: " << errors[idx] << "\n";
    }
  }
  if (failures) *failures = failed;
  return rows;
}

std::string freeride_csv(std::span<const FreerideRow> rows) {
  CsvWriter csv;
  csv.header({"gamma", "init_rate_2", "alpha1", "alpha2", "state_diff", "county_avg_diff",
              "eps_max"});
  for (const auto& r : rows) {
    csv.field(r.gamma);
    csv.field(r.init_rate_2);
    csv.field(r.alpha1);
    csv.field(r.alpha2);
    csv.field(r.state_diff);
    csv.field(r.county_avg_diff);
    csv.field(r.eps_max);
    csv.end_row();
  }
  return csv.str();
}

// --- fairness trials --------------------------------------------------------------

FairnessExperiment parse_fairness_experiment(const nlohmann::json& j) {
  FairnessExperiment exp;
  const std::string where = "fairness";
  if (j.contains("trials")) exp.trials = j.at("trials").get<int>();
  if (exp.trials < 1) fail(where + ".trials", "expected a positive count");
  if (j.contains("gini_base")) {
    exp.gini_base = j.at("gini_base").get<std::string>();
    if (exp.gini_base != "cost" && exp.gini_base != "policy")
      fail(where + ".gini_base", "expected 'cost' or 'policy'");
  }
  if (!j.contains("scenarios") || !j.at("scenarios").is_array() || j.at("scenarios").empty())
    fail(where, "missing or empty array 'scenarios'");
  for (const auto& sj : j.at("scenarios")) {
    FairnessScenario s;
    if (!sj.contains("name")) fail(where + ".scenarios", "scenario needs a name");
    s.name = sj.at("name").get<std::string>();
    s.kappa_fractions = number_list(sj, "kappa_fractions", where + "." + s.name);
    auto range = [&](const char* key, std::array<double, 2>& target) {
      if (!sj.contains(key)) return;
      const auto v = number_list(sj, key, where + "." + s.name);
      if (v.size() != 2 || v[0] > v[1])
        fail(where + "." + s.name + "." + key, "expected [lo, hi]");
      target = {v[0], v[1]};
    };
    range("gamma_range", s.gamma_range);
    range("init_rate_range", s.init_rate_range);
    if (sj.contains("trials")) s.trials = sj.at("trials").get<int>();
    exp.scenarios.push_back(std::move(s));
  }
  if (j.contains("output")) exp.output = j.at("output").get<std::string>();
  return exp;
}

FairnessOutput run_fairness_trials(const GameConfig& config, const FairnessExperiment& exp,
                                   int threads) {
  struct Task {
    int scenario = 0;
    int trial = 0;
  };
  std::vector<Task> tasks;
  for (size_t si = 0; si < exp.scenarios.size(); ++si) {
    const int trials = exp.scenarios[si].trials.value_or(exp.trials);
    for (int t = 0; t < trials; ++t) tasks.push_back({static_cast<int>(si), t});
  }

  std::vector<std::optional<FairnessTrialRow>> slots(tasks.size());
  std::vector<std::string> errors(tasks.size());

  parallel_for(static_cast<int>(tasks.size()), threads, [&](int idx) {
    const auto [si, trial] = tasks[idx];
    const FairnessScenario& scenario = exp.scenarios[si];
    try {
      RngStream draw = RngStream::derive(config.solver.seed,
          {kFairTag, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(trial), kDrawTag});
      const double gamma = draw.next_uniform(scenario.gamma_range[0], scenario.gamma_range[1]);
      const size_t num_states = config.hierarchy.levels.size() > 1
          ? config.hierarchy.levels[1].size() : 0;
      std::vector<double> rates(num_states);
      for (auto& r : rates)
        r = draw.next_uniform(scenario.init_rate_range[0], scenario.init_rate_range[1]);

      GameConfig point = config;
      apply_state_parameters(point, scenario.kappa_fractions, gamma, rates);
      const PlayerTree tree = point.build_tree();
      const auto epi = point.build_epidemic(tree);
      SolverParams params = point.build_solver_params(tree);
      params.seed = RngStream::derive(config.solver.seed,
          {kFairTag, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(trial), kSolveTag})
          .next_u64();

      const EquilibriumResult result =
          solve_subgame_perfect(tree, epi ? &*epi : nullptr, point.compliance, params);

      const int leaves = tree.num_leaves();
      std::vector<double> values(leaves), weights(leaves), policies(leaves);
      const int lowest = tree.num_levels();
      for (int c = 0; c < leaves; ++c) {
        weights[c] = tree.level(lowest)[c].share;
        policies[c] = result.profile.at({lowest, c});
        values[c] = exp.gini_base == "policy"
            ? policies[c]
            : overall_cost({lowest, c}, result.profile, tree, epi ? &*epi : nullptr,
                           point.compliance);
      }

      FairnessTrialRow row;
      row.trial = trial;
      row.scenario = scenario.name;
      row.gini_value = gini(values, weights);
      row.county_policies = std::move(policies);
      row.eps_max = *std::max_element(result.epsilon.begin(), result.epsilon.end());
      row.gamma = gamma;
      row.state_rates = rates;
      slots[idx] = std::move(row);
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  });

  FairnessOutput out;
  for (size_t idx = 0; idx < tasks.size(); ++idx) {
    if (slots[idx]) {
      out.rows.push_back(std::move(*slots[idx]));
    } else {
      ++out.failures;
      std::cerr << "fairness: scenario " << tasks[idx].scenario << " trial " << tasks[idx].trial
                << " failed: " << errors[idx] << "\n";
    }
  }
  return out;
}

std::string fairness_csv(const FairnessOutput& out, int num_counties) {
  CsvWriter csv;
  std::vector<std::string> names = {"trial", "scenario", "gini"};
  for (int c = 1; c <= num_counties; ++c) names.push_back("policy_" + std::to_string(c));
  names.push_back("eps_max");
  csv.header_row(names);
  for (const auto& r : out.rows) {
    csv.field(static_cast<long long>(r.trial));
    csv.field(r.scenario);
    csv.field(r.gini_value);
    for (double p : r.county_policies) csv.field(p);
    csv.field(r.eps_max);
    csv.end_row();
  }
  return csv.str();
}

std::string fairness_draws_csv(const FairnessOutput& out, int num_states) {
  CsvWriter csv;
  std::vector<std::string> names = {"trial", "scenario", "gamma"};
  for (int s = 1; s <= num_states; ++s) names.push_back("init_rate_" + std::to_string(s));
  csv.header_row(names);
  for (const auto& r : out.rows) {
    csv.field(static_cast<long long>(r.trial));
    csv.field(r.scenario);
    csv.field(r.gamma);
    for (double v : r.state_rates) csv.field(v);
    csv.end_row();
  }
  return csv.str();
}

// --- abm comparison -----------------------------------------------------------------

AbmCompareExperiment parse_abm_experiment(const nlohmann::json& j) {
  AbmCompareExperiment exp;
  const std::string where = "abm_compare";
  exp.alpha_grid = number_list(j, "alpha_grid", where);
  exp.init_rate_grid = number_list(j, "init_rate_grid", where);
  if (j.contains("periods")) exp.periods = j.at("periods").get<int>();
  if (j.contains("incubation_delay")) exp.incubation_delay = j.at("incubation_delay").get<int>();
  if (j.contains("replications")) exp.replications = j.at("replications").get<int>();
  if (j.contains("output")) exp.output = j.at("output").get<std::string>();
  return exp;
}

}  // namespace hpmg
