#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "hpmg/abm.hpp"
#include "hpmg/config.hpp"
#include "hpmg/csv.hpp"
#include "hpmg/examples_builtin.hpp"
#include "hpmg/experiments.hpp"
#include "hpmg/solver.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_delta;
  int threads = 0;  // 0 = auto
  std::string out_dir = ".";
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HPMG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct LoadedGame {
  hpmg::GameConfig config;
  std::string config_hash;
  hpmg::PlayerTree tree;
  std::optional<hpmg::EpidemicParams> epi;
  hpmg::SolverParams params;
};

LoadedGame load_game(const CommonOptions& opts) {
  const std::string text = hpmg::read_file(opts.config_path);
  LoadedGame game{hpmg::parse_game_config(nlohmann::json::parse(text)),
                  hpmg::hash_string(text),
                  {}, {}, {}};
  if (opts.seed) game.config.solver.seed = *opts.seed;
  if (opts.grid_delta) game.config.solver.grid_delta = *opts.grid_delta;
  game.tree = game.config.build_tree();
  game.epi = game.config.build_epidemic(game.tree);
  game.params = game.config.build_solver_params(game.tree);
  return game;
}

fs::path output_path(const CommonOptions& opts, const std::string& name) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

void print_result(const LoadedGame& game, const hpmg::EquilibriumResult& result) {
  std::cout << "equilibrium profile:\n";
  for (int l = 1; l <= game.tree.num_levels(); ++l) {
    std::cout << "  level " << l << ":";
    for (int i = 0; i < game.tree.level_size(l); ++i)
      std::cout << " " << game.tree.level(l)[i].name << "=" << result.profile.at({l, i});
    std::cout << "\n";
  }
  std::cout << "epsilon per level:";
  for (double e : result.epsilon) std::cout << " " << e;
  std::cout << "\nroot tie count: " << result.root_tie_count << "\n";
  for (int l = 2; l <= game.tree.num_levels(); ++l) {
    const auto& d = result.diagnostics[l - 1];
    const auto& t = result.search_totals[l - 1];
    std::cout << "level " << l << " dynamics: steps=" << d.steps << " cycles=" << d.cycles
              << " restarts=" << d.restarts
              << (d.budget_exhausted ? " (restart budget exhausted)" : "")
              << "  [search totals: steps=" << t.steps << " cycles=" << t.cycles
              << " restarts=" << t.restarts << "]\n";
  }
  std::cout << "wall time: " << result.wall_seconds << " s\n";
}

int cmd_solve(const CommonOptions& opts, const std::string& result_name) {
  LoadedGame game = load_game(opts);
  const hpmg::EquilibriumResult result = hpmg::solve_subgame_perfect(
      game.tree, game.epi ? &*game.epi : nullptr, game.config.compliance, game.params);
  print_result(game, result);

  const hpmg::SolveRecord record =
      hpmg::make_solve_record(result, game.params, game.config_hash);
  std::string name = result_name;
  if (name.empty()) name = fs::path(opts.config_path).stem().string() + "_result.json";
  const fs::path out = output_path(opts, name);
  hpmg::write_file(out.string(), hpmg::solve_record_to_string(record));

  hpmg::CsvWriter diag_csv;
  diag_csv.header({"level", "epsilon", "steps", "cycles", "restarts"});
  for (int l = 1; l <= game.tree.num_levels(); ++l) {
    const auto& d = result.diagnostics[l - 1];
    diag_csv.field(static_cast<long long>(l));
    diag_csv.field(result.epsilon[l - 1]);
    diag_csv.field(static_cast<long long>(d.steps));
    diag_csv.field(static_cast<long long>(d.cycles));
    diag_csv.field(static_cast<long long>(d.restarts));
    diag_csv.end_row();
  }
  const fs::path diag_path =
      output_path(opts, fs::path(name).stem().string() + "_diagnostics.csv");
  hpmg::write_file(diag_path.string(), diag_csv.str());
  std::cout << "result written to " << out.string() << " (diagnostics: " << diag_path.string()
            << ")\n";

  bool exhausted = false;
  for (const auto& d : result.diagnostics) exhausted |= d.budget_exhausted;
  if (exhausted) {
    std::cerr << "warning: restart budget exhausted; result is best-effort\n";
    return 2;
  }
  return 0;
}

int cmd_verify(const CommonOptions& opts, const std::string& result_path, double tolerance) {
  LoadedGame game = load_game(opts);
  const hpmg::SolveRecord record = hpmg::load_solve_record(result_path);
  if (record.config_hash != game.config_hash)
    std::cerr << "warning: result was produced from a different config ("
              << record.config_hash << " vs " << game.config_hash << ")\n";
  // Re-verify under the parameters the result was produced with.
  game.config.solver.seed = record.seed;
  game.config.solver.grid_delta = record.grid_delta;
  game.params = game.config.build_solver_params(game.tree);

  const hpmg::EquilibriumResult result = hpmg::record_to_result(record, game.tree);
  const hpmg::VerificationReport report = hpmg::verify_equilibrium(
      result, game.tree, game.epi ? &*game.epi : nullptr, game.config.compliance, game.params,
      tolerance);
  for (const auto& level : report.levels)
    std::cout << "level " << level.level << ": reported eps=" << level.reported_eps
              << " recomputed eps=" << level.recomputed_eps
              << (level.ok ? " ok" : " VIOLATION") << "\n";
  for (const auto& mi : report.mi_checks)
    std::cout << game.tree.level(mi.player.level)[mi.player.index].name
              << ": indifference set size " << mi.tie_count
              << (mi.ok ? ", minimal-impact choice ok" : ", minimal-impact rule VIOLATED")
              << "\n";
  std::cout << (report.eps_pass ? "verification PASSED" : "verification FAILED")
            << (report.mi_pass ? "" : " (minimal-impact rule violated)") << "\n";
  return report.eps_pass ? 0 : 2;
}

int cmd_freeride(const CommonOptions& opts) {
  LoadedGame game = load_game(opts);
  if (!game.config.experiment.contains("type") ||
      game.config.experiment.at("type") != "freeride")
    throw std::invalid_argument("config: experiment.type must be 'freeride'");
  const hpmg::FreerideExperiment exp =
      hpmg::parse_freeride_experiment(game.config.experiment);
  int failures = 0;
  const auto rows = hpmg::run_freeride_sweep(game.config, exp, resolve_threads(opts.threads),
                                             &failures);
  const fs::path out = output_path(opts, exp.output);
  hpmg::write_file(out.string(), hpmg::freeride_csv(rows));
  std::cout << rows.size() << " rows written to " << out.string() << "\n";
  if (failures > 0) {
    std::cerr << failures << " grid points failed\n";
    return 2;
  }
  return 0;
}

int cmd_fairness(const CommonOptions& opts) {
  LoadedGame game = load_game(opts);
  if (!game.config.experiment.contains("type") ||
      game.config.experiment.at("type") != "fairness")
    throw std::invalid_argument("config: experiment.type must be 'fairness'");
  const hpmg::FairnessExperiment exp = hpmg::parse_fairness_experiment(game.config.experiment);
  const auto out = hpmg::run_fairness_trials(game.config, exp, resolve_threads(opts.threads));
  const fs::path csv_path = output_path(opts, exp.output);
  hpmg::write_file(csv_path.string(), hpmg::fairness_csv(out, game.tree.num_leaves()));
  const std::string draws_name = fs::path(exp.output).stem().string() + "_draws.csv";
  const fs::path draws_path = output_path(opts, draws_name);
  hpmg::write_file(draws_path.string(),
                   hpmg::fairness_draws_csv(out, game.tree.level_size(2)));
  std::cout << out.rows.size() << " trials written to " << csv_path.string() << " (draw log: "
            << draws_path.string() << ")\n";
  if (out.failures > 0) {
    std::cerr << out.failures << " trials failed and were excluded\n";
    return 2;
  }
  return 0;
}

int cmd_validate_abm(const CommonOptions& opts) {
  LoadedGame game = load_game(opts);
  if (!game.config.experiment.contains("type") ||
      game.config.experiment.at("type") != "abm_compare")
    throw std::invalid_argument("config: experiment.type must be 'abm_compare'");
  const hpmg::AbmCompareExperiment exp = hpmg::parse_abm_experiment(game.config.experiment);
  if (!game.epi)
    throw std::invalid_argument("config: the abm comparison needs an epidemic section");

  hpmg::AbmConfig abm;
  abm.epi = *game.epi;
  abm.periods = exp.periods;
  abm.incubation_delay = exp.incubation_delay;
  abm.replications = exp.replications;
  abm.seed = game.config.solver.seed;
  abm.threads = resolve_threads(opts.threads);
  const auto rows = hpmg::compare_closed_form(abm, exp.alpha_grid, exp.init_rate_grid);
  const fs::path out = output_path(opts, exp.output);
  hpmg::write_file(out.string(), hpmg::abm_comparison_csv(rows));
  std::cout << rows.size() << " rows written to " << out.string() << "\n";
  return 0;
}

int cmd_print_example(const std::string& name, bool list) {
  if (list) {
    for (const auto& e : hpmg::builtin_examples())
      std::cout << e.name << "  -  " << e.description << "\n";
    return 0;
  }
  const hpmg::BuiltinExample* example = hpmg::find_builtin_example(name);
  if (!example) {
    std::cerr << "unknown example '" << name << "'; use --list to see what ships\n";
    return 1;
  }
  std::cout << example->text << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical policy-game equilibrium solver and experiment runner"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", opts.config_path, "configuration file")->required();
    cmd->add_option("--seed", opts.seed, "override the solver seed");
    cmd->add_option("--grid-delta", opts.grid_delta, "override the action grid resolution");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = auto)");
    cmd->add_option("--out-dir", opts.out_dir, "directory for output files");
  };

  auto* solve = app.add_subcommand("solve", "compute an equilibrium and write a result file");
  std::string result_name;
  add_common(solve);
  solve->add_option("--result", result_name, "result file name (default <config>_result.json)");

  auto* verify = app.add_subcommand("verify-result", "re-check a result file by exhaustive deviation");
  std::string result_path;
  double tolerance = 1e-9;
  add_common(verify);
  verify->add_option("--result", result_path, "result file to verify")->required();
  verify->add_option("--tolerance", tolerance, "epsilon slack for the verification");

  auto* freeride = app.add_subcommand("sweep-freeride", "run a free-riding sweep to CSV");
  add_common(freeride);

  auto* fairness = app.add_subcommand("fairness", "run randomized fairness trials to CSV");
  add_common(fairness);

  auto* abm = app.add_subcommand("validate-abm", "compare the closed form against the simulation");
  add_common(abm);

  auto* example = app.add_subcommand("print-example", "print a built-in example config");
  std::string example_name;
  bool list_examples = false;
  example->add_option("name", example_name, "example name");
  example->add_flag("--list", list_examples, "list available examples");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(opts, result_name);
    if (verify->parsed()) return cmd_verify(opts, result_path, tolerance);
    if (freeride->parsed()) return cmd_freeride(opts);
    if (fairness->parsed()) return cmd_fairness(opts);
    if (abm->parsed()) return cmd_validate_abm(opts);
    if (example->parsed()) {
      if (!list_examples && example_name.empty()) {
        std::cerr << "print-example needs a name or --list\n";
        return 1;
      }
      return cmd_print_example(example_name, list_examples);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
