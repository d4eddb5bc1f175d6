#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpmg/costs.hpp"
#include "hpmg/infection.hpp"
#include "hpmg/player_tree.hpp"
#include "hpmg/solver.hpp"

namespace hpmg {

// Transport construction directives as written in configuration files.
// Favorite destinations may be named by leaf or by an ancestor (which expands
// to all of its descendant leaves).
struct TransportSpec {
  enum class Kind { Symmetric, Favorites, Matrix };
  Kind kind = Kind::Symmetric;
  std::vector<std::string> favorites;
  double aggregate_share = 0.0;
  std::vector<std::vector<double>> entries;  // row-major [dest][origin]
};

struct EpidemicSpec {
  double contact_mean = 15.0;
  double transmission_prob = 0.047;
  TransportSpec transport;
};

// Solver tunables as configured; per-level entries cover levels 2..L and a
// single entry broadcasts to all of them.
struct SolverSpec {
  double grid_delta = 0.01;
  std::uint64_t seed = 0;
  std::vector<int> max_steps = {64};
  std::vector<int> responders = {0};  // 0 = every player responds
  std::vector<double> eps_limits = {0.0};
  std::vector<std::string> search = {"grid"};
  int restart_limit = 20;
  double tie_tolerance = 1e-9;
};

// A self-contained run description: hierarchy, epidemic, compliance, solver,
// plus an optional experiment section interpreted by the experiment runners.
struct GameConfig {
  HierarchySpec hierarchy;
  std::optional<EpidemicSpec> epidemic;
  ComplianceMode compliance = ComplianceMode::TwoSided;
  SolverSpec solver;
  nlohmann::json experiment;  // empty when absent

  PlayerTree build_tree() const;
  std::optional<EpidemicParams> build_epidemic(const PlayerTree& tree) const;
  SolverParams build_solver_params(const PlayerTree& tree) const;
};

GameConfig parse_game_config(const nlohmann::json& j);
GameConfig load_game_config(const std::string& path);
nlohmann::json game_config_to_json(const GameConfig& config);

TransportMatrix build_transport(const TransportSpec& spec, const PlayerTree& tree);

// FNV-1a over the raw bytes of the configuration file, recorded in result
// files so a result can be matched back to the exact config that produced it.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_string(std::string_view bytes);

// --- solve result files -------------------------------------------------------

struct SolveRecord {
  std::string schema = "hpmg-result-v1";
  std::string config_hash;
  std::uint64_t seed = 0;
  double grid_delta = 0.01;
  std::vector<std::vector<double>> profile;  // per level
  std::vector<double> epsilon;
  int root_tie_count = 0;
  std::vector<LevelDiagnostics> diagnostics;
};

SolveRecord make_solve_record(const EquilibriumResult& result, const SolverParams& params,
                              std::string config_hash);
std::string solve_record_to_string(const SolveRecord& record);
SolveRecord parse_solve_record(const std::string& text);
SolveRecord load_solve_record(const std::string& path);

// Rebuilds an EquilibriumResult (profile + reported epsilons) from a record
// for re-verification against the originating game.
EquilibriumResult record_to_result(const SolveRecord& record, const PlayerTree& tree);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace hpmg
