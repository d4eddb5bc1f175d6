#include "hpmg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hpmg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

template <typename T, typename Fn>
std::vector<T> scalar_or_array(const json& j, const std::string& where, Fn&& convert) {
  std::vector<T> out;
  if (j.is_array()) {
    int i = 0;
    for (const auto& item : j) out.push_back(convert(item, where + "[" + std::to_string(i++) + "]"));
    if (out.empty()) fail(where, "array must not be empty");
  } else {
    out.push_back(convert(j, where));
  }
  return out;
}

PlayerSpec parse_player(const json& j, const std::string& where, bool is_root) {
  PlayerSpec p;
  p.name = as_string(require(j, "name", where), where + ".name");
  if (j.contains("parent")) p.parent = as_string(j.at("parent"), where + ".parent");
  p.kappa = as_number(require(j, "kappa", where), where + ".kappa");
  if (j.contains("eta")) p.eta = as_number(j.at("eta"), where + ".eta");
  else if (!is_root) fail(where, "missing field 'eta'");
  if (j.contains("share")) p.share = as_number(j.at("share"), where + ".share");
  if (j.contains("population"))
    p.population = as_integer(j.at("population"), where + ".population");
  if (j.contains("initial_infected"))
    p.initial_infected = as_integer(j.at("initial_infected"), where + ".initial_infected");
  return p;
}

TransportSpec parse_transport(const json& j, const std::string& where) {
  TransportSpec t;
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  if (kind == "symmetric") {
    t.kind = TransportSpec::Kind::Symmetric;
  } else if (kind == "favorites") {
    t.kind = TransportSpec::Kind::Favorites;
    const json& fav = require(j, "favorites", where);
    if (!fav.is_array() || fav.empty()) fail(where + ".favorites", "expected a non-empty array");
    for (const auto& f : fav) t.favorites.push_back(as_string(f, where + ".favorites"));
    t.aggregate_share =
        as_number(require(j, "aggregate_share", where), where + ".aggregate_share");
  } else if (kind == "matrix") {
    t.kind = TransportSpec::Kind::Matrix;
    const json& rows = require(j, "entries", where);
    if (!rows.is_array()) fail(where + ".entries", "expected an array of rows");
    for (const auto& row : rows) {
      if (!row.is_array()) fail(where + ".entries", "expected an array of rows");
      std::vector<double> r;
      for (const auto& v : row) r.push_back(as_number(v, where + ".entries"));
      t.entries.push_back(std::move(r));
    }
  } else {
    fail(where + ".kind", "unknown transport kind '" + kind + "'");
  }
  return t;
}

json transport_to_json(const TransportSpec& t) {
  json j;
  switch (t.kind) {
    case TransportSpec::Kind::Symmetric:
      j["kind"] = "symmetric";
      break;
    case TransportSpec::Kind::Favorites:
      j["kind"] = "favorites";
      j["favorites"] = t.favorites;
      j["aggregate_share"] = t.aggregate_share;
      break;
    case TransportSpec::Kind::Matrix:
      j["kind"] = "matrix";
      j["entries"] = t.entries;
      break;
  }
  return j;
}

}  // namespace

GameConfig parse_game_config(const json& j) {
  GameConfig config;
  const json& hier = require(j, "hierarchy", "config");
  const json& levels = require(hier, "levels", "hierarchy");
  if (!levels.is_array() || levels.empty()) fail("hierarchy.levels", "expected a non-empty array");
  int li = 0;
  for (const auto& level : levels) {
    const std::string lwhere = "hierarchy.levels[" + std::to_string(li) + "]";
    if (!level.is_array() || level.empty()) fail(lwhere, "expected a non-empty array of players");
    std::vector<PlayerSpec> players;
    int pi = 0;
    for (const auto& p : level)
      players.push_back(parse_player(p, lwhere + "[" + std::to_string(pi++) + "]", li == 0));
    config.hierarchy.levels.push_back(std::move(players));
    ++li;
  }

  if (j.contains("epidemic")) {
    const json& epi = j.at("epidemic");
    EpidemicSpec spec;
    spec.contact_mean = as_number(require(epi, "contact_mean", "epidemic"), "epidemic.contact_mean");
    spec.transmission_prob =
        as_number(require(epi, "transmission_prob", "epidemic"), "epidemic.transmission_prob");
    spec.transport = parse_transport(require(epi, "transport", "epidemic"), "epidemic.transport");
    config.epidemic = std::move(spec);
  }

  const std::string mode = as_string(require(j, "compliance", "config"), "compliance");
  if (mode == "one_sided") config.compliance = ComplianceMode::OneSided;
  else if (mode == "two_sided") config.compliance = ComplianceMode::TwoSided;
  else fail("compliance", "expected 'one_sided' or 'two_sided'");

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    SolverSpec& spec = config.solver;
    if (s.contains("grid_delta")) spec.grid_delta = as_number(s.at("grid_delta"), "solver.grid_delta");
    if (s.contains("seed")) spec.seed = static_cast<std::uint64_t>(as_integer(s.at("seed"), "solver.seed"));
    if (s.contains("max_steps"))
      spec.max_steps = scalar_or_array<int>(s.at("max_steps"), "solver.max_steps",
          [](const json& v, const std::string& w) { return static_cast<int>(as_integer(v, w)); });
    if (s.contains("responders"))
      spec.responders = scalar_or_array<int>(s.at("responders"), "solver.responders",
          [](const json& v, const std::string& w) {
            if (v.is_string()) {
              if (v.get<std::string>() != "all") fail(w, "expected an integer or 'all'");
              return 0;
            }
            return static_cast<int>(as_integer(v, w));
          });
    if (s.contains("epsilon_limits"))
      spec.eps_limits = scalar_or_array<double>(s.at("epsilon_limits"), "solver.epsilon_limits",
          [](const json& v, const std::string& w) { return as_number(v, w); });
    if (s.contains("search"))
      spec.search = scalar_or_array<std::string>(s.at("search"), "solver.search",
          [](const json& v, const std::string& w) { return as_string(v, w); });
    if (s.contains("restart_limit"))
      spec.restart_limit = static_cast<int>(as_integer(s.at("restart_limit"), "solver.restart_limit"));
    if (s.contains("tie_tolerance"))
      spec.tie_tolerance = as_number(s.at("tie_tolerance"), "solver.tie_tolerance");
  }

  if (j.contains("experiment")) config.experiment = j.at("experiment");
  return config;
}

GameConfig load_game_config(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return parse_game_config(j);
}

nlohmann::json game_config_to_json(const GameConfig& config) {
  json j;
  json levels = json::array();
  for (const auto& level : config.hierarchy.levels) {
    json players = json::array();
    for (const auto& p : level) {
      json pj;
      pj["name"] = p.name;
      if (p.parent) pj["parent"] = *p.parent;
      pj["kappa"] = p.kappa;
      if (p.eta) pj["eta"] = *p.eta;
      if (p.share) pj["share"] = *p.share;
      if (p.population) pj["population"] = *p.population;
      if (p.initial_infected) pj["initial_infected"] = *p.initial_infected;
      players.push_back(std::move(pj));
    }
    levels.push_back(std::move(players));
  }
  j["hierarchy"]["levels"] = std::move(levels);

  if (config.epidemic) {
    j["epidemic"]["contact_mean"] = config.epidemic->contact_mean;
    j["epidemic"]["transmission_prob"] = config.epidemic->transmission_prob;
    j["epidemic"]["transport"] = transport_to_json(config.epidemic->transport);
  }
  j["compliance"] = config.compliance == ComplianceMode::OneSided ? "one_sided" : "two_sided";

  json s;
  s["grid_delta"] = config.solver.grid_delta;
  s["seed"] = config.solver.seed;
  s["max_steps"] = config.solver.max_steps;
  s["responders"] = config.solver.responders;
  s["epsilon_limits"] = config.solver.eps_limits;
  s["search"] = config.solver.search;
  s["restart_limit"] = config.solver.restart_limit;
  s["tie_tolerance"] = config.solver.tie_tolerance;
  j["solver"] = std::move(s);

  if (!config.experiment.is_null() && !config.experiment.empty())
    j["experiment"] = config.experiment;
  return j;
}

PlayerTree GameConfig::build_tree() const { return PlayerTree::build(hierarchy); }

TransportMatrix build_transport(const TransportSpec& spec, const PlayerTree& tree) {
  const int n = tree.num_leaves();
  switch (spec.kind) {
    case TransportSpec::Kind::Symmetric:
      return TransportMatrix::symmetric(n);
    case TransportSpec::Kind::Favorites: {
      std::vector<int> favored;
      for (const auto& name : spec.favorites) {
        const auto id = tree.find(name);
        if (!id) fail("epidemic.transport.favorites", "unknown player '" + name + "'");
        for (int leaf : tree.descendant_leaves(*id)) favored.push_back(leaf);
      }
      return TransportMatrix::favorites(n, favored, spec.aggregate_share);
    }
    case TransportSpec::Kind::Matrix: {
      if (static_cast<int>(spec.entries.size()) != n)
        fail("epidemic.transport.entries", "row count does not match the number of leaves");
      std::vector<double> flat;
      flat.reserve(static_cast<size_t>(n) * n);
      for (const auto& row : spec.entries) {
        if (static_cast<int>(row.size()) != n)
          fail("epidemic.transport.entries", "column count does not match the number of leaves");
        for (double v : row) flat.push_back(v);
      }
      return TransportMatrix(n, std::move(flat));
    }
  }
  fail("epidemic.transport", "unreachable transport kind");
}

std::optional<EpidemicParams> GameConfig::build_epidemic(const PlayerTree& tree) const {
  if (!epidemic) return std::nullopt;
  return EpidemicParams::from_tree(tree, build_transport(epidemic->transport, tree),
                                   epidemic->contact_mean, epidemic->transmission_prob);
}

SolverParams GameConfig::build_solver_params(const PlayerTree& tree) const {
  const int levels = tree.num_levels();
  SolverParams params = SolverParams::defaults(tree, GridSpec::from_delta(solver.grid_delta),
                                               solver.seed);
  params.restart_limit = solver.restart_limit;
  params.tie_tolerance = solver.tie_tolerance;

  auto broadcast = [&](const auto& values, auto& target, const char* what) {
    const size_t expected = static_cast<size_t>(levels) - 1;  // levels 2..L
    if (values.size() != 1 && values.size() != expected)
      fail(std::string("solver.") + what,
           "expected 1 entry or one per level below the root (" + std::to_string(expected) + ")");
    for (int l = 2; l <= levels; ++l)
      target[l] = values.size() == 1 ? values[0] : values[l - 2];
  };
  broadcast(solver.max_steps, params.max_steps, "max_steps");
  broadcast(solver.responders, params.responders, "responders");
  broadcast(solver.eps_limits, params.eps_limits, "epsilon_limits");

  std::vector<SearchMethod> methods;
  for (const auto& s : solver.search) {
    if (s == "grid") methods.push_back(SearchMethod::Grid);
    else if (s == "bisection") methods.push_back(SearchMethod::Bisection);
    else fail("solver.search", "expected 'grid' or 'bisection', got '" + s + "'");
  }
  const size_t expected = static_cast<size_t>(levels) - 1;
  if (methods.size() != 1 && methods.size() != expected)
    fail("solver.search", "expected 1 entry or one per level below the root");
  for (int l = 2; l <= levels; ++l) {
    const SearchMethod m = methods.size() == 1 ? methods[0] : methods[l - 2];
    // A broadcast 'bisection' applies where it is valid: the lowest level.
    params.search[l] = (methods.size() == 1 && m == SearchMethod::Bisection && l != levels)
                           ? SearchMethod::Grid
                           : m;
  }
  params.validate(tree);
  return params;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_string(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

// --- solve result files ---------------------------------------------------------

SolveRecord make_solve_record(const EquilibriumResult& result, const SolverParams& params,
                              std::string config_hash) {
  SolveRecord record;
  record.config_hash = std::move(config_hash);
  record.seed = params.seed;
  record.grid_delta = params.grid.delta();
  for (int l = 1; l <= result.profile.depth(); ++l) {
    const auto row = result.profile.level(l);
    record.profile.emplace_back(row.begin(), row.end());
  }
  record.epsilon = result.epsilon;
  record.root_tie_count = result.root_tie_count;
  record.diagnostics = result.diagnostics;
  return record;
}

std::string solve_record_to_string(const SolveRecord& record) {
  nlohmann::ordered_json j;
  j["schema"] = record.schema;
  j["config_hash"] = record.config_hash;
  j["seed"] = record.seed;
  j["grid_delta"] = record.grid_delta;
  j["profile"] = record.profile;
  j["epsilon"] = record.epsilon;
  j["root_tie_count"] = record.root_tie_count;
  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (const auto& d : record.diagnostics) {
    nlohmann::ordered_json dj;
    dj["steps"] = d.steps;
    dj["steps_to_best"] = d.steps_to_best;
    dj["cycles"] = d.cycles;
    dj["restarts"] = d.restarts;
    dj["budget_exhausted"] = d.budget_exhausted;
    diags.push_back(std::move(dj));
  }
  j["diagnostics"] = std::move(diags);
  return j.dump(2) + "\n";
}

SolveRecord parse_solve_record(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("result: ") + e.what());
  }
  SolveRecord record;
  const std::string schema = as_string(require(j, "schema", "result"), "result.schema");
  if (schema != record.schema)
    fail("result.schema", "unsupported schema '" + schema + "'");
  record.config_hash = as_string(require(j, "config_hash", "result"), "result.config_hash");
  record.seed = static_cast<std::uint64_t>(as_integer(require(j, "seed", "result"), "result.seed"));
  record.grid_delta = as_number(require(j, "grid_delta", "result"), "result.grid_delta");
  const json& profile = require(j, "profile", "result");
  if (!profile.is_array() || profile.empty()) fail("result.profile", "expected per-level arrays");
  for (const auto& row : profile) {
    if (!row.is_array()) fail("result.profile", "expected per-level arrays");
    std::vector<double> r;
    for (const auto& v : row) r.push_back(as_number(v, "result.profile"));
    record.profile.push_back(std::move(r));
  }
  for (const auto& v : require(j, "epsilon", "result"))
    record.epsilon.push_back(as_number(v, "result.epsilon"));
  record.root_tie_count =
      static_cast<int>(as_integer(require(j, "root_tie_count", "result"), "result.root_tie_count"));
  if (j.contains("diagnostics")) {
    for (const auto& dj : j.at("diagnostics")) {
      LevelDiagnostics d;
      d.steps = static_cast<int>(as_integer(require(dj, "steps", "result"), "result.diagnostics"));
      d.steps_to_best = static_cast<int>(
          as_integer(require(dj, "steps_to_best", "result"), "result.diagnostics"));
      d.cycles = static_cast<int>(as_integer(require(dj, "cycles", "result"), "result.diagnostics"));
      d.restarts =
          static_cast<int>(as_integer(require(dj, "restarts", "result"), "result.diagnostics"));
      d.budget_exhausted = require(dj, "budget_exhausted", "result").get<bool>();
      record.diagnostics.push_back(d);
    }
  }
  return record;
}

SolveRecord load_solve_record(const std::string& path) {
  return parse_solve_record(read_file(path));
}

EquilibriumResult record_to_result(const SolveRecord& record, const PlayerTree& tree) {
  if (static_cast<int>(record.profile.size()) != tree.num_levels())
    fail("result.profile", "level count does not match the hierarchy");
  EquilibriumResult result;
  result.profile = ActionProfile::complete(tree);
  for (int l = 1; l <= tree.num_levels(); ++l) {
    if (static_cast<int>(record.profile[l - 1].size()) != tree.level_size(l))
      fail("result.profile", "player count mismatch at level " + std::to_string(l));
    auto row = result.profile.mutable_level(l);
    for (size_t i = 0; i < record.profile[l - 1].size(); ++i) {
      const double a = record.profile[l - 1][i];
      if (a < 0.0 || a > 1.0) fail("result.profile", "action outside [0, 1]");
      row[i] = a;
    }
  }
  if (record.epsilon.size() != static_cast<size_t>(tree.num_levels()))
    fail("result.epsilon", "level count does not match the hierarchy");
  result.epsilon = record.epsilon;
  result.root_tie_count = record.root_tie_count;
  result.diagnostics = record.diagnostics;
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::invalid_argument("failed while writing file: " + path);
}

}  // namespace hpmg
