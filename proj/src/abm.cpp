#include "hpmg/abm.hpp"

#include <cmath>
#include <stdexcept>

#include "hpmg/csv.hpp"
#include "hpmg/parallel.hpp"
#include "hpmg/rng.hpp"

namespace hpmg {

namespace {
constexpr std::uint64_t kAbmTag = 0x61626d00ULL;  // "abm"
}

void AbmConfig::validate() const {
  epi.validate();
  if (periods < 1) throw std::invalid_argument("abm: periods must be >= 1");
  if (incubation_delay < 0) throw std::invalid_argument("abm: incubation_delay must be >= 0");
  if (replications < 1) throw std::invalid_argument("abm: replications must be >= 1");
}

AbmTrajectory simulate_abm_single(const AbmConfig& config,
                                  std::span<const double> leaf_actions,
                                  int replication_index) {
  config.validate();
  const int n = config.epi.num_regions();
  if (static_cast<int>(leaf_actions.size()) != n)
    throw std::invalid_argument("abm: action count does not match region count");

  RngStream rng = RngStream::derive(config.seed, {kAbmTag, static_cast<std::uint64_t>(replication_index)});
  const double log_escape = std::log1p(-config.epi.transmission_prob);  // log(1 - p)

  std::vector<long long> susceptible(n), infectious(n);
  for (int a = 0; a < n; ++a) {
    susceptible[a] = config.epi.population[a] - config.epi.initial_infected[a];
    infectious[a] = config.epi.initial_infected[a];
  }
  // cohorts[t][a]: exposures during period t+1, promoted to infectious at the
  // start of period t+1 + max(incubation_delay, 1).
  std::vector<std::vector<long long>> cohorts(config.periods, std::vector<long long>(n, 0));
  const int delay = std::max(config.incubation_delay, 1);

  AbmTrajectory cumulative(config.periods, std::vector<long long>(n, 0));
  std::vector<double> rho(n, 0.0);

  for (int t = 1; t <= config.periods; ++t) {
    const int matured = t - 1 - delay;  // 0-based cohort index becoming infectious now
    if (matured >= 0)
      for (int a = 0; a < n; ++a) infectious[a] += cohorts[matured][a];

    // Incubating individuals stay home; everyone else circulates scaled by
    // the local policy.
    for (int a = 0; a < n; ++a) {
      double num = 0.0, den = 0.0;
      for (int origin = 0; origin < n; ++origin) {
        const double flow = leaf_actions[origin] * config.epi.transport.at(a, origin);
        num += static_cast<double>(infectious[origin]) * flow;
        den += static_cast<double>(susceptible[origin] + infectious[origin]) * flow;
      }
      rho[a] = den > 0.0 ? num / den : 0.0;
    }

    for (int a = 0; a < n; ++a) {
      const double alpha = leaf_actions[a];
      const double t_log = rho[a] * log_escape;
      long long exposed = 0;
      for (long long s = 0; s < susceptible[a]; ++s) {
        if (rng.next_double() >= alpha) continue;  // stayed home this period
        const int contacts = rng.next_poisson(config.epi.contact_mean);
        if (contacts == 0 || rho[a] <= 0.0) continue;
        const double p_infect = 1.0 - std::exp(contacts * t_log);
        if (rng.next_double() < p_infect) ++exposed;
      }
      susceptible[a] -= exposed;
      cohorts[t - 1][a] = exposed;
      cumulative[t - 1][a] = (t > 1 ? cumulative[t - 2][a] : 0) + exposed;
    }
  }
  return cumulative;
}

AbmSummary simulate_abm(const AbmConfig& config, std::span<const double> leaf_actions) {
  config.validate();
  const int n = config.epi.num_regions();
  const int periods = config.periods;
  const int reps = config.replications;

  // Integer accumulators keep the reduction exact, so threaded and serial
  // runs aggregate to identical doubles.
  std::vector<std::vector<long long>> sum(periods, std::vector<long long>(n, 0));
  std::vector<std::vector<long long>> sumsq(periods, std::vector<long long>(n, 0));
  long long total_sum = 0, total_sumsq = 0;

  std::vector<AbmTrajectory> trajectories(reps);
  parallel_for(reps, config.threads, [&](int k) {
    trajectories[k] = simulate_abm_single(config, leaf_actions, k);
  });
  for (int k = 0; k < reps; ++k) {
    long long total = 0;
    for (int t = 0; t < periods; ++t)
      for (int a = 0; a < n; ++a) {
        const long long c = trajectories[k][t][a];
        sum[t][a] += c;
        sumsq[t][a] += c * c;
      }
    for (int a = 0; a < n; ++a) total += trajectories[k][periods - 1][a];
    total_sum += total;
    total_sumsq += total * total;
  }

  auto finish = [reps](long long s, long long sq, double& mean, double& se) {
    mean = static_cast<double>(s) / reps;
    const double var = reps > 1
        ? std::max(0.0, (static_cast<double>(sq) - static_cast<double>(s) * mean) / (reps - 1))
        : 0.0;
    se = std::sqrt(var / reps);
  };

  AbmSummary out;
  out.replications = reps;
  out.mean_cumulative.assign(periods, std::vector<double>(n, 0.0));
  out.stderr_cumulative.assign(periods, std::vector<double>(n, 0.0));
  for (int t = 0; t < periods; ++t)
    for (int a = 0; a < n; ++a)
      finish(sum[t][a], sumsq[t][a], out.mean_cumulative[t][a], out.stderr_cumulative[t][a]);
  finish(total_sum, total_sumsq, out.total_mean, out.total_stderr);
  return out;
}

std::vector<AbmComparisonRow> compare_closed_form(const AbmConfig& config,
                                                  std::span<const double> alpha_grid,
                                                  std::span<const double> init_rate_grid) {
  config.validate();
  const int n = config.epi.num_regions();
  std::vector<AbmComparisonRow> rows;
  rows.reserve(alpha_grid.size() * init_rate_grid.size());
  for (double alpha : alpha_grid) {
    for (double rate : init_rate_grid) {
      if (alpha < 0.0 || alpha > 1.0 || rate < 0.0 || rate > 1.0)
        throw std::invalid_argument("abm comparison grids must lie within [0, 1]");
      AbmConfig point = config;
      for (int a = 0; a < n; ++a)
        point.epi.initial_infected[a] =
            std::llround(rate * static_cast<double>(point.epi.population[a]));
      const std::vector<double> actions(n, alpha);

      double closed = 0.0;
      for (int a = 0; a < n; ++a)
        closed += expected_new_infections(a, actions, point.epi);
      const AbmSummary abm = simulate_abm(point, actions);

      rows.push_back({alpha, rate, closed, abm.total_mean, abm.total_stderr, abm.replications});
    }
  }
  return rows;
}

std::string abm_comparison_csv(std::span<const AbmComparisonRow> rows) {
  CsvWriter csv;
  csv.header({"alpha", "init_rate", "closed_form", "abm_mean", "abm_stderr", "replications"});
  for (const auto& r : rows) {
    csv.field(r.alpha);
    csv.field(r.init_rate);
    csv.field(r.closed_form);
    csv.field(r.abm_mean);
    csv.field(r.abm_stderr);
    csv.field(r.replications);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace hpmg
