#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hpmg/infection.hpp"

namespace hpmg {

struct AbmConfig {
  EpidemicParams epi;
  int periods = 8;
  int incubation_delay = 7;   // periods between exposure and infectiousness
  int replications = 1000;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

// Cumulative exposures per region per period for one replication.
// trajectory[t][a] counts all exposures in region a during periods 1..t+1.
using AbmTrajectory = std::vector<std::vector<long long>>;

// Multi-period stochastic contact process matching the one-shot closed form
// at period 1: each period every susceptible is active with probability
// alpha_a, draws Poisson(C) contacts of which a fraction rho_a (recomputed
// each period from currently infectious counts) is infectious, and turns
// exposed with probability 1 - (1-p)^(X * rho_a). Exposed individuals leave
// the susceptible pool at once and become infectious after the incubation
// delay. Deterministic given (seed, replication index).
AbmTrajectory simulate_abm_single(const AbmConfig& config,
                                  std::span<const double> leaf_actions,
                                  int replication_index);

struct AbmSummary {
  // Indexed [period][region]; means and standard errors over replications.
  std::vector<std::vector<double>> mean_cumulative;
  std::vector<std::vector<double>> stderr_cumulative;
  // Totals over regions of the final period's cumulative exposures.
  double total_mean = 0.0;
  double total_stderr = 0.0;
  int replications = 0;
};

// Runs all replications (in parallel when config.threads > 1; replication k
// always uses the stream derived from (seed, k), so the averages do not
// depend on scheduling).
AbmSummary simulate_abm(const AbmConfig& config, std::span<const double> leaf_actions);

struct AbmComparisonRow {
  double alpha = 0.0;
  double init_rate = 0.0;
  double closed_form = 0.0;
  double abm_mean = 0.0;
  double abm_stderr = 0.0;
  int replications = 0;
};

// Evaluates the closed form against the ABM on the product of the two grids,
// with all regions sharing the policy and the initial infection rate. Initial
// infections are rounded to the nearest whole count; the closed form uses the
// same rounded counts.
std::vector<AbmComparisonRow> compare_closed_form(const AbmConfig& config,
                                                  std::span<const double> alpha_grid,
                                                  std::span<const double> init_rate_grid);

// Fixed-header CSV (alpha, init_rate, closed_form, abm_mean, abm_stderr,
// replications); the column order is part of the output contract.
std::string abm_comparison_csv(std::span<const AbmComparisonRow> rows);

}  // namespace hpmg
