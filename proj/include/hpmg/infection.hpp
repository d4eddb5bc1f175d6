#pragma once

#include <span>
#include <vector>

#include "hpmg/player_tree.hpp"

namespace hpmg {

// Mobility between lowest-level regions. entry(dest, origin) is the fraction
// of origin's population that is active in dest absent any intervention;
// each origin column sums to 1.
class TransportMatrix {
 public:
  TransportMatrix() = default;
  TransportMatrix(int n, std::vector<double> entries);  // row-major [dest][origin]

  // All entries 1/n: every region is an equally likely destination.
  static TransportMatrix symmetric(int n);

  // A set of globally favorite destinations receives `aggregate_share` of
  // every origin's activity, split equally; the rest split the remainder.
  // The per-region favorite rate must strictly exceed the non-favorite rate.
  static TransportMatrix favorites(int n, const std::vector<int>& favored,
                                   double aggregate_share);

  int size() const { return n_; }
  double at(int dest, int origin) const { return entries_[dest * n_ + origin]; }

 private:
  void validate() const;

  int n_ = 0;
  std::vector<double> entries_;
};

struct EpidemicParams {
  TransportMatrix transport;
  std::vector<long long> population;
  std::vector<long long> initial_infected;
  double contact_mean = 15.0;      // mean of the Poisson contact count
  double transmission_prob = 0.047;

  int num_regions() const { return static_cast<int>(population.size()); }
  void validate() const;

  // Pulls populations and initial infections from the tree's leaves.
  static EpidemicParams from_tree(const PlayerTree& tree, TransportMatrix transport,
                                  double contact_mean, double transmission_prob);
};

// Fraction of infected individuals among those active in region `leaf` once
// policies scale activity down. Zero activity means zero exposure, so a zero
// denominator yields 0.
double active_infected_fraction(int leaf, std::span<const double> leaf_actions,
                                const EpidemicParams& epi);

// Closed-form expected count of additional infections in region `leaf`:
//   (N - I0) * alpha * (1 - exp(-C * (1 - (1-p)^rho))).
double expected_new_infections(int leaf, std::span<const double> leaf_actions,
                               const EpidemicParams& epi);

// E[b^Z] for Z ~ Poisson(lambda), i.e. exp(-lambda * (1 - b)).
double poisson_power_moment(double lambda, double b);

}  // namespace hpmg
