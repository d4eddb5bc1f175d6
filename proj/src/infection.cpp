#include "hpmg/infection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hpmg {

namespace {
constexpr double kColumnTolerance = 1e-9;
}

TransportMatrix::TransportMatrix(int n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ <= 0 || entries_.size() != static_cast<size_t>(n_) * n_)
    throw std::invalid_argument("transport: entry count does not match dimension");
  validate();
}

void TransportMatrix::validate() const {
  for (int origin = 0; origin < n_; ++origin) {
    double col = 0.0;
    for (int dest = 0; dest < n_; ++dest) {
      const double r = at(dest, origin);
      if (r < 0.0)
        throw std::invalid_argument("transport: negative entry at (" + std::to_string(dest) +
                                    ", " + std::to_string(origin) + ")");
      col += r;
    }
    if (std::abs(col - 1.0) > kColumnTolerance)
      throw std::invalid_argument("transport: column " + std::to_string(origin) +
                                  " sums to " + std::to_string(col) + ", expected 1");
  }
}

TransportMatrix TransportMatrix::symmetric(int n) {
  if (n <= 0) throw std::invalid_argument("transport: dimension must be positive");
  return TransportMatrix(n, std::vector<double>(static_cast<size_t>(n) * n, 1.0 / n));
}

TransportMatrix TransportMatrix::favorites(int n, const std::vector<int>& favored,
                                           double aggregate_share) {
  if (n <= 0) throw std::invalid_argument("transport: dimension must be positive");
  if (!(aggregate_share > 0.0) || !(aggregate_share < 1.0))
    throw std::invalid_argument("transport: aggregate_share must lie strictly in (0, 1)");
  const int f = static_cast<int>(favored.size());
  if (f == 0 || f >= n)
    throw std::invalid_argument("transport: favorites must be a nonempty proper subset");
  std::vector<bool> is_fav(n, false);
  for (int i : favored) {
    if (i < 0 || i >= n) throw std::invalid_argument("transport: favorite index out of range");
    if (is_fav[i]) throw std::invalid_argument("transport: duplicate favorite index");
    is_fav[i] = true;
  }
  const double r_high = aggregate_share / f;
  const double r_low = (1.0 - aggregate_share) / (n - f);
  if (!(r_high > r_low))
    throw std::invalid_argument(
        "transport: favorites are not actually favored (per-region rate " +
        std::to_string(r_high) + " <= " + std::to_string(r_low) + ")");
  std::vector<double> entries(static_cast<size_t>(n) * n);
  for (int dest = 0; dest < n; ++dest)
    for (int origin = 0; origin < n; ++origin)
      entries[dest * static_cast<size_t>(n) + origin] = is_fav[dest] ? r_high : r_low;
  return TransportMatrix(n, std::move(entries));
}

void EpidemicParams::validate() const {
  const int n = num_regions();
  if (n == 0) throw std::invalid_argument("epidemic: no regions");
  if (transport.size() != n)
    throw std::invalid_argument("epidemic: transport dimension does not match region count");
  if (initial_infected.size() != static_cast<size_t>(n))
    throw std::invalid_argument("epidemic: initial_infected length mismatch");
  for (int i = 0; i < n; ++i) {
    if (population[i] <= 0)
      throw std::invalid_argument("epidemic: region " + std::to_string(i) +
                                  " has non-positive population");
    if (initial_infected[i] < 0 || initial_infected[i] > population[i])
      throw std::invalid_argument("epidemic: region " + std::to_string(i) +
                                  " initial_infected outside [0, population]");
  }
  if (!(contact_mean > 0.0))
    throw std::invalid_argument("epidemic: contact_mean must be positive");
  // p = 0 (no transmission at all) is allowed for diagnostics.
  if (!(transmission_prob >= 0.0) || !(transmission_prob < 1.0))
    throw std::invalid_argument("epidemic: transmission_prob must lie in [0, 1)");
}

EpidemicParams EpidemicParams::from_tree(const PlayerTree& tree, TransportMatrix transport,
                                         double contact_mean, double transmission_prob) {
  if (!tree.has_populations())
    throw std::invalid_argument("epidemic: every leaf needs a population count");
  EpidemicParams epi;
  epi.transport = std::move(transport);
  const auto leaves = tree.level(tree.num_levels());
  epi.population.reserve(leaves.size());
  epi.initial_infected.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    epi.population.push_back(leaf.population);
    epi.initial_infected.push_back(leaf.initial_infected);
  }
  epi.contact_mean = contact_mean;
  epi.transmission_prob = transmission_prob;
  epi.validate();
  return epi;
}

double active_infected_fraction(int leaf, std::span<const double> leaf_actions,
                                const EpidemicParams& epi) {
  const int n = epi.num_regions();
  double num = 0.0, den = 0.0;
  for (int origin = 0; origin < n; ++origin) {
    const double flow = leaf_actions[origin] * epi.transport.at(leaf, origin);
    num += static_cast<double>(epi.initial_infected[origin]) * flow;
    den += static_cast<double>(epi.population[origin]) * flow;
  }
  return den > 0.0 ? num / den : 0.0;
}

double expected_new_infections(int leaf, std::span<const double> leaf_actions,
                               const EpidemicParams& epi) {
  const double rho = active_infected_fraction(leaf, leaf_actions, epi);
  const double y = std::pow(1.0 - epi.transmission_prob, rho);
  const double susceptible =
      static_cast<double>(epi.population[leaf] - epi.initial_infected[leaf]);
  return susceptible * leaf_actions[leaf] * (1.0 - std::exp(-epi.contact_mean * (1.0 - y)));
}

double poisson_power_moment(double lambda, double b) {
  if (lambda < 0.0) throw std::invalid_argument("poisson_power_moment: lambda must be >= 0");
  return std::exp(-lambda * (1.0 - b));
}

}  // namespace hpmg
