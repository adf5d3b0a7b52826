#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace eegnn {

using Rng = std::mt19937_64;

/// Truncated stick-breaking weights. pi[0] is the unassigned remainder,
/// pi[1..K] the active cluster weights; entries sum to 1.
struct GemWeights {
  std::vector<double> pi;
  double alpha_dp = 1.0;

  int num_clusters() const { return static_cast<int>(pi.size()) - 1; }
};

/// Finite-dimensional gamma-process weights. w[0] aggregates the unobserved
/// mass (slack slot), w[1..V] attach to observed nodes.
struct CrmWeights {
  std::vector<double> w;
  double total = 0.0;

  int num_slots() const { return static_cast<int>(w.size()); }
};

double sample_beta(double a, double b, Rng& rng);

/// Gamma(shape, rate 1) draw, clamped away from exact zero so downstream
/// log-densities stay finite.
double sample_gamma(double shape, Rng& rng);

std::vector<double> sample_dirichlet(const std::vector<double>& conc, Rng& rng);

/// Builds GEM weights from explicit stick fractions g_k in (0,1).
GemWeights gem_from_sticks(const std::vector<double>& sticks, double alpha_dp);

/// pi_k = g_k * prod_{l<k}(1-g_l) with g_k ~ Beta(1, alpha_dp); pi_0 is the
/// remaining stick mass.
GemWeights sample_gem(double alpha_dp, int num_clusters, Rng& rng);

/// Gamma-process base weights: total ~ Gamma(kappa_mass, 1) and normalized
/// weights Dirichlet(kappa_mass/(V+1), ..., kappa_mass/(V+1)) over V+1 slots.
/// Equivalently, slots are iid Gamma(kappa_mass/(V+1), 1).
CrmWeights sample_w0(double kappa_mass, int num_nodes, Rng& rng);

/// Cluster weights given the base measure: w_{k,i} ~ Gamma(w_{0,i}, 1).
CrmWeights sample_wk_prior(const CrmWeights& w0, Rng& rng);

/// Log of the gamma-process Levy density s^{-1} e^{-s} (no normalizer).
double log_levy_density(double w);

/// Log density of the total mass, Gamma(kappa_mass, 1) evaluated at wbar.
double log_total_mass_density(double wbar, double kappa_mass);

}  // namespace eegnn
