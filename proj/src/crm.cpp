#include "eegnn/crm.hpp"

#include <cmath>
#include <stdexcept>

namespace eegnn {

namespace {
constexpr double kTinyWeight = 1e-300;
}

double sample_beta(double a, double b, Rng& rng) {
  double x = sample_gamma(a, rng);
  double y = sample_gamma(b, rng);
  return x / (x + y);
}

double sample_gamma(double shape, Rng& rng) {
  std::gamma_distribution<double> dist(shape, 1.0);
  double v = dist(rng);
  return v > kTinyWeight ? v : kTinyWeight;
}

std::vector<double> sample_dirichlet(const std::vector<double>& conc, Rng& rng) {
  std::vector<double> x(conc.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < conc.size(); ++i) {
    x[i] = sample_gamma(conc[i], rng);
    sum += x[i];
  }
  for (double& v : x) v /= sum;
  return x;
}

GemWeights gem_from_sticks(const std::vector<double>& sticks, double alpha_dp) {
  GemWeights gem;
  gem.alpha_dp = alpha_dp;
  gem.pi.assign(sticks.size() + 1, 0.0);
  double remaining = 1.0;
  for (std::size_t k = 0; k < sticks.size(); ++k) {
    gem.pi[k + 1] = sticks[k] * remaining;
    remaining *= 1.0 - sticks[k];
  }
  gem.pi[0] = remaining;
  return gem;
}

GemWeights sample_gem(double alpha_dp, int num_clusters, Rng& rng) {
  if (alpha_dp <= 0.0) throw std::invalid_argument("alpha_dp must be > 0");
  if (num_clusters < 1) throw std::invalid_argument("num_clusters must be >= 1");
  std::vector<double> sticks(num_clusters);
  for (double& g : sticks) g = sample_beta(1.0, alpha_dp, rng);
  return gem_from_sticks(sticks, alpha_dp);
}

CrmWeights sample_w0(double kappa_mass, int num_nodes, Rng& rng) {
  if (kappa_mass <= 0.0) throw std::invalid_argument("kappa_mass must be > 0");
  const int slots = num_nodes + 1;
  CrmWeights out;
  out.total = sample_gamma(kappa_mass, rng);
  std::vector<double> conc(slots, kappa_mass / slots);
  out.w = sample_dirichlet(conc, rng);
  for (double& v : out.w) {
    v *= out.total;
    if (v < kTinyWeight) v = kTinyWeight;
  }
  return out;
}

CrmWeights sample_wk_prior(const CrmWeights& w0, Rng& rng) {
  CrmWeights out;
  out.w.resize(w0.w.size());
  out.total = 0.0;
  for (std::size_t i = 0; i < w0.w.size(); ++i) {
    out.w[i] = sample_gamma(w0.w[i], rng);
    out.total += out.w[i];
  }
  return out;
}

double log_levy_density(double w) {
  if (w <= 0.0) throw std::domain_error("log_levy_density: w must be > 0");
  return -std::log(w) - w;
}

double log_total_mass_density(double wbar, double kappa_mass) {
  if (wbar <= 0.0)
    throw std::domain_error("log_total_mass_density: wbar must be > 0");
  if (kappa_mass <= 0.0)
    throw std::domain_error("log_total_mass_density: kappa_mass must be > 0");
  return (kappa_mass - 1.0) * std::log(wbar) - wbar - std::lgamma(kappa_mass);
}

}  // namespace eegnn
