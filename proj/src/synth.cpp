#include "eegnn/synth.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "eegnn/crm.hpp"

namespace eegnn {

namespace {

// Inverse-CDF draw over arbitrary non-negative weights.
int weighted_pick(const std::vector<double>& cdf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u(rng));
  if (it == cdf.end()) --it;
  return static_cast<int>(it - cdf.begin());
}

std::vector<double> to_cdf(const std::vector<double>& w) {
  std::vector<double> cdf(w);
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  return cdf;
}

}  // namespace

SynthDataset make_community_dataset(const SynthParams& p) {
  const long long max_edges =
      static_cast<long long>(p.num_nodes) * (p.num_nodes - 1) / 2;
  if (p.num_nodes < 2 || p.num_classes < 2 || p.feature_dim < 1)
    throw ValidationError("make_community_dataset: invalid sizes");
  if (p.target_edges < 1 || p.target_edges > max_edges)
    throw ValidationError("make_community_dataset: infeasible edge target");
  if (!(p.p_in >= 0.0 && p.p_in <= 1.0))
    throw ValidationError("make_community_dataset: p_in must be in [0, 1]");
  if (p.num_nodes < 2 * p.num_classes)
    throw ValidationError(
        "make_community_dataset: need >= 2 nodes per class");

  Rng rng(p.seed);
  SynthDataset ds;
  ds.num_classes = p.num_classes;

  // Balanced class assignment in shuffled node order.
  ds.labels.resize(p.num_nodes);
  {
    std::vector<int> perm(p.num_nodes);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int r = 0; r < p.num_nodes; ++r)
      ds.labels[perm[r]] = r % p.num_classes;
  }
  std::vector<std::vector<int>> members(p.num_classes);
  for (int i = 0; i < p.num_nodes; ++i) members[ds.labels[i]].push_back(i);

  // Per-node sociability drives a heavy-ish tailed degree profile.
  std::vector<double> soc(p.num_nodes);
  for (double& s : soc) s = sample_gamma(p.sociability_shape, rng);

  std::vector<double> all_cdf = to_cdf(soc);
  std::vector<std::vector<double>> class_cdf(p.num_classes);
  std::vector<double> class_mass(p.num_classes);
  for (int c = 0; c < p.num_classes; ++c) {
    std::vector<double> w;
    w.reserve(members[c].size());
    for (int i : members[c]) w.push_back(soc[i]);
    class_cdf[c] = to_cdf(w);
    class_mass[c] = class_cdf[c].back();
  }
  std::vector<double> mass_cdf = to_cdf(class_mass);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::set<NodePair> edge_set;
  const long long attempt_cap = 400LL * p.target_edges + 100000;
  long long attempts = 0;
  while (static_cast<long long>(edge_set.size()) < p.target_edges) {
    if (++attempts > attempt_cap)
      throw ValidationError(
          "make_community_dataset: edge target unreachable (graph too dense "
          "for the proposal mix)");
    int i, j;
    if (unif(rng) < p.p_in) {
      const int c = weighted_pick(mass_cdf, rng);
      i = members[c][weighted_pick(class_cdf[c], rng)];
      j = members[c][weighted_pick(class_cdf[c], rng)];
    } else {
      i = weighted_pick(all_cdf, rng);
      j = weighted_pick(all_cdf, rng);
    }
    if (i == j) continue;
    edge_set.insert(unordered_pair(i, j));
  }
  ds.graph = SimpleGraph::from_edges(
      p.num_nodes, std::vector<NodePair>(edge_set.begin(), edge_set.end()));

  // Gaussian class means, isotropic per-node noise.
  std::normal_distribution<double> norm(0.0, 1.0);
  Matrix means(p.num_classes, p.feature_dim);
  for (int c = 0; c < p.num_classes; ++c)
    for (int f = 0; f < p.feature_dim; ++f)
      means(c, f) = p.feature_signal * norm(rng);
  ds.features = Matrix(p.num_nodes, p.feature_dim);
  for (int i = 0; i < p.num_nodes; ++i)
    for (int f = 0; f < p.feature_dim; ++f)
      ds.features(i, f) = means(ds.labels[i], f) + p.feature_noise * norm(rng);
  return ds;
}

}  // namespace eegnn
