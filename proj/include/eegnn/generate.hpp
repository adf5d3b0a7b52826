#pragma once

#include <cstdint>
#include <vector>

#include "eegnn/crm.hpp"
#include "eegnn/graph.hpp"

namespace eegnn {

struct GenParams {
  double alpha_dp = 1.0;
  double kappa_mass = 20.0;
  int k_gen = 10;  // generative truncation level
  int num_nodes = 100;
  std::uint64_t seed = 0;
};

struct GenDiagnostics {
  double lambda = 0.0;             // total Poisson rate over active clusters
  long long total_drawn = 0;       // edges drawn before slack discarding
  long long slack_discarded = 0;   // edges with an endpoint in the slack slot
};

/// Cluster-by-cluster draw of the latent multigraph: total edge count from
/// Poisson(sum_k pi_k wbar_k^2), cluster memberships proportional to
/// pi_k wbar_k^2, endpoints proportional to w_{k,i}/wbar_k. Ordered endpoint
/// draws are folded into unordered multiplicities.
MultiGraph generate_multigraph(const GenParams& p, Rng& rng,
                               GenDiagnostics* diag = nullptr);

/// Same draw but with frozen weights (pi over K+1 slots, one weight row per
/// cluster 1..K). Used by the equivalence and thinning tests.
MultiGraph generate_multigraph_given(const GemWeights& pi,
                                     const std::vector<CrmWeights>& w_rows,
                                     int num_nodes, Rng& rng,
                                     GenDiagnostics* diag = nullptr);

/// Pairwise-rate path: independent Poisson draws per ordered slot pair,
/// folded to unordered multiplicities. O(K V^2); gated to small graphs.
MultiGraph generate_multigraph_dense(const GemWeights& pi,
                                     const std::vector<CrmWeights>& w_rows,
                                     int num_nodes, Rng& rng);

SimpleGraph generate_simple(const GenParams& p, Rng& rng,
                            GenDiagnostics* diag = nullptr);

struct SparsityPoint {
  double kappa_mass = 0.0;
  double mean_active_nodes = 0.0;
  double mean_edges = 0.0;
};

struct SparsityFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<SparsityPoint> points;
};

/// For each kappa on the grid, generates `reps` graphs and fits the
/// least-squares slope of log(mean edges) against log(mean active nodes).
/// Throws ValidationError on a degenerate fit (an empty graph, or a grid
/// whose active-node means do not vary).
SparsityFit sparsity_bench(const GenParams& base,
                           const std::vector<double>& kappa_grid, int reps,
                           std::uint64_t seed);

}  // namespace eegnn
