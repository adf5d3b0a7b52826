#include "eegnn/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eegnn {

namespace {

// Inverse-CDF sampler over a fixed weight vector.
class CdfSampler {
 public:
  explicit CdfSampler(const std::vector<double>& weights) : cdf_(weights) {
    std::partial_sum(cdf_.begin(), cdf_.end(), cdf_.begin());
  }
  int operator()(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, cdf_.back());
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u(rng));
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

MultiGraph generate_multigraph_given(const GemWeights& pi,
                                     const std::vector<CrmWeights>& w_rows,
                                     int num_nodes, Rng& rng,
                                     GenDiagnostics* diag) {
  const int K = pi.num_clusters();
  if (static_cast<int>(w_rows.size()) != K)
    throw std::invalid_argument("one weight row per active cluster required");

  std::vector<double> cluster_rate(K);
  double lambda = 0.0;
  for (int k = 0; k < K; ++k) {
    cluster_rate[k] = pi.pi[k + 1] * w_rows[k].total * w_rows[k].total;
    lambda += cluster_rate[k];
  }

  MultiGraph mg;
  mg.num_nodes = num_nodes;
  GenDiagnostics local;
  local.lambda = lambda;

  if (lambda > 0.0) {
    std::poisson_distribution<long long> pois(lambda);
    const long long n = pois(rng);
    local.total_drawn = n;

    // Per-cluster edge counts via multinomial thinning, then endpoint draws.
    std::vector<long long> n_k(K, 0);
    {
      CdfSampler pick_cluster(cluster_rate);
      for (long long e = 0; e < n; ++e) ++n_k[pick_cluster(rng)];
    }
    for (int k = 0; k < K; ++k) {
      if (n_k[k] == 0) continue;
      CdfSampler pick_slot(w_rows[k].w);
      for (long long e = 0; e < n_k[k]; ++e) {
        int i = pick_slot(rng);
        int j = pick_slot(rng);
        if (i == 0 || j == 0) {
          ++local.slack_discarded;
          continue;
        }
        mg.add(i - 1, j - 1);
      }
    }
  }
  if (diag) *diag = local;
  return mg;
}

MultiGraph generate_multigraph(const GenParams& p, Rng& rng,
                               GenDiagnostics* diag) {
  if (p.alpha_dp <= 0.0 || p.kappa_mass <= 0.0 || p.k_gen < 1 ||
      p.num_nodes < 0)
    throw std::invalid_argument("invalid generation parameters");
  GemWeights pi = sample_gem(p.alpha_dp, p.k_gen, rng);
  CrmWeights w0 = sample_w0(p.kappa_mass, p.num_nodes, rng);
  std::vector<CrmWeights> rows;
  rows.reserve(p.k_gen);
  for (int k = 0; k < p.k_gen; ++k) rows.push_back(sample_wk_prior(w0, rng));
  return generate_multigraph_given(pi, rows, p.num_nodes, rng, diag);
}

MultiGraph generate_multigraph_dense(const GemWeights& pi,
                                     const std::vector<CrmWeights>& w_rows,
                                     int num_nodes, Rng& rng) {
  if (num_nodes > 200)
    throw std::invalid_argument("dense path is gated to num_nodes <= 200");
  const int K = pi.num_clusters();
  MultiGraph mg;
  mg.num_nodes = num_nodes;
  // Ordered pairs over slots 1..V; the folded unordered rate is doubled
  // off-diagonal and single on-diagonal.
  for (int i = 1; i <= num_nodes; ++i) {
    for (int j = i; j <= num_nodes; ++j) {
      double rate = 0.0;
      for (int k = 0; k < K; ++k)
        rate += pi.pi[k + 1] * w_rows[k].w[i] * w_rows[k].w[j];
      if (i != j) rate *= 2.0;
      if (rate <= 0.0) continue;
      std::poisson_distribution<long long> pois(rate);
      mg.add(i - 1, j - 1, pois(rng));
    }
  }
  return mg;
}

SimpleGraph generate_simple(const GenParams& p, Rng& rng, GenDiagnostics* diag) {
  return collapse(generate_multigraph(p, rng, diag));
}

SparsityFit sparsity_bench(const GenParams& base,
                           const std::vector<double>& kappa_grid, int reps,
                           std::uint64_t seed) {
  if (kappa_grid.size() < 3)
    throw std::invalid_argument("sparsity_bench needs >= 3 grid points");
  if (reps < 5) throw std::invalid_argument("sparsity_bench needs reps >= 5");
  for (std::size_t i = 1; i < kappa_grid.size(); ++i)
    if (kappa_grid[i] <= kappa_grid[i - 1])
      throw ValidationError(
          "sparsity_bench: kappa grid must be strictly increasing "
          "(degenerate fit otherwise)");

  SparsityFit fit;
  for (std::size_t gi = 0; gi < kappa_grid.size(); ++gi) {
    GenParams p = base;
    p.kappa_mass = kappa_grid[gi];
    double sum_active = 0.0, sum_edges = 0.0;
    for (int r = 0; r < reps; ++r) {
      Rng rng(seed + 1000003ULL * gi + r);
      SimpleGraph g = generate_simple(p, rng);
      if (g.num_edges() == 0)
        throw ValidationError(
            "sparsity_bench: empty graph at kappa_mass=" +
            std::to_string(p.kappa_mass) + " (degenerate fit)");
      int active = 0;
      for (int i = 0; i < g.num_nodes(); ++i)
        if (g.degree(i) > 0) ++active;
      sum_active += active;
      sum_edges += static_cast<double>(g.num_edges());
    }
    fit.points.push_back(
        {p.kappa_mass, sum_active / reps, sum_edges / reps});
  }

  // Least squares of log E on log V_active.
  const std::size_t n = fit.points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : fit.points) {
    double x = std::log(pt.mean_active_nodes);
    double y = std::log(pt.mean_edges);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12 * n * sxx || denom == 0.0)
    throw ValidationError(
        "sparsity_bench: active-node counts do not vary across the grid "
        "(degenerate fit)");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace eegnn
