#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "eegnn/generate.hpp"

using namespace eegnn;

namespace {

// Frozen small weight configuration shared by the equivalence checks.
struct Frozen {
  GemWeights pi;
  std::vector<CrmWeights> rows;
  int num_nodes = 5;
};

Frozen frozen_weights() {
  Frozen f;
  f.pi.alpha_dp = 1.0;
  f.pi.pi = {0.2, 0.5, 0.3};  // slack, cluster 1, cluster 2
  CrmWeights a, b;
  a.w = {0.4, 1.0, 0.6, 0.8, 0.2, 0.5};
  b.w = {0.1, 0.3, 0.9, 0.2, 0.7, 0.4};
  for (double w : a.w) a.total += w;
  for (double w : b.w) b.total += w;
  f.rows = {a, b};
  return f;
}

}  // namespace

TEST_CASE("generate_multigraph is deterministic in the seed") {
  GenParams p;
  p.num_nodes = 50;
  p.kappa_mass = 10.0;
  p.seed = 9;
  Rng r1(p.seed), r2(p.seed);
  const MultiGraph a = generate_multigraph(p, r1);
  const MultiGraph b = generate_multigraph(p, r2);
  CHECK(a.mult == b.mult);
}

TEST_CASE("diagnostics report the exact total Poisson rate") {
  const Frozen f = frozen_weights();
  double lambda = 0.0;
  for (std::size_t k = 0; k < f.rows.size(); ++k)
    lambda += f.pi.pi[k + 1] * f.rows[k].total * f.rows[k].total;

  Rng rng(10);
  GenDiagnostics diag;
  generate_multigraph_given(f.pi, f.rows, f.num_nodes, rng, &diag);
  CHECK(diag.lambda == doctest::Approx(lambda).epsilon(1e-12));

  // The edge count before slack discarding is Poisson(lambda).
  double total = 0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    GenDiagnostics d;
    generate_multigraph_given(f.pi, f.rows, f.num_nodes, rng, &d);
    total += static_cast<double>(d.total_drawn);
  }
  CHECK(total / reps == doctest::Approx(lambda).epsilon(0.05));
}

TEST_CASE("clusterwise and pairwise generators agree in distribution") {
  const Frozen f = frozen_weights();
  Rng rng(11);
  const int reps = 20000;
  double mean_a = 0, mean_b = 0, loops_a = 0, loops_b = 0;
  for (int r = 0; r < reps; ++r) {
    const MultiGraph a =
        generate_multigraph_given(f.pi, f.rows, f.num_nodes, rng);
    const MultiGraph b =
        generate_multigraph_dense(f.pi, f.rows, f.num_nodes, rng);
    mean_a += static_cast<double>(a.total_multiplicity());
    mean_b += static_cast<double>(b.total_multiplicity());
    for (const auto& [pair, m] : a.mult)
      if (pair.first == pair.second) loops_a += static_cast<double>(m);
    for (const auto& [pair, m] : b.mult)
      if (pair.first == pair.second) loops_b += static_cast<double>(m);
  }
  mean_a /= reps;
  mean_b /= reps;
  // Two independent estimators of the same mean; generous 3-sigma band.
  CHECK(mean_a == doctest::Approx(mean_b).epsilon(0.03));
  CHECK(loops_a / reps == doctest::Approx(loops_b / reps).epsilon(0.1));
}

TEST_CASE("generate_simple collapses the latent multigraph") {
  GenParams p;
  p.num_nodes = 60;
  p.kappa_mass = 15.0;
  p.seed = 12;
  Rng r1(p.seed), r2(p.seed);
  const MultiGraph mg = generate_multigraph(p, r1);
  const SimpleGraph g = generate_simple(p, r2);
  CHECK(g.edges() == collapse(mg).edges());
}

TEST_CASE("sparsity_bench fits a positive subquadratic slope") {
  GenParams base;
  base.num_nodes = 1500;
  const SparsityFit fit =
      sparsity_bench(base, {4.0, 8.0, 16.0, 32.0}, 5, 21);
  REQUIRE(fit.points.size() == 4);
  for (const auto& pt : fit.points) {
    CHECK(pt.mean_active_nodes > 0.0);
    CHECK(pt.mean_edges > 0.0);
  }
  CHECK(fit.slope > 0.5);
  CHECK(fit.slope < 2.0);
}

TEST_CASE("sparsity_bench rejects degenerate grids") {
  GenParams base;
  base.num_nodes = 200;
  // A constant grid cannot produce varying active-node counts.
  CHECK_THROWS_AS(sparsity_bench(base, {8.0, 8.0, 8.0}, 5, 22),
                  ValidationError);
  CHECK_THROWS_AS(sparsity_bench(base, {8.0}, 5, 22), std::invalid_argument);
  CHECK_THROWS_AS(sparsity_bench(base, {4.0, 8.0, 16.0}, 2, 22),
                  std::invalid_argument);
}
