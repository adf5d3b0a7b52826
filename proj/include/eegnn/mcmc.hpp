#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eegnn/crm.hpp"
#include "eegnn/graph.hpp"

namespace eegnn {

/// Thrown by run_chain when the joint density becomes non-finite.
struct NumericalAbort : std::runtime_error {
  explicit NumericalAbort(const std::string& what, long long last_good)
      : std::runtime_error(what), last_good_epoch(last_good) {}
  long long last_good_epoch = -1;
};

struct McmcConfig {
  double alpha_dp = 1.0;
  double kappa_mass = 50.0;
  long long epochs = 1000;
  double burn_in_frac = 0.2;
  int thin = 10;
  int k_init = 2;
  double hmc_step = 0.01;
  int hmc_leapfrog = 10;
  double mh_scale = 0.3;
  std::uint64_t seed = 0;
  bool adapt_tuning = true;

  // Fixed-truncation mode: the cluster count K stays fixed (no birth or
  // pruning), latent edges whose endpoints fall in the unobserved-mass slot
  // are instantiated, and the cluster-weight and total-mass updates target
  // the exact conditionals of the resulting finite model. This is the mode
  // the joint-distribution (Geweke-style) validation runs in.
  bool fixed_truncation = false;
};

/// Full sampler state. Weight vectors are indexed by slot: slot 0 is the
/// unobserved-mass slack, slot i >= 1 is node i-1.
struct McmcState {
  McmcConfig cfg;
  int num_nodes = 0;

  GemWeights pi;                       // length K+1, pi[0] = slack mass
  std::vector<std::vector<double>> w;  // rows 0..K over V+1 slots; row 0 = base
  std::vector<double> wbar;            // row totals, kept in sync with w
  int K = 0;

  std::vector<NodePair> edges;           // observed edges, i < j
  std::vector<long long> z_edge;         // per-edge multiplicity >= 1
  std::vector<std::vector<int>> c_edge;  // per-copy cluster labels in 1..K
  std::vector<long long> z_self;         // per-node self-loop count >= 0
  std::vector<std::vector<int>> c_self;

  // fixed_truncation only: multiplicities of pairs touching the slack slot;
  // index 0 is the (slack, slack) pair, index j >= 1 the (slack, node j-1) pair.
  std::vector<long long> z_slack;
  std::vector<std::vector<int>> c_slack;

  // Incrementally maintained tallies. n_k[k] counts copies with label k;
  // n_ki[k][slot] counts per-slot incidences (self-loops count twice).
  std::vector<long long> n_k;
  std::vector<std::vector<long long>> n_ki;

  long long underflow_warnings = 0;

  int active_clusters() const;
  long long total_multiplicity() const;  // observed edges + self-loops
};

McmcState init_state(const SimpleGraph& g, const McmcConfig& cfg, Rng& rng);

/// Recomputes (n_k, n_ki) from the labels; true when they match the
/// maintained tallies exactly.
bool counts_consistent(const McmcState& s);

/// Collapsed log-posterior of the observed-slot base weights given the base
/// total mass; `w0_obs` holds candidate values for slots 1..V, the slack slot
/// is wbar_0 minus their sum. Returns -inf when the slack is infeasible.
double w0_log_posterior(const McmcState& s, const std::vector<double>& w0_obs);
std::vector<double> w0_grad_log_posterior(const McmcState& s,
                                          const std::vector<double>& w0_obs);

/// Step 1: one HMC trajectory on the observed-slot base weights (run in log
/// coordinates with the transform Jacobian). Returns whether it was accepted.
bool step1_hmc_w0(McmcState& s, Rng& rng);

/// Step 2: conjugate Dirichlet update of cluster k's normalized weights.
void step2_gibbs_wk(McmcState& s, int k, Rng& rng);

/// Step 3: cluster-proportion update. Direct-assignment Dirichlet draw in
/// production; exact independence-MH under the truncated stick-breaking
/// prior in fixed-truncation mode.
void step3_gibbs_pi(McmcState& s, Rng& rng);

/// Step 4: per-copy label resampling; drawing the slack cluster births a new
/// cluster (production mode only).
void step4_resample_clusters(McmcState& s, Rng& rng);

/// Step 5: truncated-Poisson update of observed-edge multiplicities and
/// plain-Poisson update of (unconstrained) self-loop counts.
void step5_resample_multiplicities(McmcState& s, Rng& rng);

/// Step 6: random-walk MH on the log total masses; returns the acceptance
/// fraction over the K+1 updates.
double step6_mh_masses(McmcState& s, Rng& rng);
bool step6_mh_base_mass(McmcState& s, Rng& rng);

void prune_empty_clusters(McmcState& s);

/// Complete-data log density of (z, c) given (pi, w) plus prior terms.
/// The cluster-proportion prior term uses the label-exchangeable convention
/// (alpha-1)*log(pi_0) + K*log(alpha).
double log_joint(const McmcState& s);

/// Poisson conditioned on a strictly positive outcome.
long long sample_truncated_poisson(double lambda, Rng& rng);

struct McmcSnapshot {
  long long epoch = 0;
  std::vector<long long> z_edge;
  std::vector<long long> z_self;
};

struct ChainTrace {
  int num_nodes = 0;
  std::vector<NodePair> edges;
  std::vector<double> log_joint;
  std::vector<int> k_active;
  std::vector<double> hmc_accept;          // per-epoch 0/1
  std::vector<double> mh_accept;           // per-epoch fraction
  std::vector<double> mean_mult_per_node;  // total multiplicity / num_nodes
  std::vector<McmcSnapshot> snapshots;     // post burn-in, thinned
  long long underflow_warnings = 0;

  long long epochs() const { return static_cast<long long>(log_joint.size()); }
};

/// One full epoch: Steps 1-6 plus end-of-epoch pruning (production mode).
void mcmc_epoch(McmcState& s, Rng& rng, bool* hmc_accepted = nullptr,
                double* mh_accept_rate = nullptr);

ChainTrace run_chain(const SimpleGraph& g, const McmcConfig& cfg);

/// Per observed edge and per diagonal, the mean multiplicity over the trace's
/// thinned post-burn-in snapshots. Throws ValidationError on an empty trace.
std::map<NodePair, double> posterior_mean_multiplicity(const ChainTrace& trace);

void save_trace_csv(const ChainTrace& trace, const std::string& path);

// --- fixed-truncation forward model (joint-distribution validation) --------

/// Draws (pi, w) from the priors and the full latent edge configuration from
/// the model; cfg.fixed_truncation is forced on.
McmcState forward_sample_fixed(const McmcConfig& cfg, int num_nodes,
                               int num_clusters, Rng& rng);

/// Redraws every latent multiplicity and label from the model given the
/// current (pi, w); the observed edge set is rebuilt from the new draw.
void regenerate_data_fixed(McmcState& s, Rng& rng);

}  // namespace eegnn
