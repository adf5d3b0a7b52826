#include "eegnn/mcmc.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eegnn {

namespace {

constexpr double kTinyWeight = 1e-300;
constexpr double kUnderflowRate = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline int slot_of(int node) { return node + 1; }

// boost's digamma overflows internally for arguments near the double floor;
// the recurrence psi(x) = psi(x + 1) - 1/x sidesteps that exactly.
inline double digamma_safe(double x) {
  return x < 0.5 ? boost::math::digamma(x + 1.0) - 1.0 / x
                 : boost::math::digamma(x);
}

void bump(McmcState& s, int k, int slot_i, int slot_j, long long delta) {
  s.n_k[k] += delta;
  s.n_ki[k][slot_i] += delta;
  s.n_ki[k][slot_j] += delta;
}

void rebuild_counts(McmcState& s) {
  const int slots = s.num_nodes + 1;
  s.n_k.assign(s.K + 1, 0);
  s.n_ki.assign(s.K + 1, std::vector<long long>(slots, 0));
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const int si = slot_of(s.edges[e].first);
    const int sj = slot_of(s.edges[e].second);
    for (int k : s.c_edge[e]) bump(s, k, si, sj, 1);
  }
  for (int i = 0; i < s.num_nodes; ++i)
    for (int k : s.c_self[i]) bump(s, k, slot_of(i), slot_of(i), 1);
  for (std::size_t j = 0; j < s.z_slack.size(); ++j)
    for (int k : s.c_slack[j]) bump(s, k, 0, static_cast<int>(j), 1);
}

// Poisson rate of the unordered pair with weight slots (si, sj), i.e.
// c_sym * sum_k pi_k w_{k,si} w_{k,sj} with c_sym = 2 off the diagonal.
double pair_rate(const McmcState& s, int si, int sj) {
  double rate = 0.0;
  for (int k = 1; k <= s.K; ++k) rate += s.pi.pi[k] * s.w[k][si] * s.w[k][sj];
  return si == sj ? rate : 2.0 * rate;
}

// Draws a copy label proportional to pi_k w_{k,si} w_{k,sj} over k = 1..K.
int sample_label(const McmcState& s, int si, int sj, Rng& rng) {
  double total = 0.0;
  std::vector<double> p(s.K + 1, 0.0);
  for (int k = 1; k <= s.K; ++k) {
    p[k] = s.pi.pi[k] * s.w[k][si] * s.w[k][sj];
    total += p[k];
  }
  if (!(total > 0.0)) {
    // Degenerate weights: fall back to a uniform label.
    std::uniform_int_distribution<int> u(1, s.K);
    return u(rng);
  }
  std::uniform_real_distribution<double> u(0.0, total);
  double t = u(rng);
  for (int k = 1; k < s.K; ++k) {
    t -= p[k];
    if (t <= 0.0) return k;
  }
  return s.K;
}

// Resizes one copy-label list to match a new multiplicity, keeping survivors
// and drawing fresh labels for the excess; keeps the tallies in sync.
void resize_copies(McmcState& s, std::vector<int>& labels, long long z_new,
                   int si, int sj, Rng& rng) {
  while (static_cast<long long>(labels.size()) > z_new) {
    bump(s, labels.back(), si, sj, -1);
    labels.pop_back();
  }
  while (static_cast<long long>(labels.size()) < z_new) {
    int k = sample_label(s, si, sj, rng);
    labels.push_back(k);
    bump(s, k, si, sj, 1);
  }
}

// Base-weight prior shape exponents. Production treats observed slots with
// the improper Levy form (exponent 0) and gives the slack slot the full mass
// parameter; fixed-truncation mode uses the iid finite-model shapes.
double obs_shape(const McmcState& s) {
  return s.cfg.fixed_truncation ? s.cfg.kappa_mass / (s.num_nodes + 1) : 0.0;
}
double slack_shape(const McmcState& s) {
  return s.cfg.fixed_truncation ? s.cfg.kappa_mass / (s.num_nodes + 1)
                                : s.cfg.kappa_mass;
}

double log_mass_target(const McmcState& s, int k, double wb) {
  // Conditional of cluster k's total mass with the normalized weights
  // collapsed: Gamma(wbar_0 + 2 n_k) likelihood-prior product times the
  // e^{-pi_k wbar_k^2} edge-count factor, plus the log-walk Jacobian.
  return (2.0 * s.n_k[k] + s.wbar[0] - 1.0) * std::log(wb) - wb -
         s.pi.pi[k] * wb * wb + std::log(wb);
}

double log_base_mass_target(const McmcState& s, double wb0) {
  double t = std::log(wb0);  // log-walk Jacobian
  if (s.cfg.fixed_truncation) {
    // Collapsed form: the normalized cluster rows are integrated out
    // (Dirichlet-multinomial), so the target depends only on the copy
    // counts, the row totals, and the base shape parameters. Conditioning
    // on raw row entries instead is numerically fragile: tiny shapes
    // produce draws that underflow to the clamp floor, and the density of
    // those clamped values no longer matches the assumed Gamma law.
    t += log_total_mass_density(wb0, s.cfg.kappa_mass);
    const int slots = s.num_nodes + 1;
    for (int k = 1; k <= s.K; ++k) {
      t += (wb0 - 1.0) * std::log(s.wbar[k]) -
           std::lgamma(wb0 + 2.0 * static_cast<double>(s.n_k[k]));
      for (int i = 0; i < slots; ++i)
        if (s.n_ki[k][i] > 0) {
          const double shape = wb0 * s.w[0][i] / s.wbar[0];
          t += std::lgamma(shape + static_cast<double>(s.n_ki[k][i])) -
               std::lgamma(shape);
        }
    }
    return t;
  }
  t += log_total_mass_density(wb0, s.cfg.kappa_mass);
  double sum_log = 0.0;
  for (int k = 1; k <= s.K; ++k) sum_log += std::log(s.wbar[k]);
  t += wb0 * sum_log - s.K * std::lgamma(wb0);
  return t;
}

// Step 3 (fixed-truncation): the part of target-minus-proposal that does not
// cancel between the truncated stick-breaking posterior and the
// Dirichlet(alpha, n_1+1, .., n_K+1) proposal.
double pi_mh_residual(const McmcState& s, const std::vector<double>& pi) {
  double r = 0.0;
  double remaining = pi[0];  // R_{k-1} = pi_0 + sum_{l >= k} pi_l
  for (int k = s.K; k >= 1; --k) {
    remaining += pi[k];
    r -= std::log(remaining);
    r -= pi[k] * s.wbar[k] * s.wbar[k];
  }
  return r;
}

}  // namespace

int McmcState::active_clusters() const {
  int a = 0;
  for (int k = 1; k <= K; ++k)
    if (n_k[k] > 0) ++a;
  return a;
}

long long McmcState::total_multiplicity() const {
  long long t = 0;
  for (long long z : z_edge) t += z;
  for (long long z : z_self) t += z;
  return t;
}

bool counts_consistent(const McmcState& s) {
  McmcState tmp = s;
  rebuild_counts(tmp);
  return tmp.n_k == s.n_k && tmp.n_ki == s.n_ki;
}

McmcState init_state(const SimpleGraph& g, const McmcConfig& cfg, Rng& rng) {
  if (cfg.k_init < 1) throw std::invalid_argument("k_init must be >= 1");
  if (cfg.alpha_dp <= 0.0 || cfg.kappa_mass <= 0.0)
    throw std::invalid_argument("alpha_dp and kappa_mass must be > 0");
  McmcState s;
  s.cfg = cfg;
  s.num_nodes = g.num_nodes();
  s.K = cfg.k_init;

  s.pi = sample_gem(cfg.alpha_dp, s.K, rng);
  CrmWeights w0 = sample_w0(cfg.kappa_mass, s.num_nodes, rng);
  if (!cfg.fixed_truncation) {
    // Isolated nodes carry no atom of their own; fold their base mass into
    // the slack remainder and pin the slot at the floor (see step1_hmc_w0).
    for (int i = 0; i < s.num_nodes; ++i)
      if (g.degree(i) == 0) {
        w0.w[0] += w0.w[i + 1] - kTinyWeight;
        w0.w[i + 1] = kTinyWeight;
      }
  }
  s.w.push_back(w0.w);
  s.wbar.push_back(w0.total);
  for (int k = 1; k <= s.K; ++k) {
    CrmWeights row = sample_wk_prior(w0, rng);
    s.w.push_back(row.w);
    s.wbar.push_back(row.total);
  }

  s.edges = g.edges();
  s.z_edge.assign(s.edges.size(), 1);
  s.c_edge.resize(s.edges.size());
  s.z_self.assign(s.num_nodes, 0);
  s.c_self.resize(s.num_nodes);
  if (cfg.fixed_truncation) {
    s.z_slack.assign(s.num_nodes + 1, 0);
    s.c_slack.resize(s.num_nodes + 1);
  }
  s.n_k.assign(s.K + 1, 0);
  s.n_ki.assign(s.K + 1, std::vector<long long>(s.num_nodes + 1, 0));
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const int si = slot_of(s.edges[e].first);
    const int sj = slot_of(s.edges[e].second);
    int k = sample_label(s, si, sj, rng);
    s.c_edge[e].push_back(k);
    bump(s, k, si, sj, 1);
  }
  return s;
}

double w0_log_posterior(const McmcState& s, const std::vector<double>& w0_obs) {
  const int V = s.num_nodes;
  if (static_cast<int>(w0_obs.size()) != V)
    throw std::invalid_argument("w0_obs must have one entry per node");
  double sum = 0.0;
  for (double v : w0_obs) {
    if (!(v > 0.0)) return kNegInf;
    sum += v;
  }
  const double slack = s.wbar[0] - sum;
  if (!(slack > 0.0)) return kNegInf;

  double lp = 0.0;
  const double wb0 = s.wbar[0];
  for (int k = 1; k <= s.K; ++k) {
    if (s.n_k[k] == 0) continue;
    lp += std::lgamma(wb0) - std::lgamma(wb0 + 2.0 * s.n_k[k]);
    const auto& nk = s.n_ki[k];
    if (nk[0] > 0)
      lp += std::lgamma(slack + nk[0]) - std::lgamma(slack);
    for (int i = 0; i < V; ++i)
      if (nk[i + 1] > 0)
        lp += std::lgamma(w0_obs[i] + nk[i + 1]) - std::lgamma(w0_obs[i]);
  }
  const double a_obs = obs_shape(s);
  const double a_slack = slack_shape(s);
  for (double v : w0_obs) lp += (a_obs - 1.0) * std::log(v) - v;
  lp += (a_slack - 1.0) * std::log(slack) - slack;
  return lp;
}

std::vector<double> w0_grad_log_posterior(const McmcState& s,
                                          const std::vector<double>& w0_obs) {
  const int V = s.num_nodes;
  if (static_cast<int>(w0_obs.size()) != V)
    throw std::invalid_argument("w0_obs must have one entry per node");
  double sum = 0.0;
  for (double v : w0_obs) {
    if (!(v > 0.0))
      throw std::domain_error("w0_grad_log_posterior: weights must be > 0");
    sum += v;
  }
  const double slack = s.wbar[0] - sum;
  if (!(slack > 0.0))
    throw std::domain_error("w0_grad_log_posterior: infeasible slack");

  // The slack depends on every coordinate, so its digamma terms enter each
  // gradient entry with a -1 chain factor.
  double slack_term = 0.0;
  for (int k = 1; k <= s.K; ++k)
    if (s.n_ki[k][0] > 0)
      slack_term += digamma_safe(slack + s.n_ki[k][0]) - digamma_safe(slack);
  const double a_obs = obs_shape(s);
  const double a_slack = slack_shape(s);
  const double slack_prior = (a_slack - 1.0) / slack;

  std::vector<double> g(V, 0.0);
  for (int i = 0; i < V; ++i) {
    double gi = 0.0;
    for (int k = 1; k <= s.K; ++k) {
      const long long n = s.n_ki[k][i + 1];
      if (n > 0) gi += digamma_safe(w0_obs[i] + n) - digamma_safe(w0_obs[i]);
    }
    gi -= slack_term;
    gi += (a_obs - 1.0) / w0_obs[i];
    gi -= slack_prior;
    g[i] = gi;
  }
  return g;
}

bool step1_hmc_w0(McmcState& s, Rng& rng) {
  const int V = s.num_nodes;
  if (V == 0) return true;

  // An isolated node never receives a copy, so under the improper Levy
  // intensity its base weight would random-walk toward zero forever. Its
  // mass belongs to the slack remainder; the slot stays pinned at the floor
  // and is excluded from the update.
  std::vector<int> act;
  act.reserve(V);
  if (s.cfg.fixed_truncation) {
    for (int i = 0; i < V; ++i) act.push_back(i);
  } else {
    std::vector<char> touched(V, 0);
    for (const auto& e : s.edges) touched[e.first] = touched[e.second] = 1;
    for (int i = 0; i < V; ++i)
      if (touched[i]) act.push_back(i);
  }
  const int n = static_cast<int>(act.size());
  if (n == 0) return true;

  std::vector<double> base(V);
  for (int i = 0; i < V; ++i) base[i] = s.w[0][i + 1];

  // Log-coordinate target: posterior plus the sum-of-logs Jacobian.
  auto eval = [&](const std::vector<double>& x, std::vector<double>* grad,
                  std::vector<double>* w_out) -> double {
    std::vector<double> w0 = base;
    double t = 0.0;
    for (int j = 0; j < n; ++j) {
      w0[act[j]] = std::exp(x[j]);
      t += x[j];
    }
    const double lp = w0_log_posterior(s, w0);
    if (!std::isfinite(lp)) return kNegInf;
    if (grad) {
      std::vector<double> g = w0_grad_log_posterior(s, w0);
      for (int j = 0; j < n; ++j) (*grad)[j] = g[act[j]] * w0[act[j]] + 1.0;
    }
    if (w_out) *w_out = std::move(w0);
    return t + lp;
  };

  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = std::log(s.w[0][act[j] + 1]);
  std::vector<double> grad(n);
  const double t0 = eval(x, &grad, nullptr);
  if (!std::isfinite(t0)) return false;

  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> p(n);
  double kin0 = 0.0;
  for (int j = 0; j < n; ++j) {
    p[j] = norm(rng);
    kin0 += 0.5 * p[j] * p[j];
  }

  const double eps = s.cfg.hmc_step;
  std::vector<double> w_final;
  double t1 = kNegInf;
  bool feasible = true;
  for (int j = 0; j < n; ++j) p[j] += 0.5 * eps * grad[j];
  for (int step = 0; step < s.cfg.hmc_leapfrog; ++step) {
    for (int j = 0; j < n; ++j) x[j] += eps * p[j];
    const bool last = step + 1 == s.cfg.hmc_leapfrog;
    t1 = eval(x, &grad, last ? &w_final : nullptr);
    if (!std::isfinite(t1)) {
      feasible = false;
      break;
    }
    const double scale = last ? 0.5 * eps : eps;
    for (int j = 0; j < n; ++j) p[j] += scale * grad[j];
  }
  if (!feasible) return false;

  double kin1 = 0.0;
  for (int j = 0; j < n; ++j) kin1 += 0.5 * p[j] * p[j];
  const double log_acc = (t1 - kin1) - (t0 - kin0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (std::log(u(rng)) >= log_acc) return false;

  double slack = s.wbar[0];
  for (int i = 0; i < V; ++i) {
    s.w[0][i + 1] = std::max(w_final[i], kTinyWeight);
    slack -= w_final[i];
  }
  s.w[0][0] = std::max(slack, kTinyWeight);
  return true;
}

void step2_gibbs_wk(McmcState& s, int k, Rng& rng) {
  if (k < 1 || k > s.K) throw IndexError("step2_gibbs_wk: cluster out of range");
  const int slots = s.num_nodes + 1;
  std::vector<double> conc(slots);
  for (int i = 0; i < slots; ++i)
    conc[i] = s.w[0][i] + static_cast<double>(s.n_ki[k][i]);
  std::vector<double> wt = sample_dirichlet(conc, rng);
  for (int i = 0; i < slots; ++i)
    s.w[k][i] = std::max(s.wbar[k] * wt[i], kTinyWeight);
}

void step3_gibbs_pi(McmcState& s, Rng& rng) {
  if (!s.cfg.fixed_truncation) {
    // Direct-assignment update: Dirichlet(alpha, n_1, .., n_K), with
    // empty clusters pinned at zero mass (they are pruned at epoch end).
    std::vector<double> x(s.K + 1, 0.0);
    x[0] = sample_gamma(s.cfg.alpha_dp, rng);
    double sum = x[0];
    for (int k = 1; k <= s.K; ++k) {
      if (s.n_k[k] > 0) x[k] = sample_gamma(static_cast<double>(s.n_k[k]), rng);
      sum += x[k];
    }
    for (int k = 0; k <= s.K; ++k) s.pi.pi[k] = x[k] / sum;
    return;
  }

  // Independence MH against the truncated stick-breaking posterior, which
  // keeps the e^{-sum_k pi_k wbar_k^2} factor the collapsed Dirichlet
  // proposal cannot carry.
  std::vector<double> conc(s.K + 1);
  conc[0] = s.cfg.alpha_dp;
  for (int k = 1; k <= s.K; ++k) conc[k] = static_cast<double>(s.n_k[k]) + 1.0;
  std::vector<double> prop = sample_dirichlet(conc, rng);
  const double log_ratio = pi_mh_residual(s, prop) - pi_mh_residual(s, s.pi.pi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (std::log(u(rng)) < log_ratio) s.pi.pi = prop;
}

void step4_resample_clusters(McmcState& s, Rng& rng) {
  const bool allow_birth = !s.cfg.fixed_truncation;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto resample_one = [&](int& label, int si, int sj) {
    double total = 0.0;
    std::vector<double> p(s.K + 1, 0.0);
    if (allow_birth) {
      p[0] = s.pi.pi[0] * s.w[0][si] * s.w[0][sj];
      total += p[0];
    }
    for (int k = 1; k <= s.K; ++k) {
      p[k] = s.pi.pi[k] * s.w[k][si] * s.w[k][sj];
      total += p[k];
    }
    if (!(total > 0.0)) return;
    double t = unif(rng) * total;
    int pick = s.K;
    for (int k = allow_birth ? 0 : 1; k < s.K; ++k) {
      t -= p[k];
      if (t <= 0.0) {
        pick = k;
        break;
      }
    }
    if (pick == 0) {
      // Birth: new cluster from the base measure, stick-broken off the
      // unassigned remainder.
      CrmWeights base{s.w[0], s.wbar[0]};
      CrmWeights row = sample_wk_prior(base, rng);
      s.w.push_back(row.w);
      s.wbar.push_back(row.total);
      const double b = sample_beta(1.0, s.cfg.alpha_dp, rng);
      s.pi.pi.push_back(b * s.pi.pi[0]);
      // At small concentrations b can round to 1; keep the remainder positive.
      s.pi.pi[0] = std::max(s.pi.pi[0] * (1.0 - b), kTinyWeight);
      ++s.K;
      s.n_k.push_back(0);
      s.n_ki.emplace_back(s.num_nodes + 1, 0);
      pick = s.K;
    }
    if (pick != label) {
      bump(s, label, si, sj, -1);
      bump(s, pick, si, sj, 1);
      label = pick;
    }
  };

  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const int si = slot_of(s.edges[e].first);
    const int sj = slot_of(s.edges[e].second);
    for (int& c : s.c_edge[e]) resample_one(c, si, sj);
  }
  for (int i = 0; i < s.num_nodes; ++i)
    for (int& c : s.c_self[i]) resample_one(c, slot_of(i), slot_of(i));
  for (std::size_t j = 0; j < s.z_slack.size(); ++j)
    for (int& c : s.c_slack[j]) resample_one(c, 0, static_cast<int>(j));

  if (allow_birth) prune_empty_clusters(s);
}

void step5_resample_multiplicities(McmcState& s, Rng& rng) {
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const int si = slot_of(s.edges[e].first);
    const int sj = slot_of(s.edges[e].second);
    double rate = pair_rate(s, si, sj);
    long long z;
    if (rate < kUnderflowRate) {
      ++s.underflow_warnings;
      z = 1;
    } else {
      z = sample_truncated_poisson(rate, rng);
    }
    resize_copies(s, s.c_edge[e], z, si, sj, rng);
    s.z_edge[e] = z;
  }
  for (int i = 0; i < s.num_nodes; ++i) {
    const int si = slot_of(i);
    const double rate = pair_rate(s, si, si);
    long long z = 0;
    if (rate > 0.0) {
      std::poisson_distribution<long long> pois(rate);
      z = pois(rng);
    }
    resize_copies(s, s.c_self[i], z, si, si, rng);
    s.z_self[i] = z;
  }
  for (std::size_t j = 0; j < s.z_slack.size(); ++j) {
    const int sj = static_cast<int>(j);
    const double rate = pair_rate(s, 0, sj);
    long long z = 0;
    if (rate > 0.0) {
      std::poisson_distribution<long long> pois(rate);
      z = pois(rng);
    }
    resize_copies(s, s.c_slack[j], z, 0, sj, rng);
    s.z_slack[j] = z;
  }
}

double step6_mh_masses(McmcState& s, Rng& rng) {
  std::normal_distribution<double> norm(0.0, s.cfg.mh_scale);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int accepted = 0;
  for (int k = 1; k <= s.K; ++k) {
    const double cur = s.wbar[k];
    const double prop = cur * std::exp(norm(rng));
    const double log_acc = log_mass_target(s, k, prop) -
                           log_mass_target(s, k, cur);
    if (std::log(unif(rng)) < log_acc) {
      const double ratio = prop / cur;
      for (double& v : s.w[k]) v = std::max(v * ratio, kTinyWeight);
      s.wbar[k] = prop;
      ++accepted;
    }
  }
  int moves = s.K;
  if (!s.cfg.fixed_truncation) {
    accepted += step6_mh_base_mass(s, rng);
    ++moves;
  }
  return static_cast<double>(accepted) / std::max(moves, 1);
}

bool step6_mh_base_mass(McmcState& s, Rng& rng) {
  std::normal_distribution<double> norm(0.0, s.cfg.mh_scale);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double cur = s.wbar[0];
  const double prop = cur * std::exp(norm(rng));
  const double log_acc =
      log_base_mass_target(s, prop) - log_base_mass_target(s, cur);
  if (std::log(unif(rng)) < log_acc) {
    const double ratio = prop / cur;
    for (double& v : s.w[0]) v = std::max(v * ratio, kTinyWeight);
    s.wbar[0] = prop;
    return true;
  }
  return false;
}

void prune_empty_clusters(McmcState& s) {
  std::vector<int> relabel(s.K + 1, 0);
  GemWeights new_pi;
  new_pi.alpha_dp = s.pi.alpha_dp;
  new_pi.pi.push_back(s.pi.pi[0]);
  std::vector<std::vector<double>> new_w{s.w[0]};
  std::vector<double> new_wbar{s.wbar[0]};
  std::vector<long long> new_nk{0};
  std::vector<std::vector<long long>> new_nki{s.n_ki[0]};
  int next = 0;
  for (int k = 1; k <= s.K; ++k) {
    if (s.n_k[k] == 0) {
      new_pi.pi[0] += s.pi.pi[k];  // unassigned remainder absorbs the mass
      continue;
    }
    relabel[k] = ++next;
    new_pi.pi.push_back(s.pi.pi[k]);
    new_w.push_back(std::move(s.w[k]));
    new_wbar.push_back(s.wbar[k]);
    new_nk.push_back(s.n_k[k]);
    new_nki.push_back(std::move(s.n_ki[k]));
  }
  if (next == s.K) {
    s.w[0] = std::move(new_w[0]);
    for (int k = 1; k <= s.K; ++k) {
      s.w[k] = std::move(new_w[k]);
      s.n_ki[k] = std::move(new_nki[k]);
    }
    return;  // nothing pruned
  }
  s.pi = std::move(new_pi);
  s.w = std::move(new_w);
  s.wbar = std::move(new_wbar);
  s.n_k = std::move(new_nk);
  s.n_ki = std::move(new_nki);
  s.K = next;
  for (auto& labels : s.c_edge)
    for (int& c : labels) c = relabel[c];
  for (auto& labels : s.c_self)
    for (int& c : labels) c = relabel[c];
  for (auto& labels : s.c_slack)
    for (int& c : labels) c = relabel[c];
}

double log_joint(const McmcState& s) {
  // Joint density of the instantiated state with the normalized cluster rows
  // integrated out (Dirichlet-multinomial), keeping the row totals. Keeping
  // the raw row entries instead makes the value jump by hundreds of nats
  // whenever a tiny-shape draw underflows to the clamp floor, which defeats
  // its use as a convergence monitor.
  double lj = 0.0;

  // Copy-level likelihood pieces: the symmetry constant per off-diagonal
  // copy and the Poisson normalizers.
  long long offdiag_copies = 0;
  for (const auto& labels : s.c_edge)
    offdiag_copies += static_cast<long long>(labels.size());
  for (std::size_t j = 1; j < s.c_slack.size(); ++j)
    offdiag_copies += static_cast<long long>(s.c_slack[j].size());
  lj += std::log(2.0) * static_cast<double>(offdiag_copies);
  for (long long z : s.z_edge) lj -= std::lgamma(static_cast<double>(z) + 1.0);
  for (long long z : s.z_self) lj -= std::lgamma(static_cast<double>(z) + 1.0);
  for (long long z : s.z_slack)
    lj -= std::lgamma(static_cast<double>(z) + 1.0);

  // Per-cluster terms: proportion factors, total Poisson rate pi_k wbar_k^2,
  // the row-total prior, and the collapsed endpoint allocation. The lgamma
  // of the base total from the row-total prior cancels against the one from
  // the collapse.
  const double wb0 = s.wbar[0];
  for (int k = 1; k <= s.K; ++k) {
    const double nk = static_cast<double>(s.n_k[k]);
    if (s.n_k[k] > 0) {
      if (!(s.pi.pi[k] > 0.0) || !(s.wbar[k] > 0.0)) return kNegInf;
      lj += nk * std::log(s.pi.pi[k]);
    }
    lj += (wb0 - 1.0 + 2.0 * nk) * std::log(s.wbar[k]) - s.wbar[k] -
          std::lgamma(wb0 + 2.0 * nk);
    lj -= s.pi.pi[k] * s.wbar[k] * s.wbar[k];
    for (int i = 0; i <= s.num_nodes; ++i)
      if (s.n_ki[k][i] > 0)
        lj += std::lgamma(s.w[0][i] + static_cast<double>(s.n_ki[k][i])) -
              std::lgamma(s.w[0][i]);
  }

  // Cluster-proportion prior, written in the label-exchangeable form so the
  // value is invariant under relabeling of the active clusters.
  lj += (s.cfg.alpha_dp - 1.0) * std::log(s.pi.pi[0]) +
        s.K * std::log(s.cfg.alpha_dp);

  // Base weights: Levy density per observed slot, mass density on the slack.
  const double a_obs = obs_shape(s);
  for (int i = 1; i <= s.num_nodes; ++i) {
    if (s.cfg.fixed_truncation)
      lj += (a_obs - 1.0) * std::log(s.w[0][i]) - s.w[0][i] -
            std::lgamma(a_obs);
    else
      lj += log_levy_density(s.w[0][i]);
  }
  if (s.cfg.fixed_truncation)
    lj += (a_obs - 1.0) * std::log(s.w[0][0]) - s.w[0][0] - std::lgamma(a_obs);
  else
    lj += log_total_mass_density(s.w[0][0], s.cfg.kappa_mass);

  return lj;
}

long long sample_truncated_poisson(double lambda, Rng& rng) {
  if (!(lambda > 0.0))
    throw std::domain_error("sample_truncated_poisson: lambda must be > 0");
  if (lambda <= 30.0) {
    // Inversion on the zero-truncated pmf: P(1) = lambda / (e^lambda - 1),
    // P(k+1) = P(k) * lambda / (k+1).
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double p = lambda / std::expm1(lambda);
    double cdf = p;
    long long k = 1;
    while (u > cdf && k < 4000) {
      p *= lambda / static_cast<double>(k + 1);
      ++k;
      cdf += p;
    }
    return k;
  }
  std::poisson_distribution<long long> pois(lambda);
  for (;;) {
    const long long z = pois(rng);
    if (z >= 1) return z;
  }
}

void mcmc_epoch(McmcState& s, Rng& rng, bool* hmc_accepted,
                double* mh_accept_rate) {
  const bool acc1 = step1_hmc_w0(s, rng);
  // In fixed-truncation mode the base-mass move targets the collapsed
  // posterior (normalized rows integrated out), so it must run before the
  // rows are regenerated by the Gibbs draw below.
  if (s.cfg.fixed_truncation) step6_mh_base_mass(s, rng);
  for (int k = 1; k <= s.K; ++k) step2_gibbs_wk(s, k, rng);
  step3_gibbs_pi(s, rng);
  step4_resample_clusters(s, rng);
  step5_resample_multiplicities(s, rng);
  if (!s.cfg.fixed_truncation) prune_empty_clusters(s);
  const double acc6 = step6_mh_masses(s, rng);
  if (hmc_accepted) *hmc_accepted = acc1;
  if (mh_accept_rate) *mh_accept_rate = acc6;
}

ChainTrace run_chain(const SimpleGraph& g, const McmcConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  Rng rng(cfg.seed);
  McmcState s = init_state(g, cfg, rng);

  ChainTrace trace;
  trace.num_nodes = s.num_nodes;
  trace.edges = s.edges;
  const long long burn =
      std::llround(cfg.burn_in_frac * static_cast<double>(cfg.epochs));
  const int thin = std::max(cfg.thin, 1);

  for (long long epoch = 0; epoch < cfg.epochs; ++epoch) {
    bool acc1 = false;
    double acc6 = 0.0;
    mcmc_epoch(s, rng, &acc1, &acc6);

    if (cfg.adapt_tuning && epoch < burn) {
      s.cfg.hmc_step = std::clamp(
          s.cfg.hmc_step * std::exp(0.1 * ((acc1 ? 1.0 : 0.0) - 0.65)), 1e-6,
          1.0);
      s.cfg.mh_scale =
          std::clamp(s.cfg.mh_scale * std::exp(0.1 * (acc6 - 0.44)), 1e-3,
                     10.0);
    }

    const double lj = log_joint(s);
    if (!std::isfinite(lj))
      throw NumericalAbort("log joint became non-finite at epoch " +
                               std::to_string(epoch),
                           epoch - 1);
    trace.log_joint.push_back(lj);
    trace.k_active.push_back(s.active_clusters());
    trace.hmc_accept.push_back(acc1 ? 1.0 : 0.0);
    trace.mh_accept.push_back(acc6);
    trace.mean_mult_per_node.push_back(
        s.num_nodes > 0
            ? static_cast<double>(s.total_multiplicity()) / s.num_nodes
            : 0.0);
    if (epoch >= burn && (epoch - burn) % thin == 0)
      trace.snapshots.push_back({epoch, s.z_edge, s.z_self});
  }
  if (trace.snapshots.empty())
    trace.snapshots.push_back({cfg.epochs - 1, s.z_edge, s.z_self});
  trace.underflow_warnings = s.underflow_warnings;
  return trace;
}

std::map<NodePair, double> posterior_mean_multiplicity(
    const ChainTrace& trace) {
  if (trace.snapshots.empty())
    throw ValidationError("posterior_mean_multiplicity: empty trace");
  std::map<NodePair, double> mean;
  const double inv = 1.0 / static_cast<double>(trace.snapshots.size());
  for (const auto& snap : trace.snapshots) {
    for (std::size_t e = 0; e < trace.edges.size(); ++e)
      mean[trace.edges[e]] += inv * static_cast<double>(snap.z_edge[e]);
    for (int i = 0; i < trace.num_nodes; ++i)
      mean[{i, i}] += inv * static_cast<double>(snap.z_self[i]);
  }
  return mean;
}

void save_trace_csv(const ChainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,log_joint,K,hmc_accept,mh_accept,mean_mult_per_node\n";
  char buf[128];
  for (long long e = 0; e < trace.epochs(); ++e) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%d,%g,%g,%.17g", e,
                  trace.log_joint[e], trace.k_active[e], trace.hmc_accept[e],
                  trace.mh_accept[e], trace.mean_mult_per_node[e]);
    out << buf << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

McmcState forward_sample_fixed(const McmcConfig& cfg, int num_nodes,
                               int num_clusters, Rng& rng) {
  if (num_nodes < 1 || num_nodes > 256)
    throw std::invalid_argument("forward_sample_fixed: 1 <= num_nodes <= 256");
  if (num_clusters < 1)
    throw std::invalid_argument("forward_sample_fixed: num_clusters >= 1");
  McmcState s;
  s.cfg = cfg;
  s.cfg.fixed_truncation = true;
  s.num_nodes = num_nodes;
  s.K = num_clusters;
  s.pi = sample_gem(cfg.alpha_dp, s.K, rng);
  CrmWeights w0 = sample_w0(cfg.kappa_mass, num_nodes, rng);
  s.w.push_back(w0.w);
  s.wbar.push_back(w0.total);
  for (int k = 1; k <= s.K; ++k) {
    CrmWeights row = sample_wk_prior(w0, rng);
    s.w.push_back(row.w);
    s.wbar.push_back(row.total);
  }
  regenerate_data_fixed(s, rng);
  return s;
}

void regenerate_data_fixed(McmcState& s, Rng& rng) {
  if (!s.cfg.fixed_truncation)
    throw std::logic_error(
        "regenerate_data_fixed requires fixed-truncation mode");
  const int V = s.num_nodes;
  s.edges.clear();
  s.z_edge.clear();
  s.c_edge.clear();
  s.z_self.assign(V, 0);
  s.c_self.assign(V, {});
  s.z_slack.assign(V + 1, 0);
  s.c_slack.assign(V + 1, {});

  auto draw_pair = [&](int si, int sj) -> std::pair<long long, std::vector<int>> {
    const double rate = pair_rate(s, si, sj);
    long long z = 0;
    if (rate > 0.0) {
      std::poisson_distribution<long long> pois(rate);
      z = pois(rng);
    }
    std::vector<int> labels;
    labels.reserve(z);
    for (long long c = 0; c < z; ++c)
      labels.push_back(sample_label(s, si, sj, rng));
    return {z, std::move(labels)};
  };

  for (int i = 0; i < V; ++i)
    for (int j = i + 1; j < V; ++j) {
      auto [z, labels] = draw_pair(slot_of(i), slot_of(j));
      if (z >= 1) {
        s.edges.push_back({i, j});
        s.z_edge.push_back(z);
        s.c_edge.push_back(std::move(labels));
      }
    }
  for (int i = 0; i < V; ++i) {
    auto [z, labels] = draw_pair(slot_of(i), slot_of(i));
    s.z_self[i] = z;
    s.c_self[i] = std::move(labels);
  }
  for (int j = 0; j <= V; ++j) {
    auto [z, labels] = draw_pair(0, j);
    s.z_slack[j] = z;
    s.c_slack[j] = std::move(labels);
  }
  rebuild_counts(s);
}

}  // namespace eegnn
