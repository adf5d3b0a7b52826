#include "eegnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eegnn {

DmpgmSource DmpgmSource::from_trace(const ChainTrace& trace) {
  DmpgmSource src;
  src.num_nodes = trace.num_nodes;
  src.mean_mult = posterior_mean_multiplicity(trace);
  src.snapshot_mult.reserve(trace.snapshots.size());
  for (const auto& snap : trace.snapshots) {
    std::map<NodePair, double> m;
    for (std::size_t e = 0; e < trace.edges.size(); ++e)
      m[trace.edges[e]] = static_cast<double>(snap.z_edge[e]);
    for (int i = 0; i < trace.num_nodes; ++i)
      if (snap.z_self[i] > 0)
        m[{i, i}] = static_cast<double>(snap.z_self[i]);
    src.snapshot_mult.push_back(std::move(m));
  }
  return src;
}

SplitMask split_mask(int num_nodes, double train_frac, std::uint64_t seed) {
  if (num_nodes < 1) throw ValidationError("split_mask: num_nodes must be >= 1");
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw ValidationError("split_mask: train_frac must be in (0, 1)");
  std::vector<int> perm(num_nodes);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const int n_train = std::max(
      1, static_cast<int>(std::llround(train_frac * num_nodes)));
  SplitMask mask;
  mask.train_idx.assign(perm.begin(), perm.begin() + n_train);
  mask.test_idx.assign(perm.begin() + n_train, perm.end());
  std::sort(mask.train_idx.begin(), mask.train_idx.end());
  std::sort(mask.test_idx.begin(), mask.test_idx.end());
  return mask;
}

Matrix sgc_forward(const Matrix& z, const SgcModel& model) {
  return (z * model.w).rowwise() + model.b;
}

double evaluate_accuracy(const Matrix& logits, const std::vector<int>& labels,
                         const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  long long correct = 0;
  for (int i : idx) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    if (static_cast<int>(best) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

// Row-stable softmax of the train rows; fills the scaled gradient
// (prob - onehot)/n_train on train rows, zero elsewhere. Returns the mean
// negative log-likelihood over the train rows.
double softmax_cross_entropy(const Matrix& logits,
                             const std::vector<int>& labels,
                             const std::vector<int>& train_idx, Matrix* grad) {
  if (grad) *grad = Matrix::Zero(logits.rows(), logits.cols());
  double nll = 0.0;
  const double inv = 1.0 / static_cast<double>(train_idx.size());
  for (int i : train_idx) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::RowVectorXd p = (logits.row(i).array() - mx).exp();
    const double denom = p.sum();
    p /= denom;
    nll -= std::log(std::max(p(labels[i]), 1e-300));
    if (grad) {
      grad->row(i) = inv * p;
      (*grad)(i, labels[i]) -= inv;
    }
  }
  return nll * inv;
}

namespace {

PropagationMatrix operator_for(const SimpleGraph& g, const DmpgmSource* source,
                               EdgeMode mode, int snapshot) {
  switch (mode) {
    case EdgeMode::kPlain:
      return build_p_tilde(g);
    case EdgeMode::kEeMean:
      if (!source || source->mean_mult.empty())
        throw ValidationError("enhanced mode requires posterior snapshots");
      return build_p_hat(g.num_nodes(), source->mean_mult);
    case EdgeMode::kEeSampled:
      if (!source || source->snapshot_mult.empty())
        throw ValidationError("enhanced mode requires posterior snapshots");
      return build_p_hat(g.num_nodes(), source->snapshot_mult[snapshot]);
  }
  throw std::logic_error("unreachable edge mode");
}

}  // namespace

TrainResult train(const Matrix& features, const std::vector<int>& labels,
                  int num_classes, const SimpleGraph& g,
                  const DmpgmSource* source, const SplitMask& split,
                  const TrainConfig& cfg) {
  const int n = g.num_nodes();
  if (features.rows() != n)
    throw ValidationError("train: feature rows must match node count");
  if (static_cast<int>(labels.size()) != n)
    throw ValidationError("train: one label per node required");
  if (num_classes < 2) throw ValidationError("train: need >= 2 classes");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw ValidationError("train: label out of range");
  if (split.train_idx.empty() || split.test_idx.empty())
    throw ValidationError("train: both split sides must be non-empty");
  if (cfg.hops < 0 || cfg.max_epochs < 1 || cfg.lr <= 0.0)
    throw ValidationError("train: invalid optimizer settings");

  const int m = static_cast<int>(features.cols());
  const int num_ops =
      cfg.edge_mode == EdgeMode::kEeSampled && source
          ? static_cast<int>(source->snapshot_mult.size())
          : 1;

  // One operator per snapshot (or a single one); SGC additionally caches the
  // fixed propagated features Z = P^L X per operator.
  std::vector<PropagationMatrix> ops;
  std::vector<Matrix> z_cache;
  ops.reserve(num_ops);
  for (int t = 0; t < num_ops; ++t)
    ops.push_back(operator_for(g, source, cfg.edge_mode, t));
  if (cfg.backbone == Backbone::kSgc) {
    z_cache.reserve(num_ops);
    for (const auto& op : ops)
      z_cache.push_back(propagate(op, features, cfg.hops));
  }

  SgcModel model;
  {
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> norm(0.0, 0.1 / std::sqrt(double(m)));
    model.w = Matrix(m, num_classes);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < num_classes; ++c) model.w(r, c) = norm(rng);
    model.b = Eigen::RowVectorXd::Zero(num_classes);
  }

  double best_loss = std::numeric_limits<double>::infinity();
  int stall = 0;
  int epochs_run = 0;
  double loss = 0.0;
  Matrix grad;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const int t = epoch % num_ops;
    Matrix logits;
    Matrix h0;
    if (cfg.backbone == Backbone::kSgc) {
      logits = sgc_forward(z_cache[t], model);
    } else {
      h0 = sgc_forward(features, model);
      logits = appnp_propagate(ops[t], h0, cfg.appnp_alpha, cfg.hops);
    }
    const double data_loss =
        softmax_cross_entropy(logits, labels, split.train_idx, &grad);
    loss = data_loss + 0.5 * cfg.weight_decay * model.w.squaredNorm();

    Matrix dw;
    Eigen::RowVectorXd db;
    if (cfg.backbone == Backbone::kSgc) {
      dw = z_cache[t].transpose() * grad;
      db = grad.colwise().sum();
    } else {
      // The propagation map is a polynomial in the symmetric operator, so it
      // is self-adjoint: pull the gradient back with the same propagation.
      Matrix dh0 = appnp_propagate(ops[t], grad, cfg.appnp_alpha, cfg.hops);
      dw = features.transpose() * dh0;
      db = dh0.colwise().sum();
    }
    dw += cfg.weight_decay * model.w;
    model.w -= cfg.lr * dw;
    model.b -= cfg.lr * db;
    ++epochs_run;

    if (loss < best_loss - 1e-9) {
      best_loss = loss;
      stall = 0;
    } else if (++stall >= cfg.patience) {
      break;
    }
  }

  // Final evaluation; the sampled mode evaluates on the posterior-mean
  // operator so the reported accuracy does not depend on the stopping epoch's
  // position in the snapshot cycle.
  Matrix eval_logits;
  if (cfg.edge_mode == EdgeMode::kEeSampled) {
    PropagationMatrix mean_op =
        operator_for(g, source, EdgeMode::kEeMean, 0);
    if (cfg.backbone == Backbone::kSgc)
      eval_logits = sgc_forward(propagate(mean_op, features, cfg.hops), model);
    else
      eval_logits = appnp_propagate(mean_op, sgc_forward(features, model),
                                    cfg.appnp_alpha, cfg.hops);
  } else if (cfg.backbone == Backbone::kSgc) {
    eval_logits = sgc_forward(z_cache[0], model);
  } else {
    eval_logits = appnp_propagate(ops[0], sgc_forward(features, model),
                                  cfg.appnp_alpha, cfg.hops);
  }

  TrainResult res;
  res.train_accuracy = evaluate_accuracy(eval_logits, labels, split.train_idx);
  res.test_accuracy = evaluate_accuracy(eval_logits, labels, split.test_idx);
  res.final_loss = loss;
  res.epochs_run = epochs_run;
  res.model = std::move(model);
  return res;
}

BenchmarkResult run_benchmark(const Matrix& features,
                              const std::vector<int>& labels, int num_classes,
                              const SimpleGraph& g, const DmpgmSource& source,
                              const TrainConfig& base_cfg,
                              EdgeMode enhanced_mode,
                              const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ValidationError("run_benchmark: need >= 1 seed");
  BenchmarkResult res;
  for (std::uint64_t seed : seeds) {
    SplitMask split = split_mask(g.num_nodes(), base_cfg.train_frac, seed);
    TrainConfig cfg = base_cfg;
    cfg.seed = seed;
    cfg.edge_mode = EdgeMode::kPlain;
    res.baseline.accuracies.push_back(
        train(features, labels, num_classes, g, &source, split, cfg)
            .test_accuracy);
    cfg.edge_mode = enhanced_mode;
    res.enhanced.accuracies.push_back(
        train(features, labels, num_classes, g, &source, split, cfg)
            .test_accuracy);
  }
  auto summarize = [](BenchmarkArm& arm) {
    const double n = static_cast<double>(arm.accuracies.size());
    double mean = 0.0;
    for (double a : arm.accuracies) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : arm.accuracies) var += (a - mean) * (a - mean);
    arm.mean_accuracy = mean;
    arm.std_accuracy = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  };
  summarize(res.baseline);
  summarize(res.enhanced);
  res.delta_points =
      100.0 * (res.enhanced.mean_accuracy - res.baseline.mean_accuracy);
  return res;
}

}  // namespace eegnn
