#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "eegnn/mcmc.hpp"
#include "eegnn/propagation.hpp"

namespace eegnn {

enum class Backbone { kSgc, kAppnp };
enum class EdgeMode { kPlain, kEeMean, kEeSampled };

struct TrainConfig {
  Backbone backbone = Backbone::kSgc;
  EdgeMode edge_mode = EdgeMode::kPlain;
  int hops = 2;
  double appnp_alpha = 0.1;
  double lr = 0.01;
  double weight_decay = 5e-4;
  int max_epochs = 1000;
  int patience = 100;
  double train_frac = 0.6;
  std::uint64_t seed = 0;
};

/// Posterior edge information the enhanced modes draw on: the posterior-mean
/// multiplicity map and the per-snapshot multiplicity maps.
struct DmpgmSource {
  int num_nodes = 0;
  std::map<NodePair, double> mean_mult;
  std::vector<std::map<NodePair, double>> snapshot_mult;

  static DmpgmSource from_trace(const ChainTrace& trace);
};

struct SplitMask {
  std::vector<int> train_idx;
  std::vector<int> test_idx;
};

/// Random node split with round(train_frac * n) training nodes.
SplitMask split_mask(int num_nodes, double train_frac, std::uint64_t seed);

/// Linear classifier head shared by both backbones.
struct SgcModel {
  Matrix w;               // features x classes
  Eigen::RowVectorXd b;   // classes
};

Matrix sgc_forward(const Matrix& z, const SgcModel& model);

/// Mean softmax cross-entropy over the listed rows; when `grad` is non-null
/// it receives d(loss)/d(logits) (zero outside the listed rows). Shared by
/// the optimizer and the gradient-fidelity checks.
double softmax_cross_entropy(const Matrix& logits,
                             const std::vector<int>& labels,
                             const std::vector<int>& train_idx,
                             Matrix* grad = nullptr);

double evaluate_accuracy(const Matrix& logits, const std::vector<int>& labels,
                         const std::vector<int>& idx);

struct TrainResult {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double final_loss = 0.0;
  int epochs_run = 0;
  SgcModel model;
};

/// Full-batch gradient descent on softmax cross-entropy with L2 decay on the
/// weight matrix only; early stopping on the training loss. Enhanced edge
/// modes require `source` (ValidationError otherwise); the sampled mode
/// cycles through the snapshots epoch by epoch with cached propagations.
TrainResult train(const Matrix& features, const std::vector<int>& labels,
                  int num_classes, const SimpleGraph& g,
                  const DmpgmSource* source, const SplitMask& split,
                  const TrainConfig& cfg);

struct BenchmarkArm {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> accuracies;
};

struct BenchmarkResult {
  BenchmarkArm baseline;
  BenchmarkArm enhanced;
  double delta_points = 0.0;  // 100 * (enhanced mean - baseline mean)
};

/// Trains the plain and enhanced variants under identical per-seed splits and
/// initializations and reports the paired accuracy difference.
BenchmarkResult run_benchmark(const Matrix& features,
                              const std::vector<int>& labels, int num_classes,
                              const SimpleGraph& g, const DmpgmSource& source,
                              const TrainConfig& base_cfg,
                              EdgeMode enhanced_mode,
                              const std::vector<std::uint64_t>& seeds);

}  // namespace eegnn
