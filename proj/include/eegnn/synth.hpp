#pragma once

#include <cstdint>

#include "eegnn/propagation.hpp"

namespace eegnn {

/// Parameters of the synthetic community benchmark generator: a planted
/// partition with gamma-distributed node sociabilities and Gaussian
/// class-conditional features.
struct SynthParams {
  int num_nodes = 200;
  int num_classes = 5;
  int feature_dim = 32;
  long long target_edges = 400;    // exact unordered simple-edge count
  double p_in = 0.9;               // share of intra-community edge proposals
  double sociability_shape = 2.0;  // Gamma shape of per-node sociability
  double feature_signal = 1.0;     // class-mean scale
  double feature_noise = 1.0;      // per-node isotropic noise scale
  std::uint64_t seed = 0;
};

struct SynthDataset {
  SimpleGraph graph;
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;
};

/// Deterministic given the parameters; the graph has exactly target_edges
/// edges, no self-loops, no duplicates. Throws ValidationError when the
/// target is infeasible or cannot be reached.
SynthDataset make_community_dataset(const SynthParams& p);

}  // namespace eegnn
