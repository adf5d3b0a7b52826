#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eegnn {

// Error hierarchy used by the loaders and the CLI exit-code mapping.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using NodePair = std::pair<int, int>;

inline NodePair unordered_pair(int i, int j) {
  return i <= j ? NodePair{i, j} : NodePair{j, i};
}

/// Undirected, loop-free simple graph. Immutable after construction.
class SimpleGraph {
 public:
  SimpleGraph() = default;

  /// Validates and builds the CSR symmetric closure. Edges may be given in
  /// any order/orientation; duplicates and self-loops throw ValidationError,
  /// out-of-range ids throw IndexError.
  static SimpleGraph from_edges(int num_nodes, std::vector<NodePair> edges);

  int num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }

  /// Unordered edge list, sorted, each pair with first < second.
  const std::vector<NodePair>& edges() const { return edges_; }

  /// Number of distinct neighbors of i.
  int degree(int i) const;

  bool has_edge(int i, int j) const;

  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }

 private:
  int num_nodes_ = 0;
  std::vector<NodePair> edges_;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
};

/// Integer multigraph over unordered node pairs; diagonal entries are
/// self-loop counts. Zero multiplicities are never stored.
struct MultiGraph {
  int num_nodes = 0;
  std::map<NodePair, long long> mult;

  void add(int i, int j, long long m = 1);
  long long total_multiplicity() const;
};

/// Drops the diagonal and collapses positive multiplicities to unit edges.
SimpleGraph collapse(const MultiGraph& mg);

// --- file formats -----------------------------------------------------------
//
// Edge list:   "nodes <N>" header, then one "i j" pair per line.
// Multigraph:  "nodes <N>" header, then "i j mult" lines.
// Features:    CSV with header "node,f0,...,f{m-1}", one row per node.
// Labels:      CSV "node,class".
// Split:       CSV "node,split", split in {train,test}.

SimpleGraph load_simple_graph(const std::string& path);
void save_simple_graph(const SimpleGraph& g, const std::string& path);

/// Loader variant accepting arbitrary node tokens; returns the graph and the
/// token -> dense id mapping in first-appearance order. Input must still be
/// loop-free and duplicate-free under the mapping.
std::pair<SimpleGraph, std::vector<std::string>> load_simple_graph_remapped(
    const std::string& path);
void save_id_map(const std::vector<std::string>& ids, const std::string& path);

MultiGraph load_multigraph(const std::string& path);
void save_multigraph(const MultiGraph& mg, const std::string& path);

/// Real-valued multiplicity map (posterior means); same text layout as the
/// multigraph file but with real-valued entries.
void save_multiplicity_map(int num_nodes,
                           const std::map<NodePair, double>& mult,
                           const std::string& path);
std::pair<int, std::map<NodePair, double>> load_multiplicity_map(
    const std::string& path);

std::vector<std::vector<double>> load_features_csv(const std::string& path,
                                                   int num_nodes);
void save_features_csv(const std::vector<std::vector<double>>& x,
                       const std::string& path);

/// Labels as dense class ids in [0, C); returns (labels, num_classes).
std::pair<std::vector<int>, int> load_labels_csv(const std::string& path,
                                                 int num_nodes);
void save_labels_csv(const std::vector<int>& y, const std::string& path);

/// Split mask: true = train, false = test.
std::vector<bool> load_split_csv(const std::string& path, int num_nodes);
void save_split_csv(const std::vector<bool>& train_mask,
                    const std::string& path);

}  // namespace eegnn
