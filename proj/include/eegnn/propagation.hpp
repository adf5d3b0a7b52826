#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "eegnn/graph.hpp"

namespace eegnn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Symmetric propagation operator in CSR form.
struct PropagationMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n+1
  std::vector<int> col;
  std::vector<double> val;

  int nnz() const { return static_cast<int>(col.size()); }
};

/// Degree-normalized operator D^{-1/2} A D^{-1/2} built from a real-valued
/// multiplicity map over unordered pairs (diagonal entries allowed, no extra
/// identity added). Rows with zero weighted degree stay identically zero.
/// Throws ValidationError on out-of-range pairs or negative/non-finite values.
PropagationMatrix build_p_hat(int num_nodes,
                              const std::map<NodePair, double>& multiplicity);

/// Renormalized-adjacency operator (D+I)^{-1/2} (A+I) (D+I)^{-1/2}; built by
/// handing build_p_hat the unit multiplicity map of the graph plus diagonal.
PropagationMatrix build_p_tilde(const SimpleGraph& g);

/// P^L X via repeated sparse-dense products.
Matrix propagate(const PropagationMatrix& p, const Matrix& x, int hops);

/// Personalized-PageRank style propagation:
/// H^{l+1} = (1 - alpha) P H^l + alpha H^0, L iterations from H^0.
Matrix appnp_propagate(const PropagationMatrix& p, const Matrix& h0,
                       double alpha, int hops);

Matrix to_dense(const PropagationMatrix& p);

/// Text round-trip: header "n <N> nnz <M>", then one "row col value" line per
/// stored entry, values at full precision.
void save_triplets(const PropagationMatrix& p, const std::string& path);
PropagationMatrix load_triplets(const std::string& path);

}  // namespace eegnn
