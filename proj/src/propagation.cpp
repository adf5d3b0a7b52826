#include "eegnn/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eegnn {

PropagationMatrix build_p_hat(int num_nodes,
                              const std::map<NodePair, double>& multiplicity) {
  if (num_nodes < 0) throw ValidationError("num_nodes must be >= 0");

  // Symmetrize into per-row entry lists; the map stores unordered pairs.
  std::vector<std::vector<std::pair<int, double>>> rows(num_nodes);
  std::vector<double> degree(num_nodes, 0.0);
  for (const auto& [pair, v] : multiplicity) {
    const auto [i, j] = pair;
    if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes || i > j)
      throw ValidationError("multiplicity key out of range: (" +
                            std::to_string(i) + ", " + std::to_string(j) + ")");
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("multiplicity values must be finite and >= 0");
    if (v == 0.0) continue;
    rows[i].push_back({j, v});
    degree[i] += v;
    if (i != j) {
      rows[j].push_back({i, v});
      degree[j] += v;
    }
  }

  std::vector<double> inv_sqrt(num_nodes, 0.0);
  for (int i = 0; i < num_nodes; ++i)
    if (degree[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

  PropagationMatrix p;
  p.n = num_nodes;
  p.row_ptr.assign(num_nodes + 1, 0);
  for (int i = 0; i < num_nodes; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    p.row_ptr[i + 1] = p.row_ptr[i] + static_cast<int>(rows[i].size());
    for (const auto& [j, v] : rows[i]) {
      p.col.push_back(j);
      p.val.push_back(v * inv_sqrt[i] * inv_sqrt[j]);
    }
  }
  return p;
}

PropagationMatrix build_p_tilde(const SimpleGraph& g) {
  std::map<NodePair, double> mult;
  for (const NodePair& e : g.edges()) mult[e] = 1.0;
  for (int i = 0; i < g.num_nodes(); ++i) mult[{i, i}] = 1.0;
  return build_p_hat(g.num_nodes(), mult);
}

namespace {

Matrix spmm(const PropagationMatrix& p, const Matrix& x) {
  Matrix y = Matrix::Zero(p.n, x.cols());
  for (int i = 0; i < p.n; ++i)
    for (int idx = p.row_ptr[i]; idx < p.row_ptr[i + 1]; ++idx)
      y.row(i) += p.val[idx] * x.row(p.col[idx]);
  return y;
}

}  // namespace

Matrix propagate(const PropagationMatrix& p, const Matrix& x, int hops) {
  if (x.rows() != p.n)
    throw ValidationError("propagate: feature rows must match operator size");
  if (hops < 0) throw ValidationError("propagate: hops must be >= 0");
  Matrix h = x;
  for (int l = 0; l < hops; ++l) h = spmm(p, h);
  return h;
}

Matrix appnp_propagate(const PropagationMatrix& p, const Matrix& h0,
                       double alpha, int hops) {
  if (h0.rows() != p.n)
    throw ValidationError("appnp_propagate: rows must match operator size");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("appnp_propagate: alpha must be in [0, 1]");
  if (hops < 0) throw ValidationError("appnp_propagate: hops must be >= 0");
  Matrix h = h0;
  for (int l = 0; l < hops; ++l) h = (1.0 - alpha) * spmm(p, h) + alpha * h0;
  return h;
}

Matrix to_dense(const PropagationMatrix& p) {
  Matrix d = Matrix::Zero(p.n, p.n);
  for (int i = 0; i < p.n; ++i)
    for (int idx = p.row_ptr[i]; idx < p.row_ptr[i + 1]; ++idx)
      d(i, p.col[idx]) = p.val[idx];
  return d;
}

void save_triplets(const PropagationMatrix& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "n " << p.n << " nnz " << p.nnz() << "\n";
  char buf[96];
  for (int i = 0; i < p.n; ++i)
    for (int idx = p.row_ptr[i]; idx < p.row_ptr[i + 1]; ++idx) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, p.col[idx],
                    p.val[idx]);
      out << buf;
    }
  if (!out) throw IoError("write failed: " + path);
}

PropagationMatrix load_triplets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string tag_n, tag_nnz;
  int n = -1, nnz = -1;
  if (!(in >> tag_n >> n >> tag_nnz >> nnz) || tag_n != "n" ||
      tag_nnz != "nnz" || n < 0 || nnz < 0)
    throw ParseError(path + ": expected header 'n <N> nnz <M>'");

  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (int e = 0; e < nnz; ++e) {
    int i = -1, j = -1;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw ParseError(path + ": truncated triplet list");
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ValidationError(path + ": triplet index out of range");
    if (!std::isfinite(v))
      throw ValidationError(path + ": non-finite triplet value");
    rows[i].push_back({j, v});
  }
  PropagationMatrix p;
  p.n = n;
  p.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    p.row_ptr[i + 1] = p.row_ptr[i] + static_cast<int>(rows[i].size());
    for (const auto& [j, v] : rows[i]) {
      p.col.push_back(j);
      p.val.push_back(v);
    }
  }
  return p;
}

}  // namespace eegnn
