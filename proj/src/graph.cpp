#include "eegnn/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace eegnn {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  return out;
}

int read_nodes_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": missing 'nodes <N>' header");
  std::istringstream ls(line);
  std::string tag;
  long long n = -1;
  if (!(ls >> tag >> n) || tag != "nodes" || n < 0)
    throw ParseError(path + ": malformed header line: '" + line + "'");
  return static_cast<int>(n);
}

// Splits a CSV line; no quoting support (the formats here never need it).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SimpleGraph SimpleGraph::from_edges(int num_nodes, std::vector<NodePair> edges) {
  SimpleGraph g;
  g.num_nodes_ = num_nodes;
  for (auto& [i, j] : edges) {
    if (i == j)
      throw ValidationError("self-loop (" + std::to_string(i) + "," +
                            std::to_string(j) + ") not allowed");
    if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes)
      throw IndexError("node id out of range in edge (" + std::to_string(i) +
                       "," + std::to_string(j) + "), num_nodes=" +
                       std::to_string(num_nodes));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t e = 1; e < edges.size(); ++e) {
    if (edges[e] == edges[e - 1])
      throw ValidationError("duplicate unordered pair (" +
                            std::to_string(edges[e].first) + "," +
                            std::to_string(edges[e].second) + ")");
  }
  g.edges_ = std::move(edges);

  std::vector<int> deg(num_nodes, 0);
  for (auto [i, j] : g.edges_) {
    ++deg[i];
    ++deg[j];
  }
  g.row_offsets_.assign(num_nodes + 1, 0);
  for (int i = 0; i < num_nodes; ++i)
    g.row_offsets_[i + 1] = g.row_offsets_[i] + deg[i];
  g.col_indices_.resize(g.row_offsets_.back());
  std::vector<int> fill(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (auto [i, j] : g.edges_) {
    g.col_indices_[fill[i]++] = j;
    g.col_indices_[fill[j]++] = i;
  }
  for (int i = 0; i < num_nodes; ++i)
    std::sort(g.col_indices_.begin() + g.row_offsets_[i],
              g.col_indices_.begin() + g.row_offsets_[i + 1]);
  return g;
}

int SimpleGraph::degree(int i) const {
  if (i < 0 || i >= num_nodes_)
    throw IndexError("degree: node " + std::to_string(i) + " out of range");
  return row_offsets_[i + 1] - row_offsets_[i];
}

bool SimpleGraph::has_edge(int i, int j) const {
  if (i < 0 || i >= num_nodes_ || j < 0 || j >= num_nodes_) return false;
  auto b = col_indices_.begin() + row_offsets_[i];
  auto e = col_indices_.begin() + row_offsets_[i + 1];
  return std::binary_search(b, e, j);
}

void MultiGraph::add(int i, int j, long long m) {
  if (m <= 0) return;
  mult[unordered_pair(i, j)] += m;
}

long long MultiGraph::total_multiplicity() const {
  long long t = 0;
  for (const auto& [p, m] : mult) t += m;
  return t;
}

SimpleGraph collapse(const MultiGraph& mg) {
  std::vector<NodePair> edges;
  for (const auto& [p, m] : mg.mult) {
    if (p.first != p.second && m >= 1) edges.push_back(p);
  }
  return SimpleGraph::from_edges(mg.num_nodes, std::move(edges));
}

SimpleGraph load_simple_graph(const std::string& path) {
  auto in = open_input(path);
  int n = read_nodes_header(in, path);
  std::vector<NodePair> edges;
  std::string line;
  int lineno = 1;
  std::vector<int> bad_lines;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    long long i, j;
    if (line.empty() || line == "\r") continue;
    std::string extra;
    if (!(ls >> i >> j) || (ls >> extra))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": malformed edge line: '" + line + "'");
    if (i == j) bad_lines.push_back(lineno);
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  if (!bad_lines.empty()) {
    std::string msg = path + ": self-loop rows at lines:";
    for (int l : bad_lines) msg += " " + std::to_string(l);
    throw ValidationError(msg);
  }
  // Re-scan for duplicates so the diagnostic can name offending lines.
  {
    std::map<NodePair, int> first_seen;
    std::vector<std::string> dups;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto key = unordered_pair(edges[e].first, edges[e].second);
      auto [it, inserted] = first_seen.emplace(key, static_cast<int>(e) + 2);
      if (!inserted)
        dups.push_back("line " + std::to_string(e + 2) + " duplicates line " +
                       std::to_string(it->second));
    }
    if (!dups.empty()) {
      std::string msg = path + ": duplicate unordered pairs:";
      for (const auto& d : dups) msg += " [" + d + "]";
      throw ValidationError(msg);
    }
  }
  return SimpleGraph::from_edges(n, std::move(edges));
}

void save_simple_graph(const SimpleGraph& g, const std::string& path) {
  auto out = open_output(path);
  out << "nodes " << g.num_nodes() << "\n";
  for (auto [i, j] : g.edges()) out << i << " " << j << "\n";
  if (!out) throw IoError("write failed: " + path);
}

std::pair<SimpleGraph, std::vector<std::string>> load_simple_graph_remapped(
    const std::string& path) {
  auto in = open_input(path);
  int n = read_nodes_header(in, path);
  (void)n;  // declared count is advisory in remapping mode
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> order;
  std::vector<NodePair> edges;
  std::string line;
  int lineno = 1;
  auto intern = [&](const std::string& tok) {
    auto [it, inserted] = ids.emplace(tok, static_cast<int>(order.size()));
    if (inserted) order.push_back(tok);
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": malformed edge line: '" + line + "'");
    const int ia = intern(a);  // sequenced: interning order defines the ids
    const int ib = intern(b);
    edges.emplace_back(ia, ib);
  }
  return {SimpleGraph::from_edges(static_cast<int>(order.size()),
                                  std::move(edges)),
          std::move(order)};
}

void save_id_map(const std::vector<std::string>& ids, const std::string& path) {
  auto out = open_output(path);
  out << "id,original\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << i << "," << ids[i] << "\n";
  if (!out) throw IoError("write failed: " + path);
}

MultiGraph load_multigraph(const std::string& path) {
  auto in = open_input(path);
  MultiGraph mg;
  mg.num_nodes = read_nodes_header(in, path);
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    long long i, j, m;
    std::string extra;
    if (!(ls >> i >> j >> m) || (ls >> extra))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": malformed multiplicity line: '" + line + "'");
    if (i < 0 || j < 0 || i >= mg.num_nodes || j >= mg.num_nodes)
      throw IndexError(path + ":" + std::to_string(lineno) +
                       ": node id out of range");
    if (m < 1)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": multiplicity must be >= 1");
    auto key = unordered_pair(static_cast<int>(i), static_cast<int>(j));
    if (mg.mult.count(key))
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": duplicate pair");
    mg.mult[key] = m;
  }
  return mg;
}

void save_multigraph(const MultiGraph& mg, const std::string& path) {
  auto out = open_output(path);
  out << "nodes " << mg.num_nodes << "\n";
  for (const auto& [p, m] : mg.mult)
    out << p.first << " " << p.second << " " << m << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void save_multiplicity_map(int num_nodes,
                           const std::map<NodePair, double>& mult,
                           const std::string& path) {
  auto out = open_output(path);
  out << "nodes " << num_nodes << "\n";
  char buf[64];
  for (const auto& [p, m] : mult) {
    std::snprintf(buf, sizeof(buf), "%.17g", m);
    out << p.first << " " << p.second << " " << buf << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::pair<int, std::map<NodePair, double>> load_multiplicity_map(
    const std::string& path) {
  auto in = open_input(path);
  int n = read_nodes_header(in, path);
  std::map<NodePair, double> mult;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    int i, j;
    double m;
    if (!(ls >> i >> j >> m))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": malformed line: '" + line + "'");
    mult[unordered_pair(i, j)] = m;
  }
  return {n, std::move(mult)};
}

std::vector<std::vector<double>> load_features_csv(const std::string& path,
                                                   int num_nodes) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty feature file");
  auto header = split_csv(line);
  if (header.empty() || header[0] != "node")
    throw ParseError(path + ": feature header must start with 'node'");
  const std::size_t m = header.size() - 1;
  std::vector<std::vector<double>> x(num_nodes);
  std::vector<bool> seen(num_nodes, false);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != m + 1)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(m + 1) + " columns");
    int node = std::stoi(cells[0]);
    if (node < 0 || node >= num_nodes)
      throw IndexError(path + ":" + std::to_string(lineno) +
                       ": node id out of range");
    if (seen[node])
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": duplicate node row");
    seen[node] = true;
    auto& row = x[node];
    row.resize(m);
    for (std::size_t c = 0; c < m; ++c) row[c] = std::stod(cells[c + 1]);
  }
  for (int i = 0; i < num_nodes; ++i)
    if (!seen[i])
      throw ValidationError(path + ": missing feature row for node " +
                            std::to_string(i));
  return x;
}

void save_features_csv(const std::vector<std::vector<double>>& x,
                       const std::string& path) {
  auto out = open_output(path);
  const std::size_t m = x.empty() ? 0 : x[0].size();
  out << "node";
  for (std::size_t c = 0; c < m; ++c) out << ",f" << c;
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << i;
    for (double v : x[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::pair<std::vector<int>, int> load_labels_csv(const std::string& path,
                                                 int num_nodes) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"node", "class"})
    throw ParseError(path + ": label header must be 'node,class'");
  std::vector<int> y(num_nodes, -1);
  int lineno = 1;
  int max_class = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != 2)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 2 columns");
    int node = std::stoi(cells[0]);
    int cls = std::stoi(cells[1]);
    if (node < 0 || node >= num_nodes)
      throw IndexError(path + ":" + std::to_string(lineno) + ": node id out of range");
    if (cls < 0)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": negative class");
    if (y[node] != -1)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate node row");
    y[node] = cls;
    max_class = std::max(max_class, cls);
  }
  for (int i = 0; i < num_nodes; ++i)
    if (y[i] == -1)
      throw ValidationError(path + ": missing label for node " + std::to_string(i));
  return {std::move(y), max_class + 1};
}

void save_labels_csv(const std::vector<int>& y, const std::string& path) {
  auto out = open_output(path);
  out << "node,class\n";
  for (std::size_t i = 0; i < y.size(); ++i) out << i << "," << y[i] << "\n";
  if (!out) throw IoError("write failed: " + path);
}

std::vector<bool> load_split_csv(const std::string& path, int num_nodes) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"node", "split"})
    throw ParseError(path + ": split header must be 'node,split'");
  std::vector<bool> mask(num_nodes, false);
  std::vector<bool> seen(num_nodes, false);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != 2)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 2 columns");
    int node = std::stoi(cells[0]);
    if (node < 0 || node >= num_nodes)
      throw IndexError(path + ":" + std::to_string(lineno) + ": node id out of range");
    if (seen[node])
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate node row");
    seen[node] = true;
    if (cells[1] == "train")
      mask[node] = true;
    else if (cells[1] == "test")
      mask[node] = false;
    else
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": split must be 'train' or 'test'");
  }
  for (int i = 0; i < num_nodes; ++i)
    if (!seen[i])
      throw ValidationError(path + ": missing split for node " + std::to_string(i));
  return mask;
}

void save_split_csv(const std::vector<bool>& train_mask, const std::string& path) {
  auto out = open_output(path);
  out << "node,split\n";
  for (std::size_t i = 0; i < train_mask.size(); ++i)
    out << i << "," << (train_mask[i] ? "train" : "test") << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace eegnn
