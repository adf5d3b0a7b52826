// eegnn: generate | infer | train | report
//
// Exit codes: 0 success, 2 usage error, 3 IO/data error, 4 numerical abort,
// 5 missing dependency artifact.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eegnn/generate.hpp"
#include "eegnn/graph.hpp"
#include "eegnn/manifest.hpp"
#include "eegnn/mcmc.hpp"
#include "eegnn/propagation.hpp"
#include "eegnn/train.hpp"

namespace fs = std::filesystem;
using namespace eegnn;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitMissingArtifact = 5;

struct Common {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config_path;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker thread cap");
  cmd->add_option("--config", c.config_path, "key=value config file");
  cmd->add_option("--out", c.out, "Output directory");
}

// Config precedence: explicit flag > config file > built-in default.
struct Resolver {
  CLI::App* cmd;
  KeyValueConfig cfg;

  bool from_file(const std::string& flag) const {
    return cmd->count(flag) == 0;
  }
  void num(const std::string& flag, const std::string& key, double& v) const {
    if (from_file(flag)) v = cfg.get_double(key, v);
  }
  void num(const std::string& flag, const std::string& key, int& v) const {
    if (from_file(flag)) v = static_cast<int>(cfg.get_int(key, v));
  }
  void num(const std::string& flag, const std::string& key,
           long long& v) const {
    if (from_file(flag)) v = cfg.get_int(key, v);
  }
  void num(const std::string& flag, const std::string& key,
           std::uint64_t& v) const {
    if (from_file(flag)) v = cfg.get_uint(key, v);
  }
  void str(const std::string& flag, const std::string& key,
           std::string& v) const {
    if (from_file(flag)) v = cfg.get_string(key, v);
  }
};

Resolver make_resolver(CLI::App* cmd, const Common& c) {
  Resolver r{cmd, {}};
  if (!c.config_path.empty()) r.cfg = KeyValueConfig::load(c.config_path);
  return r;
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kExitUsage;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void add_input_digest(RunManifest& m, const std::string& path) {
  if (!path.empty()) m.input_digests[path] = fnv1a_hex(fnv1a_digest_file(path));
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  Common common;
  int nodes = 100;
  double kappa = 20.0;
  double alpha = 1.0;
  int kgen = 10;
};

int run_generate(CLI::App* cmd, GenerateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  Resolver r = make_resolver(cmd, a.common);
  r.num("--nodes", "nodes", a.nodes);
  r.num("--kappa", "kappa", a.kappa);
  r.num("--alpha", "alpha", a.alpha);
  r.num("--kgen", "kgen", a.kgen);
  r.num("--seed", "seed", a.common.seed);

  if (a.nodes < 1) return usage_error("--nodes must be >= 1");
  if (!(a.kappa > 0.0)) return usage_error("--kappa must be > 0");
  if (!(a.alpha > 0.0)) return usage_error("--alpha must be > 0");
  if (a.kgen < 1) return usage_error("--kgen must be >= 1");

  fs::create_directories(a.common.out);
  GenParams p;
  p.num_nodes = a.nodes;
  p.kappa_mass = a.kappa;
  p.alpha_dp = a.alpha;
  p.k_gen = a.kgen;
  p.seed = a.common.seed;
  Rng rng(p.seed);
  GenDiagnostics diag;
  MultiGraph mg = generate_multigraph(p, rng, &diag);
  SimpleGraph g = collapse(mg);

  const std::string mg_path = (fs::path(a.common.out) / "multigraph.txt").string();
  const std::string g_path = (fs::path(a.common.out) / "graph.txt").string();
  save_multigraph(mg, mg_path);
  save_simple_graph(g, g_path);

  RunManifest m;
  m.command = "generate";
  m.params = {{"nodes", std::to_string(a.nodes)},
              {"kappa", fmt(a.kappa)},
              {"alpha", fmt(a.alpha)},
              {"kgen", std::to_string(a.kgen)},
              {"seed", std::to_string(a.common.seed)},
              {"threads", std::to_string(a.common.threads)}};
  add_input_digest(m, a.common.config_path);
  m.outputs = {mg_path, g_path};
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  m.save((fs::path(a.common.out) / "manifest.json").string());

  std::cout << "generated " << g.num_nodes() << " nodes, "
            << mg.total_multiplicity() << " latent edge copies, "
            << g.num_edges() << " simple edges (lambda=" << diag.lambda
            << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct InferArgs {
  Common common;
  std::string graph_path;
  long long epochs = 1000;
  double burn_in = 0.2;
  int thin = 10;
  double alpha = 1.0;
  double kappa = 50.0;
  int k_init = 2;
  double hmc_step = 0.01;
  int hmc_leapfrog = 10;
  double mh_scale = 0.3;
  bool no_adapt = false;
  int hist_bins = 20;
};

void write_histogram(const std::map<NodePair, double>& mean, int bins,
                     const std::string& path) {
  // Expected-multiplicity histogram over the observed (off-diagonal) edges.
  std::vector<double> vals;
  for (const auto& [pair, v] : mean)
    if (pair.first != pair.second) vals.push_back(v);
  double hi = 1.0;
  for (double v : vals) hi = std::max(hi, v);
  hi = std::nextafter(hi, hi + 1.0);
  std::vector<long long> count(bins, 0);
  for (double v : vals) {
    int b = static_cast<int>(v / hi * bins);
    b = std::clamp(b, 0, bins - 1);
    ++count[b];
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "bin_lo,bin_hi,count\n";
  for (int b = 0; b < bins; ++b)
    out << fmt(hi * b / bins) << ',' << fmt(hi * (b + 1) / bins) << ','
        << count[b] << "\n";
  if (!out) throw IoError("write failed: " + path);
}

int run_infer(CLI::App* cmd, InferArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  Resolver r = make_resolver(cmd, a.common);
  r.num("--epochs", "epochs", a.epochs);
  r.num("--burn-in", "burn_in", a.burn_in);
  r.num("--thin", "thin", a.thin);
  r.num("--alpha", "alpha", a.alpha);
  r.num("--kappa", "kappa", a.kappa);
  r.num("--k-init", "k_init", a.k_init);
  r.num("--hmc-step", "hmc_step", a.hmc_step);
  r.num("--hmc-leapfrog", "hmc_leapfrog", a.hmc_leapfrog);
  r.num("--mh-scale", "mh_scale", a.mh_scale);
  r.num("--hist-bins", "hist_bins", a.hist_bins);
  r.num("--seed", "seed", a.common.seed);

  if (a.epochs < 1) return usage_error("--epochs must be >= 1");
  if (!(a.burn_in >= 0.0 && a.burn_in < 1.0))
    return usage_error("--burn-in must be in [0, 1)");
  if (a.thin < 1) return usage_error("--thin must be >= 1");
  if (!(a.alpha > 0.0)) return usage_error("--alpha must be > 0");
  if (!(a.kappa > 0.0)) return usage_error("--kappa must be > 0");
  if (a.k_init < 1) return usage_error("--k-init must be >= 1");
  if (!(a.hmc_step > 0.0)) return usage_error("--hmc-step must be > 0");
  if (a.hmc_leapfrog < 1) return usage_error("--hmc-leapfrog must be >= 1");
  if (!(a.mh_scale > 0.0)) return usage_error("--mh-scale must be > 0");
  if (a.hist_bins < 1) return usage_error("--hist-bins must be >= 1");

  SimpleGraph g = load_simple_graph(a.graph_path);

  McmcConfig cfg;
  cfg.alpha_dp = a.alpha;
  cfg.kappa_mass = a.kappa;
  cfg.epochs = a.epochs;
  cfg.burn_in_frac = a.burn_in;
  cfg.thin = a.thin;
  cfg.k_init = a.k_init;
  cfg.hmc_step = a.hmc_step;
  cfg.hmc_leapfrog = a.hmc_leapfrog;
  cfg.mh_scale = a.mh_scale;
  cfg.seed = a.common.seed;
  cfg.adapt_tuning = !a.no_adapt;

  ChainTrace trace;
  try {
    trace = run_chain(g, cfg);
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what()
              << " (last good epoch: " << e.last_good_epoch << ")\n";
    return kExitNumerical;
  }

  fs::create_directories(a.common.out);
  const fs::path out(a.common.out);
  const std::string trace_path = (out / "trace.csv").string();
  const std::string mean_path = (out / "posterior_mult.txt").string();
  const std::string hist_path = (out / "mult_hist.csv").string();
  save_trace_csv(trace, trace_path);
  auto mean = posterior_mean_multiplicity(trace);
  save_multiplicity_map(g.num_nodes(), mean, mean_path);
  write_histogram(mean, a.hist_bins, hist_path);

  // Snapshot archive: per-snapshot multiplicity files plus an index CSV.
  fs::create_directories(out / "snapshots");
  const std::string index_path = (out / "snapshots" / "index.csv").string();
  std::ofstream index(index_path);
  if (!index) throw IoError("cannot open for writing: " + index_path);
  index << "snapshot,epoch,file\n";
  std::vector<std::string> outputs = {trace_path, mean_path, hist_path,
                                      index_path};
  for (std::size_t t = 0; t < trace.snapshots.size(); ++t) {
    char name[48];
    std::snprintf(name, sizeof(name), "snapshot_%05zu.txt", t);
    const std::string snap_path = (out / "snapshots" / name).string();
    std::map<NodePair, double> m;
    for (std::size_t e = 0; e < trace.edges.size(); ++e)
      m[trace.edges[e]] =
          static_cast<double>(trace.snapshots[t].z_edge[e]);
    for (int i = 0; i < trace.num_nodes; ++i)
      if (trace.snapshots[t].z_self[i] > 0)
        m[{i, i}] = static_cast<double>(trace.snapshots[t].z_self[i]);
    save_multiplicity_map(g.num_nodes(), m, snap_path);
    index << t << ',' << trace.snapshots[t].epoch << ',' << name << "\n";
    outputs.push_back(snap_path);
  }
  index.close();

  RunManifest m;
  m.command = "infer";
  m.params = {{"graph", a.graph_path},
              {"epochs", std::to_string(a.epochs)},
              {"burn_in", fmt(a.burn_in)},
              {"thin", std::to_string(a.thin)},
              {"alpha", fmt(a.alpha)},
              {"kappa", fmt(a.kappa)},
              {"k_init", std::to_string(a.k_init)},
              {"hmc_step", fmt(a.hmc_step)},
              {"hmc_leapfrog", std::to_string(a.hmc_leapfrog)},
              {"mh_scale", fmt(a.mh_scale)},
              {"adapt", cfg.adapt_tuning ? "1" : "0"},
              {"hist_bins", std::to_string(a.hist_bins)},
              {"seed", std::to_string(a.common.seed)},
              {"threads", std::to_string(a.common.threads)}};
  add_input_digest(m, a.graph_path);
  add_input_digest(m, a.common.config_path);
  m.outputs = outputs;
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  m.save((out / "manifest.json").string());

  if (trace.underflow_warnings > 0)
    std::cerr << "warning: " << trace.underflow_warnings
              << " rate underflows (multiplicity forced to 1)\n";
  std::cout << "inference finished: " << trace.epochs() << " epochs, "
            << trace.snapshots.size() << " snapshots, final log_joint "
            << fmt(trace.log_joint.back()) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string graph_path;
  std::string features_path;
  std::string labels_path;
  std::string split_path;
  std::string snapshots_dir;
  std::string backbone = "sgc";
  std::string edge_mode = "baseline";
  int layers = 2;
  double lr = 0.01;
  double weight_decay = 5e-4;
  long long max_epochs = 1000;
  int patience = 100;
  double appnp_alpha = 0.1;
  double train_frac = 0.6;
  int num_seeds = 1;
};

DmpgmSource load_snapshot_archive(const std::string& dir, int num_nodes) {
  const fs::path index_path = fs::path(dir) / "index.csv";
  std::ifstream in(index_path);
  if (!in) throw IoError("cannot open snapshot index: " + index_path.string());
  std::string line;
  if (!std::getline(in, line) || line != "snapshot,epoch,file")
    throw ParseError(index_path.string() +
                     ": expected header 'snapshot,epoch,file'");
  DmpgmSource src;
  src.num_nodes = num_nodes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string snap_s, epoch_s, file_s;
    if (!std::getline(ss, snap_s, ',') || !std::getline(ss, epoch_s, ',') ||
        !std::getline(ss, file_s))
      throw ParseError(index_path.string() + ": malformed row: " + line);
    auto [n, mult] = load_multiplicity_map((fs::path(dir) / file_s).string());
    if (n != num_nodes)
      throw ValidationError("snapshot node count mismatch in " + file_s);
    src.snapshot_mult.push_back(std::move(mult));
  }
  if (src.snapshot_mult.empty())
    throw ValidationError(index_path.string() + ": no snapshots listed");
  const double inv = 1.0 / static_cast<double>(src.snapshot_mult.size());
  for (const auto& m : src.snapshot_mult)
    for (const auto& [pair, v] : m) src.mean_mult[pair] += inv * v;
  return src;
}

int run_train(CLI::App* cmd, TrainArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  Resolver r = make_resolver(cmd, a.common);
  r.str("--backbone", "backbone", a.backbone);
  r.str("--edge-mode", "edge_mode", a.edge_mode);
  r.num("--layers", "layers", a.layers);
  r.num("--lr", "lr", a.lr);
  r.num("--weight-decay", "weight_decay", a.weight_decay);
  r.num("--max-epochs", "max_epochs", a.max_epochs);
  r.num("--patience", "patience", a.patience);
  r.num("--appnp-alpha", "appnp_alpha", a.appnp_alpha);
  r.num("--train-frac", "train_frac", a.train_frac);
  r.num("--num-seeds", "num_seeds", a.num_seeds);
  r.num("--seed", "seed", a.common.seed);

  TrainConfig cfg;
  if (a.backbone == "sgc")
    cfg.backbone = Backbone::kSgc;
  else if (a.backbone == "appnp")
    cfg.backbone = Backbone::kAppnp;
  else
    return usage_error("--backbone must be sgc or appnp");
  if (a.edge_mode == "baseline")
    cfg.edge_mode = EdgeMode::kPlain;
  else if (a.edge_mode == "ee_mean")
    cfg.edge_mode = EdgeMode::kEeMean;
  else if (a.edge_mode == "ee_sampled")
    cfg.edge_mode = EdgeMode::kEeSampled;
  else
    return usage_error("--edge-mode must be baseline, ee_mean or ee_sampled");
  if (a.layers < 0) return usage_error("--layers must be >= 0");
  if (!(a.lr > 0.0)) return usage_error("--lr must be > 0");
  if (a.weight_decay < 0.0) return usage_error("--weight-decay must be >= 0");
  if (a.max_epochs < 1) return usage_error("--max-epochs must be >= 1");
  if (a.patience < 1) return usage_error("--patience must be >= 1");
  if (!(a.train_frac > 0.0 && a.train_frac < 1.0))
    return usage_error("--train-frac must be in (0, 1)");
  if (a.num_seeds < 1) return usage_error("--num-seeds must be >= 1");

  if (cfg.edge_mode != EdgeMode::kPlain && a.snapshots_dir.empty()) {
    std::cerr << "error: --edge-mode " << a.edge_mode
              << " requires --snapshots\n";
    return kExitMissingArtifact;
  }

  SimpleGraph g = load_simple_graph(a.graph_path);
  auto feats = load_features_csv(a.features_path, g.num_nodes());
  auto [labels, num_classes] = load_labels_csv(a.labels_path, g.num_nodes());
  Matrix x(g.num_nodes(), feats.empty() ? 0 : feats[0].size());
  for (int i = 0; i < g.num_nodes(); ++i)
    for (int f = 0; f < x.cols(); ++f) x(i, f) = feats[i][f];

  DmpgmSource source;
  if (cfg.edge_mode != EdgeMode::kPlain) {
    if (!fs::exists(fs::path(a.snapshots_dir) / "index.csv")) {
      std::cerr << "error: snapshot archive not found: " << a.snapshots_dir
                << "\n";
      return kExitMissingArtifact;
    }
    source = load_snapshot_archive(a.snapshots_dir, g.num_nodes());
  }

  cfg.hops = a.layers;
  cfg.lr = a.lr;
  cfg.weight_decay = a.weight_decay;
  cfg.max_epochs = static_cast<int>(a.max_epochs);
  cfg.patience = a.patience;
  cfg.appnp_alpha = a.appnp_alpha;
  cfg.train_frac = a.train_frac;

  std::vector<bool> fixed_split;
  if (!a.split_path.empty())
    fixed_split = load_split_csv(a.split_path, g.num_nodes());

  fs::create_directories(a.common.out);
  const fs::path out(a.common.out);
  const std::string report_path = (out / "report.csv").string();
  std::ofstream report(report_path);
  if (!report) throw IoError("cannot open for writing: " + report_path);
  report << "seed,backbone,layers,edge_mode,train_acc,test_acc,epochs,loss\n";

  std::vector<std::string> outputs = {report_path};
  for (int sidx = 0; sidx < a.num_seeds; ++sidx) {
    const std::uint64_t seed = a.common.seed + sidx;
    SplitMask split;
    if (!fixed_split.empty()) {
      for (int i = 0; i < g.num_nodes(); ++i)
        (fixed_split[i] ? split.train_idx : split.test_idx).push_back(i);
    } else {
      split = split_mask(g.num_nodes(), cfg.train_frac, seed);
    }
    cfg.seed = seed;
    TrainResult res =
        train(x, labels, num_classes, g,
              cfg.edge_mode == EdgeMode::kPlain ? nullptr : &source, split,
              cfg);
    report << seed << ',' << a.backbone << ',' << a.layers << ','
           << a.edge_mode << ',' << fmt(res.train_accuracy) << ','
           << fmt(res.test_accuracy) << ',' << res.epochs_run << ','
           << fmt(res.final_loss) << "\n";

    char name[32];
    std::snprintf(name, sizeof(name), "seed_%llu.log",
                  static_cast<unsigned long long>(seed));
    const std::string log_path = (out / name).string();
    std::ofstream log(log_path);
    if (!log) throw IoError("cannot open for writing: " + log_path);
    log << "seed=" << seed << "\nbackbone=" << a.backbone
        << "\nlayers=" << a.layers << "\nedge_mode=" << a.edge_mode
        << "\ntrain_acc=" << fmt(res.train_accuracy)
        << "\ntest_acc=" << fmt(res.test_accuracy)
        << "\nepochs=" << res.epochs_run << "\nloss=" << fmt(res.final_loss)
        << "\n";
    outputs.push_back(log_path);
  }
  report.close();

  RunManifest m;
  m.command = "train";
  m.params = {{"graph", a.graph_path},
              {"features", a.features_path},
              {"labels", a.labels_path},
              {"split", a.split_path},
              {"snapshots", a.snapshots_dir},
              {"backbone", a.backbone},
              {"edge_mode", a.edge_mode},
              {"layers", std::to_string(a.layers)},
              {"lr", fmt(a.lr)},
              {"weight_decay", fmt(a.weight_decay)},
              {"max_epochs", std::to_string(a.max_epochs)},
              {"patience", std::to_string(a.patience)},
              {"appnp_alpha", fmt(a.appnp_alpha)},
              {"train_frac", fmt(a.train_frac)},
              {"num_seeds", std::to_string(a.num_seeds)},
              {"seed", std::to_string(a.common.seed)},
              {"threads", std::to_string(a.common.threads)}};
  add_input_digest(m, a.graph_path);
  add_input_digest(m, a.features_path);
  add_input_digest(m, a.labels_path);
  add_input_digest(m, a.split_path);
  add_input_digest(m, a.common.config_path);
  if (!a.snapshots_dir.empty())
    add_input_digest(m, (fs::path(a.snapshots_dir) / "index.csv").string());
  m.outputs = outputs;
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  m.save((out / "manifest.json").string());

  std::cout << "training finished: " << a.num_seeds << " seed(s), report at "
            << report_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  Common common;
  std::vector<std::string> inputs;
};

struct ReportRow {
  std::string backbone;
  std::string layers;
  std::string edge_mode;
  double test_acc = 0.0;
};

int run_report(CLI::App*, ReportArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string expected =
      "seed,backbone,layers,edge_mode,train_acc,test_acc,epochs,loss";
  std::vector<ReportRow> rows;
  std::map<std::string, std::vector<std::string>> layers_seen;
  for (const std::string& path : a.inputs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report: " + path);
    std::string line;
    if (!std::getline(in, line) || line != expected)
      throw ParseError(path + ": schema mismatch, expected header '" +
                       expected + "'");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::vector<std::string> f;
      std::string tok;
      while (std::getline(ss, tok, ',')) f.push_back(tok);
      if (f.size() != 8) throw ParseError(path + ": malformed row: " + line);
      ReportRow row;
      row.backbone = f[1];
      row.layers = f[2];
      row.edge_mode = f[3];
      try {
        row.test_acc = std::stod(f[5]);
      } catch (const std::exception&) {
        throw ParseError(path + ": bad test_acc in row: " + line);
      }
      rows.push_back(row);
      layers_seen[row.layers].push_back(path);
    }
  }
  if (layers_seen.size() > 1) {
    std::string msg = "conflicting layer counts across inputs:";
    for (const auto& [layers, files] : layers_seen) {
      msg += " layers=" + layers + " in";
      for (const auto& f : files) msg += " " + f;
      msg += ";";
    }
    throw ValidationError(msg);
  }

  // Group means and EE-minus-baseline deltas per (backbone, layers).
  std::map<std::tuple<std::string, std::string, std::string>,
           std::pair<double, int>>
      groups;
  for (const auto& row : rows) {
    auto& g = groups[{row.backbone, row.layers, row.edge_mode}];
    g.first += row.test_acc;
    ++g.second;
  }

  fs::create_directories(a.common.out);
  const std::string merged_path =
      (fs::path(a.common.out) / "report_merged.csv").string();
  std::ofstream out(merged_path);
  if (!out) throw IoError("cannot open for writing: " + merged_path);
  out << "backbone,layers,edge_mode,mean_test_acc,delta_vs_baseline\n";
  for (const auto& [key, acc] : groups) {
    const auto& [backbone, layers, edge_mode] = key;
    const double mean = acc.first / acc.second;
    std::string delta;
    if (edge_mode != "baseline") {
      auto base = groups.find({backbone, layers, std::string("baseline")});
      if (base != groups.end())
        delta = fmt(mean - base->second.first / base->second.second);
    }
    out << backbone << ',' << layers << ',' << edge_mode << ',' << fmt(mean)
        << ',' << delta << "\n";
  }
  out.close();

  RunManifest m;
  m.command = "report";
  m.params = {{"inputs", std::to_string(a.inputs.size())},
              {"seed", std::to_string(a.common.seed)},
              {"threads", std::to_string(a.common.threads)}};
  for (const std::string& path : a.inputs) add_input_digest(m, path);
  add_input_digest(m, a.common.config_path);
  m.outputs = {merged_path};
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  m.save((fs::path(a.common.out) / "manifest.json").string());

  std::cout << "merged report at " << merged_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent multigraph inference and edge-enhanced GNN training"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* c_gen = app.add_subcommand("generate", "Sample a graph from the model");
  add_common(c_gen, gen.common);
  c_gen->add_option("--nodes", gen.nodes, "Number of nodes");
  c_gen->add_option("--kappa", gen.kappa, "Base mass parameter");
  c_gen->add_option("--alpha", gen.alpha, "Stick-breaking concentration");
  c_gen->add_option("--kgen", gen.kgen, "Generative truncation level");

  InferArgs inf;
  CLI::App* c_inf = app.add_subcommand("infer", "Run MCMC posterior inference");
  add_common(c_inf, inf.common);
  c_inf->add_option("--graph", inf.graph_path, "Observed edge-list file")
      ->required();
  c_inf->add_option("--epochs", inf.epochs, "MCMC epochs");
  c_inf->add_option("--burn-in", inf.burn_in, "Burn-in fraction");
  c_inf->add_option("--thin", inf.thin, "Snapshot thinning interval");
  c_inf->add_option("--alpha", inf.alpha, "Stick-breaking concentration");
  c_inf->add_option("--kappa", inf.kappa, "Base mass parameter");
  c_inf->add_option("--k-init", inf.k_init, "Initial cluster count");
  c_inf->add_option("--hmc-step", inf.hmc_step, "HMC leapfrog step size");
  c_inf->add_option("--hmc-leapfrog", inf.hmc_leapfrog, "HMC leapfrog steps");
  c_inf->add_option("--mh-scale", inf.mh_scale, "Mass random-walk scale");
  c_inf->add_flag("--no-adapt", inf.no_adapt, "Disable burn-in step tuning");
  c_inf->add_option("--hist-bins", inf.hist_bins,
                    "Bins for the expected-multiplicity histogram");

  TrainArgs tra;
  CLI::App* c_tra = app.add_subcommand("train", "Train a node classifier");
  add_common(c_tra, tra.common);
  c_tra->add_option("--graph", tra.graph_path, "Edge-list file")->required();
  c_tra->add_option("--features", tra.features_path, "Feature CSV")->required();
  c_tra->add_option("--labels", tra.labels_path, "Label CSV")->required();
  c_tra->add_option("--split", tra.split_path, "Fixed split CSV (optional)");
  c_tra->add_option("--snapshots", tra.snapshots_dir,
                    "Posterior snapshot archive (for EE modes)");
  c_tra->add_option("--backbone", tra.backbone, "sgc | appnp");
  c_tra->add_option("--edge-mode", tra.edge_mode,
                    "baseline | ee_mean | ee_sampled");
  c_tra->add_option("--layers", tra.layers, "Propagation depth L");
  c_tra->add_option("--lr", tra.lr, "Learning rate");
  c_tra->add_option("--weight-decay", tra.weight_decay, "L2 penalty");
  c_tra->add_option("--max-epochs", tra.max_epochs, "Max training epochs");
  c_tra->add_option("--patience", tra.patience, "Early-stopping patience");
  c_tra->add_option("--appnp-alpha", tra.appnp_alpha, "Teleport probability");
  c_tra->add_option("--train-frac", tra.train_frac, "Training fraction");
  c_tra->add_option("--num-seeds", tra.num_seeds, "Seeds per run");

  ReportArgs rep;
  CLI::App* c_rep = app.add_subcommand("report", "Merge training reports");
  add_common(c_rep, rep.common);
  c_rep->add_option("inputs", rep.inputs, "Report CSV files")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_gen->parsed()) return run_generate(c_gen, gen);
    if (c_inf->parsed()) return run_infer(c_inf, inf);
    if (c_tra->parsed()) return run_train(c_tra, tra);
    if (c_rep->parsed()) return run_report(c_rep, rep);
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IndexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
