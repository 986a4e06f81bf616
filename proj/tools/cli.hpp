#pragma once

// Command-line front end. Kept in a header so the test suites can drive it
// in-process; tools/main.cpp is a thin wrapper.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "mstab/error.hpp"
#include "mstab/graph.hpp"
#include "mstab/harness.hpp"
#include "mstab/io.hpp"
#include "mstab/metrics.hpp"
#include "mstab/objective.hpp"
#include "mstab/spectral.hpp"
#include "mstab/vp.hpp"

namespace mstab::cli {

inline constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return in;
}

/// Writes via a temporary file and rename so readers never see a partial file.
inline void write_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename onto '" + path + "': " + ec.message());
}

struct GraphInput {
  std::string path;
  bool one_based = false;
  std::string lfr_communities;
};

struct LoadedGraph {
  Graph graph;
  std::optional<GroundTruth> truth;
};

inline LoadedGraph load_graph(const GraphInput& in) {
  auto net = open_input(in.path);
  if (!in.lfr_communities.empty()) {
    auto com = open_input(in.lfr_communities);
    auto lg = load_lfr(net, com);
    return {std::move(lg.graph), std::move(lg.truth)};
  }
  return {load_edge_list(net, in.one_based ? IndexBase::One : IndexBase::Zero), std::nullopt};
}

inline json graph_digest(const Graph& g) {
  return {{"n", g.num_nodes()}, {"m", g.total_weight()}, {"edges", g.edges().size()}, {"sha256", sha256_hex(serialise(g))}};
}

inline json diagnostics_json(const VPDiagnostics& d) {
  json levels = json::array();
  for (const auto& l : d.levels)
    levels.push_back({{"level", l.level}, {"inputs", l.inputs}, {"groups", l.groups}, {"sweeps", l.sweeps}, {"moves", l.moves}});
  return {{"levels", levels}, {"objective_trajectory", d.objective_trajectory}, {"monotone", d.monotone}};
}

inline json record_json(const ScanRecord& r) {
  json j;
  j["time"] = r.mode == EmbeddingMode::Modularity ? json(nullptr) : json(r.time);
  j["dim"] = r.dim;
  j["mode"] = std::string(to_string(r.mode));
  j["num_communities"] = r.num_communities;
  j["objective"] = r.objective;
  j["partition"] = r.partition.labels();
  if (r.nmi) j["nmi"] = *r.nmi;
  if (r.uncertainty) j["uncertainty"] = *r.uncertainty;
  if (r.vi_prev) j["vi_prev"] = *r.vi_prev;
  j["diagnostics"] = diagnostics_json(r.diagnostics);
  return j;
}

inline json optional_json(const std::optional<long long>& v) { return v ? json(*v) : json(nullptr); }
inline json path_json(const std::string& s) { return s.empty() ? json(nullptr) : json(s); }

inline void emit(const json& report, const std::string& output, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (output.empty())
    out << text;
  else
    write_atomically(output, text);
}

inline SpectralBasis obtain_basis(const Graph& g, BasisSource source, const std::string& basis_path) {
  if (basis_path.empty()) return decompose(g, source);
  auto in = open_input(basis_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedLine, "basis dump '" + basis_path + "': " + e.what());
  }
  SpectralBasis b = basis_from_json(j);
  if (b.source != source)
    throw Error(ErrorCode::ModeBasisMismatch, "basis dump holds a " + std::string(to_string(b.source)) + " basis");
  if (static_cast<std::size_t>(b.size()) != g.num_nodes())
    throw Error(ErrorCode::SizeMismatch, "basis dump size differs from the graph");
  return b;
}

inline Eigen::Index resolve_dim(const std::optional<long long>& dim, const Graph& g) {
  if (!dim) return static_cast<Eigen::Index>(g.num_nodes()) - 1;
  return static_cast<Eigen::Index>(*dim);
}

inline std::string format_eigenvalue(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << (std::abs(v) < 1e-12 ? 0.0 : v);
  return os.str();
}

/**
 * Subcommands:
 *   decompose GRAPH [--source transition|modularity] [--output DUMP]
 *   partition GRAPH [--mode M] [--time T] [--dim D] [--restarts R] [--seed S] [--output JSON]
 *   scan GRAPH [--tmin --tmax --npoints --mode --dim --restarts --seed --truth FILE --output JSON]
 *   compare A B [--sankey JSON]
 * Returns the process exit code: 0 on success, the ErrorCode value on
 * library errors, 2 on flag errors.
 */
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale community detection by vector partitioning of spectral embeddings", "mstab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GraphInput graph_in;
  auto add_graph = [&](CLI::App* sub) {
    sub->add_option("graph", graph_in.path, "Edge list (i j [w]) or LFR network.dat")->required();
    sub->add_flag("--one-based", graph_in.one_based, "Edge list node ids start at 1");
    sub->add_option("--lfr-communities", graph_in.lfr_communities,
                    "Read GRAPH as LFR network.dat with this community.dat");
  };

  // decompose
  std::string source_name = "transition", dump_path;
  auto* dec = app.add_subcommand("decompose", "Eigendecomposition of the transition or modularity matrix");
  add_graph(dec);
  dec->add_option("--source", source_name, "transition|modularity")->check(CLI::IsMember({"transition", "modularity"}));
  dec->add_option("--output", dump_path, "Write the basis dump (JSON) here");

  // partition / scan shared
  std::string mode_name = "exponential", output, basis_path, partition_out, truth_path;
  double time = 1.0, tmin = 0.01, tmax = 10.0;
  std::optional<long long> dim;
  int restarts = 5, npoints = 25;
  std::uint64_t seed = 0;
  auto add_vp = [&](CLI::App* sub) {
    add_graph(sub);
    sub->add_option("--mode", mode_name, "exponential|linearised|modularity")
        ->check(CLI::IsMember({"exponential", "linearised", "modularity"}));
    sub->add_option("--dim", dim, "Retained eigendirections (default n-1)")->check(CLI::PositiveNumber);
    sub->add_option("--restarts", restarts, "Natural order plus restarts-1 shuffled sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for shuffled sweeps");
    sub->add_option("--output", output, "Write the JSON report here instead of stdout");
    sub->add_option("--basis", basis_path, "Reuse a basis dump from 'decompose'");
  };
  auto* part = app.add_subcommand("partition", "Optimise one embedding");
  add_vp(part);
  part->add_option("--time", time, "Markov time (exponential) or resolution (linearised)");
  part->add_option("--partition-out", partition_out, "Also write 'node_id group_id' lines here");

  auto* scan = app.add_subcommand("scan", "Scan a log-spaced grid of Markov times");
  add_vp(scan);
  scan->add_option("--tmin", tmin, "Smallest time");
  scan->add_option("--tmax", tmax, "Largest time");
  scan->add_option("--npoints", npoints, "Grid points")->check(CLI::PositiveNumber);
  scan->add_option("--truth", truth_path, "Ground-truth partition file ('node_id group_id')");

  std::string part_a, part_b, sankey_path;
  auto* cmp = app.add_subcommand("compare", "Compare two partition files");
  cmp->add_option("a", part_a, "Reference partition (treated as truth)")->required();
  cmp->add_option("b", part_b, "Computed partition")->required();
  cmp->add_option("--sankey", sankey_path, "Write Sankey links (JSON) here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::InvalidArgument);
  }

  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  };

  try {
    if (*dec) {
      const Graph g = load_graph(graph_in).graph;
      const SpectralBasis basis = decompose(g, parse_basis_source(source_name));
      if (!dump_path.empty()) write_atomically(dump_path, basis_to_json(basis).dump() + "\n");
      for (Eigen::Index k = 0; k < basis.size(); ++k) out << format_eigenvalue(basis.eigenvalues(k)) << "\n";
      return 0;
    }

    if (*part) {
      const Graph g = load_graph(graph_in).graph;
      const EmbeddingMode mode = parse_embedding_mode(mode_name);
      const SpectralBasis basis = obtain_basis(g, required_source(mode), basis_path);
      const Embedding emb = build_embedding(basis, mode, time, resolve_dim(dim, g));
      VPConfig cfg;
      cfg.seed = seed;
      VPResult res = best_of_restarts(emb, cfg, restarts);

      ScanRecord rec;
      rec.time = time;
      rec.mode = mode;
      rec.dim = emb.dim();
      rec.objective = res.objective;
      rec.num_communities = res.partition.num_groups();
      rec.partition = res.partition;
      rec.diagnostics = std::move(res.diagnostics);

      json report;
      report["version"] = kVersion;
      report["command"] = "partition";
      report["graph"] = graph_digest(g);
      report["params"] = {{"graph", graph_in.path},
                          {"one_based", graph_in.one_based},
                          {"lfr_communities", path_json(graph_in.lfr_communities)},
                          {"mode", mode_name},
                          {"time", mode == EmbeddingMode::Modularity ? json(nullptr) : json(time)},
                          {"dim", optional_json(dim)},
                          {"restarts", restarts},
                          {"seed", seed},
                          {"basis", path_json(basis_path)}};
      report["records"] = json::array({record_json(rec)});
      if (!partition_out.empty()) {
        std::ostringstream p;
        write_partition(p, res.partition);
        write_atomically(partition_out, p.str());
      }
      report["timing_ms"] = elapsed_ms();
      emit(report, output, out);
      return 0;
    }

    if (*scan) {
      LoadedGraph lg = load_graph(graph_in);
      const Graph& g = lg.graph;
      const EmbeddingMode mode = parse_embedding_mode(mode_name);
      std::optional<GroundTruth> truth = std::move(lg.truth);
      if (!truth_path.empty()) {
        auto in = open_input(truth_path);
        truth = read_partition(in);
      }
      if (truth) require_same_size(g.num_nodes(), truth->size(), "truth partition vs graph");
      const auto grid = geometric_grid(tmin, tmax, npoints);
      VPConfig cfg;
      cfg.seed = seed;
      const auto scan_dim = dim ? std::optional<Eigen::Index>(*dim) : std::nullopt;
      const std::vector<ScanRecord> records =
          basis_path.empty() ? time_scan(g, grid, mode, scan_dim, cfg, restarts, truth)
                             : time_scan(obtain_basis(g, BasisSource::Transition, basis_path), grid, mode, scan_dim,
                                         cfg, restarts, truth);

      json report;
      report["version"] = kVersion;
      report["command"] = "scan";
      report["graph"] = graph_digest(g);
      report["params"] = {{"graph", graph_in.path},
                          {"one_based", graph_in.one_based},
                          {"lfr_communities", path_json(graph_in.lfr_communities)},
                          {"mode", mode_name},
                          {"tmin", tmin},
                          {"tmax", tmax},
                          {"npoints", npoints},
                          {"dim", optional_json(dim)},
                          {"restarts", restarts},
                          {"seed", seed},
                          {"truth", path_json(truth_path)},
                          {"basis", path_json(basis_path)}};
      json recs = json::array();
      for (const auto& r : records) recs.push_back(record_json(r));
      report["records"] = std::move(recs);
      report["timing_ms"] = elapsed_ms();
      emit(report, output, out);
      return 0;
    }

    if (*cmp) {
      auto in_a = open_input(part_a);
      auto in_b = open_input(part_b);
      const Partition a = read_partition(in_a);
      const Partition b = read_partition(in_b);
      require_same_size(a.size(), b.size(), "compared partitions");
      out << std::setprecision(10);
      out << "nmi " << nmi(a, b) << "\n";
      out << "uncertainty " << uncertainty_coefficient(a, b) << "\n";
      out << "vi " << variation_of_information(a, b) << "\n";
      if (!sankey_path.empty()) write_atomically(sankey_path, json(sankey_links(a, b)).dump(2) + "\n");
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mstab::cli
