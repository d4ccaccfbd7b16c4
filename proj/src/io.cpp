#include "disene/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace disene {

namespace fs = std::filesystem;

namespace {

std::ofstream OpenOut(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream OpenIn(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error("cannot read " + path.string());
  return in;
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void PutU32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                        static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated binary embedding");
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

}  // namespace

void WriteEmbeddingText(const Matrix& H, const fs::path& path) {
  auto out = OpenOut(path);
  out << H.rows() << ' ' << H.cols() << '\n';
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    for (Eigen::Index c = 0; c < H.cols(); ++c) {
      if (c) out << ' ';
      out << FormatDouble(H(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Matrix ReadEmbeddingText(const fs::path& path) {
  auto in = OpenIn(path);
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) throw Error("bad embedding header in " + path.string());
  Matrix H(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      if (!(in >> H(r, c))) throw Error("truncated embedding file " + path.string());
    }
  }
  return H;
}

void WriteEmbeddingBinary(const Matrix& H, const fs::path& path) {
  auto out = OpenOut(path, std::ios::out | std::ios::binary);
  PutU32(out, static_cast<std::uint32_t>(H.rows()));
  PutU32(out, static_cast<std::uint32_t>(H.cols()));
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    for (Eigen::Index c = 0; c < H.cols(); ++c) PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(H(r, c))));
  }
  if (!out) throw Error("write failed: " + path.string());
}

Matrix ReadEmbeddingBinary(const fs::path& path) {
  auto in = OpenIn(path, std::ios::in | std::ios::binary);
  const auto rows = GetU32(in);
  const auto cols = GetU32(in);
  Matrix H(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) H(r, c) = std::bit_cast<float>(GetU32(in));
  }
  return H;
}

Json ToJson(const LossTerms& terms) {
  return Json{{"total", terms.total}, {"rw", terms.rw}, {"dis", terms.dis}, {"ent", terms.ent}};
}

Json ToJson(const MaybeScalar& value) {
  if (value.has_value()) return *value.value;
  return nullptr;
}

void WriteCheckpoint(const fs::path& dir, const Matrix& H, const Json& sidecar) {
  fs::create_directories(dir);
  WriteEmbeddingText(H, dir / "embedding.txt");
  WriteEmbeddingBinary(H, dir / "embedding.bin");
  WriteJson(sidecar, dir / "checkpoint.json");
}

Checkpoint ReadCheckpoint(const fs::path& dir) {
  Checkpoint ckpt;
  ckpt.H = ReadEmbeddingText(dir / "embedding.txt");
  ckpt.sidecar = ReadJson(dir / "checkpoint.json");
  return ckpt;
}

Json ExplanationToJson(const Explanation& explanation) {
  Json dims = Json::array();
  for (std::size_t d = 0; d < explanation.dims.size(); ++d) {
    const auto& dim = explanation.dims[d];
    dims.push_back({{"dim", d},
                    {"mean_product", explanation.context.mean_products[static_cast<Eigen::Index>(d)]},
                    {"edges", dim.mask.keys},
                    {"weights", dim.mask.weights}});
  }
  return Json{{"num_dims", explanation.dims.size()}, {"empty_dims", explanation.num_empty()}, {"dims", dims}};
}

void WriteExplanationJson(const Explanation& explanation, const fs::path& path) {
  WriteJson(ExplanationToJson(explanation), path);
}

void WriteExplanationTriplets(const Explanation& explanation, const Graph& g, const fs::path& path) {
  auto out = OpenOut(path);
  out << "u,v,weight,dim\n";
  for (std::size_t d = 0; d < explanation.dims.size(); ++d) {
    const auto& mask = explanation.dims[d].mask;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const auto& e = g.edge(mask.keys[i]);
      out << NodeToken(g, e.u) << ',' << NodeToken(g, e.v) << ',' << FormatDouble(mask.weights[i]) << ','
          << d << '\n';
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

void WriteGroundTruthJson(const GroundTruth& truth, std::size_t num_edges, const fs::path& path) {
  Json communities = Json::array();
  for (const auto& c : truth.communities) communities.push_back(c.edges);
  WriteJson(Json{{"num_edges", num_edges}, {"communities", communities}}, path);
}

GroundTruth ReadGroundTruthJson(const fs::path& path, const Graph& g, const fs::path& edge_file) {
  const Json doc = ReadJson(path);
  if (!doc.contains("communities") || !doc["communities"].is_array()) {
    throw Error(path.string() + ": missing \"communities\" array");
  }
  const auto lines = ReadTokenPairs(edge_file);
  std::unordered_map<std::string, NodeId> node_of;
  for (NodeId u = 0; u < g.num_nodes(); ++u) node_of.emplace(NodeToken(g, u), u);
  auto resolve = [&](std::size_t line) -> std::optional<EdgeId> {
    if (line >= lines.size()) throw Error(path.string() + ": edge index " + std::to_string(line) + " out of range");
    auto a = node_of.find(lines[line].first), b = node_of.find(lines[line].second);
    if (a == node_of.end() || b == node_of.end()) return std::nullopt;
    return g.edge_id(a->second, b->second);
  };

  GroundTruth truth;
  truth.labels.assign(g.num_nodes(), -1);
  for (const auto& list : doc["communities"]) {
    Community c;
    for (const auto& idx : list) {
      if (auto e = resolve(idx.get<std::size_t>())) c.edges.push_back(*e);
    }
    std::sort(c.edges.begin(), c.edges.end());
    c.edges.erase(std::unique(c.edges.begin(), c.edges.end()), c.edges.end());
    if (c.edges.empty()) continue;
    for (EdgeId e : c.edges) {
      c.nodes.push_back(g.edge(e).u);
      c.nodes.push_back(g.edge(e).v);
    }
    std::sort(c.nodes.begin(), c.nodes.end());
    c.nodes.erase(std::unique(c.nodes.begin(), c.nodes.end()), c.nodes.end());
    const int index = static_cast<int>(truth.communities.size());
    for (NodeId u : c.nodes) {
      if (truth.labels[u] < 0) truth.labels[u] = index;
    }
    truth.communities.push_back(std::move(c));
  }
  return truth;
}

Json ToJson(const MetricsReport& report) {
  Json j;
  j["metadata"] = report.metadata;
  j["comprehensibility"] = report.comprehensibility_mean ? Json(*report.comprehensibility_mean) : Json(nullptr);
  j["sparsity"] = report.sparsity_score;
  if (report.ovc) {
    j["ovc"] = ToJson(*report.ovc);
    if (!report.ovc->has_value()) j["ovc_reason"] = report.ovc->reason;
  }
  if (report.poc) {
    j["poc"] = ToJson(*report.poc);
    if (!report.poc->has_value()) j["poc_reason"] = report.poc->reason;
  }
  j["empty_dims"] = report.empty_dims;
  if (!report.auc_pr.empty()) j["auc_pr"] = report.auc_pr;
  Json dims = Json::array();
  for (std::size_t d = 0; d < report.per_dimension.size(); ++d) {
    const auto& m = report.per_dimension[d];
    dims.push_back({{"dim", d},
                    {"comprehensibility", m.comprehensibility},
                    {"best_community", m.best_community},
                    {"sparsity", m.sparsity},
                    {"num_edges", m.num_edges}});
  }
  j["per_dimension"] = dims;
  return j;
}

void WriteJson(const Json& value, const fs::path& path) {
  auto out = OpenOut(path);
  out << value.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

Json ReadJson(const fs::path& path) {
  auto in = OpenIn(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void WriteInstanceCsv(const TaskResult& result, const Graph& g, const fs::path& path) {
  auto out = OpenOut(path);
  out << "instance,g_index,plausibility\n";
  for (const auto& inst : result.instances) {
    if (result.task == TaskKind::kLinkPrediction) {
      const auto& e = g.edge(inst.key);
      out << NodeToken(g, e.u) << '-' << NodeToken(g, e.v);
    } else {
      out << NodeToken(g, inst.key);
    }
    out << ',' << inst.community << ',' << FormatDouble(inst.plausibility) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Json ToJson(const TaskResult& result) {
  Json j{{"task", std::string(ToString(result.task))}, {"auc_pr", result.auc_pr}};
  j["plausibility"] = result.mean_plausibility ? Json(*result.mean_plausibility) : Json(nullptr);
  j["evaluated"] = result.evaluated;
  j["skipped"] = result.skipped;
  return j;
}

std::vector<std::pair<std::string, std::string>> ReadTokenPairs(const fs::path& path) {
  auto in = OpenIn(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a >> b)) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected two tokens");
    }
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

std::string NodeToken(const Graph& g, NodeId u) {
  return g.node_ids().empty() ? std::to_string(u) : g.node_ids()[u];
}

}  // namespace disene
