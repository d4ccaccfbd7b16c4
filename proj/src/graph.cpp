#include "disene/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace disene {

double WeightedSet::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::vector<std::string> node_ids)
    : num_nodes_(num_nodes), edges_(std::move(edges)), node_ids_(std::move(node_ids)) {
  if (!node_ids_.empty() && node_ids_.size() != num_nodes_) {
    throw Error("node id table size does not match node count");
  }
  for (auto& e : edges_) {
    if (e.u == e.v) throw Error("self-loop on node " + std::to_string(e.u));
    if (e.u >= num_nodes_ || e.v >= num_nodes_) {
      throw Error("edge endpoint out of range");
    }
    e = Edge::Canonical(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error("duplicate edge");
  }

  std::vector<std::size_t> degree(num_nodes_, 0);
  for (const auto& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(num_nodes_ + 1, 0);
  for (std::size_t u = 0; u < num_nodes_; ++u) offsets_[u + 1] = offsets_[u] + degree[u];

  std::vector<std::pair<NodeId, EdgeId>> slots(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    slots[cursor[e.u]++] = {e.v, id};
    slots[cursor[e.v]++] = {e.u, id};
  }
  neighbors_.resize(slots.size());
  incident_.resize(slots.size());
  for (std::size_t u = 0; u < num_nodes_; ++u) {
    std::sort(slots.begin() + offsets_[u], slots.begin() + offsets_[u + 1]);
    for (std::size_t i = offsets_[u]; i < offsets_[u + 1]; ++i) {
      neighbors_[i] = slots[i].first;
      incident_[i] = slots[i].second;
    }
  }
}

std::optional<EdgeId> Graph::edge_id(NodeId u, NodeId v) const {
  if (u >= num_nodes_ || v >= num_nodes_ || u == v) return std::nullopt;
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return incident_edges(u)[static_cast<std::size_t>(it - nb.begin())];
}

Graph Graph::Subgraph(std::span<const EdgeId> keep) const {
  std::vector<Edge> kept;
  kept.reserve(keep.size());
  for (EdgeId id : keep) kept.push_back(edges_.at(id));
  return Graph(num_nodes_, std::move(kept), node_ids_);
}

std::vector<int> GroundTruth::EdgeIndex(std::size_t num_edges) const {
  std::vector<int> index(num_edges, -1);
  for (std::size_t c = 0; c < communities.size(); ++c) {
    for (EdgeId e : communities[c].edges) {
      if (e < num_edges && index[e] < 0) index[e] = static_cast<int>(c);
    }
  }
  return index;
}

std::vector<int> GroundTruth::NodeIndex(std::size_t num_nodes) const {
  std::vector<int> index(num_nodes, -1);
  for (std::size_t c = 0; c < communities.size(); ++c) {
    for (NodeId v : communities[c].nodes) {
      if (v < num_nodes && index[v] < 0) index[v] = static_cast<int>(c);
    }
  }
  return index;
}

namespace {

// Union-find over raw token indices, used only while loading.
struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t Find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void Unite(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;  // root is the earliest-seen token
  }
};

}  // namespace

Graph LoadEdgeList(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read edge list: " + path.string());

  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> raw;
  auto intern = [&](const std::string& t) {
    auto [it, inserted] = index.try_emplace(t, tokens.size());
    if (inserted) tokens.push_back(t);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a >> b)) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected two node tokens");
    }
    std::size_t ia = intern(a), ib = intern(b);
    if (ia != ib) raw.emplace_back(std::min(ia, ib), std::max(ia, ib));
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

  DisjointSets sets(tokens.size());
  for (auto [a, b] : raw) sets.Unite(a, b);
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t t = 0; t < tokens.size(); ++t) ++sizes[sets.Find(t)];
  std::size_t best_root = 0, best_size = 0;
  for (auto [root, size] : sizes) {  // ascending root = earliest component first
    if (size > best_size) {
      best_size = size;
      best_root = root;
    }
  }
  if (best_size < 2) throw Error("edge list has fewer than 2 connected nodes: " + path.string());

  std::vector<std::size_t> members;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (sets.Find(t) == best_root) members.push_back(t);
  }
  // Integer tokens keep their numeric order so generated files reload with
  // identical indices; other tokens keep first-seen order.
  auto numeric = [](const std::string& s) {
    return !s.empty() && s.size() < 19 && std::all_of(s.begin(), s.end(), ::isdigit);
  };
  if (std::all_of(members.begin(), members.end(), [&](std::size_t t) { return numeric(tokens[t]); })) {
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return std::stoull(tokens[a]) < std::stoull(tokens[b]);
    });
  }
  std::vector<std::size_t> dense(tokens.size(), SIZE_MAX);
  std::vector<std::string> ids;
  for (std::size_t t : members) {
    dense[t] = ids.size();
    ids.push_back(tokens[t]);
  }
  std::vector<Edge> edges;
  for (auto [a, b] : raw) {
    if (dense[a] != SIZE_MAX) {
      edges.push_back(Edge::Canonical(static_cast<NodeId>(dense[a]), static_cast<NodeId>(dense[b])));
    }
  }
  const std::size_t n = ids.size();
  return Graph(n, std::move(edges), std::move(ids));
}

std::vector<std::optional<int>> LoadLabels(const std::filesystem::path& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read label file: " + path.string());
  std::unordered_map<std::string, NodeId> lookup;
  const auto& ids = g.node_ids();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    lookup.emplace(ids.empty() ? std::to_string(v) : ids[v], v);
  }
  std::vector<std::optional<int>> labels(g.num_nodes());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string token;
    int label = 0;
    if (!(fields >> token >> label)) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected 'node label'");
    }
    // Nodes outside the largest component are ignored.
    if (auto it = lookup.find(token); it != lookup.end()) labels[it->second] = label;
  }
  return labels;
}

GroundTruth CommunitiesFromLabels(const Graph& g, std::span<const std::optional<int>> labels) {
  if (labels.size() != g.num_nodes()) throw Error("label vector size does not match graph");
  GroundTruth truth;
  truth.labels.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!labels[v]) throw Error("node " + std::to_string(v) + " has no label");
    truth.labels[v] = *labels[v];
  }
  std::map<int, Community> by_label;
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const auto& e = g.edge(id);
    int lu = truth.labels[e.u];
    if (lu < 0 || lu != truth.labels[e.v]) continue;
    auto& c = by_label[lu];
    c.edges.push_back(id);
    c.nodes.push_back(e.u);
    c.nodes.push_back(e.v);
  }
  for (auto& [label, c] : by_label) {
    std::sort(c.nodes.begin(), c.nodes.end());
    c.nodes.erase(std::unique(c.nodes.begin(), c.nodes.end()), c.nodes.end());
    truth.communities.push_back(std::move(c));
  }
  return truth;
}

std::vector<Edge> SampleNonEdges(const Graph& g, std::size_t count, Rng& rng) {
  const std::size_t n = g.num_nodes();
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  if (n < 2 || pairs - static_cast<double>(g.num_edges()) < 1.0) {
    if (count == 0) return {};
    throw Error("graph has no non-edges to sample");
  }
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::vector<Edge> out;
  out.reserve(count);
  while (out.size() < count) {
    NodeId a = pick(rng), b = pick(rng);
    if (a == b || g.has_edge(a, b)) continue;
    out.push_back(Edge::Canonical(a, b));
  }
  return out;
}

EdgeSplit SplitEdges(const Graph& g, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test fraction must lie strictly between 0 and 1");
  }
  const auto m = g.num_edges();
  const auto num_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(m)));
  if (num_test == 0 || num_test >= m) throw Error("graph too small to split edges");

  Rng rng(seed);
  std::vector<EdgeId> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  EdgeSplit split;
  split.test_edges.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(num_test));
  split.train_edges.assign(order.begin() + static_cast<std::ptrdiff_t>(num_test), order.end());
  std::sort(split.test_edges.begin(), split.test_edges.end());
  std::sort(split.train_edges.begin(), split.train_edges.end());
  split.test_negatives = SampleNonEdges(g, num_test, rng);
  return split;
}

std::vector<std::uint32_t> Bfs(const Graph& g, NodeId source) {
  std::vector<std::uint32_t> dist(g.num_nodes(), kUnreachable);
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    NodeId u = frontier[head];
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

HopMatrix DistancesToAnchors(const Graph& g, std::span<const NodeId> anchors, int threads) {
  if (anchors.empty()) throw Error("anchor set is empty");
  for (NodeId a : anchors) {
    if (a >= g.num_nodes()) throw Error("anchor out of range");
  }
  HopMatrix out;
  out.anchors.assign(anchors.begin(), anchors.end());
  out.num_nodes = g.num_nodes();
  out.data.resize(anchors.size() * g.num_nodes());

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto d = Bfs(g, anchors[r]);
      std::copy(d.begin(), d.end(), out.data.begin() + static_cast<std::ptrdiff_t>(r * out.num_nodes));
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, anchors.size());
  if (workers == 1) {
    run(0, anchors.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (anchors.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t b = w * chunk, e = std::min(anchors.size(), b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
  }
  return out;
}

HopMatrix AllPairsDistances(const Graph& g, int threads) {
  std::vector<NodeId> all(g.num_nodes());
  std::iota(all.begin(), all.end(), 0);
  return DistancesToAnchors(g, all, threads);
}

namespace {
std::string Token(const Graph& g, NodeId v) {
  return g.node_ids().empty() ? std::to_string(v) : g.node_ids()[v];
}
}  // namespace

void WriteEdgeList(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : g.edges()) out << Token(g, e.u) << ' ' << Token(g, e.v) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

void WriteLabels(const Graph& g, std::span<const int> labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (NodeId v = 0; v < g.num_nodes(); ++v) out << Token(g, v) << ' ' << labels[v] << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace disene
