#include "disene/synth.hpp"

#include <algorithm>
#include <set>

namespace disene {

std::string_view ToString(SynthKind kind) {
  switch (kind) {
    case SynthKind::kRingCliques: return "ring";
    case SynthKind::kSbmCliques: return "sbm";
    case SynthKind::kBaCliques: return "ba";
    case SynthKind::kErCliques: return "er";
  }
  return "?";
}

SynthKind ParseSynthKind(std::string_view name) {
  if (name == "ring" || name == "ring_cliques") return SynthKind::kRingCliques;
  if (name == "sbm" || name == "sbm_cliques") return SynthKind::kSbmCliques;
  if (name == "ba" || name == "ba_cliques") return SynthKind::kBaCliques;
  if (name == "er" || name == "er_cliques") return SynthKind::kErCliques;
  throw Error("unknown synthetic kind: " + std::string(name));
}

SynthSpec DefaultSpec(SynthKind kind) {
  SynthSpec spec;
  spec.kind = kind;
  switch (kind) {
    case SynthKind::kRingCliques:
      spec.base_nodes = 0;
      spec.noise_edges = 147;  // 1619 - (32*45 + 32)
      break;
    case SynthKind::kSbmCliques:
      spec.base_nodes = 0;
      spec.sbm_p_out = 517.0 / 49600.0;  // (1957 - 1440) / inter-block pairs
      break;
    case SynthKind::kBaCliques:
      spec.ba_m = 5;
      break;
    case SynthKind::kErCliques:
      spec.er_p = 2724.0 / 51040.0;  // (4196 - 1440 - 32) / C(320, 2)
      break;
  }
  return spec;
}

void Validate(const SynthSpec& spec) {
  if (spec.num_cliques < 1) throw Error("num_cliques must be >= 1");
  if (spec.clique_size < 2) throw Error("clique_size must be >= 2");
  if (spec.er_p < 0.0 || spec.er_p > 1.0) throw Error("er_p must lie in [0,1]");
  if (spec.sbm_p_out < 0.0 || spec.sbm_p_out > 1.0) throw Error("sbm_p_out must lie in [0,1]");
  const bool needs_base = spec.kind == SynthKind::kBaCliques || spec.kind == SynthKind::kErCliques;
  if (needs_base) {
    if (spec.base_nodes < 2) throw Error("base graph needs at least 2 nodes");
    if (spec.attach_edges_per_clique < 1) throw Error("attach_edges_per_clique must be >= 1");
  }
  if (spec.kind == SynthKind::kBaCliques && (spec.ba_m < 1 || spec.ba_m >= spec.base_nodes)) {
    throw Error("ba_m must satisfy 1 <= ba_m < base_nodes");
  }
}

namespace {

using EdgeSet = std::set<Edge>;

bool Connected(std::size_t n, const EdgeSet& edges) {
  if (n == 0) return true;
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

// Preferential attachment: m seed nodes, every new node links to m distinct
// targets drawn from the degree-weighted repeated-node list.
EdgeSet BarabasiAlbert(std::size_t n, std::size_t m, Rng& rng) {
  EdgeSet edges;
  std::vector<NodeId> repeated;
  std::vector<NodeId> targets(m);
  for (std::size_t i = 0; i < m; ++i) targets[i] = static_cast<NodeId>(i);
  for (std::size_t source = m; source < n; ++source) {
    for (NodeId t : targets) {
      edges.insert(Edge::Canonical(static_cast<NodeId>(source), t));
      repeated.push_back(t);
      repeated.push_back(static_cast<NodeId>(source));
    }
    std::set<NodeId> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
    while (chosen.size() < m) chosen.insert(repeated[pick(rng)]);
    targets.assign(chosen.begin(), chosen.end());
  }
  return edges;
}

EdgeSet ErdosRenyi(std::size_t n, double p, Rng& rng) {
  EdgeSet edges;
  std::bernoulli_distribution coin(p);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.insert({u, v});
    }
  }
  return edges;
}

}  // namespace

SyntheticGraph GenerateSynthetic(const SynthSpec& spec) {
  Validate(spec);
  const bool has_base = spec.kind == SynthKind::kBaCliques || spec.kind == SynthKind::kErCliques;
  const std::size_t base = has_base ? spec.base_nodes : 0;
  const std::size_t k = spec.clique_size;
  const std::size_t n = base + spec.num_cliques * k;
  auto clique_node = [&](std::size_t c, std::size_t i) { return static_cast<NodeId>(base + c * k + i); };

  Rng rng(spec.seed);
  EdgeSet edges;

  if (spec.kind == SynthKind::kBaCliques) {
    edges = BarabasiAlbert(base, spec.ba_m, rng);
  } else if (spec.kind == SynthKind::kErCliques) {
    constexpr int kMaxRetries = 100;
    for (int attempt = 0;; ++attempt) {
      Rng base_rng(DeriveSeed(spec.seed, static_cast<std::uint64_t>(attempt)));
      edges = ErdosRenyi(base, spec.er_p, base_rng);
      if (Connected(base, edges)) break;
      if (attempt + 1 >= kMaxRetries) throw Error("could not draw a connected ER base graph");
    }
  }

  for (std::size_t c = 0; c < spec.num_cliques; ++c) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) edges.insert({clique_node(c, i), clique_node(c, j)});
    }
  }

  switch (spec.kind) {
    case SynthKind::kRingCliques:
      if (spec.num_cliques > 1) {
        for (std::size_t c = 0; c < spec.num_cliques; ++c) {
          std::size_t next = (c + 1) % spec.num_cliques;
          edges.insert(Edge::Canonical(clique_node(c, k - 1), clique_node(next, 0)));
        }
      }
      break;
    case SynthKind::kSbmCliques: {
      std::bernoulli_distribution coin(spec.sbm_p_out);
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
          if (u / k != v / k && coin(rng)) edges.insert({u, v});
        }
      }
      break;
    }
    case SynthKind::kBaCliques:
    case SynthKind::kErCliques: {
      std::uniform_int_distribution<std::size_t> pick_base(0, base - 1);
      std::uniform_int_distribution<std::size_t> pick_member(0, k - 1);
      for (std::size_t c = 0; c < spec.num_cliques; ++c) {
        std::size_t added = 0;
        while (added < spec.attach_edges_per_clique) {
          auto e = Edge::Canonical(clique_node(c, pick_member(rng)), static_cast<NodeId>(pick_base(rng)));
          if (edges.insert(e).second) ++added;
        }
      }
      break;
    }
  }

  if (spec.noise_edges > 0) {
    const double capacity = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    if (static_cast<double>(edges.size() + spec.noise_edges) > capacity) {
      throw Error("not enough non-edges for the requested noise edges");
    }
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    std::size_t added = 0;
    while (added < spec.noise_edges) {
      NodeId a = pick(rng), b = pick(rng);
      if (a != b && edges.insert(Edge::Canonical(a, b)).second) ++added;
    }
  }

  SyntheticGraph out;
  out.graph = Graph(n, std::vector<Edge>(edges.begin(), edges.end()));
  out.truth.labels.assign(n, -1);
  out.truth.communities.resize(spec.num_cliques);
  for (std::size_t c = 0; c < spec.num_cliques; ++c) {
    auto& community = out.truth.communities[c];
    for (std::size_t i = 0; i < k; ++i) {
      community.nodes.push_back(clique_node(c, i));
      out.truth.labels[clique_node(c, i)] = static_cast<int>(c);
      for (std::size_t j = i + 1; j < k; ++j) {
        community.edges.push_back(*out.graph.edge_id(clique_node(c, i), clique_node(c, j)));
      }
    }
    std::sort(community.edges.begin(), community.edges.end());
  }
  return out;
}

}  // namespace disene
