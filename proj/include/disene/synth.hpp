#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "disene/graph.hpp"

namespace disene {

enum class SynthKind { kRingCliques, kSbmCliques, kBaCliques, kErCliques };

std::string_view ToString(SynthKind kind);
// Accepts "ring", "sbm", "ba", "er" and the long forms ("ring_cliques", ...).
SynthKind ParseSynthKind(std::string_view name);

struct SynthSpec {
  SynthKind kind = SynthKind::kRingCliques;
  std::size_t num_cliques = 32;
  std::size_t clique_size = 10;
  std::size_t base_nodes = 320;
  std::size_t attach_edges_per_clique = 1;
  double er_p = 0.0;
  double sbm_p_out = 0.0;
  std::size_t ba_m = 5;
  std::size_t noise_edges = 0;
  std::uint64_t seed = 1;
};

// Defaults calibrated against the published benchmark sizes:
// ring 320/1619, sbm 320/1957, ba 640/~3138, er 640/4196 (nodes/edges).
SynthSpec DefaultSpec(SynthKind kind);

void Validate(const SynthSpec& spec);

struct SyntheticGraph {
  Graph graph;
  GroundTruth truth;
};

// Base nodes (ba/er) take indices [0, base_nodes); clique c occupies the
// next clique_size indices. Clique nodes carry label c, base nodes -1.
SyntheticGraph GenerateSynthetic(const SynthSpec& spec);

}  // namespace disene
