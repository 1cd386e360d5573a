#pragma once

#include <vector>

#include "corrnet/graph.hpp"

namespace corrnet {

struct MaximalCliqueSet {
  // Each clique sorted ascending, list sorted lexicographically.
  std::vector<std::vector<Index>> cliques;

  Index q() const { return static_cast<Index>(cliques.size()); }
};

inline constexpr Index kMaxCliqueNodes = 10000;

// Maximal cliques of size >= 2 (Bron-Kerbosch with pivoting).
MaximalCliqueSet maximal_cliques(const UndirectedGraph& g);

}  // namespace corrnet
