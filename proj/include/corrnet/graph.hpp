#pragma once

#include <set>
#include <utility>
#include <vector>

#include "corrnet/types.hpp"

namespace corrnet {

using Edge = std::pair<Index, Index>;

// Directed graph; an edge (from, to) means `from` influences `to`.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(Index n) : n_(n) {}

  Index n() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  void add_edge(Index from, Index to);
  bool has_edge(Index from, Index to) const { return edges_.count({from, to}) > 0; }

  std::vector<Index> parents(Index j) const;
  std::vector<Index> children(Index j) const;

 private:
  Index n_ = 0;
  std::set<Edge> edges_;
};

// Undirected simple graph. Edges are stored as (i, j) with i < j.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(Index n) : n_(n) {}

  Index n() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  void add_edge(Index i, Index j);
  bool has_edge(Index i, Index j) const;
  std::vector<std::vector<Index>> adjacency() const;

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

 private:
  Index n_ = 0;
  std::set<Edge> edges_;
};

using Topology = UndirectedGraph;
using CorrelationGraph = UndirectedGraph;

// Undirected image of the edge set.
Topology topology_of(const DirectedGraph& g);
// Parents, children and spouses of every node.
Topology kin_graph(const DirectedGraph& g);

// Every node pair inside each group becomes an edge.
UndirectedGraph union_of_cliques(Index n, const std::vector<std::vector<Index>>& groups);

}  // namespace corrnet
