#include "corrnet/graph.hpp"

#include <algorithm>

namespace corrnet {

void DirectedGraph::add_edge(Index from, Index to) {
  if (from == to) throw ValidationError("self-loop in directed graph");
  if (from < 0 || to < 0 || from >= n_ || to >= n_) throw ValidationError("edge endpoint out of range");
  edges_.insert({from, to});
}

std::vector<Index> DirectedGraph::parents(Index j) const {
  std::vector<Index> p;
  for (const auto& [a, b] : edges_)
    if (b == j) p.push_back(a);
  return p;
}

std::vector<Index> DirectedGraph::children(Index j) const {
  std::vector<Index> c;
  for (const auto& [a, b] : edges_)
    if (a == j) c.push_back(b);
  return c;
}

void UndirectedGraph::add_edge(Index i, Index j) {
  if (i == j) throw ValidationError("self-loop in undirected graph");
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ValidationError("edge endpoint out of range");
  edges_.insert({std::min(i, j), std::max(i, j)});
}

bool UndirectedGraph::has_edge(Index i, Index j) const {
  return edges_.count({std::min(i, j), std::max(i, j)}) > 0;
}

std::vector<std::vector<Index>> UndirectedGraph::adjacency() const {
  std::vector<std::vector<Index>> adj(n_);
  for (const auto& [a, b] : edges_) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

Topology topology_of(const DirectedGraph& g) {
  Topology t(g.n());
  for (const auto& [a, b] : g.edges()) t.add_edge(a, b);
  return t;
}

Topology kin_graph(const DirectedGraph& g) {
  Topology t = topology_of(g);
  // spouses: distinct parents of a common child
  for (Index c = 0; c < g.n(); ++c) {
    std::vector<Index> pa = g.parents(c);
    for (size_t a = 0; a < pa.size(); ++a)
      for (size_t b = a + 1; b < pa.size(); ++b) t.add_edge(pa[a], pa[b]);
  }
  return t;
}

UndirectedGraph union_of_cliques(Index n, const std::vector<std::vector<Index>>& groups) {
  UndirectedGraph g(n);
  for (const auto& grp : groups)
    for (size_t a = 0; a < grp.size(); ++a)
      for (size_t b = a + 1; b < grp.size(); ++b) g.add_edge(grp[a], grp[b]);
  return g;
}

}  // namespace corrnet
