#include "corrnet/cliques.hpp"

#include <algorithm>
#include <iterator>

namespace corrnet {

namespace {

using Set = std::vector<Index>;

Set intersect(const Set& a, const Set& b) {
  Set r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

struct BronKerbosch {
  const std::vector<Set>& adj;
  std::vector<Set>& out;

  void run(Set& r, Set p, Set x) {
    if (p.empty() && x.empty()) {
      if (r.size() >= 2) {
        Set c = r;
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
      }
      return;
    }
    // pivot maximizing |P n N(u)| over P u X
    Index pivot = -1;
    size_t best = 0;
    for (const Set* s : {&p, &x})
      for (Index u : *s) {
        size_t k = intersect(p, adj[u]).size();
        if (pivot < 0 || k > best) {
          pivot = u;
          best = k;
        }
      }
    Set candidates;
    std::set_difference(p.begin(), p.end(), adj[pivot].begin(), adj[pivot].end(), std::back_inserter(candidates));
    for (Index v : candidates) {
      r.push_back(v);
      run(r, intersect(p, adj[v]), intersect(x, adj[v]));
      r.pop_back();
      p.erase(std::lower_bound(p.begin(), p.end(), v));
      x.insert(std::lower_bound(x.begin(), x.end(), v), v);
    }
  }
};

}  // namespace

MaximalCliqueSet maximal_cliques(const UndirectedGraph& g) {
  if (g.n() > kMaxCliqueNodes) throw ValidationError("clique enumeration refused above 10^4 nodes");
  std::vector<Set> adj = g.adjacency();
  MaximalCliqueSet res;
  Set r, p(g.n()), x;
  for (Index i = 0; i < g.n(); ++i) p[i] = i;
  BronKerbosch{adj, res.cliques}.run(r, std::move(p), std::move(x));
  std::sort(res.cliques.begin(), res.cliques.end());
  return res;
}

}  // namespace corrnet
