#pragma once

// Transversal-clique extraction from a dense k-partite undirected graph.

#include "stellar/bitset.hpp"

namespace stellar::engine {

struct UndirectedGraph {
  std::vector<Bitset> adj;

  explicit UndirectedGraph(std::size_t n) : adj(n, Bitset(n)) {}

  std::size_t size() const { return adj.size(); }

  void add_edge(std::size_t a, std::size_t b) {
    adj[a].set(b);
    adj[b].set(a);
  }

  std::size_t edges_between(const Bitset& a, const Bitset& b) const {
    std::size_t c = 0;
    for (std::size_t v = a.first(); v != Bitset::npos; v = a.next(v))
      c += adj[v].intersection_count(b);
    return c;
  }
};

namespace detail {

inline Rat pow3(std::size_t e) { return Rat(pow_int(Int(3), e)); }

inline std::vector<std::size_t> find_clique_rec(const UndirectedGraph& g,
                                                std::vector<Bitset> classes, Rat lambda) {
  std::size_t k = classes.size();
  if (k == 0) return {};
  // entry guard: lambda within the admissible band and all pairwise class
  // densities at least 1-lambda, both checked eagerly and exactly
  if (!(lambda > 0) || Rat(1) < lambda * Rat(static_cast<unsigned long>(k)) * pow3(2 * k + 1))
    fail(ErrorKind::PreconditionViolated, "find_clique: lambda above 1/(3^(2k+1) k)");
  for (std::size_t i = 0; i < k; ++i) {
    if (classes[i].empty()) fail(ErrorKind::PreconditionViolated, "find_clique: empty class");
    for (std::size_t j = i + 1; j < k; ++j) {
      std::size_t e = g.edges_between(classes[i], classes[j]);
      Rat full(static_cast<unsigned long>(classes[i].count() * classes[j].count()));
      if (Rat(static_cast<unsigned long>(e)) < (1 - lambda) * full)
        fail(ErrorKind::PreconditionViolated, "find_clique: class pair density below 1-lambda");
    }
  }
  std::size_t v1 = classes[0].first();
  if (k == 1) return {v1};

  Rat kk(static_cast<unsigned long>(k));
  Rat thresh = 1 - 2 * kk * lambda;
  for (std::size_t v = classes[0].first(); v != Bitset::npos; v = classes[0].next(v)) {
    bool good = true;
    for (std::size_t i = 1; i < k && good; ++i) {
      std::size_t cnt = g.adj[v].intersection_count(classes[i]);
      good = Rat(static_cast<unsigned long>(cnt)) >=
             thresh * Rat(static_cast<unsigned long>(classes[i].count()));
    }
    if (good) {
      v1 = v;
      break;
    }
    if (classes[0].next(v) == Bitset::npos)
      fail(ErrorKind::InternalContractViolation, "find_clique: no eligible pivot vertex");
  }
  std::vector<Bitset> rest;
  rest.reserve(k - 1);
  for (std::size_t i = 1; i < k; ++i) rest.push_back(classes[i] & g.adj[v1]);
  Rat denom = 1 - 2 * kk * lambda;
  std::vector<std::size_t> tail = find_clique_rec(g, std::move(rest), lambda / (denom * denom));
  tail.insert(tail.begin(), v1);
  return tail;
}

}  // namespace detail

// Picks one vertex per class forming a clique; the lowest-index eligible
// vertex wins at every level. The returned transversal is re-verified by a
// direct adjacency scan.
inline std::vector<std::size_t> find_clique(const UndirectedGraph& g, std::vector<Bitset> classes,
                                            const Rat& lambda) {
  std::vector<std::size_t> out = detail::find_clique_rec(g, std::move(classes), lambda);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (!g.adj[out[i]].test(out[j]))
        fail(ErrorKind::InternalContractViolation, "find_clique produced a non-clique");
  return out;
}

}  // namespace stellar::engine
