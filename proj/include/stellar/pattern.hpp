#pragma once

// Forbidden-pattern machinery: the graph of backward edges under an ordering,
// its star decomposition, the interstellar graph, the block partition derived
// from it, constellation/galaxy recognition and the position map that sends
// pattern vertices into sequence slots.

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>

#include "stellar/tournament.hpp"

namespace stellar::pat {

struct BackwardGraph {
  Ordering theta;                                        // theta[i] = vertex at position i
  std::vector<std::size_t> pos;                          // pos[v] = 0-based position
  std::vector<Bitset> adj;                               // undirected adjacency
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // pairs, smaller vertex first
};

enum class Side { left, right };

struct Star {
  std::size_t center;
  std::vector<std::size_t> leaves;  // sorted by theta position
  Side side;

  Bitset vertex_set(std::size_t n) const {
    Bitset b(n);
    b.set(center);
    for (auto l : leaves) b.set(l);
    return b;
  }
};

struct StarDecomposition {
  std::vector<Star> stars;  // ordered by leftmost theta position
  std::vector<std::size_t> singletons;
};

struct InterstellarGraph {
  std::vector<Bitset> leaf_sets;  // one node per star, same order as stars
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

enum class BlockTag { W, M };

struct ThetaPartition {
  struct Block {
    BlockTag tag;
    Bitset members;
  };
  std::vector<Block> blocks;  // ordered by minimum theta position

  // index of the block containing v, or npos
  std::size_t block_of(std::size_t v) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].members.test(v)) return i;
    return Bitset::npos;
  }
};

struct ZetaMap {
  std::vector<std::size_t> pos;  // 1-based sequence slot per vertex
  std::size_t h;
};

inline BackwardGraph backward_edge_graph(const Tournament& h, const Ordering& theta) {
  std::size_t n = h.size();
  if (theta.size() != n) fail(ErrorKind::BadOrdering, "ordering is not a permutation of V(H)");
  std::vector<std::size_t> pos(n, Bitset::npos);
  for (std::size_t i = 0; i < n; ++i) {
    if (theta[i] >= n || pos[theta[i]] != Bitset::npos)
      fail(ErrorKind::BadOrdering, "ordering is not a permutation of V(H)");
    pos[theta[i]] = i;
  }
  BackwardGraph b{theta, pos, std::vector<Bitset>(n, Bitset(n)), {}};
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      std::size_t src = h.edge(u, v) ? u : v;
      std::size_t dst = h.edge(u, v) ? v : u;
      if (pos[src] > pos[dst]) {  // backward edge
        b.adj[u].set(v);
        b.adj[v].set(u);
        b.edges.emplace_back(u, v);
      }
    }
  return b;
}

// Decomposes B(H,theta) into stars and singletons. A component must induce
// K_{1,t} with its center at an extreme theta position (left or right star),
// otherwise the ordering is not a star ordering. For t = 1 the theta-later
// vertex is designated center, making the star a right star.
inline StarDecomposition star_decomposition(const BackwardGraph& b) {
  std::size_t n = b.adj.size();
  StarDecomposition out;
  Bitset seen(n);
  for (std::size_t v0 = 0; v0 < n; ++v0) {
    if (seen.test(v0)) continue;
    // component by BFS
    Bitset comp(n);
    std::vector<std::size_t> stack = {v0};
    comp.set(v0);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = b.adj[v].first(); u != Bitset::npos; u = b.adj[v].next(u))
        if (!comp.test(u)) {
          comp.set(u);
          stack.push_back(u);
        }
    }
    seen |= comp;
    auto verts = comp.to_vector();
    if (verts.size() == 1) {
      out.singletons.push_back(verts[0]);
      continue;
    }
    auto describe = [&] {
      std::string s = "{";
      for (std::size_t i = 0; i < verts.size(); ++i) s += (i ? "," : "") + std::to_string(verts[i]);
      return s + "}";
    };
    std::size_t edge_count = 0;
    std::size_t center = Bitset::npos;
    for (auto v : verts) {
      std::size_t d = b.adj[v].count();
      edge_count += d;
      if (d == verts.size() - 1) center = v;
      else if (d != 1)
        fail(ErrorKind::NotStarForest, "component " + describe() + " is not a star");
    }
    edge_count /= 2;
    if (center == Bitset::npos || edge_count != verts.size() - 1)
      fail(ErrorKind::NotStarForest, "component " + describe() + " is not a star");
    if (verts.size() == 2) center = b.pos[verts[0]] > b.pos[verts[1]] ? verts[0] : verts[1];
    Star star;
    star.center = center;
    for (auto v : verts)
      if (v != center) star.leaves.push_back(v);
    std::sort(star.leaves.begin(), star.leaves.end(),
              [&](std::size_t a, std::size_t c) { return b.pos[a] < b.pos[c]; });
    bool before_all = b.pos[center] < b.pos[star.leaves.front()];
    bool after_all = b.pos[center] > b.pos[star.leaves.back()];
    if (after_all)
      star.side = Side::right;
    else if (before_all)
      star.side = Side::left;
    else
      fail(ErrorKind::NotStarForest,
           "component " + describe() + " has its center between its leaves");
    out.stars.push_back(std::move(star));
  }
  std::sort(out.stars.begin(), out.stars.end(), [&](const Star& a, const Star& c) {
    auto key = [&](const Star& s) {
      std::size_t m = b.pos[s.center];
      for (auto l : s.leaves) m = std::min(m, b.pos[l]);
      return m;
    };
    return key(a) < key(c);
  });
  return out;
}

inline InterstellarGraph interstellar_graph(const StarDecomposition& d, const BackwardGraph& b) {
  InterstellarGraph g;
  std::size_t n = b.adj.size();
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // leaf position spans
  for (const auto& star : d.stars) {
    Bitset ls(n);
    std::size_t lo = Bitset::npos, hi = 0;
    for (auto l : star.leaves) {
      ls.set(l);
      lo = std::min(lo, b.pos[l]);
      hi = std::max(hi, b.pos[l]);
    }
    g.leaf_sets.push_back(std::move(ls));
    spans.emplace_back(lo, hi);
  }
  for (std::size_t i = 0; i < spans.size(); ++i)
    for (std::size_t j = i + 1; j < spans.size(); ++j)
      if (spans[i].first < spans[j].second && spans[j].first < spans[i].second)
        g.edges.emplace_back(i, j);
  return g;
}

inline ThetaPartition theta_partition(const Tournament& h, const Ordering& theta) {
  BackwardGraph b = backward_edge_graph(h, theta);
  StarDecomposition d = star_decomposition(b);
  InterstellarGraph ig = interstellar_graph(d, b);
  std::size_t n = h.size();

  // connected components of the interstellar graph
  std::size_t m = ig.leaf_sets.size();
  std::vector<std::size_t> comp(m, Bitset::npos);
  std::size_t ncomp = 0;
  std::vector<std::vector<std::size_t>> nbr(m);
  for (auto [a, c] : ig.edges) {
    nbr[a].push_back(c);
    nbr[c].push_back(a);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (comp[i] != Bitset::npos) continue;
    std::vector<std::size_t> stack = {i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (auto y : nbr[x])
        if (comp[y] == Bitset::npos) {
          comp[y] = ncomp;
          stack.push_back(y);
        }
    }
    ++ncomp;
  }

  // hull of each component: every vertex positioned within the span of Z(C)
  struct Hull {
    std::size_t lo, hi;
  };
  std::vector<Hull> hulls(ncomp, {Bitset::npos, 0});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = ig.leaf_sets[i].first(); l != Bitset::npos; l = ig.leaf_sets[i].next(l)) {
      hulls[comp[i]].lo = std::min(hulls[comp[i]].lo, b.pos[l]);
      hulls[comp[i]].hi = std::max(hulls[comp[i]].hi, b.pos[l]);
    }
  std::sort(hulls.begin(), hulls.end(), [](const Hull& a, const Hull& c) { return a.lo < c.lo; });
  for (std::size_t i = 0; i + 1 < hulls.size(); ++i)
    if (hulls[i].hi >= hulls[i + 1].lo)
      fail(ErrorKind::InternalContractViolation, "interstellar hulls interleave");

  ThetaPartition out;
  std::size_t cursor = 0;  // next unassigned position
  for (const auto& hull : hulls) {
    if (cursor < hull.lo) {
      Bitset run(n);
      for (std::size_t p = cursor; p < hull.lo; ++p) run.set(theta[p]);
      out.blocks.push_back({BlockTag::M, std::move(run)});
    }
    Bitset w(n);
    for (std::size_t p = hull.lo; p <= hull.hi; ++p) w.set(theta[p]);
    out.blocks.push_back({BlockTag::W, std::move(w)});
    cursor = hull.hi + 1;
  }
  if (cursor < n) {
    Bitset run(n);
    for (std::size_t p = cursor; p < n; ++p) run.set(theta[p]);
    out.blocks.push_back({BlockTag::M, std::move(run)});
  }
  return out;
}

inline bool is_constellation_ordering(const Tournament& h, const Ordering& theta) {
  try {
    BackwardGraph b = backward_edge_graph(h, theta);
    StarDecomposition d = star_decomposition(b);
    ThetaPartition p = theta_partition(h, theta);
    for (const auto& star : d.stars) {
      std::size_t cb = p.block_of(star.center);
      for (auto l : star.leaves)
        if (p.block_of(l) == cb) return false;
    }
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotStarForest) return false;
    throw;
  }
}

// A constellation is regular when its stars cover every vertex.
inline bool is_regular_constellation_ordering(const Tournament& h, const Ordering& theta) {
  if (!is_constellation_ordering(h, theta)) return false;
  auto d = star_decomposition(backward_edge_graph(h, theta));
  return d.singletons.empty();
}

inline bool is_galaxy_ordering(const Tournament& h, const Ordering& theta) {
  if (!is_constellation_ordering(h, theta)) return false;
  BackwardGraph b = backward_edge_graph(h, theta);
  StarDecomposition d = star_decomposition(b);
  for (std::size_t i = 0; i < d.stars.size(); ++i)
    for (std::size_t j = 0; j < d.stars.size(); ++j) {
      if (i == j) continue;
      std::size_t c = b.pos[d.stars[i].center];
      std::size_t lo = b.pos[d.stars[j].leaves.front()];
      std::size_t hi = b.pos[d.stars[j].leaves.back()];
      if (lo < c && c < hi) return false;
    }
  return true;
}

// Exhaustive lexicographic search over all |H|! orderings; factorial guard.
// With jobs > 1 the permutation space is split by first vertex and scanned in
// parallel; the result is the lexicographically first passing ordering either
// way.
inline std::optional<Ordering> find_constellation_ordering(const Tournament& h,
                                                           std::size_t max_n = 9,
                                                           unsigned jobs = 1) {
  if (h.size() > max_n)
    fail(ErrorKind::TooLarge, "ordering search capped at " + std::to_string(max_n) + " vertices");
  std::size_t n = h.size();
  if (n == 0) return Ordering{};
  if (jobs <= 1 || n < 3) {
    Ordering theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = i;
    do {
      if (is_constellation_ordering(h, theta)) return theta;
    } while (std::next_permutation(theta.begin(), theta.end()));
    return std::nullopt;
  }
  // per first vertex: the earliest passing ordering within that slice
  std::vector<std::optional<Ordering>> found(n);
  std::atomic<std::size_t> next_first{0};
  auto worker = [&] {
    for (std::size_t first = next_first++; first < n; first = next_first++) {
      Ordering theta;
      theta.push_back(first);
      for (std::size_t v = 0; v < n; ++v)
        if (v != first) theta.push_back(v);
      do {
        if (is_constellation_ordering(h, theta)) {
          found[first] = theta;
          break;
        }
      } while (std::next_permutation(theta.begin() + 1, theta.end()));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < std::min<unsigned>(jobs, static_cast<unsigned>(n)); ++i)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& f : found)
    if (f) return f;
  return std::nullopt;
}

// Position map: the i-th leaf goes to slot i(2h+1)+1; the r-th non-leaf after
// the j-th leaf goes to slot j(2h+1)+2r. Every non-leaf counts as a center
// here, including vertices that are singletons of the backward graph.
inline ZetaMap zeta_map(const Tournament& h, const Ordering& theta) {
  if (!is_constellation_ordering(h, theta))
    fail(ErrorKind::NotConstellation, "zeta map needs a constellation ordering");
  BackwardGraph b = backward_edge_graph(h, theta);
  StarDecomposition d = star_decomposition(b);
  std::size_t n = h.size();
  std::vector<bool> is_leaf(n, false);
  for (const auto& star : d.stars)
    for (auto l : star.leaves) is_leaf[l] = true;
  ZetaMap z{std::vector<std::size_t>(n, 0), n};
  std::size_t leaf_count = 0, centers_since_leaf = 0;
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t v = theta[p];
    if (is_leaf[v]) {
      ++leaf_count;
      centers_since_leaf = 0;
      z.pos[v] = leaf_count * (2 * n + 1) + 1;
    } else {
      ++centers_since_leaf;
      z.pos[v] = leaf_count * (2 * n + 1) + 2 * centers_since_leaf;
    }
  }
  return z;
}

// ---------------------------------------------------------------------------
// Built-in pattern catalog. Patterns are stored as backward-edge pairs under
// the identity ordering; the pair {a,b} with a < b forces the edge b -> a.

struct Pattern {
  std::string name;
  Tournament h;
  Ordering theta;  // canonical ordering (identity for all catalog entries)
};

inline Tournament from_backward_pairs(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Tournament t = Tournament::transitive(n);
  for (auto [a, b] : pairs) {
    if (a > b) std::swap(a, b);
    t.orient(b, a);
  }
  return t;
}

inline Pattern catalog(const std::string& name) {
  auto mk = [&](std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> pairs) {
    Pattern p{name, from_backward_pairs(n, pairs), Ordering(n)};
    for (std::size_t i = 0; i < n; ++i) p.theta[i] = i;
    return p;
  };
  if (name == "c5") return mk(5, {{0, 3}, {1, 4}, {0, 4}});
  if (name == "t6") return mk(6, {{0, 3}, {2, 5}, {0, 5}, {1, 4}});
  if (name == "t6_1") return mk(6, {{0, 3}, {0, 4}, {1, 4}, {2, 5}});
  if (name == "t6_2") return mk(6, {{0, 2}, {1, 2}, {1, 3}, {4, 5}});
  if (name == "fig1")
    return mk(11, {{0, 5}, {0, 2}, {1, 9}, {4, 9}, {3, 10}, {6, 10}, {8, 10}});
  if (name == "fig2") return mk(10, {{0, 5}, {2, 5}, {4, 5}, {3, 6}, {3, 8}, {3, 9}});
  if (name == "fig3") return mk(8, {{0, 2}, {0, 4}, {5, 7}, {1, 6}, {3, 6}});
  fail(ErrorKind::ParseError, "unknown catalog pattern: " + name);
}

inline std::vector<std::string> catalog_names() {
  return {"c5", "t6", "t6_1", "t6_2", "fig1", "fig2", "fig3"};
}

}  // namespace stellar::pat
