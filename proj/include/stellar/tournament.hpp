#pragma once

// Core tournament machinery: the bit-matrix tournament itself, exact directed
// densities, transitivity tests, the greedy logarithmic extractor, vertex
// substitution and coloring verification. Everything downstream builds on
// these.

#include <algorithm>
#include <random>

#include "stellar/bitset.hpp"
#include "stellar/exact.hpp"

namespace stellar {

using VertexSet = Bitset;
using Ordering = std::vector<std::size_t>;  // positions are 1-based in formulas

struct Coloring {
  std::vector<long> color;  // color[v] > 0 once assigned; 0 = unassigned
};

class Tournament {
 public:
  Tournament() = default;

  // n vertices, no edges yet; orient() must be called for every pair.
  explicit Tournament(std::size_t n) : n_(n), rows_(n, Bitset(n)) {}

  std::size_t size() const { return n_; }

  bool edge(std::size_t u, std::size_t v) const { return rows_[u].test(v); }

  void orient(std::size_t u, std::size_t v) {
    rows_[u].set(v);
    rows_[v].reset(u);
  }

  // out-neighborhood row as a bitset over 0..n-1
  const Bitset& out(std::size_t u) const { return rows_[u]; }

  Bitset in(std::size_t u) const {
    Bitset r(n_);
    for (std::size_t v = 0; v < n_; ++v)
      if (v != u && !rows_[u].test(v)) r.set(v);
    return r;
  }

  Bitset vertices() const { return Bitset::full(n_); }

  bool check_invariants() const {
    for (std::size_t u = 0; u < n_; ++u) {
      if (rows_[u].test(u)) return false;
      for (std::size_t v = u + 1; v < n_; ++v)
        if (rows_[u].test(v) == rows_[v].test(u)) return false;
    }
    return true;
  }

  static Tournament from_edges(std::size_t n,
                               std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
    Tournament t(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) t.orient(u, v);
    for (auto [u, v] : edges) t.orient(u, v);
    return t;
  }

  // forward tournament: u -> v iff u < v
  static Tournament transitive(std::size_t n) {
    Tournament t(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) t.orient(u, v);
    return t;
  }

  Tournament restrict_to(const Bitset& s, std::vector<std::size_t>* names = nullptr) const {
    auto verts = s.to_vector();
    Tournament t(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        if (edge(verts[i], verts[j]))
          t.orient(i, j);
        else
          t.orient(j, i);
    if (names) *names = std::move(verts);
    return t;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Bitset> rows_;
};

// Number of edges x -> y with x in X, y in Y.
inline std::size_t edges_between(const Tournament& t, const Bitset& x, const Bitset& y) {
  std::size_t c = 0;
  for (std::size_t v = x.first(); v != Bitset::npos; v = x.next(v))
    c += t.out(v).intersection_count(y);
  return c;
}

// d(X,Y) = e_{X,Y} / (|X||Y|), exact.
inline Rat directed_density(const Tournament& t, const Bitset& x, const Bitset& y) {
  std::size_t nx = x.count(), ny = y.count();
  if (nx == 0 || ny == 0) fail(ErrorKind::EmptySet, "directed_density on empty set");
  if (x.intersects(y)) fail(ErrorKind::Overlap, "directed_density on overlapping sets");
  return make_rat(Int(static_cast<unsigned long>(edges_between(t, x, y))),
                  Int(static_cast<unsigned long>(nx)) * Int(static_cast<unsigned long>(ny)));
}

// A tournament on s vertices is transitive iff its within-set out-degrees are
// pairwise distinct (equivalently {0,...,s-1}); that also sorts it.
inline bool is_transitive(const Tournament& t, const Bitset& s) {
  auto verts = s.to_vector();
  std::size_t k = verts.size();
  if (k <= 2) return true;
  std::vector<bool> seen(k, false);
  for (auto v : verts) {
    std::size_t d = t.out(v).intersection_count(s);
    if (seen[d]) return false;
    seen[d] = true;
  }
  return true;
}

// Ordering (v1,...,vk) with every vertex beating all later ones.
inline Ordering transitive_ordering(const Tournament& t, const Bitset& s) {
  if (!is_transitive(t, s)) fail(ErrorKind::NotTransitive, "set induces a directed cycle");
  auto verts = s.to_vector();
  std::sort(verts.begin(), verts.end(), [&](std::size_t a, std::size_t b) {
    return t.out(a).intersection_count(s) > t.out(b).intersection_count(s);
  });
  return verts;
}

// Greedy logarithmic transitive extraction: pick the lowest-index vertex,
// recurse into the in-neighborhood when it holds at least (|S|-1)/2 vertices
// (ties go in), else the out-neighborhood. Yields >= ceil(log2 |S|) - 1.
inline Bitset greedy_log_transitive(const Tournament& t, const Bitset& s) {
  if (s.empty()) fail(ErrorKind::EmptySet, "greedy_log_transitive on empty set");
  Bitset picked(t.size());
  Bitset cur = s;
  while (!cur.empty()) {
    std::size_t v = cur.first();
    picked.set(v);
    cur.reset(v);
    Bitset outs = t.out(v) & cur;
    Bitset ins = cur - outs;
    std::size_t rest = cur.count();
    cur = (2 * ins.count() >= rest) ? ins : outs;
  }
  return picked;
}

// Blow-up H(F_1,...,F_h): copy F_i replaces vertex i of H, inter-copy edges
// follow H.
inline Tournament substitute(const Tournament& h, const std::vector<Tournament>& parts) {
  if (parts.size() != h.size())
    fail(ErrorKind::ArityMismatch, "substitute needs one part per vertex of H");
  std::vector<std::size_t> base(parts.size() + 1, 0);
  for (std::size_t i = 0; i < parts.size(); ++i) base[i + 1] = base[i] + parts[i].size();
  Tournament t(base.back());
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t a = 0; a < parts[i].size(); ++a)
      for (std::size_t b = a + 1; b < parts[i].size(); ++b)
        if (parts[i].edge(a, b))
          t.orient(base[i] + a, base[i] + b);
        else
          t.orient(base[i] + b, base[i] + a);
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      bool fwd = h.edge(i, j);
      for (std::size_t a = 0; a < parts[i].size(); ++a)
        for (std::size_t b = 0; b < parts[j].size(); ++b)
          if (fwd)
            t.orient(base[i] + a, base[j] + b);
          else
            t.orient(base[j] + b, base[i] + a);
    }
  return t;
}

// True iff no color class induces a directed triangle (equivalent to no
// monochromatic directed cycle in a tournament).
inline bool verify_coloring(const Tournament& t, const Coloring& col) {
  if (col.color.size() != t.size()) fail(ErrorKind::PartialColoring, "coloring size mismatch");
  std::vector<long> classes;
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (col.color[v] <= 0) fail(ErrorKind::PartialColoring, "vertex without a color");
    classes.push_back(col.color[v]);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  for (long c : classes) {
    Bitset s(t.size());
    for (std::size_t v = 0; v < t.size(); ++v)
      if (col.color[v] == c) s.set(v);
    if (!is_transitive(t, s)) return false;
  }
  return true;
}

// Seeded uniform tournament; bit stream drawn from a fixed-width engine so
// the same seed gives the same tournament on every platform.
inline Tournament random_tournament(std::size_t n, std::uint64_t seed) {
  Tournament t(n);
  std::mt19937_64 gen(seed);
  std::uint64_t pool = 0;
  int bits = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      if (bits == 0) {
        pool = gen();
        bits = 64;
      }
      bool fwd = pool & 1;
      pool >>= 1;
      --bits;
      if (fwd)
        t.orient(u, v);
      else
        t.orient(v, u);
    }
  return t;
}

}  // namespace stellar
