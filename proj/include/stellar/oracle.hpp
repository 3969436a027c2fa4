#pragma once

// Exhaustive ground-truth solvers, feasible at desk scale only: maximum
// transitive subtournament by subset DP, induced-subtournament search by
// backtracking, exact chromatic number by branch and bound.

#include <chrono>
#include <optional>

#include "stellar/tournament.hpp"

namespace stellar::oracle {

struct Budget {
  std::size_t max_n = 24;
  std::chrono::milliseconds time_cap{0};  // 0 = unlimited
  std::size_t node_cap = 200000000;       // backtracking node limit
};

struct Embedding {
  std::vector<std::size_t> map;  // H-vertex -> T-vertex

  bool verify(const Tournament& t, const Tournament& h) const {
    if (map.size() != h.size()) return false;
    for (std::size_t i = 0; i < map.size(); ++i)
      for (std::size_t j = 0; j < map.size(); ++j) {
        if (i == j) continue;
        if (map[i] == map[j]) return false;
        if (h.edge(i, j) != t.edge(map[i], map[j])) return false;
      }
    return true;
  }
};

// Maximum-cardinality transitive subset by DP over bitmasks: a set is
// transitively orderable iff some member beats all the others and the rest
// is. Ties broken toward the lexicographically smallest vertex list.
inline Bitset max_transitive_exact(const Tournament& t, const Budget& budget = {}) {
  std::size_t n = t.size();
  if (n > budget.max_n)
    fail(ErrorKind::BudgetExceeded,
         "subset DP capped at n=" + std::to_string(budget.max_n) + ", got " + std::to_string(n));
  if (n == 0) return Bitset(0);
  std::vector<std::uint32_t> out_mask(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t u = 0; u < n; ++u)
      if (u != v && t.edge(v, u)) out_mask[v] |= 1u << u;
  std::size_t total = std::size_t(1) << n;
  std::vector<bool> trans(total, false);
  trans[0] = true;
  std::size_t best_mask = 0, best_size = 0;
  for (std::size_t mask = 1; mask < total; ++mask) {
    std::uint32_t m = static_cast<std::uint32_t>(mask);
    for (std::uint32_t rest = m; rest; rest &= rest - 1) {
      std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(rest));
      std::uint32_t others = m & ~(1u << v);
      if ((out_mask[v] & others) == others && trans[others]) {
        trans[mask] = true;
        break;
      }
    }
    if (trans[mask]) {
      std::size_t sz = static_cast<std::size_t>(std::popcount(m));
      if (sz > best_size) {
        best_size = sz;
        best_mask = mask;
      } else if (sz == best_size && best_size > 0) {
        // lexicographic comparison of ascending vertex lists
        std::uint32_t a = static_cast<std::uint32_t>(mask), b = static_cast<std::uint32_t>(best_mask);
        while (a && b && std::countr_zero(a) == std::countr_zero(b)) {
          a &= a - 1;
          b &= b - 1;
        }
        if (a && b && std::countr_zero(a) < std::countr_zero(b)) best_mask = mask;
      }
    }
  }
  Bitset r(n);
  for (std::size_t v = 0; v < n; ++v)
    if (best_mask >> v & 1) r.set(v);
  return r;
}

namespace detail {

struct EmbedSearch {
  const Tournament& t;
  const Tournament& h;
  std::vector<std::size_t> order;  // H-vertices, most-constrained first
  std::vector<std::size_t> map;
  Bitset used;
  std::size_t nodes = 0;
  std::size_t node_cap;
  std::chrono::steady_clock::time_point deadline{};
  bool timed = false;

  bool dfs(std::size_t depth) {
    if (depth == order.size()) return true;
    if (++nodes > node_cap) fail(ErrorKind::BudgetExceeded, "embedding search budget exhausted");
    if (timed && (nodes & 1023) == 0 && std::chrono::steady_clock::now() > deadline)
      fail(ErrorKind::BudgetExceeded, "embedding search hit its time cap");
    std::size_t hv = order[depth];
    for (std::size_t tv = 0; tv < t.size(); ++tv) {
      if (used.test(tv)) continue;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) {
        std::size_t hu = order[d];
        ok = h.edge(hu, hv) == t.edge(map[hu], tv);
      }
      if (!ok) continue;
      used.set(tv);
      map[hv] = tv;
      if (dfs(depth + 1)) return true;
      used.reset(tv);
    }
    return false;
  }
};

}  // namespace detail

// Induced copy of H in T, or nullopt after certified exhaustive search.
// H-vertices are tried in descending backward-degree order (under the
// identity ordering), the usual most-constrained-first heuristic.
inline std::optional<Embedding> contains_subtournament(const Tournament& t, const Tournament& h,
                                                       const Budget& budget = {}) {
  if (h.size() > t.size()) return std::nullopt;
  if (h.size() == 0) return Embedding{{}};
  std::vector<std::size_t> deg(h.size(), 0);
  for (std::size_t u = 0; u < h.size(); ++u)
    for (std::size_t v = u + 1; v < h.size(); ++v)
      if (h.edge(v, u)) {
        ++deg[u];
        ++deg[v];
      }
  detail::EmbedSearch search{t, h, {}, std::vector<std::size_t>(h.size(), 0), Bitset(t.size()), 0,
                             budget.node_cap};
  if (budget.time_cap.count() > 0) {
    search.timed = true;
    search.deadline = std::chrono::steady_clock::now() + budget.time_cap;
  }
  search.order.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) search.order[i] = i;
  std::stable_sort(search.order.begin(), search.order.end(),
                   [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });
  if (!search.dfs(0)) return std::nullopt;
  Embedding e{std::move(search.map)};
  if (!e.verify(t, h))
    fail(ErrorKind::InternalContractViolation, "embedding search produced a bad certificate");
  return e;
}

// Minimum number of transitive classes by branch and bound over class
// assignments. `reverse_order` branches over vertices high-to-low instead;
// the two strategies must agree, which the tests exploit.
inline std::pair<std::size_t, Coloring> exact_chromatic(const Tournament& t,
                                                        std::size_t max_n = 12,
                                                        bool reverse_order = false) {
  std::size_t n = t.size();
  if (n > max_n)
    fail(ErrorKind::BudgetExceeded,
         "chromatic search capped at n=" + std::to_string(max_n) + ", got " + std::to_string(n));
  if (n == 0) return {0, Coloring{}};
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = reverse_order ? n - 1 - i : i;
  std::vector<long> assign(n, 0), best_assign(n, 0);
  std::size_t best = n + 1;
  std::vector<Bitset> classes;

  auto rec = [&](auto&& self, std::size_t idx, std::size_t used) -> void {
    if (used >= best) return;
    if (idx == n) {
      best = used;
      best_assign = assign;
      return;
    }
    std::size_t v = order[idx];
    for (std::size_t c = 0; c < used; ++c) {
      classes[c].set(v);
      if (is_transitive(t, classes[c])) {
        assign[v] = static_cast<long>(c + 1);
        self(self, idx + 1, used);
      }
      classes[c].reset(v);
    }
    if (used + 1 < best) {
      if (classes.size() <= used) classes.emplace_back(n);
      classes[used].set(v);
      assign[v] = static_cast<long>(used + 1);
      self(self, idx + 1, used + 1);
      classes[used].reset(v);
    }
  };
  rec(rec, 0, 0);
  Coloring col;
  col.color = best_assign;
  if (!verify_coloring(t, col))
    fail(ErrorKind::InternalContractViolation, "chromatic search returned an improper coloring");
  return {best, col};
}

}  // namespace stellar::oracle
