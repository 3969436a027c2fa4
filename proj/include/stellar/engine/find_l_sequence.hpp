#pragma once

// l-sequence construction. The core splits the current vertex set into h
// chunks, then either finds a pivot vertex whose matching neighborhoods in
// all later chunks stay above the lambda_k fraction (and descends into them,
// mirroring one vertex of H), or finds a chunk pair that is already almost
// one-directional and recurses on both sides with k-1. Exhausting H along a
// pivot chain can only happen when T contains an induced copy of H, which is
// then returned as a verified embedding certificate.

#include <variant>

#include "stellar/engine/params.hpp"
#include "stellar/oracle.hpp"

namespace stellar::engine {

struct LSequenceResult {
  std::optional<seq::Sequence> sequence;          // valid at (c_of(h,k,lambda), lambda)
  std::optional<oracle::Embedding> certificate;   // induced copy of H in T
};

namespace detail {

struct LSearch {
  const Tournament& t;
  const Tournament& h;
  Rat lambda;

  // returns element list (host-vertex sets) or an embedding of H
  std::variant<std::vector<Bitset>, oracle::Embedding> run(std::size_t k, const Bitset& domain) {
    if (k == 0) return std::vector<Bitset>{domain};
    std::size_t n = domain.count();
    std::size_t hh = h.size();
    std::size_t chunk = n / (hh + 1);
    if (chunk < 1)
      fail(ErrorKind::InsufficientSize,
           "find_l_sequence needs at least h+1 = " + std::to_string(hh + 1) +
               " vertices at every level, got " + std::to_string(n));
    auto verts = domain.to_vector();
    std::vector<Bitset> sets(hh, Bitset(t.size()));
    for (std::size_t i = 0; i < hh; ++i)
      for (std::size_t j = 0; j < chunk; ++j) sets[i].set(verts[i * chunk + j]);
    std::vector<std::size_t> hverts(hh);
    for (std::size_t i = 0; i < hh; ++i) hverts[i] = i;
    ScheduleValue lambda_k = lambda_schedule_value(lambda, k, hh, k);
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (H-vertex, T-vertex)

    while (true) {
      if (hverts.size() == 1) {
        // the pivot chain exhausted H; the surviving chunk supplies the last
        // vertex and the chain induces a copy of H
        oracle::Embedding emb;
        emb.map.assign(h.size(), 0);
        for (auto [hv, tv] : pivots) emb.map[hv] = tv;
        emb.map[hverts[0]] = sets[0].first();
        if (!emb.verify(t, h))
          fail(ErrorKind::InternalContractViolation, "pivot chain is not an embedding of H");
        return emb;
      }
      std::size_t hr = hverts.size();
      // matching neighborhoods N_j(v) for v in sets[0]
      auto match_set = [&](std::size_t v, std::size_t j) {
        bool fwd = h.edge(hverts[0], hverts[j]);
        return fwd ? (t.out(v) & sets[j]) : (sets[j] - t.out(v));
      };
      std::size_t pivot = Bitset::npos;
      for (std::size_t v = sets[0].first(); v != Bitset::npos && pivot == Bitset::npos;
           v = sets[0].next(v)) {
        bool ok = true;
        for (std::size_t j = 1; j < hr && ok; ++j)
          ok = lambda_k.count_at_least(match_set(v, j).count(), sets[j].count());
        if (ok) pivot = v;
      }
      if (pivot != Bitset::npos) {
        pivots.emplace_back(hverts[0], pivot);
        std::vector<Bitset> next;
        for (std::size_t j = 1; j < hr; ++j) next.push_back(match_set(pivot, j));
        sets = std::move(next);
        hverts.erase(hverts.begin());
        continue;
      }
      // no pivot: some chunk index fails for at least |S_1|/(hr-1) vertices
      std::vector<std::size_t> fail_count(hr, 0);
      for (std::size_t v = sets[0].first(); v != Bitset::npos; v = sets[0].next(v))
        for (std::size_t j = 1; j < hr; ++j) {
          if (!lambda_k.count_at_least(match_set(v, j).count(), sets[j].count())) {
            ++fail_count[j];
            break;
          }
        }
      std::size_t jstar = 1;
      for (std::size_t j = 2; j < hr; ++j)
        if (fail_count[j] > fail_count[jstar]) jstar = j;
      Bitset w(t.size());
      for (std::size_t v = sets[0].first(); v != Bitset::npos; v = sets[0].next(v))
        if (!lambda_k.count_at_least(match_set(v, jstar).count(), sets[jstar].count())) w.set(v);
      auto left = run(k - 1, w);
      if (std::holds_alternative<oracle::Embedding>(left)) return left;
      auto right = run(k - 1, sets[jstar]);
      if (std::holds_alternative<oracle::Embedding>(right)) return right;
      auto& ls = std::get<std::vector<Bitset>>(left);
      auto& rs = std::get<std::vector<Bitset>>(right);
      std::vector<Bitset> out;
      std::size_t forward = edges_between(t, w, sets[jstar]);
      std::size_t missing = w.count() * sets[jstar].count() - forward;
      if (lambda_k.slack_at_most(missing, w.count(), sets[jstar].count())) {
        out = std::move(ls);
        out.insert(out.end(), rs.begin(), rs.end());
      } else {
        out = std::move(rs);
        out.insert(out.end(), ls.begin(), ls.end());
      }
      return out;
    }
  }
};

}  // namespace detail

inline LSequenceResult find_l_sequence(const Tournament& t, const Tournament& h, const Rat& lambda,
                                       std::size_t k) {
  if (h.size() < 2) fail(ErrorKind::DomainError, "find_l_sequence needs |H| >= 2");
  if (!(lambda > 0 && lambda < 1))
    fail(ErrorKind::DomainError, "find_l_sequence needs 0 < lambda < 1");
  detail::LSearch search{t, h, lambda};
  auto out = search.run(k, t.vertices());
  LSequenceResult res;
  if (std::holds_alternative<oracle::Embedding>(out)) {
    res.certificate = std::get<oracle::Embedding>(std::move(out));
    return res;
  }
  seq::Sequence s;
  s.kind = seq::Kind::l;
  for (auto& b : std::get<std::vector<Bitset>>(out))
    s.elements.push_back({std::move(b), seq::Role::linear});
  auto rep = seq::validate_l_sequence(t, s, c_floor_of(h.size(), k, lambda), lambda);
  if (!rep.ok)
    fail(ErrorKind::InternalContractViolation,
         "find_l_sequence output failed its validator: " + rep.violations.front());
  res.sequence = std::move(s);
  return res;
}

}  // namespace stellar::engine
