#pragma once

// The two star-search loops. Both walk a colored m-sequence trying to embed
// the pattern's stars one at a time: a found star shrinks the sequence around
// its vertices (state 1), a missing star yields exact one-way completeness
// between two chunks (state 0). The strong-sequence loop banks those
// completeness facts as edges of a graph over the designated transitive
// chunks until an h-clique appears and an I-strong subsequence can be read
// off; the core loop instead merges the complete pair through the supplied
// extractor and returns a polynomial-size transitive set.

#include "stellar/engine/find_clique.hpp"
#include "stellar/engine/find_m_sequence.hpp"
#include "stellar/engine/make_smooth.hpp"
#include "stellar/engine/params.hpp"
#include "stellar/pattern.hpp"

namespace stellar::engine {

struct StrongResult {
  seq::Sequence sequence;
  std::vector<std::size_t> strong_index_set;  // 1-based transitive indices
  ParamState ledger;
  std::size_t state0_count = 0;
  std::size_t state1_count = 0;
};

namespace detail {

struct ColoredSeq {
  seq::Sequence s;
  std::vector<int> vcolor;  // per vertex of the host tournament; 1..h+1

  Bitset color_class(std::size_t elem, int color) const {
    Bitset out(s.elements[elem].members.universe());
    const Bitset& m = s.elements[elem].members;
    for (std::size_t v = m.first(); v != Bitset::npos; v = m.next(v))
      if (vcolor[v] == color) out.set(v);
    return out;
  }

  std::vector<int> colors_present(std::size_t elem, int max_color) const {
    std::vector<int> out;
    for (int c = 1; c <= max_color; ++c)
      if (!color_class(elem, c).empty()) out.push_back(c);
    return out;
  }
};

// Slice the first h color classes of `elem` along its transitive ordering,
// floor(|C|/(h+2)) vertices each; the remainder is colored h+1. The slices
// must clear the xi = 1/(2(h+2)) fraction, which they do iff the chunk holds
// at least roughly 2(h+2) vertices.
inline void slice_color(const Tournament& t, ColoredSeq& cs, std::size_t elem, std::size_t h) {
  const Bitset& m = cs.s.elements[elem].members;
  std::size_t size = m.count();
  std::size_t slot = size / (h + 2);
  if (slot == 0 || 2 * (h + 2) * slot < size)
    fail(ErrorKind::InsufficientSize,
         "chunk of size " + std::to_string(size) + " too small to slice into " +
             std::to_string(h + 2) + " color bands (needs ~2(h+2) vertices)");
  Ordering order = transitive_ordering(t, m);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t band = i / slot;
    cs.vcolor[order[i]] = band < h ? static_cast<int>(band + 1) : static_cast<int>(h + 1);
  }
}

// Survivor subsets for the shrink after a found star: per element, per
// present color, the class minus the consumed vertices, filtered against the
// found vertices by sequence order. Vertices sharing an element with a found
// vertex are not filtered against it.
inline std::vector<std::vector<Bitset>> star_removal_subsets(
    const Tournament& t, const ColoredSeq& cs, int max_color, const Bitset& used,
    const std::vector<std::pair<std::size_t, std::size_t>>& found) {
  std::size_t k = cs.s.elements.size();
  std::vector<std::vector<Bitset>> subsets(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (int c = 1; c <= max_color; ++c) {
      Bitset d = cs.color_class(i, c) - used;
      if (d.empty()) continue;
      Bitset kept(t.size());
      for (std::size_t v = d.first(); v != Bitset::npos; v = d.next(v)) {
        bool ok = true;
        for (const auto& [ei, w] : found) {
          if (ei == i) continue;
          ok = ei < i ? t.edge(w, v) : t.edge(v, w);
          if (!ok) break;
        }
        if (ok) kept.set(v);
      }
      subsets[i].push_back(std::move(kept));
    }
  }
  return subsets;
}

// lexicographically smallest clique of size `want` within `allowed`
inline std::optional<std::vector<std::size_t>> find_small_clique(const UndirectedGraph& g,
                                                                 std::size_t want,
                                                                 const Bitset& allowed) {
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t from, const Bitset& cand) -> bool {
    if (cur.size() == want) return true;
    for (std::size_t v = from; v < g.size(); ++v) {
      if (!cand.test(v)) continue;
      cur.push_back(v);
      if (self(self, v + 1, cand & g.adj[v])) return true;
      cur.pop_back();
    }
    return false;
  };
  if (want == 0) return std::vector<std::size_t>{};
  if (rec(rec, 0, allowed)) return cur;
  return std::nullopt;
}

inline std::optional<std::vector<std::size_t>> find_independent(const UndirectedGraph& g,
                                                                std::size_t want) {
  UndirectedGraph comp(g.size());
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b)
      if (!g.adj[a].test(b)) comp.add_edge(a, b);
  return find_small_clique(comp, want, Bitset::full(g.size()));
}

// Next independent set for the strong-sequence loop. The next state-0 event
// adds an edge between the members at sorted positions rank_lo and rank_hi,
// so among non-adjacent node pairs we prefer the one with the most common
// banked edges and place it exactly there; the lex-first independent set is
// the fallback. (The choice of S* is free; the lex-first choice alone funnels
// every event through the lowest node and the chunks shrink geometrically.)
inline std::optional<std::vector<std::size_t>> choose_independent(const UndirectedGraph& g,
                                                                  std::size_t h,
                                                                  std::size_t rank_lo,
                                                                  std::size_t rank_hi) {
  std::size_t n = g.size();
  std::size_t best_score = 0;
  std::optional<std::vector<std::size_t>> best;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (g.adj[a].test(b)) continue;
      std::size_t score = g.adj[a].intersection_count(g.adj[b]) + 1;
      if (score <= best_score) continue;
      // fillers below a, between a and b, above b, all pairwise non-adjacent
      std::vector<std::size_t> chosen = {a, b};
      auto independent_of_all = [&](std::size_t v) {
        for (auto c : chosen)
          if (c == v || g.adj[c].test(v)) return false;
        return true;
      };
      auto take_range = [&](std::size_t lo, std::size_t hi, std::size_t count) {
        for (std::size_t v = lo; v < hi && count > 0; ++v)
          if (independent_of_all(v)) {
            chosen.push_back(v);
            --count;
          }
        return count == 0;
      };
      bool ok = take_range(0, a, rank_lo) && take_range(a + 1, b, rank_hi - rank_lo - 1) &&
                take_range(b + 1, n, h - 1 - rank_hi);
      if (!ok) continue;
      best_score = score;
      std::sort(chosen.begin(), chosen.end());
      best = std::move(chosen);
    }
  if (best) return best;
  return find_independent(g, h);
}

struct StarTarget {
  const pat::Star* star;
  std::size_t block_center;             // 1-based block index of the center
  std::size_t rank_center;              // 1-based position inside the block
  std::size_t block_leaves;             // 1-based block index of all leaves
  std::vector<std::size_t> rank_leaves; // 1-based positions inside the block
};

// Block/rank coordinates of every star under the partition; the search space
// of both loops.
inline std::vector<StarTarget> star_targets(const Tournament& h, const Ordering& theta,
                                            const pat::StarDecomposition& dec,
                                            const pat::ThetaPartition& part) {
  pat::BackwardGraph bg = pat::backward_edge_graph(h, theta);
  auto rank_in_block = [&](std::size_t v) {
    std::size_t b = part.block_of(v);
    std::size_t r = 0;
    for (std::size_t u = part.blocks[b].members.first(); u != Bitset::npos;
         u = part.blocks[b].members.next(u)) {
      if (bg.pos[u] < bg.pos[v]) ++r;
    }
    return r + 1;
  };
  std::vector<StarTarget> out;
  for (const auto& star : dec.stars) {
    StarTarget tg;
    tg.star = &star;
    tg.block_center = part.block_of(star.center) + 1;
    tg.rank_center = rank_in_block(star.center);
    tg.block_leaves = part.block_of(star.leaves.front()) + 1;
    for (auto l : star.leaves) tg.rank_leaves.push_back(rank_in_block(l));
    if (tg.block_center == tg.block_leaves)
      fail(ErrorKind::NotConstellation, "star center shares a block with its leaves");
    out.push_back(std::move(tg));
  }
  return out;
}

struct StarSearchOutcome {
  bool found;  // state 1
  std::size_t rho = 0;
  std::vector<std::size_t> rs;
  // state 0 payload
  Bitset complete_part;  // subset of X uniformly complete to/from leaf class
  int leaf_color = 0;
  std::size_t center_elem = 0, leaf_elem = 0;
};

// One star probe. Center candidates live in the color-(rank_center) class of
// `center_elem`, leaf candidates in the rank-colored classes of `leaf_elem`.
// A left star needs backward edges r -> rho (rho earlier), a right star
// rho -> r (rho later).
inline StarSearchOutcome probe_star(const Tournament& t, const ColoredSeq& cs,
                                    const StarTarget& tg, std::size_t center_elem,
                                    std::size_t leaf_elem) {
  StarSearchOutcome out;
  bool left = tg.star->side == pat::Side::left;
  Bitset x = cs.color_class(center_elem, static_cast<int>(tg.rank_center));
  if (x.empty())
    fail(ErrorKind::InternalContractViolation, "star search: empty center color class");
  std::size_t q = tg.rank_leaves.size();
  std::vector<Bitset> leaf_classes;
  for (auto r : tg.rank_leaves) {
    leaf_classes.push_back(cs.color_class(leaf_elem, static_cast<int>(r)));
    if (leaf_classes.back().empty())
      fail(ErrorKind::InternalContractViolation, "star search: empty leaf color class");
  }
  for (std::size_t v = x.first(); v != Bitset::npos; v = x.next(v)) {
    std::vector<std::size_t> picks;
    bool ok = true;
    for (std::size_t i = 0; i < q && ok; ++i) {
      // candidate leaves with the backward edge toward/from v
      Bitset match = left ? (leaf_classes[i] - t.out(v)) : (leaf_classes[i] & t.out(v));
      match.reset(v);
      if (match.empty())
        ok = false;
      else
        picks.push_back(match.first());
    }
    if (ok) {
      out.found = true;
      out.rho = v;
      out.rs = std::move(picks);
      return out;
    }
  }
  // state 0: every center candidate is uniformly complete against some leaf
  // color; take the most common failing color (lowest on ties)
  std::vector<std::size_t> failures(q, 0);
  for (std::size_t v = x.first(); v != Bitset::npos; v = x.next(v))
    for (std::size_t i = 0; i < q; ++i) {
      Bitset match = left ? (leaf_classes[i] - t.out(v)) : (leaf_classes[i] & t.out(v));
      match.reset(v);
      if (match.empty()) {
        ++failures[i];
        break;
      }
    }
  std::size_t istar = 0;
  for (std::size_t i = 1; i < q; ++i)
    if (failures[i] > failures[istar]) istar = i;
  Bitset complete(t.size());
  for (std::size_t v = x.first(); v != Bitset::npos; v = x.next(v)) {
    Bitset match = left ? (leaf_classes[istar] - t.out(v)) : (leaf_classes[istar] & t.out(v));
    match.reset(v);
    if (match.empty()) complete.set(v);
  }
  out.found = false;
  out.complete_part = std::move(complete);
  out.leaf_color = static_cast<int>(tg.rank_leaves[istar]);
  out.center_elem = center_elem;
  out.leaf_elem = leaf_elem;
  return out;
}

}  // namespace detail

struct StrongParams {
  Mode mode = Mode::relaxed;
  Rat c, lambda, eps;
  Rat M;  // M-bigness of the input sequence
};

// FindStrong-M-Sequence. Input: an M-big (c,lambda,eps)-m-sequence of length
// 2^{h+2}(h+1)+2h+1 in an H-free tournament, H a constellation under theta.
// Output: an I-strong subsequence of length 2h^2+4h+1 with
// I = {h+1, 2h+1, ..., h^2+1}, valid at (c/2^(2^(4h+3)), 2^(2^(5h)) lambda).
inline StrongResult find_strong_m_sequence(const Tournament& h, const Ordering& theta,
                                           const Tournament& t, const seq::Sequence& mseq,
                                           const StrongParams& sp) {
  std::size_t hh = h.size();
  if (hh < 2) fail(ErrorKind::DomainError, "find_strong_m_sequence needs |H| >= 2");
  if (!pat::is_constellation_ordering(h, theta))
    fail(ErrorKind::NotConstellation, "theta is not a constellation ordering of H");

  if (sp.mode == Mode::strict) {
    StrictConstants sc = strict_constants(hh);
    const FactoredRat& min_m = sc.threshold("find_strong_min_M");
    if (FactoredRat::from_rat(sp.M).cmp(min_m) < 0)
      fail(ErrorKind::InsufficientSize,
           "strict mode needs M >= 2(h+2)*2^(2^(8h+2)) = " + min_m.to_string() +
               "; desk-scale inputs cannot reach this");
    const FactoredRat& max_l = sc.threshold("find_strong_max_lambda");
    if (FactoredRat::from_rat(sp.lambda).cmp(max_l) > 0)
      fail(ErrorKind::InsufficientSize,
           "strict mode needs lambda <= 2^(-2^(5h+6)) = " + max_l.to_string());
  }

  std::size_t want_len = (std::size_t(1) << (hh + 2)) * (hh + 1) + 2 * hh + 1;
  if (mseq.elements.size() != want_len)
    fail(ErrorKind::PreconditionViolated, "find_strong_m_sequence needs length " +
                                              std::to_string(want_len) + ", got " +
                                              std::to_string(mseq.elements.size()));
  {
    seq::Params in{seq::SizeCoeff(sp.c), sp.lambda, sp.eps};
    auto rep = seq::validate_m_sequence(t, mseq, in);
    if (!rep.ok)
      fail(ErrorKind::PreconditionViolated,
           "find_strong_m_sequence: input invalid: " + rep.violations.front());
    if (!seq::validate_M_big(mseq, sp.M))
      fail(ErrorKind::PreconditionViolated, "find_strong_m_sequence: input not M-big");
  }

  pat::BackwardGraph bg = pat::backward_edge_graph(h, theta);
  pat::StarDecomposition dec = pat::star_decomposition(bg);
  if (dec.stars.empty())
    fail(ErrorKind::PreconditionViolated,
         "find_strong_m_sequence needs at least one star (H has no backward edges)");
  pat::ThetaPartition part = pat::theta_partition(h, theta);
  auto targets = detail::star_targets(h, theta, dec, part);

  ParamState ps;
  ps.mode = sp.mode;
  ps.c = Value(sp.c);
  ps.lambda = Value(sp.lambda);
  ps.xi = make_rat(1, 2 * (static_cast<long>(hh) + 2));
  ps.record("entry");

  std::size_t k = want_len;
  seq::Params cur{seq::SizeCoeff(sp.c), sp.lambda, sp.eps};
  std::vector<std::vector<Bitset>> whole;
  for (const auto& e : mseq.elements) whole.push_back({e.members});
  SmoothResult sm = make_smooth(t, mseq, whole, Rat(0), cur, false);
  detail::ColoredSeq cs{std::move(sm.sequence), std::vector<int>(t.size(), static_cast<int>(hh + 1))};
  ps.c = Value(sp.c / 2);
  ps.lambda = Value(4 * sp.lambda * Rat(static_cast<unsigned long>(k)));
  ps.record("preprocess-smooth");
  seq::Params ledger_params{seq::SizeCoeff(ps.c.rat()), ps.lambda.rat(), sp.eps};

  std::size_t node_count = std::size_t(1) << (hh + 1);
  auto node_elem = [&](std::size_t node) { return (node + 1) * (2 * hh + 2) - 1; };
  UndirectedGraph g(node_count);
  std::vector<std::size_t> s_nodes(hh);
  for (std::size_t i = 0; i < hh; ++i) s_nodes[i] = i;
  for (auto nd : s_nodes) detail::slice_color(t, cs, node_elem(nd), hh);

  std::size_t turan_cap =
      hh >= 3 ? node_count * node_count * (hh - 2) / (2 * (hh - 1)) + 1 : 1;
  StrongResult result;
  std::vector<const detail::StarTarget*> sigma;
  auto reset_sigma = [&] {
    sigma.clear();
    for (const auto& tg : targets) sigma.push_back(&tg);
  };
  reset_sigma();
  std::size_t consecutive_state1 = 0;

  while (true) {
    if (sigma.empty())
      fail(ErrorKind::InternalContractViolation,
           "all stars embedded consecutively; T should have been H-free");
    const detail::StarTarget& tg = *sigma.front();
    std::size_t center_elem = node_elem(s_nodes[tg.block_center - 1]);
    std::size_t leaf_elem = node_elem(s_nodes[tg.block_leaves - 1]);
    auto probe = detail::probe_star(t, cs, tg, center_elem, leaf_elem);

    if (probe.found) {
      ++result.state1_count;
      if (++consecutive_state1 > hh - 1)
        fail(ErrorKind::InternalContractViolation,
             "state 1 repeated h times in a row; stars would assemble a copy of H");
      sigma.erase(sigma.begin());
      Bitset used = cs.color_class(center_elem, static_cast<int>(tg.rank_center));
      std::vector<std::pair<std::size_t, std::size_t>> found = {{center_elem, probe.rho}};
      for (std::size_t i = 0; i < probe.rs.size(); ++i) {
        used |= cs.color_class(leaf_elem, static_cast<int>(tg.rank_leaves[i]));
        found.emplace_back(leaf_elem, probe.rs[i]);
      }
      auto subsets = detail::star_removal_subsets(t, cs, static_cast<int>(hh + 1), used, found);
      Rat shrink = 1 - ps.lambda.rat() * Rat(static_cast<unsigned long>(hh)) / ps.xi;
      if (shrink <= 0)
        fail(ErrorKind::PreconditionViolated, "lambda too large for xi in the shrink step");
      Rat f = 1 - ps.xi * shrink;
      SmoothResult shr = make_smooth(t, cs.s, subsets, f, ledger_params, false);
      cs.s = std::move(shr.sequence);
      Updates::state1(ps, hh, k, true);
      ledger_params = {seq::SizeCoeff(ps.c.rat()), ps.lambda.rat(), sp.eps};
      continue;
    }

    // state 0: bank the completeness fact as a graph edge
    ++result.state0_count;
    consecutive_state1 = 0;
    if (result.state0_count > turan_cap)
      fail(ErrorKind::InternalContractViolation, "state-0 events exceeded the Turan bound");
    if (probe.complete_part.empty())
      fail(ErrorKind::InternalContractViolation, "state 0 with empty complete part");
    std::size_t node_c = s_nodes[tg.block_center - 1];
    std::size_t node_l = s_nodes[tg.block_leaves - 1];
    Bitset leaf_class = cs.color_class(leaf_elem, probe.leaf_color);
    cs.s.elements[center_elem].members = probe.complete_part;
    cs.s.elements[leaf_elem].members = leaf_class;
    g.add_edge(node_c, node_l);

    Rat xi = ps.xi;
    Rat hq(static_cast<unsigned long>(hh));
    seq::Params interim{ledger_params.c.scaled(xi / hq),
                        ledger_params.lambda * hq * hq / (xi * xi), sp.eps};
    std::vector<std::vector<Bitset>> all;
    for (const auto& e : cs.s.elements) all.push_back({e.members});
    SmoothResult resm = make_smooth(t, cs.s, all, Rat(0), interim, true);
    cs.s = std::move(resm.sequence);
    Updates::state0(ps, hh, k);
    ledger_params = {seq::SizeCoeff(ps.c.rat()), ps.lambda.rat(), sp.eps};

    // clique? the last designated chunk is excluded: a clique through it
    // leaves too little tail material for the subsequence
    Bitset allowed = Bitset::full(node_count);
    allowed.reset(node_count - 1);
    auto clique = detail::find_small_clique(g, hh, allowed);
    if (clique) {
      std::sort(clique->begin(), clique->end());
      // output positions 2(jh+1), j=1..h, carry the clique chunks; everything
      // else is filled from the input order
      std::size_t out_len = 2 * hh * hh + 4 * hh + 1;
      seq::Sequence out;
      out.kind = seq::Kind::m;
      std::size_t cursor = 0;  // 0-based input position
      std::size_t next_clique = 0;
      for (std::size_t q = 1; q <= out_len; ++q) {
        bool is_clique_slot = next_clique < hh && q == 2 * ((next_clique + 1) * hh + 1);
        if (is_clique_slot) {
          std::size_t p = node_elem((*clique)[next_clique]);
          out.elements.push_back(cs.s.elements[p]);
          cursor = p + 1;
          ++next_clique;
        } else {
          if (cursor >= cs.s.elements.size())
            fail(ErrorKind::InternalContractViolation, "ran out of elements extracting subsequence");
          out.elements.push_back(cs.s.elements[cursor]);
          ++cursor;
        }
      }
      std::vector<std::size_t> index_set;
      for (std::size_t j = 1; j <= hh; ++j) index_set.push_back(j * hh + 1);

      // contract: (c-hat, lambda-hat) from the entry parameters
      Rat chat_scale = make_rat(Int(1), Int(1) << Int(Int(1) << (4 * hh + 3)).get_ui());
      Rat lhat_scale(Int(1) << Int(Int(1) << (5 * hh)).get_ui());
      seq::Params target{seq::SizeCoeff(sp.c * chat_scale), sp.lambda * lhat_scale, sp.eps};
      auto rep = seq::validate_m_sequence(t, out, target);
      if (!rep.ok)
        fail(ErrorKind::InternalContractViolation,
             "strong output failed (c-hat, lambda-hat) validation: " + rep.violations.front());
      if (!seq::validate_strong(t, out, index_set))
        fail(ErrorKind::InternalContractViolation, "strong output not I-strong");
      if (!seq::validate_M_big(out, sp.M * chat_scale))
        fail(ErrorKind::InternalContractViolation, "strong output lost M-bigness");
      ps.record("extracted");
      result.sequence = std::move(out);
      result.strong_index_set = std::move(index_set);
      result.ledger = std::move(ps);
      return result;
    }

    // the next event reconnects the first star's block pair; place the most
    // promising non-adjacent node pair at exactly those positions
    std::size_t rank_lo = std::min(targets[0].block_center, targets[0].block_leaves) - 1;
    std::size_t rank_hi = std::max(targets[0].block_center, targets[0].block_leaves) - 1;
    auto indep = detail::choose_independent(g, hh, rank_lo, rank_hi);
    if (!indep)
      fail(ErrorKind::InternalContractViolation,
           "graph has neither an h-clique nor an h-independent set");
    s_nodes = *indep;
    std::sort(s_nodes.begin(), s_nodes.end());
    reset_sigma();
    // full recolor: everything back to h+1, then slice the new S chunks
    for (const auto& e : cs.s.elements)
      for (std::size_t v = e.members.first(); v != Bitset::npos; v = e.members.next(v))
        cs.vcolor[v] = static_cast<int>(hh + 1);
    for (auto nd : s_nodes) detail::slice_color(t, cs, node_elem(nd), hh);
  }
}

struct PolyTransParams {
  Mode mode = Mode::relaxed;
  Rat c, lambda;
  Rat eps_in;  // transitive exponent of the input sequence
  Rat N;       // bigness of the input sequence
};

struct PolyTransResult {
  Bitset transitive_set;
  EpsilonBound eps;  // output exponent, epsilon_of(c / 2^(7h^2))
  ParamState ledger;
  std::size_t stars_embedded = 0;
};

// PolyTrans. Input: an I-strong m-sequence of length 2h^2+4h+1 in an H-free
// tournament plus a procedure that extracts a transitive set of size
// >= |T_S|^eps from any proper subtournament. Output: a transitive set of
// size >= |T|^eps, eps = epsilon_of(c/2^(7h^2)). Pattern vertices are mapped
// to chunks through the zeta position map; a missing star hands the complete
// chunk pair to the merging step.
inline PolyTransResult poly_trans(const Tournament& h, const Ordering& theta, const Tournament& t,
                                  const seq::Sequence& strong, const PolyTransParams& pp,
                                  const Extractor& proc) {
  std::size_t hh = h.size();
  if (hh < 2) fail(ErrorKind::DomainError, "poly_trans needs |H| >= 2");
  if (!pat::is_constellation_ordering(h, theta))
    fail(ErrorKind::NotConstellation, "theta is not a constellation ordering of H");

  if (pp.mode == Mode::strict) {
    StrictConstants sc = strict_constants(hh);
    FactoredRat min_n = sc.threshold("poly_trans_min_N") / FactoredRat::from_rat(pp.c);
    if (FactoredRat::from_int(Int(static_cast<unsigned long>(t.size() ? t.size() : 1)))
            .cmp(min_n) < 0 ||
        t.size() == 0)
      fail(ErrorKind::InsufficientSize,
           "strict mode needs n >= 2^(21h^2)/c = " + min_n.to_string());
    if (FactoredRat::from_rat(pp.lambda).cmp(sc.threshold("poly_trans_max_lambda")) > 0)
      fail(ErrorKind::InsufficientSize, "strict mode needs lambda <= 1/(2^(25h^2) h)");
    if (FactoredRat::from_rat(pp.N).cmp(sc.threshold("poly_trans_min_N")) < 0)
      fail(ErrorKind::InsufficientSize, "strict mode needs N >= 2^(21h^2)");
  }

  std::size_t k = 2 * hh * hh + 4 * hh + 1;
  if (strong.elements.size() != k)
    fail(ErrorKind::PreconditionViolated,
         "poly_trans needs length " + std::to_string(k) + ", got " +
             std::to_string(strong.elements.size()));
  std::vector<std::size_t> index_set;
  for (std::size_t j = 1; j <= hh; ++j) index_set.push_back(j * hh + 1);
  {
    seq::Params in{seq::SizeCoeff(pp.c), pp.lambda, pp.eps_in};
    auto rep = seq::validate_m_sequence(t, strong, in);
    if (!rep.ok)
      fail(ErrorKind::PreconditionViolated,
           "poly_trans: input invalid: " + rep.violations.front());
    if (!seq::validate_strong(t, strong, index_set))
      fail(ErrorKind::PreconditionViolated, "poly_trans: input not I-strong");
  }

  Rat chat = pp.c / Rat(Int(1) << (7 * hh * hh));
  EpsilonBound eps = epsilon_of(chat);

  ParamState ps;
  ps.mode = pp.mode;
  ps.c = Value(pp.c);
  ps.lambda = Value(pp.lambda);
  ps.xi = make_rat(1, 6);
  ps.record("entry");

  seq::Params cur{seq::SizeCoeff(pp.c), pp.lambda, pp.eps_in};
  std::vector<std::vector<Bitset>> whole;
  for (const auto& e : strong.elements) whole.push_back({e.members});
  SmoothResult sm = make_smooth(t, strong, whole, Rat(0), cur, false);
  detail::ColoredSeq cs{std::move(sm.sequence),
                        std::vector<int>(t.size(), static_cast<int>(hh + 1))};
  ps.c = Value(pp.c / 2);
  ps.lambda = Value(4 * pp.lambda * Rat(static_cast<unsigned long>(k)));
  ps.record("preprocess-smooth");
  seq::Params ledger_params{seq::SizeCoeff(ps.c.rat()), ps.lambda.rat(), pp.eps_in};

  // zeta coloring: H-vertex v gets color v+1 on a third of chunk zeta(v)
  pat::ZetaMap zeta = pat::zeta_map(h, theta);
  for (std::size_t hv = 0; hv < hh; ++hv) {
    std::size_t elem = zeta.pos[hv] - 1;
    if (elem >= k)
      fail(ErrorKind::InternalContractViolation, "zeta position beyond sequence length");
    const Bitset& m = cs.s.elements[elem].members;
    std::size_t size = m.count();
    std::size_t band = size / 3;
    if (band == 0 || 6 * band < size)
      fail(ErrorKind::InsufficientSize,
           "chunk of size " + std::to_string(size) + " too small for the 1/3 color band");
    std::vector<std::size_t> order;
    if (cs.s.elements[elem].role == seq::Role::transitive) {
      order = transitive_ordering(t, m);
    } else {
      order = m.to_vector();
    }
    for (std::size_t i = 0; i < band; ++i) cs.vcolor[order[i]] = static_cast<int>(hv + 1);
  }

  pat::BackwardGraph bg = pat::backward_edge_graph(h, theta);
  pat::StarDecomposition dec = pat::star_decomposition(bg);
  if (dec.stars.empty())
    fail(ErrorKind::PreconditionViolated, "poly_trans needs at least one star in H");
  std::vector<const pat::Star*> sigma;
  for (const auto& s : dec.stars) sigma.push_back(&s);
  std::vector<std::string> found_log;

  while (true) {
    if (sigma.empty())
      fail(ErrorKind::InternalContractViolation,
           "all stars of H embedded; assembled copy: " +
               [&] {
                 std::string s;
                 for (const auto& f : found_log) s += f + "; ";
                 return s;
               }());
    const pat::Star& star = *sigma.front();
    bool left = star.side == pat::Side::left;
    std::size_t center_elem = zeta.pos[star.center] - 1;
    std::size_t q = star.leaves.size();
    Bitset x = cs.color_class(center_elem, static_cast<int>(star.center + 1));
    if (x.empty()) fail(ErrorKind::InternalContractViolation, "empty center color class");
    std::vector<Bitset> leaf_classes;
    std::vector<std::size_t> leaf_elems;
    for (auto l : star.leaves) {
      leaf_elems.push_back(zeta.pos[l] - 1);
      leaf_classes.push_back(cs.color_class(zeta.pos[l] - 1, static_cast<int>(l + 1)));
      if (leaf_classes.back().empty())
        fail(ErrorKind::InternalContractViolation, "empty leaf color class");
    }

    std::size_t tau = Bitset::npos;
    std::vector<std::size_t> picks;
    for (std::size_t v = x.first(); v != Bitset::npos && tau == Bitset::npos; v = x.next(v)) {
      std::vector<std::size_t> rs;
      bool ok = true;
      for (std::size_t i = 0; i < q && ok; ++i) {
        Bitset match = left ? (leaf_classes[i] - t.out(v)) : (leaf_classes[i] & t.out(v));
        match.reset(v);
        if (match.empty())
          ok = false;
        else
          rs.push_back(match.first());
      }
      if (ok) {
        tau = v;
        picks = std::move(rs);
      }
    }

    if (tau != Bitset::npos) {
      // state 1: remove the star's host classes and shrink
      {
        std::string entry = "center " + std::to_string(star.center) + "->" + std::to_string(tau);
        for (std::size_t i = 0; i < q; ++i)
          entry += ", leaf " + std::to_string(star.leaves[i]) + "->" + std::to_string(picks[i]);
        found_log.push_back(entry);
      }
      sigma.erase(sigma.begin());
      Bitset used = x;
      std::vector<std::pair<std::size_t, std::size_t>> found = {{center_elem, tau}};
      for (std::size_t i = 0; i < q; ++i) {
        used |= leaf_classes[i];
        found.emplace_back(leaf_elems[i], picks[i]);
      }
      auto subsets = detail::star_removal_subsets(t, cs, static_cast<int>(hh + 1), used, found);
      Rat shrink = 1 - ps.lambda.rat() * Rat(static_cast<unsigned long>(hh)) / ps.xi;
      if (shrink <= 0)
        fail(ErrorKind::PreconditionViolated, "lambda too large for xi in the shrink step");
      Rat f = 1 - ps.xi * shrink;
      SmoothResult shr = make_smooth(t, cs.s, subsets, f, ledger_params, false);
      cs.s = std::move(shr.sequence);
      Updates::state1(ps, hh, k, false);
      ledger_params = {seq::SizeCoeff(ps.c.rat()), ps.lambda.rat(), pp.eps_in};
      continue;
    }

    // state 0: some leaf class is uniformly complete against a chunk of X;
    // merge the extractor's output on that chunk with the leaf class
    std::vector<std::size_t> failures(q, 0);
    for (std::size_t v = x.first(); v != Bitset::npos; v = x.next(v))
      for (std::size_t i = 0; i < q; ++i) {
        Bitset match = left ? (leaf_classes[i] - t.out(v)) : (leaf_classes[i] & t.out(v));
        match.reset(v);
        if (match.empty()) {
          ++failures[i];
          break;
        }
      }
    std::size_t jstar = 0;
    for (std::size_t i = 1; i < q; ++i)
      if (failures[i] > failures[jstar]) jstar = i;
    Bitset complete(t.size());
    for (std::size_t v = x.first(); v != Bitset::npos; v = x.next(v)) {
      Bitset match = left ? (leaf_classes[jstar] - t.out(v)) : (leaf_classes[jstar] & t.out(v));
      match.reset(v);
      if (match.empty()) complete.set(v);
    }
    if (complete.empty())
      fail(ErrorKind::InternalContractViolation, "state 0 with empty complete part");

    Bitset ext = checked_extract(t, complete, eps.lo, proc);
    Bitset merged = ext | leaf_classes[jstar];
    if (!is_transitive(t, merged))
      fail(ErrorKind::InternalContractViolation, "merged set not transitive");
    if (!size_meets_floor(merged.count(), Rat(1), t.size(), eps.lo))
      fail(ErrorKind::InternalContractViolation, "merged set below |T|^eps");
    ps.record("merge");
    return PolyTransResult{std::move(merged), eps, std::move(ps), found_log.size()};
  }
}

}  // namespace stellar::engine
