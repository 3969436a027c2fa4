#pragma once

// m-sequence construction: carve transitive pieces out of every even-position
// linear set (alternating the greedy logarithmic extraction with the supplied
// extractor) until half the set is consumed, wire all pieces and the odd
// sets into a density graph, and read the output off a transversal clique.

#include <functional>

#include "stellar/engine/find_clique.hpp"
#include "stellar/sequence.hpp"

namespace stellar::engine {

// extractor(T, S): a transitive subset of S of size >= |S|^eps
using Extractor = std::function<Bitset(const Tournament&, const Bitset&)>;

inline Bitset checked_extract(const Tournament& t, const Bitset& domain, const Rat& eps,
                              const Extractor& extract) {
  Bitset got = extract(t, domain);
  if (!got.is_subset_of(domain))
    fail(ErrorKind::ExtractorBroke, "extractor left its domain");
  if (!is_transitive(t, got)) fail(ErrorKind::ExtractorBroke, "extractor output not transitive");
  if (!seq::SizeCoeff(Rat(1)).floor_ok(got.count(), domain.count(), eps))
    fail(ErrorKind::ExtractorBroke, "extractor output below |S|^eps");
  return got;
}

// Output is a (min((c/2)^eps, c), Lambda, eps)-m-sequence of the same length
// as the input l-sequence, (log2(cn)-2)-big. Every odd-position linear set is
// a graph class of its own, so all 2k+1 classes are present.
inline seq::Sequence find_m_sequence(const Tournament& t, const seq::Sequence& lseq, const Rat& c,
                                     const Rat& lambda, const Rat& Lambda, const Rat& eps,
                                     const Extractor& sub) {
  if (lseq.kind != seq::Kind::l)
    fail(ErrorKind::RolePatternMismatch, "find_m_sequence needs an l-sequence");
  if (lseq.elements.size() % 2 == 0)
    fail(ErrorKind::PreconditionViolated, "find_m_sequence needs odd length 2k+1");
  std::size_t k = lseq.elements.size() / 2;
  if (!(Lambda > 0 && Lambda < 1))
    fail(ErrorKind::PreconditionViolated, "find_m_sequence needs 0 < Lambda < 1");
  // lambda <= Lambda / (4 (2k+1) 3^{4k+3})
  Rat cap = Lambda / (4 * Rat(static_cast<unsigned long>(2 * k + 1)) * Rat(pow_int(Int(3), 4 * k + 3)));
  if (lambda > cap)
    fail(ErrorKind::PreconditionViolated, "find_m_sequence: lambda above Lambda/(4(2k+1)3^(4k+3))");
  {
    auto rep = seq::validate_l_sequence(t, lseq, seq::SizeCoeff(c), lambda);
    if (!rep.ok)
      fail(ErrorKind::PreconditionViolated,
           "find_m_sequence: input l-sequence invalid: " + rep.violations.front());
  }
  std::size_t n = t.size();

  if (k == 0) {
    seq::Sequence out{seq::Kind::m, {{lseq.elements[0].members, seq::Role::linear}}};
    return out;
  }

  // node universe of the density graph: pieces carved from even positions
  // plus the odd-position sets themselves
  std::vector<Bitset> node_sets;
  std::vector<std::vector<std::size_t>> class_nodes(2 * k + 1);
  for (std::size_t pos = 0; pos < 2 * k + 1; ++pos) {
    if (pos % 2 == 0) {  // linear class, one node
      class_nodes[pos].push_back(node_sets.size());
      node_sets.push_back(lseq.elements[pos].members);
      continue;
    }
    const Bitset& a = lseq.elements[pos].members;
    Bitset remaining = a;
    while (2 * remaining.count() >= a.count() && !remaining.empty()) {
      Bitset tr1 = greedy_log_transitive(t, remaining);
      Bitset tr2 = checked_extract(t, remaining, eps, sub);
      Bitset piece = tr1.count() >= tr2.count() ? tr1 : tr2;
      class_nodes[pos].push_back(node_sets.size());
      node_sets.push_back(piece);
      remaining = remaining - piece;
    }
  }

  UndirectedGraph g(node_sets.size());
  std::vector<Bitset> classes;
  for (std::size_t pos = 0; pos < 2 * k + 1; ++pos) {
    Bitset cls(node_sets.size());
    for (auto id : class_nodes[pos]) cls.set(id);
    classes.push_back(std::move(cls));
  }
  for (std::size_t a = 0; a < 2 * k + 1; ++a)
    for (std::size_t b = a + 1; b < 2 * k + 1; ++b)
      for (auto x : class_nodes[a])
        for (auto y : class_nodes[b])
          if (directed_density(t, node_sets[x], node_sets[y]) >= 1 - Lambda) g.add_edge(x, y);

  Rat clique_lambda =
      Rat(1) / (Rat(static_cast<unsigned long>(2 * k + 1)) * Rat(pow_int(Int(3), 4 * k + 3)));
  std::vector<std::size_t> picked;
  try {
    picked = find_clique(g, classes, clique_lambda);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PreconditionViolated)
      fail(ErrorKind::PreconditionViolated,
           std::string("find_m_sequence: density graph too sparse for Find-Clique (") + e.what() +
               ")");
    throw;
  }

  seq::Sequence out;
  out.kind = seq::Kind::m;
  for (std::size_t pos = 0; pos < 2 * k + 1; ++pos)
    out.elements.push_back(
        {node_sets[picked[pos]], pos % 2 == 0 ? seq::Role::linear : seq::Role::transitive});

  seq::Params out_params;
  out_params.c = seq::SizeCoeff::power(Rat(1), c / 2, eps).min_with(seq::SizeCoeff(c));
  out_params.lambda = Lambda;
  out_params.eps = eps;
  auto rep = seq::validate_m_sequence(t, out, out_params);
  if (!rep.ok)
    fail(ErrorKind::InternalContractViolation,
         "find_m_sequence output failed its validator: " + rep.violations.front());
  if (!seq::validate_M_big_log2(out, c * Rat(static_cast<unsigned long>(n))))
    fail(ErrorKind::InternalContractViolation, "find_m_sequence output not (log2(cn)-2)-big");
  return out;
}

}  // namespace stellar::engine
