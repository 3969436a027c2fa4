#pragma once

// Sequence data model and exact validators: l-, t- and m-sequences, their
// smooth variants, strong index sets, M-bigness and saturated pairs. The
// validators are the contracts every engine stage is tested against; they
// never repair, only judge, and they enumerate all violations.

#include <sstream>

#include "stellar/factored.hpp"
#include "stellar/tournament.hpp"

namespace stellar::seq {

enum class Role { linear, transitive };
enum class Kind { l, t, m };

struct Element {
  Bitset members;
  Role role;
};

struct Sequence {
  Kind kind;
  std::vector<Element> elements;

  // number of transitive sets (the k of the definitions)
  std::size_t transitive_count() const {
    std::size_t c = 0;
    for (const auto& e : elements) c += e.role == Role::transitive;
    return c;
  }

  // 1-based transitive index -> element position (0-based)
  std::size_t transitive_slot(std::size_t i) const {
    std::size_t seen = 0;
    for (std::size_t p = 0; p < elements.size(); ++p)
      if (elements[p].role == Role::transitive && ++seen == i) return p;
    fail(ErrorKind::BadIndexSet, "transitive index out of range: " + std::to_string(i));
  }

  static Sequence of(Kind kind, std::vector<Element> elems) { return {kind, std::move(elems)}; }
};

// Certified floor test against a value given only through a log2 enclosure:
// size >= ceil(lower-bound of the value). When the enclosure and the size are
// within a few binary orders of each other, the dyadic bound is materialized
// and compared directly.
inline bool size_meets_log2_floor(const Int& size, const RatInterval& value_log2,
                                  unsigned prec = 96) {
  if (size <= 0) return false;  // the value is positive
  if (value_log2.hi <= 0) return true;
  RatInterval ls = log2_enclosure(Rat(size), prec);
  if (ls.lo >= value_log2.hi) return true;
  if (ls.hi < value_log2.lo) return false;
  Rat lb = exp2_enclosure(value_log2.lo, prec).lo;
  return size >= ceil_rat(lb);
}

// Size coefficient with min-of-candidates semantics; a candidate is either
// coeff * base^expo or an exact factored product (for schedule constants too
// small to expand). This is how bounds like min((c/2)^eps, c) flow into the
// validators without rounding.
struct SizeCoeff {
  struct Term {
    Rat coeff;
    Rat base;
    Rat expo;
    std::optional<FactoredRat> fact;
  };
  std::vector<Term> candidates;

  SizeCoeff() = default;
  SizeCoeff(const Rat& c) : candidates{{c, Rat(1), Rat(0), std::nullopt}} {}

  static SizeCoeff power(const Rat& coeff, const Rat& base, const Rat& expo) {
    SizeCoeff s;
    s.candidates.push_back({coeff, base, expo, std::nullopt});
    return s;
  }

  static SizeCoeff factored(FactoredRat f) {
    SizeCoeff s;
    s.candidates.push_back({Rat(1), Rat(1), Rat(0), std::move(f)});
    return s;
  }

  SizeCoeff scaled(const Rat& by) const {
    SizeCoeff s = *this;
    for (auto& t : s.candidates) {
      if (t.fact)
        t.fact = *t.fact * FactoredRat::from_rat(by);
      else
        t.coeff *= by;
    }
    return s;
  }

  SizeCoeff min_with(const SizeCoeff& o) const {
    SizeCoeff s = *this;
    s.candidates.insert(s.candidates.end(), o.candidates.begin(), o.candidates.end());
    return s;
  }

  // size >= ceil(lb(value * n^n_expo)) for at least one candidate
  bool floor_ok(std::size_t size, std::size_t n, const Rat& n_expo) const {
    if (n == 0) return true;
    Int ni(static_cast<unsigned long>(n));
    for (const auto& t : candidates) {
      if (t.fact) {
        RatInterval lg = interval_add(
            t.fact->log2(), interval_mul(interval_point(n_expo), log2_enclosure(Rat(ni))));
        if (size_meets_log2_floor(Int(static_cast<unsigned long>(size)), lg)) return true;
        continue;
      }
      Rat lb = t.coeff * pow_lower(t.base, t.expo) * pow_rat_lower(ni, n_expo);
      if (Int(static_cast<unsigned long>(size)) >= ceil_rat(lb)) return true;
    }
    return candidates.empty();
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i) os << " min ";
      if (candidates[i].fact) {
        os << candidates[i].fact->to_string();
        continue;
      }
      os << candidates[i].coeff;
      if (candidates[i].expo != 0) os << "*(" << candidates[i].base << ")^" << candidates[i].expo;
    }
    return os.str();
  }
};

struct Params {
  SizeCoeff c;
  Rat lambda;
  Rat eps = Rat(1);
};

struct Report {
  bool ok = true;
  std::vector<std::string> violations;

  void flag(std::string what) {
    ok = false;
    violations.push_back(std::move(what));
  }
};

namespace detail {

inline std::string pair_name(const char* a, std::size_t i, const char* b, std::size_t j) {
  std::ostringstream os;
  os << a << i << "->" << b << j;
  return os.str();
}

inline void check_structure(const Tournament& t, const Sequence& s, Report& rep) {
  Bitset seen(t.size());
  for (std::size_t p = 0; p < s.elements.size(); ++p) {
    const auto& e = s.elements[p];
    if (e.members.universe() != t.size()) {
      rep.flag("element " + std::to_string(p + 1) + " lives in a different universe");
      continue;
    }
    if (seen.intersects(e.members)) rep.flag("element " + std::to_string(p + 1) + " overlaps an earlier element");
    seen |= e.members;
    if (e.role == Role::transitive && !is_transitive(t, e.members))
      rep.flag("element " + std::to_string(p + 1) + " is not transitive");
  }
}

inline void check_density(const Tournament& t, const Bitset& x, const Bitset& y, const Rat& lambda,
                          const std::string& name, Report& rep) {
  if (x.empty() || y.empty()) {
    rep.flag(name + " involves an empty set");
    return;
  }
  if (x.intersects(y)) {
    rep.flag(name + " involves overlapping sets");
    return;
  }
  if (directed_density(t, x, y) < 1 - lambda) rep.flag("density " + name + " below 1-lambda");
}

// per-vertex variant: d({v}, y) or d(x, {v})
inline void check_density_vertex(const Tournament& t, const Bitset& from, const Bitset& to,
                                 const Rat& lambda, bool vertex_on_from, const std::string& name,
                                 Report& rep) {
  if (from.empty() || to.empty()) {
    rep.flag(name + " involves an empty set");
    return;
  }
  if (from.intersects(to)) {
    rep.flag(name + " involves overlapping sets");
    return;
  }
  const Bitset& single_side = vertex_on_from ? from : to;
  for (std::size_t v = single_side.first(); v != Bitset::npos; v = single_side.next(v)) {
    Bitset sv(t.size());
    sv.set(v);
    const Bitset& x = vertex_on_from ? sv : from;
    const Bitset& y = vertex_on_from ? to : sv;
    if (directed_density(t, x, y) < 1 - lambda)
      rep.flag("smooth density " + name + " fails at vertex " + std::to_string(v));
  }
}

}  // namespace detail

// (c,lambda)-l-sequence: d(A_i,A_j) >= 1-lambda for i<j, |A_i| >= c|T|.
inline Report validate_l_sequence(const Tournament& t, const Sequence& s, const SizeCoeff& c,
                                  const Rat& lambda) {
  Report rep;
  for (std::size_t p = 0; p < s.elements.size(); ++p)
    if (s.elements[p].role != Role::linear)
      rep.flag("element " + std::to_string(p + 1) + " is not linear");
  detail::check_structure(t, s, rep);
  const auto& es = s.elements;
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j)
      detail::check_density(t, es[i].members, es[j].members, lambda,
                            detail::pair_name("A", i + 1, "A", j + 1), rep);
  for (std::size_t i = 0; i < es.size(); ++i)
    if (!c.floor_ok(es[i].members.count(), t.size(), Rat(1)))
      rep.flag("size of A" + std::to_string(i + 1) + " below floor " + c.to_string());
  return rep;
}

// (c,lambda,eps)-t-sequence: transitive sets, d(T_i,T_j) >= 1-lambda for i<j,
// |T_i| >= c|T|^eps.
inline Report validate_t_sequence(const Tournament& t, const Sequence& s, const Params& p) {
  for (const auto& e : s.elements)
    if (e.role != Role::transitive)
      fail(ErrorKind::RolePatternMismatch, "t-sequence with a linear element");
  Report rep;
  detail::check_structure(t, s, rep);
  const auto& es = s.elements;
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j)
      detail::check_density(t, es[i].members, es[j].members, p.lambda,
                            detail::pair_name("T", i + 1, "T", j + 1), rep);
  for (std::size_t i = 0; i < es.size(); ++i)
    if (!p.c.floor_ok(es[i].members.count(), t.size(), p.eps))
      rep.flag("size of T" + std::to_string(i + 1) + " below floor");
  return rep;
}

// (c,lambda,eps)-m-sequence (A_1,T_1,...,A_k,T_k,A_{k+1}). Density families
// follow the definition's index ranges: T-T and A-A over 1<=i<j<=k,
// A_i->T_j over i<=j<=k, T_i->A_j over i<j<=k. Size floors cover all of
// A_1..A_{k+1} and T_1..T_k.
inline Report validate_m_sequence(const Tournament& t, const Sequence& s, const Params& p) {
  if (s.elements.size() % 2 == 0)
    fail(ErrorKind::RolePatternMismatch, "m-sequence must have odd length");
  for (std::size_t i = 0; i < s.elements.size(); ++i) {
    Role want = (i % 2 == 0) ? Role::linear : Role::transitive;
    if (s.elements[i].role != want)
      fail(ErrorKind::RolePatternMismatch,
           "m-sequence element " + std::to_string(i + 1) + " has the wrong role");
  }
  Report rep;
  detail::check_structure(t, s, rep);
  std::size_t k = s.elements.size() / 2;
  auto A = [&](std::size_t i) -> const Bitset& { return s.elements[2 * (i - 1)].members; };
  auto T = [&](std::size_t i) -> const Bitset& { return s.elements[2 * i - 1].members; };
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i + 1; j <= k; ++j) {
      detail::check_density(t, T(i), T(j), p.lambda, detail::pair_name("T", i, "T", j), rep);
      detail::check_density(t, A(i), A(j), p.lambda, detail::pair_name("A", i, "A", j), rep);
      detail::check_density(t, T(i), A(j), p.lambda, detail::pair_name("T", i, "A", j), rep);
    }
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i; j <= k; ++j)
      detail::check_density(t, A(i), T(j), p.lambda, detail::pair_name("A", i, "T", j), rep);
  for (std::size_t i = 1; i <= k + 1; ++i)
    if (!p.c.floor_ok(A(i).count(), t.size(), Rat(1)))
      rep.flag("size of A" + std::to_string(i) + " below floor");
  for (std::size_t i = 1; i <= k; ++i)
    if (!p.c.floor_ok(T(i).count(), t.size(), p.eps))
      rep.flag("size of T" + std::to_string(i) + " below floor");
  return rep;
}

inline Report validate_sequence(const Tournament& t, const Sequence& s, const Params& p) {
  switch (s.kind) {
    case Kind::l:
      return validate_l_sequence(t, s, p.c, p.lambda);
    case Kind::t:
      return validate_t_sequence(t, s, p);
    case Kind::m:
      return validate_m_sequence(t, s, p);
  }
  fail(ErrorKind::DomainError, "bad sequence kind");
}

// Smooth variants: every set-level bound is strengthened to its single-vertex
// form in both directions, per the defining bullet lists.
inline Report validate_smooth(const Tournament& t, const Sequence& s, const Params& p) {
  Report rep = validate_sequence(t, s, p);
  const Rat& lm = p.lambda;
  if (s.kind == Kind::l || s.kind == Kind::t) {
    const auto& es = s.elements;
    const char* nm = s.kind == Kind::l ? "A" : "T";
    for (std::size_t i = 0; i < es.size(); ++i)
      for (std::size_t j = i + 1; j < es.size(); ++j) {
        detail::check_density_vertex(t, es[i].members, es[j].members, lm, true,
                                     detail::pair_name(nm, i + 1, nm, j + 1), rep);
        detail::check_density_vertex(t, es[i].members, es[j].members, lm, false,
                                     detail::pair_name(nm, i + 1, nm, j + 1), rep);
      }
    return rep;
  }
  std::size_t k = s.elements.size() / 2;
  auto A = [&](std::size_t i) -> const Bitset& { return s.elements[2 * (i - 1)].members; };
  auto T = [&](std::size_t i) -> const Bitset& { return s.elements[2 * i - 1].members; };
  // smooth t-sequence on (T_1..T_k) and smooth l-sequence on (A_1..A_{k+1})
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i + 1; j <= k; ++j) {
      detail::check_density_vertex(t, T(i), T(j), lm, true, detail::pair_name("T", i, "T", j), rep);
      detail::check_density_vertex(t, T(i), T(j), lm, false, detail::pair_name("T", i, "T", j),
                                   rep);
    }
  for (std::size_t i = 1; i <= k + 1; ++i)
    for (std::size_t j = i + 1; j <= k + 1; ++j) {
      detail::check_density_vertex(t, A(i), A(j), lm, true, detail::pair_name("A", i, "A", j), rep);
      detail::check_density_vertex(t, A(i), A(j), lm, false, detail::pair_name("A", i, "A", j),
                                   rep);
    }
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i; j <= k; ++j) {
      detail::check_density_vertex(t, A(i), T(j), lm, true, detail::pair_name("A", i, "T", j), rep);
      detail::check_density_vertex(t, A(i), T(j), lm, false, detail::pair_name("A", i, "T", j),
                                   rep);
    }
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i + 1; j <= k; ++j) {
      detail::check_density_vertex(t, T(i), A(j), lm, true, detail::pair_name("T", i, "A", j), rep);
      detail::check_density_vertex(t, T(i), A(j), lm, false, detail::pair_name("T", i, "A", j),
                                   rep);
    }
  return rep;
}

// I-strong: d(T_i,T_j) exactly 1 for i<j in I (1-based transitive indices).
inline bool validate_strong(const Tournament& t, const Sequence& s,
                            const std::vector<std::size_t>& index_set) {
  std::size_t k = s.transitive_count();
  for (auto i : index_set)
    if (i < 1 || i > k)
      fail(ErrorKind::BadIndexSet, "strong index " + std::to_string(i) + " out of 1.." +
                                       std::to_string(k));
  for (std::size_t a = 0; a < index_set.size(); ++a)
    for (std::size_t b = 0; b < index_set.size(); ++b) {
      if (index_set[a] >= index_set[b]) continue;
      const Bitset& x = s.elements[s.transitive_slot(index_set[a])].members;
      const Bitset& y = s.elements[s.transitive_slot(index_set[b])].members;
      if (x.empty() || y.empty()) return false;
      if (edges_between(t, x, y) != x.count() * y.count()) return false;
    }
  return true;
}

inline bool validate_M_big(const Sequence& s, const Rat& m) {
  for (const auto& e : s.elements)
    if (e.role == Role::transitive && Rat(static_cast<unsigned long>(e.members.count())) < m)
      return false;
  return true;
}

// M-bigness at M = log2(x) - 2, checked exactly as 2^(size+2) >= x.
inline bool validate_M_big_log2(const Sequence& s, const Rat& x) {
  for (const auto& e : s.elements)
    if (e.role == Role::transitive) {
      Rat lhs(Int(1) << (e.members.count() + 2));
      if (lhs < x) return false;
    }
  return true;
}

// (c,eps)-saturated pair: size floors plus exact completeness one way.
inline bool validate_saturated(const Tournament& t, const Bitset& a1, const Bitset& t1,
                               const SizeCoeff& c, const Rat& eps) {
  if (a1.intersects(t1)) return false;
  if (a1.empty() || t1.empty()) return false;
  if (!is_transitive(t, t1)) return false;
  if (!c.floor_ok(a1.count(), t.size(), Rat(1))) return false;
  if (!c.floor_ok(t1.count(), t.size(), eps)) return false;
  std::size_t full = a1.count() * t1.count();
  return edges_between(t, a1, t1) == full || edges_between(t, t1, a1) == full;
}

}  // namespace stellar::seq
