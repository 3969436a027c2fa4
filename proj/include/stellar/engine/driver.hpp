#pragma once

// Top-level drivers: the saturated-pair merge, the halving coloring driver,
// and the end-to-end coloring chain with its fallback ladder.

#include "stellar/engine/find_l_sequence.hpp"
#include "stellar/engine/find_m_sequence.hpp"
#include "stellar/engine/star_search.hpp"
#include "stellar/io.hpp"
#include "stellar/oracle.hpp"

namespace stellar::engine {

// Merge a (c, eps_c)-saturated pair: extract inside A1, prepend/append T1.
// The completeness direction makes the union transitive, and the identity
// c^eps_c = 1-c turns (cn)^eps + c n^eps into the n^eps floor.
inline Bitset merge_saturated(const Tournament& t, const Bitset& a1, const Bitset& t1,
                              const Rat& c, const Extractor& extract) {
  EpsilonBound eps = epsilon_of(c);
  if (!seq::validate_saturated(t, a1, t1, seq::SizeCoeff(c), eps.lo))
    fail(ErrorKind::NotSaturated, "pair fails the (c, eps_c)-saturation conditions");
  Bitset ext = checked_extract(t, a1, eps.lo, extract);
  Bitset merged = ext | t1;
  if (!is_transitive(t, merged))
    fail(ErrorKind::InternalContractViolation, "saturated merge produced a cyclic set");
  if (!size_meets_floor(merged.count(), Rat(1), t.size(), eps.lo))
    fail(ErrorKind::InternalContractViolation, "saturated merge below n^eps");
  return merged;
}

struct DriverResult {
  Coloring coloring;
  std::size_t classes = 0;
  bool contract_met = true;  // every extractor call returned >= |R|^eps
};

// Halving schedule: extract transitive classes while at least half of the
// current phase remains, then start a new phase on the remainder. With a
// contract-honoring extractor the class count obeys H(n) <= n^(1-eps) log2 n.
inline DriverResult coloring_driver(const Tournament& t, const Extractor& extract, const Rat& eps,
                                    bool abort_on_breach = true) {
  DriverResult out;
  out.coloring.color.assign(t.size(), 0);
  Bitset rest = t.vertices();
  long next_color = 1;
  while (!rest.empty()) {
    std::size_t phase_n = rest.count();
    while (!rest.empty() && 2 * rest.count() >= phase_n) {
      Bitset got = extract(t, rest);
      if (got.empty() || !got.is_subset_of(rest))
        fail(ErrorKind::ExtractorBroke, "extractor output outside the remaining vertices");
      if (!is_transitive(t, got))
        fail(ErrorKind::ExtractorBroke, "extractor output not transitive");
      if (!size_meets_floor(got.count(), Rat(1), rest.count(), eps)) {
        if (abort_on_breach)
          fail(ErrorKind::ExtractorBroke, "extractor output below |R|^eps");
        out.contract_met = false;
      }
      for (std::size_t v = got.first(); v != Bitset::npos; v = got.next(v))
        out.coloring.color[v] = next_color;
      ++next_color;
      rest = rest - got;
    }
  }
  out.classes = static_cast<std::size_t>(next_color - 1);
  if (!verify_coloring(t, out.coloring))
    fail(ErrorKind::InternalContractViolation, "driver assembled an improper coloring");
  return out;
}

enum class Fallback { oracle, greedy, singleton };

struct ColorConfig {
  Mode mode = Mode::relaxed;
  std::optional<Ordering> theta;  // constellation ordering, searched when absent
  // relaxed-mode chain parameters
  Rat lambda = make_rat(1, 4);
  std::size_t k = 2;
  Rat Lambda = make_rat(1, 4);
  Rat eps = make_rat(1, 3);
  std::size_t oracle_cap = 18;
  Fallback fallback = Fallback::oracle;
};

namespace detail {

inline Bitset fallback_extract(const Tournament& t, const Bitset& domain,
                               const ColorConfig& cfg) {
  if (domain.empty()) fail(ErrorKind::EmptySet, "fallback extraction from empty set");
  switch (cfg.fallback) {
    case Fallback::oracle:
      if (domain.count() <= cfg.oracle_cap) {
        std::vector<std::size_t> names;
        Tournament sub = t.restrict_to(domain, &names);
        oracle::Budget budget;
        budget.max_n = std::max(budget.max_n, cfg.oracle_cap);
        Bitset local = oracle::max_transitive_exact(sub, budget);
        Bitset out(t.size());
        for (std::size_t v = local.first(); v != Bitset::npos; v = local.next(v))
          out.set(names[v]);
        return out;
      }
      [[fallthrough]];
    case Fallback::greedy:
      return greedy_log_transitive(t, domain);
    case Fallback::singleton: {
      Bitset out(t.size());
      out.set(domain.first());
      return out;
    }
  }
  fail(ErrorKind::DomainError, "bad fallback");
}

// One color class via the full chain; any stage reporting that the input is
// too small (or otherwise outside its regime) falls back.
inline Bitset extract_class(const Tournament& t, const Tournament& h, const Ordering& theta,
                            const ColorConfig& cfg, std::size_t depth);

inline Extractor recursive_extractor(const Tournament& h, const Ordering& theta,
                                     const ColorConfig& cfg, std::size_t depth) {
  return [&h, theta, cfg, depth](const Tournament& t, const Bitset& domain) {
    std::vector<std::size_t> names;
    Tournament sub = t.restrict_to(domain, &names);
    Bitset local = extract_class(sub, h, theta, cfg, depth + 1);
    Bitset out(t.size());
    for (std::size_t v = local.first(); v != Bitset::npos; v = local.next(v)) out.set(names[v]);
    return out;
  };
}

inline Bitset extract_class(const Tournament& t, const Tournament& h, const Ordering& theta,
                            const ColorConfig& cfg, std::size_t depth) {
  std::size_t hh = h.size();
  std::size_t n = t.size();
  if (n <= cfg.oracle_cap || depth > 24) return fallback_extract(t, t.vertices(), cfg);
  try {
    Rat lambda = cfg.lambda;
    std::size_t k = cfg.k;
    if (cfg.mode == Mode::strict) {
      StrictConstants sc = strict_constants(hh);
      k = sc.l_sequence_k;
      if (FactoredRat::from_int(Int(static_cast<unsigned long>(n)))
              .cmp(sc.threshold("find_l_min_n")) < 0)
        fail(ErrorKind::InsufficientSize,
             "strict mode needs n >= 2^(k+1)(h+1)h^(2k)/lambda_k^(hk) = " +
                 sc.threshold("find_l_min_n").to_string());
      // unreachable at desk scale; lambda would be 2^(-2^(9h))
      auto lam = FactoredRat::pow2(sc.log2_lambda_init).to_rat();
      if (!lam) fail(ErrorKind::InsufficientSize, "strict lambda not materializable");
      lambda = *lam;
    }

    auto lres = find_l_sequence(t, h, lambda, k);
    if (lres.certificate)
      fail(ErrorKind::PreconditionViolated, "input is not H-free: induced copy found");
    seq::Sequence lseq = std::move(*lres.sequence);
    if (lseq.elements.size() < 2)
      fail(ErrorKind::InsufficientSize, "l-sequence too short for the m-stage");
    lseq.elements.pop_back();  // truncation keeps the sequence odd-length
    Rat c = c_of_materialized(hh, k, lambda);

    seq::Sequence mseq = find_m_sequence(t, lseq, c, lambda, cfg.Lambda, cfg.eps,
                                         recursive_extractor(h, theta, cfg, depth));

    std::size_t strong_len = (std::size_t(1) << (hh + 2)) * (hh + 1) + 2 * hh + 1;
    if (mseq.elements.size() < strong_len)
      fail(ErrorKind::InsufficientSize,
           "m-sequence of length " + std::to_string(mseq.elements.size()) +
               " cannot be truncated to the strong-stage length " + std::to_string(strong_len));
    mseq.elements.resize(strong_len);

    StrongParams sp;
    sp.mode = cfg.mode;
    sp.c = std::min(pow_lower(c / 2, cfg.eps), c);
    sp.lambda = cfg.Lambda;
    sp.eps = cfg.eps;
    sp.M = Rat(2);
    StrongResult strong = find_strong_m_sequence(h, theta, t, mseq, sp);

    PolyTransParams pp;
    pp.mode = cfg.mode;
    pp.c = strong.ledger.c.rat();
    pp.lambda = strong.ledger.lambda.rat();
    pp.eps_in = cfg.eps;
    pp.N = Rat(2);
    auto pres =
        poly_trans(h, theta, t, strong.sequence, pp, recursive_extractor(h, theta, cfg, depth));
    return pres.transitive_set;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::InsufficientSize:
      case ErrorKind::PreconditionViolated:
      case ErrorKind::EmptyResult:
      case ErrorKind::ExtractorBroke:
        return fallback_extract(t, t.vertices(), cfg);
      default:
        throw;
    }
  }
}

}  // namespace detail

struct ColorResult {
  Coloring coloring;
  std::size_t classes = 0;
  Ordering theta;
};

// Color-H-free: peel transitive classes until the tournament is empty. Each
// class comes from the full chain when its preconditions can be met and from
// the configured fallback otherwise, so the driver is total on every input.
inline ColorResult color_h_free(const Tournament& h, const Tournament& t,
                                const ColorConfig& cfg = {}) {
  Ordering theta;
  if (cfg.theta) {
    theta = *cfg.theta;
    if (!pat::is_constellation_ordering(h, theta))
      fail(ErrorKind::NotConstellation, "supplied ordering is not a constellation ordering");
  } else {
    auto found = pat::find_constellation_ordering(h);
    if (!found) fail(ErrorKind::NotConstellation, "H admits no constellation ordering");
    theta = *found;
  }

  ColorResult out;
  out.theta = theta;
  out.coloring.color.assign(t.size(), 0);
  Bitset rest = t.vertices();
  long color = 0;
  while (!rest.empty()) {
    std::vector<std::size_t> names;
    Tournament sub = t.restrict_to(rest, &names);
    Bitset local = detail::extract_class(sub, h, theta, cfg, 0);
    if (local.empty()) fail(ErrorKind::InternalContractViolation, "empty color class");
    ++color;
    for (std::size_t v = local.first(); v != Bitset::npos; v = local.next(v)) {
      out.coloring.color[names[v]] = color;
      rest.reset(names[v]);
    }
  }
  out.classes = static_cast<std::size_t>(color);
  if (t.size() > 0 && !verify_coloring(t, out.coloring))
    fail(ErrorKind::InternalContractViolation, "chain assembled an improper coloring");
  return out;
}

}  // namespace stellar::engine
