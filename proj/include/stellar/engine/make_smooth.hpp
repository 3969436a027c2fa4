#pragma once

// Smoothing pass: given a sequence and retained subsets S_i^j of each
// element, keeps exactly the vertices whose per-vertex densities against
// every other retained subset clear the smooth threshold. Output is a smooth
// sequence at (c(1-f)/2, 4 lambda L/(1-f)^2) whose elements are unions of the
// per-subset survivors.

#include "stellar/sequence.hpp"

namespace stellar::engine {

struct SmoothResult {
  seq::Sequence sequence;
  std::vector<std::vector<Bitset>> kept;  // kept[i][j] = C'_i intersect S_i^j
  seq::Params out_params;
};

// subsets[i] lists the S_i^j of element i (at least one each, pairwise
// disjoint, each of size >= (1-f)|C_i|). l-sequences require a single subset
// per element. Transitive elements of m-sequences may carry several; linear
// elements may too — the per-vertex thresholds and the L accounting do not
// depend on where the splits happen, and the star-search loops split their
// linear chunks by color.
inline SmoothResult make_smooth(const Tournament& t, const seq::Sequence& in,
                                const std::vector<std::vector<Bitset>>& subsets, const Rat& f,
                                const seq::Params& in_params, bool validate_input = true) {
  std::size_t k = in.elements.size();
  if (!(f >= 0 && f < 1))
    fail(ErrorKind::PreconditionViolated, "make_smooth needs 0 <= f < 1");
  if (subsets.size() != k)
    fail(ErrorKind::PreconditionViolated, "make_smooth: one subset list per element");
  Rat one_minus_f = 1 - f;
  std::size_t L = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (subsets[i].empty())
      fail(ErrorKind::PreconditionViolated, "make_smooth: element without retained subsets");
    if (in.kind == seq::Kind::l && subsets[i].size() != 1)
      fail(ErrorKind::PreconditionViolated, "make_smooth: l-sequences take one subset per element");
    Bitset seen(t.size());
    for (const auto& s : subsets[i]) {
      if (!s.is_subset_of(in.elements[i].members))
        fail(ErrorKind::PreconditionViolated, "make_smooth: subset not inside its element");
      if (seen.intersects(s))
        fail(ErrorKind::PreconditionViolated, "make_smooth: retained subsets overlap");
      seen |= s;
      Rat sz(static_cast<unsigned long>(s.count()));
      Rat floor = one_minus_f * Rat(static_cast<unsigned long>(in.elements[i].members.count()));
      if (sz < floor)
        fail(ErrorKind::PreconditionViolated,
             "make_smooth: retained subset below (1-f)|C_" + std::to_string(i + 1) + "|");
      ++L;
    }
  }
  if (validate_input) {
    auto rep = seq::validate_sequence(t, in, in_params);
    if (!rep.ok)
      fail(ErrorKind::PreconditionViolated,
           "make_smooth: input sequence invalid: " + rep.violations.front());
  }

  Rat slack = 2 * Rat(static_cast<unsigned long>(L)) * in_params.lambda / (one_minus_f * one_minus_f);
  Rat keep_thresh = 1 - slack;

  SmoothResult out;
  out.kept.resize(k);
  out.sequence.kind = in.kind;
  for (std::size_t i = 0; i < k; ++i) {
    Bitset united(t.size());
    for (const auto& s : subsets[i]) {
      Bitset kept = s;
      for (std::size_t j = 0; j < k && !kept.empty(); ++j) {
        if (j == i) continue;
        for (const auto& other : subsets[j]) {
          Rat osz(static_cast<unsigned long>(other.count()));
          Bitset next(t.size());
          for (std::size_t v = kept.first(); v != Bitset::npos; v = kept.next(v)) {
            std::size_t cnt = i < j ? (t.out(v).intersection_count(other))
                                    : (other.count() - t.out(v).intersection_count(other));
            if (Rat(static_cast<unsigned long>(cnt)) >= keep_thresh * osz) next.set(v);
          }
          kept = next;
          if (kept.empty()) break;
        }
      }
      out.kept[i].push_back(kept);
      united |= kept;
    }
    if (united.empty())
      fail(ErrorKind::EmptyResult,
           "make_smooth: element " + std::to_string(i + 1) + " lost all vertices");
    out.sequence.elements.push_back({united, in.elements[i].role});
  }

  out.out_params.c = in_params.c.scaled(one_minus_f / 2);
  out.out_params.lambda =
      4 * in_params.lambda * Rat(static_cast<unsigned long>(L)) / (one_minus_f * one_minus_f);
  out.out_params.eps = in_params.eps;

  auto rep = seq::validate_smooth(t, out.sequence, out.out_params);
  if (!rep.ok)
    fail(ErrorKind::InternalContractViolation,
         "make_smooth output failed its own validator: " + rep.violations.front());
  // per-subset retention: at least half of every S_i^j survives, which is
  // what the (1-f) c n / 2 intersection floor rests on
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < out.kept[i].size(); ++j)
      if (2 * out.kept[i][j].count() < subsets[i][j].count())
        fail(ErrorKind::InternalContractViolation,
             "make_smooth retention floor failed at element " + std::to_string(i + 1));
  return out;
}

}  // namespace stellar::engine
