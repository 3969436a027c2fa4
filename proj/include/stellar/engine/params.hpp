#pragma once

// Parameter schedules and closed-form constants, plus the dual-mode parameter
// ledger. Strict mode keeps every constant in exact factored/log2 form (the
// schedule values cannot be expanded); relaxed mode runs on user rationals so
// the control flow is exercisable at desk scale. Every update appends to the
// audit history, and replaying recorded rules must reproduce the final state
// bit for bit.

#include <utility>

#include "stellar/factored.hpp"
#include "stellar/sequence.hpp"

namespace stellar::engine {

enum class Mode { strict, relaxed };

// Exact scalar that is either a plain rational or a factored product.
class Value {
 public:
  Value() : rat_(0), is_rat_(true) {}
  Value(Rat r) : rat_(std::move(r)), is_rat_(true) {}
  Value(long n) : rat_(n), is_rat_(true) {}
  Value(FactoredRat f) : fac_(std::move(f)), is_rat_(false) {}

  bool is_rational() const { return is_rat_; }

  const Rat& rat() const {
    if (!is_rat_) fail(ErrorKind::DomainError, "value is in factored form: " + fac_.to_string());
    return rat_;
  }

  FactoredRat factored() const { return is_rat_ ? FactoredRat::from_rat(rat_) : fac_; }

  // certified three-way comparison
  int cmp(const Value& o) const {
    if (is_rat_ && o.is_rat_) return rat_ < o.rat_ ? -1 : rat_ == o.rat_ ? 0 : 1;
    if (is_rat_ && rat_ <= 0) return -1;  // factored values are positive
    if (!o.is_rat_ && o.is_rat_ == is_rat_) return fac_.cmp(o.fac_);
    return factored().cmp(o.factored());
  }

  std::string to_string() const {
    if (is_rat_) return rat_.get_str();
    return fac_.to_string();
  }

  bool operator==(const Value& o) const { return cmp(o) == 0; }

 private:
  Rat rat_;
  FactoredRat fac_;
  bool is_rat_;
};

// lambda_i = (lambda^2 / (4^k h^{4k}))^(2^i h^{2i}), exact factored form.
inline FactoredRat lambda_schedule_factored(const FactoredRat& lambda, std::size_t k,
                                            std::size_t h, std::size_t i) {
  if (h < 2 || i > k) fail(ErrorKind::DomainError, "lambda schedule needs h >= 2 and 0 <= i <= k");
  FactoredRat base = lambda.pow(2) / FactoredRat::pow2(Int(2 * k)) /
                     FactoredRat::from_int(Int(static_cast<unsigned long>(h))).pow(Int(4 * k));
  Int expo = (Int(1) << i) * pow_int(Int(static_cast<unsigned long>(h)), 2 * i);
  return base.pow(expo);
}

// Exact rational form (relaxed mode); refuses to expand past a bit budget.
inline Rat lambda_schedule(const Rat& lambda, std::size_t k, std::size_t h, std::size_t i) {
  if (!(lambda > 0 && lambda < 1))
    fail(ErrorKind::DomainError, "lambda schedule needs 0 < lambda < 1");
  FactoredRat f = lambda_schedule_factored(FactoredRat::from_rat(lambda), k, h, i);
  auto r = f.to_rat();
  if (!r) fail(ErrorKind::DomainError, "lambda_i too large to materialize as a rational");
  return *r;
}

// c(H,k,lambda) = lambda_k^{hk} / (2^k h^{2k})
inline FactoredRat c_of_factored(std::size_t h, std::size_t k, const FactoredRat& lambda) {
  if (k == 0) return FactoredRat::one();
  FactoredRat lk = lambda_schedule_factored(lambda, k, h, k);
  return lk.pow(Int(static_cast<unsigned long>(h * k))) / FactoredRat::pow2(Int(k)) /
         FactoredRat::from_int(Int(static_cast<unsigned long>(h))).pow(Int(2 * k));
}

inline Rat c_of(std::size_t h, std::size_t k, const Rat& lambda) {
  if (k == 0) return Rat(1);
  auto r = c_of_factored(h, k, FactoredRat::from_rat(lambda)).to_rat();
  if (!r) fail(ErrorKind::DomainError, "c(H,k,lambda) too large to materialize as a rational");
  return *r;
}

// Schedule constant usable for exact comparisons whether or not it can be
// expanded into a plain rational.
struct ScheduleValue {
  FactoredRat fact;
  std::optional<Rat> exact;

  static ScheduleValue of(FactoredRat f) {
    ScheduleValue v;
    v.exact = f.to_rat(1u << 20);
    v.fact = std::move(f);
    return v;
  }

  // count >= value * size
  bool count_at_least(std::size_t count, std::size_t size) const {
    if (exact)
      return Rat(static_cast<unsigned long>(count)) >=
             *exact * Rat(static_cast<unsigned long>(size));
    return fact.cmp_scaled_count(Int(static_cast<unsigned long>(count)),
                                 Int(static_cast<unsigned long>(size))) >= 0;
  }

  // missing/(a*b) <= value, i.e. density at least 1 - value
  bool slack_at_most(std::size_t missing, std::size_t a, std::size_t b) const {
    if (missing == 0) return true;
    Rat frac = make_rat(Int(static_cast<unsigned long>(missing)),
                        Int(static_cast<unsigned long>(a)) * Int(static_cast<unsigned long>(b)));
    if (exact) return frac <= *exact;
    return FactoredRat::from_rat(frac).cmp(fact) <= 0;
  }
};

inline ScheduleValue lambda_schedule_value(const Rat& lambda, std::size_t k, std::size_t h,
                                           std::size_t i) {
  if (!(lambda > 0 && lambda < 1))
    fail(ErrorKind::DomainError, "lambda schedule needs 0 < lambda < 1");
  return ScheduleValue::of(lambda_schedule_factored(FactoredRat::from_rat(lambda), k, h, i));
}

// The l-sequence size constant as a validator coefficient; falls back to the
// factored form when it cannot be expanded.
inline seq::SizeCoeff c_floor_of(std::size_t h, std::size_t k, const Rat& lambda) {
  if (k == 0) return seq::SizeCoeff(Rat(1));
  FactoredRat f = c_of_factored(h, k, FactoredRat::from_rat(lambda));
  if (auto r = f.to_rat(1u << 20)) return seq::SizeCoeff(*r);
  return seq::SizeCoeff::factored(std::move(f));
}

// A materializable stand-in for c(H,k,lambda) where a plain rational is
// unavoidable: the dyadic lower bound 2^floor(log2 c), clamped at 2^-1024.
// Below the clamp every size floor over physically representable n evaluates
// to 1 either way, so verdicts are unchanged.
inline Rat c_of_materialized(std::size_t h, std::size_t k, const Rat& lambda) {
  if (k == 0) return Rat(1);
  FactoredRat f = c_of_factored(h, k, FactoredRat::from_rat(lambda));
  if (auto r = f.to_rat(1u << 20)) return *r;
  Int e = floor_rat(f.log2(96).lo);
  if (e < -1024) e = -1024;
  if (e >= 0) fail(ErrorKind::InternalContractViolation, "c(H,k,lambda) above 1");
  return make_rat(Int(1), Int(1) << static_cast<unsigned long>(Int(-e).get_ui()));
}

// eps_c = log(1-c)/log(c), with a certified enclosure. The identity
// c^eps_c = 1-c is what the merging bound rests on.
struct EpsilonBound {
  Rat lo, hi;  // certified enclosure
  Rat value;   // representative inside the enclosure

  RatInterval interval() const { return {lo, hi}; }
};

inline EpsilonBound epsilon_of(const Rat& c, unsigned prec = 96) {
  if (!(c > 0 && c < 1)) fail(ErrorKind::DomainError, "epsilon_of needs 0 < c < 1");
  Rat one_minus = 1 - c;
  if (one_minus == c) return {Rat(1), Rat(1), Rat(1)};
  RatInterval num = log2_enclosure(one_minus, prec);
  RatInterval den = log2_enclosure(c, prec);
  RatInterval e = interval_div(num, den);
  return {e.lo, e.hi, e.mid()};
}

// delta bound for substitution: sup over admissible delta is
// eps_F / (eps_H + h * eps_F).
inline Rat substitution_epsilon(const Rat& eps_h, const Rat& eps_f, std::size_t h) {
  if (!(eps_h > 0 && eps_h <= 1 && eps_f > 0 && eps_f <= 1 && h >= 1))
    fail(ErrorKind::DomainError, "substitution_epsilon needs eps in (0,1] and h >= 1");
  return eps_f / (eps_h + Rat(static_cast<unsigned long>(h)) * eps_f);
}

// Strict-mode headline constants and entry thresholds, all exact.
struct StrictConstants {
  Int log2_inv_epsilon;   // log2(1/eps(H)) = 2^(50h^2+1)
  Int log2_lambda_init;   // lambda = 2^(-2^(9h)) stored as the exponent
  std::size_t l_sequence_k;  // 2h+3
  struct Threshold {
    std::string name;
    FactoredRat bound;
  };
  std::vector<Threshold> thresholds;

  const FactoredRat& threshold(const std::string& name) const {
    for (const auto& t : thresholds)
      if (t.name == name) return t.bound;
    fail(ErrorKind::DomainError, "unknown threshold: " + name);
  }
};

inline StrictConstants strict_constants(std::size_t h) {
  if (h < 2) fail(ErrorKind::DomainError, "strict constants need h >= 2");
  StrictConstants sc;
  sc.log2_inv_epsilon = Int(1) << (50 * h * h + 1);
  sc.log2_lambda_init = -(Int(1) << (9 * h));
  sc.l_sequence_k = 2 * h + 3;

  FactoredRat lambda = FactoredRat::pow2(sc.log2_lambda_init);
  FactoredRat hh = FactoredRat::from_int(Int(static_cast<unsigned long>(h)));
  std::size_t k = sc.l_sequence_k;
  FactoredRat lk = lambda_schedule_factored(lambda, k, h, k);
  // n >= 2^{k+1} (h+1) h^{2k} / lambda_k^{hk}
  FactoredRat min_n = FactoredRat::pow2(Int(k + 1)) *
                      FactoredRat::from_int(Int(static_cast<unsigned long>(h + 1))) *
                      hh.pow(Int(2 * k)) / lk.pow(Int(static_cast<unsigned long>(h * k)));
  sc.thresholds.push_back({"find_l_min_n", min_n});
  sc.thresholds.push_back(
      {"find_strong_min_M", FactoredRat::from_int(Int(2 * (h + 2))) *
                                FactoredRat::pow2(Int(1) << (8 * h + 2))});
  sc.thresholds.push_back(
      {"find_strong_max_lambda", FactoredRat::pow2(-(Int(1) << (5 * h + 6)))});
  sc.thresholds.push_back({"poly_trans_min_N", FactoredRat::pow2(Int(21 * h * h))});
  sc.thresholds.push_back(
      {"poly_trans_max_lambda", FactoredRat::one() / FactoredRat::pow2(Int(25 * h * h)) / hh});
  return sc;
}

// Parameter ledger. xi and f stay small rationals in both modes; c, lambda
// and Lambda may be factored in strict mode.
struct ParamState {
  struct Snapshot {
    Value c, lambda, Lambda;
    Rat xi, f;
  };

  Mode mode = Mode::relaxed;
  Value c{Rat(1)}, lambda{Rat(0)}, Lambda{Rat(0)};
  Rat xi{1}, f{0};
  std::vector<std::pair<std::string, Snapshot>> history;

  Snapshot snapshot() const { return {c, lambda, Lambda, xi, f}; }

  void record(const std::string& label) { history.emplace_back(label, snapshot()); }
};

// The exact update transforms of the star-search loops. `strong_variant`
// selects the (h+1) factor of the strong-sequence loop over the core loop.
struct Updates {
  static void state0(ParamState& ps, std::size_t h, std::size_t k) {
    const Rat& c = ps.c.rat();
    const Rat& lm = ps.lambda.rat();
    Rat xi = ps.xi;
    Rat hq(static_cast<unsigned long>(h));
    Rat kq(static_cast<unsigned long>(k));
    ps.c = Value(c * xi / (2 * hq));
    ps.lambda = Value(4 * lm * hq * hq * kq / (xi * xi));
    ps.xi = make_rat(1, 2 * (static_cast<long>(h) + 2));
    ps.record("state0");
  }

  static void state1(ParamState& ps, std::size_t h, std::size_t k, bool strong_variant) {
    const Rat& c = ps.c.rat();
    const Rat& lm = ps.lambda.rat();
    Rat xi = ps.xi;
    Rat hq(static_cast<unsigned long>(h));
    Rat kq(static_cast<unsigned long>(k));
    Rat shrink = 1 - lm * hq / xi;  // (1 - lambda h / xi)
    if (shrink <= 0)
      fail(ErrorKind::PreconditionViolated, "lambda too large for xi: 1 - lambda*h/xi <= 0");
    Rat factor = strong_variant ? Rat(static_cast<unsigned long>(h + 1)) : Rat(1);
    ps.c = Value(c * xi * shrink / 2);
    ps.lambda = Value(4 * lm * kq * factor / (xi * xi * shrink * shrink));
    ps.xi = xi * shrink / 2;
    ps.record(strong_variant ? "state1-strong" : "state1-core");
  }
};

}  // namespace stellar::engine
