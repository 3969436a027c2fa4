#pragma once

// Exact arithmetic layer: arbitrary-precision integers/rationals (GMP) plus
// certified rational enclosures for the few transcendental quantities the
// toolkit needs (log2, exp2, rational powers). Every comparison made here is
// either exact or carries a proven two-sided bound; no floating point.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stellar {

using Int = mpz_class;
using Rat = mpq_class;

enum class ErrorKind {
  EmptySet,
  Overlap,
  NotTransitive,
  ArityMismatch,
  PartialColoring,
  ParseError,
  InvariantViolation,
  BadOrdering,
  NotStarForest,
  NotConstellation,
  TooLarge,
  RolePatternMismatch,
  BadIndexSet,
  DomainError,
  InsufficientSize,
  PreconditionViolated,
  ExtractorBroke,
  EmptyResult,
  InternalContractViolation,
  BudgetExceeded,
  NotSaturated,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline Rat make_rat(Int num, Int den) {
  if (den == 0) fail(ErrorKind::DomainError, "rational with zero denominator");
  Rat q(std::move(num), std::move(den));
  q.canonicalize();
  return q;
}

inline Rat make_rat(long num, long den) { return make_rat(Int(num), Int(den)); }

// Parses "p", "p/q" or "2^-e" (the latter keeps CLI lambdas readable).
inline Rat parse_rat(const std::string& s) {
  auto bad = [&] { fail(ErrorKind::ParseError, "bad rational literal: '" + s + "'"); };
  if (s.empty()) bad();
  auto caret = s.find('^');
  if (caret != std::string::npos) {
    if (s.substr(0, caret) != "2") bad();
    long e = 0;
    try {
      e = std::stol(s.substr(caret + 1));
    } catch (...) {
      bad();
    }
    Int p = Int(1) << static_cast<unsigned long>(e < 0 ? -e : e);
    return e < 0 ? make_rat(Int(1), p) : Rat(p);
  }
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (...) {
    bad();
  }
  return Rat();  // unreachable
}

inline Int floor_rat(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

inline Int ceil_rat(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rat pow_rat(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
  Rat r = make_rat(pow_int(base.get_num(), a), pow_int(base.get_den(), a));
  if (e < 0) {
    if (r == 0) fail(ErrorKind::DomainError, "0 to a negative power");
    return Rat(1) / r;
  }
  return r;
}

// Rational power with an arbitrary-precision exponent. Only sane when the
// result still fits in memory; callers go through the factored/log2 layer
// when it does not.
inline Rat pow_rat_big(const Rat& base, const Int& e) {
  if (!e.fits_slong_p()) fail(ErrorKind::DomainError, "exponent too large to materialize");
  return pow_rat(base, e.get_si());
}

inline std::size_t bit_length(const Int& x) { return mpz_sizeinbase(x.get_mpz_t(), 2); }

// floor(log2(x)) for x > 0, exact.
inline long ilog2(const Rat& x) {
  if (x <= 0) fail(ErrorKind::DomainError, "ilog2 of nonpositive value");
  long e = static_cast<long>(bit_length(x.get_num())) - static_cast<long>(bit_length(x.get_den()));
  // bit-length estimate can be off by one; fix up exactly
  auto pow2 = [](long k) {
    return k >= 0 ? Rat(Int(1) << static_cast<unsigned long>(k))
                  : make_rat(Int(1), Int(1) << static_cast<unsigned long>(-k));
  };
  while (pow2(e) > x) --e;
  while (pow2(e + 1) <= x) ++e;
  return e;
}

// -------------------------------------------------------------------------
// Interval arithmetic over rationals. Closed intervals [lo, hi], always
// outward-rounded, so any derived interval provably contains the real value.

struct RatInterval {
  Rat lo, hi;

  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
};

inline RatInterval interval_point(const Rat& x) { return {x, x}; }

inline RatInterval interval_add(const RatInterval& a, const RatInterval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

inline RatInterval interval_sub(const RatInterval& a, const RatInterval& b) {
  return {a.lo - b.hi, a.hi - b.lo};
}

inline RatInterval interval_mul(const RatInterval& a, const RatInterval& b) {
  Rat c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
  Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
  Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
  return {lo, hi};
}

inline RatInterval interval_div(const RatInterval& a, const RatInterval& b) {
  if (b.lo <= 0 && b.hi >= 0) fail(ErrorKind::DomainError, "interval division through zero");
  Rat c1 = a.lo / b.lo, c2 = a.lo / b.hi, c3 = a.hi / b.lo, c4 = a.hi / b.hi;
  Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
  Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
  return {lo, hi};
}

// Certified enclosure of log2(x) for rational x > 0.
//
// Classic fixed-point digit extraction: normalize x = 2^e * m with m in
// [1,2), then repeatedly square an integer bracket of m (scale 2^F) and read
// off one binary digit of log2(m) per step. Outward rounding keeps the true
// value inside the bracket, so the result is a genuine enclosure of width
// <= 2^-prec (unless the bracket degenerates, in which case we retry with a
// wider mantissa and, failing that, return the looser but still sound bound).
inline RatInterval log2_enclosure(const Rat& x, unsigned prec = 96) {
  if (x <= 0) fail(ErrorKind::DomainError, "log2 of nonpositive value");
  long e = ilog2(x);
  Rat m = x / (e >= 0 ? Rat(Int(1) << static_cast<unsigned long>(e))
                      : make_rat(Int(1), Int(1) << static_cast<unsigned long>(-e)));
  if (m == 1) return interval_point(Rat(e));

  for (unsigned F = prec + 16;; F *= 2) {
    Int scale = Int(1) << F;
    Int two_scale = scale << 1;
    Int mlo = floor_rat(m * Rat(scale));
    Int mhi = ceil_rat(m * Rat(scale));
    Int acc = 0;
    unsigned produced = 0;
    bool ambiguous = false;
    while (produced < prec) {
      mlo = (mlo * mlo) >> F;
      mhi = ((mhi * mhi) + scale - 1) >> F;
      int digit;
      if (mlo >= two_scale) {
        digit = 1;
        mlo >>= 1;
        mhi = (mhi + 1) >> 1;
      } else if (mhi < two_scale) {
        digit = 0;
      } else {
        ambiguous = true;
        break;
      }
      acc = (acc << 1) + digit;
      ++produced;
    }
    if (ambiguous && F < prec * 8 + 256) continue;
    Rat frac_lo = make_rat(acc, Int(1) << produced);
    Rat frac_hi = make_rat(acc + 1, Int(1) << produced);
    return {Rat(e) + frac_lo, Rat(e) + frac_hi};
  }
}

namespace detail {

// Enclosure of 2^(2^-i), i >= 1, scaled by 2^F: repeated integer square
// roots of 2, outward-rounded.
inline std::vector<std::pair<Int, Int>> root2_towers(unsigned levels, unsigned F) {
  std::vector<std::pair<Int, Int>> out;
  Int lo = Int(2) << F, hi = Int(2) << F;  // exact 2, scale 2^F
  for (unsigned i = 1; i <= levels; ++i) {
    Int a, b;
    mpz_sqrt(a.get_mpz_t(), Int(lo << F).get_mpz_t());
    mpz_sqrt(b.get_mpz_t(), Int(hi << F).get_mpz_t());
    b += 1;
    lo = a;
    hi = b;
    out.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace detail

// Certified enclosure of 2^y for rational y (|floor(y)| must stay machine-size).
inline RatInterval exp2_enclosure(const Rat& y, unsigned prec = 96) {
  Int n = floor_rat(y);
  if (!n.fits_slong_p() || bit_length(n) > 32)
    fail(ErrorKind::DomainError, "exp2 exponent too large to materialize");
  long ni = n.get_si();
  Rat f = y - Rat(n);  // in [0,1)
  unsigned F = prec + 16;
  Int scale = Int(1) << F;

  // truncate f to `prec` binary digits; the residual is folded in at the end
  Int ft = floor_rat(f * Rat(Int(1) << prec));
  auto towers = detail::root2_towers(prec, F);
  Int plo = scale, phi = scale;  // running product, scale 2^F
  for (unsigned i = 1; i <= prec; ++i) {
    if (mpz_tstbit(ft.get_mpz_t(), prec - i)) {
      plo = (plo * towers[i - 1].first) >> F;
      phi = ((phi * towers[i - 1].second) >> F) + 1;
    }
  }
  // residual delta in [0, 2^-prec): 1 <= 2^delta <= 1 + 2^(1-prec)
  Rat resid_hi = Rat(1) + make_rat(Int(2), Int(1) << prec);
  Rat lo = make_rat(plo, scale);
  Rat hi = make_rat(phi, scale) * resid_hi;
  Rat p2 = ni >= 0 ? Rat(Int(1) << static_cast<unsigned long>(ni))
                   : make_rat(Int(1), Int(1) << static_cast<unsigned long>(-ni));
  return {lo * p2, hi * p2};
}

// Certified enclosure of base^e for rational base > 0 and an exponent
// enclosure (the exponent is typically itself a derived quantity).
inline RatInterval pow_enclosure(const Rat& base, const RatInterval& expo, unsigned prec = 96) {
  if (base <= 0) fail(ErrorKind::DomainError, "pow of nonpositive base");
  if (base == 1) return interval_point(Rat(1));
  RatInterval lg = log2_enclosure(base, prec);
  RatInterval prod = interval_mul(expo, lg);
  RatInterval lo_part = exp2_enclosure(prod.lo, prec);
  RatInterval hi_part = exp2_enclosure(prod.hi, prec);
  return {std::min(lo_part.lo, hi_part.lo), std::max(lo_part.hi, hi_part.hi)};
}

inline RatInterval pow_enclosure(const Rat& base, const Rat& expo, unsigned prec = 96) {
  return pow_enclosure(base, interval_point(expo), prec);
}

// Exact floor(x^(1/q)) for nonnegative integer x.
inline Int floor_root(const Int& x, unsigned long q) {
  if (x < 0) fail(ErrorKind::DomainError, "root of negative value");
  Int r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), q);
  return r;
}

// Rational lower bound of n^eps (n >= 1 integer, eps >= 0 rational), tight to
// ~2^-scale_bits. Integer-root path when the intermediate powers stay small;
// certified log2/exp2 enclosure otherwise. The result never exceeds n^eps.
inline Rat pow_rat_lower(const Int& n, const Rat& eps, unsigned scale_bits = 32,
                         unsigned prec = 96) {
  if (n <= 0) fail(ErrorKind::DomainError, "pow_rat_lower needs n >= 1");
  if (eps < 0) fail(ErrorKind::DomainError, "pow_rat_lower needs eps >= 0");
  if (n == 1 || eps == 0) return Rat(1);
  const Int& p = eps.get_num();
  const Int& q = eps.get_den();
  if (q == 1 && p.fits_ulong_p() && p.get_ui() * bit_length(n) <= 1u << 22)
    return Rat(pow_int(n, p.get_ui()));
  if (p.fits_ulong_p() && q.fits_ulong_p()) {
    unsigned long pu = p.get_ui(), qu = q.get_ui();
    // n^(p/q) * 2^scale >= floor(root_q(n^p * 2^(scale*q)))
    if (pu * bit_length(n) + scale_bits * qu <= 1u << 22) {
      Int big = pow_int(n, pu) << (scale_bits * qu);
      return make_rat(floor_root(big, qu), Int(1) << scale_bits);
    }
  }
  RatInterval lg = log2_enclosure(Rat(n), prec);
  RatInterval prod = interval_mul(interval_point(eps), lg);
  return exp2_enclosure(prod.lo, prec).lo;
}

// Certified lower bound of base^expo for rational base > 0.
inline Rat pow_lower(const Rat& base, const Rat& expo, unsigned prec = 96) {
  if (base <= 0) fail(ErrorKind::DomainError, "pow_lower needs base > 0");
  if (expo == 0 || base == 1) return Rat(1);
  if (expo.get_den() == 1 && expo.get_num().fits_slong_p()) {
    long e = expo.get_num().get_si();
    std::size_t mag = static_cast<std::size_t>(e < 0 ? -e : e);
    if (mag * (bit_length(base.get_num()) + bit_length(base.get_den())) < (1u << 22))
      return pow_rat(base, e);
  }
  RatInterval prod = interval_mul(interval_point(expo), log2_enclosure(base, prec));
  return exp2_enclosure(prod.lo, prec).lo;
}

// Size-floor test: size >= ceil(c * lb(n^eps)) where lb is the
// certified lower bound above. Exact when eps is an integer.
inline bool size_meets_floor(const Int& size, const Rat& c, const Int& n, const Rat& eps) {
  if (n == 0) return true;
  Rat floor_val = c * pow_rat_lower(n, eps);
  return size >= ceil_rat(floor_val);
}

inline bool size_meets_floor(std::size_t size, const Rat& c, std::size_t n, const Rat& eps) {
  return size_meets_floor(Int(static_cast<unsigned long>(size)), c,
                          Int(static_cast<unsigned long>(n)), eps);
}

}  // namespace stellar
