#pragma once

// Exact factored rationals: a positive value stored as a product of prime
// powers with arbitrary-precision exponents. This is what makes the strict
// parameter schedules computable: quantities like 2^(-2^18) or h^(2^i h^2i)
// multiply, divide and exponentiate without ever being expanded, and compare
// through certified log2 enclosures (exactly, when only the prime 2 appears).

#include <map>
#include <sstream>

#include "stellar/exact.hpp"

namespace stellar {

class FactoredRat {
 public:
  FactoredRat() = default;  // value 1

  static FactoredRat one() { return FactoredRat(); }

  static FactoredRat pow2(Int exponent) {
    FactoredRat f;
    if (exponent != 0) f.exp_[2] = std::move(exponent);
    return f;
  }

  static FactoredRat from_int(const Int& v) {
    if (v <= 0) fail(ErrorKind::DomainError, "factored value must be positive");
    FactoredRat f;
    Int rest = v;
    for (unsigned long p = 2; Int(p) * Int(p) <= rest; p += (p == 2 ? 1 : 2)) {
      while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        f.exp_[p] += 1;
      }
    }
    if (rest > 1) {
      if (!rest.fits_ulong_p()) fail(ErrorKind::DomainError, "factor too large");
      f.exp_[rest.get_ui()] += 1;
    }
    return f;
  }

  static FactoredRat from_rat(const Rat& v) {
    if (v <= 0) fail(ErrorKind::DomainError, "factored value must be positive");
    return from_int(v.get_num()) / from_int(v.get_den());
  }

  FactoredRat operator*(const FactoredRat& o) const {
    FactoredRat r = *this;
    for (const auto& [p, e] : o.exp_) {
      r.exp_[p] += e;
      if (r.exp_[p] == 0) r.exp_.erase(p);
    }
    return r;
  }

  FactoredRat operator/(const FactoredRat& o) const {
    FactoredRat r = *this;
    for (const auto& [p, e] : o.exp_) {
      r.exp_[p] -= e;
      if (r.exp_[p] == 0) r.exp_.erase(p);
    }
    return r;
  }

  FactoredRat pow(const Int& e) const {
    FactoredRat r;
    if (e == 0) return r;
    for (const auto& [p, ex] : exp_) r.exp_[p] = ex * e;
    return r;
  }

  bool is_one() const { return exp_.empty(); }

  bool is_power_of_two() const {
    return exp_.empty() || (exp_.size() == 1 && exp_.begin()->first == 2);
  }

  // Exact log2 when the value is a power of two.
  std::optional<Int> exact_log2() const {
    if (exp_.empty()) return Int(0);
    if (is_power_of_two()) return exp_.begin()->second;
    return std::nullopt;
  }

  RatInterval log2(unsigned prec = 96) const {
    // absolute error budget: sum |e_p| * width(log2 p) must stay below 2^-prec
    Int mag = 1;
    for (const auto& [p, e] : exp_) mag += abs(e);
    unsigned inner = prec + static_cast<unsigned>(bit_length(mag)) + 4;
    RatInterval acc = interval_point(Rat(0));
    for (const auto& [p, e] : exp_) {
      RatInterval lp = (p == 2) ? interval_point(Rat(1)) : log2_enclosure(Rat((unsigned long)p), inner);
      acc = interval_add(acc, interval_mul(interval_point(Rat(e)), lp));
    }
    return acc;
  }

  // Materializes the exact rational; only when the bit budget allows.
  std::optional<Rat> to_rat(std::size_t max_bits = 1u << 22) const {
    Int num = 1, den = 1;
    for (const auto& [p, e] : exp_) {
      Int ae = abs(e);
      if (!ae.fits_ulong_p()) return std::nullopt;
      std::size_t bits = ae.get_ui() * bit_length(Int(p));
      if (bits > max_bits) return std::nullopt;
      Int pw = pow_int(Int(p), ae.get_ui());
      if (e > 0)
        num *= pw;
      else
        den *= pw;
      if (bit_length(num) + bit_length(den) > max_bits) return std::nullopt;
    }
    return make_rat(num, den);
  }

  // -1, 0, +1 against another factored value; exact.
  int cmp(const FactoredRat& o) const {
    FactoredRat d = *this / o;
    if (d.is_one()) return 0;
    if (auto l = d.exact_log2()) return *l < 0 ? -1 : 1;
    for (unsigned prec = 64; prec <= 4096; prec *= 2) {
      RatInterval lg = d.log2(prec);
      if (lg.lo > 0) return 1;
      if (lg.hi < 0) return -1;
    }
    // distinct prime-power products are never equal; enclosure always splits
    fail(ErrorKind::InternalContractViolation, "factored comparison failed to resolve");
  }

  int cmp(const Rat& o) const { return cmp(from_rat(o)); }

  // compares count against this * size, exactly
  int cmp_scaled_count(const Int& count, const Int& size) const {
    if (count == 0) return size == 0 ? 0 : -1;
    if (size == 0) return 1;
    return from_rat(make_rat(count, size)).cmp(*this);
  }

  std::string to_string() const {
    if (exp_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, e] : exp_) {
      if (!first) os << " * ";
      os << p << "^" << e.get_str();
      first = false;
    }
    return os.str();
  }

 private:
  std::map<unsigned long, Int> exp_;
};

}  // namespace stellar
