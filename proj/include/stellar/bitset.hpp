#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

#include "stellar/exact.hpp"

namespace stellar {

// Fixed-universe dynamic bitset. All vertex sets in the toolkit are of this
// type; the word layout is exposed enough for the popcount-heavy density
// kernels.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  static Bitset full(std::size_t n) {
    Bitset b(n);
    for (std::size_t i = 0; i < b.w_.size(); ++i) b.w_[i] = ~0ull;
    b.trim();
    return b;
  }

  std::size_t universe() const { return n_; }

  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i) { w_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(1ull << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
  }

  bool empty() const {
    for (auto w : w_)
      if (w) return false;
    return true;
  }

  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }

  bool is_subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }

  Bitset operator&(const Bitset& o) const {
    Bitset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
    return r;
  }

  Bitset operator|(const Bitset& o) const {
    Bitset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
    return r;
  }

  // set difference
  Bitset operator-(const Bitset& o) const {
    Bitset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & ~o.w_[i];
    return r;
  }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }

  bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

  std::size_t intersection_count(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return c;
  }

  // lowest set bit, or npos
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return (i << 6) + static_cast<std::size_t>(std::countr_zero(w_[i]));
    return npos;
  }

  std::size_t next(std::size_t after) const {
    for (std::size_t i = after + 1; i < n_;) {
      std::uint64_t w = w_[i >> 6] >> (i & 63);
      if (w) return i + static_cast<std::size_t>(std::countr_zero(w));
      i = (i | 63) + 1;
    }
    return npos;
  }

  std::vector<std::size_t> to_vector() const {
    std::vector<std::size_t> v;
    v.reserve(count());
    for (std::size_t i = first(); i != npos; i = next(i)) v.push_back(i);
    return v;
  }

  static Bitset of(std::size_t n, std::initializer_list<std::size_t> xs) {
    Bitset b(n);
    for (auto x : xs) b.set(x);
    return b;
  }

  static Bitset of_vector(std::size_t n, const std::vector<std::size_t>& xs) {
    Bitset b(n);
    for (auto x : xs) b.set(x);
    return b;
  }

  const std::vector<std::uint64_t>& words() const { return w_; }

 private:
  void trim() {
    if (n_ & 63) w_.back() &= (~0ull) >> (64 - (n_ & 63));
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

}  // namespace stellar
