#pragma once

// GF(2^m) arithmetic for m in {1, 4, 8, 16} with fixed reduction polynomials.
// Multiplication and inversion go through log/antilog tables built once per
// Field instance; a Field is immutable after construction and safe to share
// across threads.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnc/rng.hpp"

namespace gnc {

using symbol_t = std::uint16_t;
using SymbolVec = std::vector<symbol_t>;

class Field {
 public:
  explicit Field(int m) : m_(m) {
    switch (m) {
      case 1:  poly_ = 0x3;     break;
      case 4:  poly_ = 0x13;    break;
      case 8:  poly_ = 0x11D;   break;
      case 16: poly_ = 0x1100B; break;
      default: throw std::invalid_argument("field degree m must be one of {1, 4, 8, 16}");
    }
    q_ = 1u << m;
    build_tables();
  }

  int m() const { return m_; }
  std::uint32_t q() const { return q_; }
  std::uint32_t reduction_poly() const { return poly_; }

  symbol_t add(symbol_t a, symbol_t b) const { return a ^ b; }

  symbol_t mul(symbol_t a, symbol_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  symbol_t inv(symbol_t a) const {
    if (a == 0) throw std::domain_error("inverse of zero field element");
    return exp_[(q_ - 1) - log_[a]];
  }

  symbol_t div(symbol_t a, symbol_t b) const { return mul(a, inv(b)); }

  symbol_t random_element(Rng& rng) const {
    return static_cast<symbol_t>(rng.next_u64() & (q_ - 1));
  }

  symbol_t random_nonzero(Rng& rng) const {
    return static_cast<symbol_t>(1 + rng.uniform_below(q_ - 1));
  }

  bool valid(symbol_t a) const { return a < q_; }
  bool valid(std::span<const symbol_t> v) const {
    for (auto s : v)
      if (s >= q_) return false;
    return true;
  }

  // dst[i] ^= c * src[i]
  void axpy(std::span<symbol_t> dst, symbol_t c, std::span<const symbol_t> src) const {
    if (dst.size() != src.size()) throw std::invalid_argument("axpy length mismatch");
    if (c == 0) return;
    if (c == 1) {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
      return;
    }
    const std::uint32_t lc = log_[c];
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const symbol_t s = src[i];
      if (s != 0) dst[i] ^= exp_[lc + log_[s]];
    }
  }

  void scale(std::span<symbol_t> v, symbol_t c) const {
    if (c == 1) return;
    if (c == 0) {
      for (auto& s : v) s = 0;
      return;
    }
    const std::uint32_t lc = log_[c];
    for (auto& s : v)
      if (s != 0) s = exp_[lc + log_[s]];
  }

 private:
  void build_tables() {
    log_.assign(q_, 0);
    exp_.assign(2 * (q_ - 1) + 1, 0);
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < q_ - 1; ++i) {
      exp_[i] = static_cast<symbol_t>(x);
      exp_[i + (q_ - 1)] = static_cast<symbol_t>(x);
      log_[x] = static_cast<symbol_t>(i);
      x <<= 1;
      if (x & q_) x ^= poly_;
    }
    // The table covers the full multiplicative group only if x generates it.
    if (exp_[0] != 1 || (q_ > 2 && exp_[1] != 2))
      throw std::logic_error("field table construction failed");
    std::vector<bool> seen(q_, false);
    for (std::uint32_t i = 0; i < q_ - 1; ++i) {
      if (seen[exp_[i]]) throw std::logic_error("reduction polynomial is not primitive");
      seen[exp_[i]] = true;
    }
  }

  int m_;
  std::uint32_t q_ = 0;
  std::uint32_t poly_ = 0;
  std::vector<symbol_t> log_;
  std::vector<symbol_t> exp_;
};

}  // namespace gnc
