#pragma once

// Code parameterization: the user-facing knobs (K, delta, R, g, D, q) and the
// block geometry derived from them, plus the deterministic slot layout that
// places systematic and parity symbols inside generations.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnc {

struct CodeParams {
  // inputs
  std::uint32_t K = 0;            // source packet count
  std::uint32_t payload_len = 1;  // symbols per packet
  int m = 1;                      // field degree, q = 2^m
  double delta = 0.0;             // pre-code redundancy fraction
  double R = 1.0;                 // outer code rate
  std::uint32_t g = 1;            // generation size
  std::uint32_t D = 2;            // maximum check generation-degree

  // derived
  std::uint32_t K_prime = 0;  // pre-code output count
  std::uint32_t N = 0;        // block size, whole number of generations
  std::uint32_t n = 0;        // generation count
  std::uint32_t M = 0;        // outer check count

  static CodeParams create(std::uint32_t K, std::uint32_t payload_len, int m, double delta,
                           double R, std::uint32_t g, std::uint32_t D) {
    CodeParams p;
    p.K = K;
    p.payload_len = payload_len;
    p.m = m;
    p.delta = delta;
    p.R = R;
    p.g = g;
    p.D = D;
    p.derive();
    return p;
  }

  void derive() {
    if (K == 0) throw std::invalid_argument("K must be positive");
    if (payload_len == 0) throw std::invalid_argument("payload_len must be positive");
    if (m != 1 && m != 4 && m != 8 && m != 16) throw std::invalid_argument("q must be 2, 16, 256 or 65536");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
    if (!(R > 0.0 && R <= 1.0)) throw std::invalid_argument("R must lie in (0, 1]");
    if (g == 0) throw std::invalid_argument("g must be positive");
    K_prime = ceil_div_real(static_cast<double>(K), 1.0 - delta);
    const std::uint32_t gens = ceil_div_real(static_cast<double>(K_prime), R * static_cast<double>(g));
    n = gens;
    N = n * g;
    if (K_prime > N) throw std::invalid_argument("derived geometry invalid (K' > N)");
    M = N - K_prime;
    if (M > 0 && (D < 2 || D > n))
      throw std::invalid_argument("D must satisfy 2 <= D <= n when outer checks exist");
  }

  std::uint32_t q() const { return 1u << m; }

 private:
  // Smallest integer >= a / b, robust to the division landing a hair above an
  // exact integer in floating point.
  static std::uint32_t ceil_div_real(double a, double b) {
    const double v = a / b;
    return static_cast<std::uint32_t>(std::ceil(v - 1e-9));
  }
};

enum class SlotRole : std::uint8_t { systematic, parity };

/// Deterministic slot layout: parity slots are spread round-robin across
/// generations (counts differ by at most one) and sit at each generation's
/// tail positions.
class BlockLayout {
 public:
  explicit BlockLayout(const CodeParams& params)
      : g_(params.g), n_(params.n) {
    const std::uint32_t base = params.M / params.n;
    const std::uint32_t extra = params.M % params.n;
    parity_per_gen_.resize(params.n);
    roles_.resize(params.N);
    slot_ordinal_.resize(params.N);
    systematic_slots_.reserve(params.K_prime);
    parity_slots_.reserve(params.M);
    for (std::uint32_t gen = 0; gen < params.n; ++gen) {
      const std::uint32_t pc = base + (gen < extra ? 1 : 0);
      if (pc > params.g) throw std::invalid_argument("more parity slots than generation positions");
      parity_per_gen_[gen] = pc;
      for (std::uint32_t pos = 0; pos < params.g; ++pos) {
        const std::size_t slot = static_cast<std::size_t>(gen) * params.g + pos;
        if (pos < params.g - pc) {
          roles_[slot] = SlotRole::systematic;
          slot_ordinal_[slot] = static_cast<std::uint32_t>(systematic_slots_.size());
          systematic_slots_.push_back(static_cast<std::uint32_t>(slot));
        } else {
          roles_[slot] = SlotRole::parity;
          slot_ordinal_[slot] = static_cast<std::uint32_t>(parity_slots_.size());
          parity_slots_.push_back(static_cast<std::uint32_t>(slot));
        }
      }
    }
  }

  std::uint32_t generation_size() const { return g_; }
  std::uint32_t generation_count() const { return n_; }
  std::uint32_t parity_count(std::uint32_t gen) const { return parity_per_gen_[gen]; }
  std::uint32_t systematic_count(std::uint32_t gen) const { return g_ - parity_per_gen_[gen]; }

  SlotRole role(std::uint32_t slot) const { return roles_[slot]; }
  /// Ordinal of the slot within its role class (systematic index or parity index).
  std::uint32_t ordinal(std::uint32_t slot) const { return slot_ordinal_[slot]; }

  std::uint32_t systematic_slot(std::uint32_t index) const { return systematic_slots_[index]; }
  std::uint32_t parity_slot(std::uint32_t index) const { return parity_slots_[index]; }
  std::uint32_t systematic_total() const { return static_cast<std::uint32_t>(systematic_slots_.size()); }
  std::uint32_t parity_total() const { return static_cast<std::uint32_t>(parity_slots_.size()); }

  std::uint32_t slot_index(std::uint32_t gen, std::uint32_t pos) const { return gen * g_ + pos; }
  std::uint32_t generation_of(std::uint32_t slot) const { return slot / g_; }

 private:
  std::uint32_t g_;
  std::uint32_t n_;
  std::vector<std::uint32_t> parity_per_gen_;
  std::vector<SlotRole> roles_;
  std::vector<std::uint32_t> slot_ordinal_;
  std::vector<std::uint32_t> systematic_slots_;
  std::vector<std::uint32_t> parity_slots_;
};

}  // namespace gnc
