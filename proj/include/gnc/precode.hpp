#pragma once

// Rate-(1-delta) erasure pre-code: a right-regular LDPC graph over the K'
// pipeline variables with a staircase parity part. Check j holds parity
// variables K+j-1 and K+j (check 0 only K+0) plus enough near-biregular
// source neighbors to reach degree exactly d_c. The staircase keeps parity
// variables at degree two, so no single source erasure can be orphaned by
// losing the parities around it, and systematic encoding stays a single
// sequential XOR sweep. Decoding peels degree-one checks and falls back to
// Gaussian elimination on the residual unknowns.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnc/field.hpp"
#include "gnc/linalg.hpp"
#include "gnc/rng.hpp"

namespace gnc {

struct PrecodeConfig {
  std::uint32_t dc = 0;                // 0 = auto: max(3, round(3 / delta))
  std::uint32_t elimination_cap = 2000;
};

inline std::uint32_t precode_auto_dc(double delta) {
  if (delta <= 0.0) return 3;
  const double v = 3.0 / delta;
  return v > 3.0 ? static_cast<std::uint32_t>(v + 0.5) : 3;
}

class PrecodeGraph {
 public:
  PrecodeGraph(std::uint32_t source_count, std::uint32_t total_count, std::uint32_t dc,
               std::uint64_t seed)
      : source_count_(source_count), total_count_(total_count), binary_field_(1) {
    if (total_count < source_count) throw std::invalid_argument("K' must be at least K");
    const std::uint32_t checks = total_count - source_count;
    if (checks == 0) return;  // rate-1 pre-code, empty graph
    if (dc < 2) throw std::invalid_argument("pre-code check degree must be at least 2");
    if (dc > source_count + 1) dc = source_count + 1;  // check 0 draws dc-1 distinct sources
    dc_ = dc;

    // Source slots per check: d_c - 2 behind the staircase pair, one extra
    // for check 0 which has a single parity neighbor.
    std::vector<std::uint32_t> quota(checks, dc - 2);
    quota[0] = dc - 1;
    std::uint64_t edges = 0;
    for (auto q : quota) edges += q;

    Rng rng(seed);
    // Source sockets: concatenated random permutations of the sources, cut
    // into per-check chunks. Within-chunk duplicates (possible only across a
    // permutation boundary) are redrawn.
    std::vector<std::uint32_t> sockets;
    sockets.reserve(((edges + source_count - 1) / source_count) * source_count);
    while (sockets.size() < edges) {
      const std::size_t start = sockets.size();
      for (std::uint32_t v = 0; v < source_count; ++v) sockets.push_back(v);
      for (std::uint32_t i = source_count; i > 1; --i) {
        const std::size_t j = start + rng.uniform_below(i);
        std::swap(sockets[start + i - 1], sockets[j]);
      }
    }
    checks_.resize(checks);
    std::size_t cursor = 0;
    for (std::uint32_t c = 0; c < checks; ++c) {
      auto& members = checks_[c];
      members.assign(sockets.begin() + cursor, sockets.begin() + cursor + quota[c]);
      cursor += quota[c];
      for (std::size_t i = 0; i < members.size(); ++i) {
        bool dup = true;
        while (dup) {
          dup = false;
          for (std::size_t j = 0; j < i; ++j) {
            if (members[j] == members[i]) { dup = true; break; }
          }
          if (dup) members[i] = static_cast<std::uint32_t>(rng.uniform_below(source_count));
        }
      }
      if (c > 0) members.push_back(source_count + c - 1);
      members.push_back(source_count + c);
    }
    var_checks_.resize(total_count);
    for (std::uint32_t c = 0; c < checks; ++c)
      for (auto v : checks_[c]) var_checks_[v].push_back(c);
  }

  std::uint32_t source_count() const { return source_count_; }
  std::uint32_t total_count() const { return total_count_; }
  std::uint32_t check_count() const { return static_cast<std::uint32_t>(checks_.size()); }
  std::uint32_t check_degree() const { return dc_; }
  const std::vector<std::uint32_t>& check_neighbors(std::uint32_t c) const { return checks_[c]; }
  const std::vector<std::uint32_t>& variable_checks(std::uint32_t v) const { return var_checks_[v]; }

  /// Systematic encode: sources pass through; the staircase gives
  /// parity_j = parity_{j-1} + sum of check j's source neighbors, so one
  /// sequential sweep zeroes every check.
  std::vector<SymbolVec> encode(std::span<const SymbolVec> source) const {
    if (source.size() != source_count_) throw std::invalid_argument("source payload count must equal K");
    std::vector<SymbolVec> out(source.begin(), source.end());
    out.resize(total_count_);
    const std::size_t payload_len = source_count_ ? source.front().size() : 0;
    for (std::uint32_t c = 0; c < check_count(); ++c) {
      SymbolVec parity(payload_len, 0);
      for (auto v : checks_[c]) {
        if (v == source_count_ + c) continue;  // the unknown being solved
        for (std::size_t i = 0; i < payload_len; ++i) parity[i] ^= out[v][i];
      }
      out[source_count_ + c] = std::move(parity);
    }
    return out;
  }

  struct DecodeOutcome {
    bool recovered = false;        // all K source variables known
    std::uint32_t residual = 0;    // unknowns left when stalled
    std::uint32_t peeled = 0;      // variables resolved by peeling
    std::uint32_t eliminated = 0;  // variables resolved by the fallback
    std::vector<bool> known;       // final knowledge, size K'
    std::vector<SymbolVec> values; // payloads where known
  };

  /// Peel to a fixed point, then eliminate the residual system when it is
  /// small enough. Symbol width m gives the rhs bit width for elimination.
  DecodeOutcome decode(std::vector<bool> known, std::vector<SymbolVec> values, int m,
                       std::uint32_t elimination_cap) const {
    if (known.size() != total_count_ || values.size() != total_count_)
      throw std::invalid_argument("erasure pattern must cover all K' variables");
    DecodeOutcome out;

    std::vector<std::uint32_t> unknown_degree(check_count(), 0);
    std::vector<std::uint32_t> ready;
    for (std::uint32_t c = 0; c < check_count(); ++c) {
      for (auto v : checks_[c])
        if (!known[v]) ++unknown_degree[c];
      if (unknown_degree[c] == 1) ready.push_back(c);
    }
    const std::size_t payload_len = payload_length(values, known);
    while (!ready.empty()) {
      const std::uint32_t c = ready.back();
      ready.pop_back();
      if (unknown_degree[c] != 1) continue;
      std::uint32_t target = total_count_;
      SymbolVec acc(payload_len, 0);
      for (auto v : checks_[c]) {
        if (known[v]) {
          for (std::size_t i = 0; i < payload_len; ++i) acc[i] ^= values[v][i];
        } else {
          target = v;
        }
      }
      known[target] = true;
      values[target] = std::move(acc);
      ++out.peeled;
      for (auto c2 : var_checks_[target])
        if (--unknown_degree[c2] == 1) ready.push_back(c2);
    }

    std::uint32_t unknown_total = 0;
    for (std::uint32_t v = 0; v < total_count_; ++v)
      if (!known[v]) ++unknown_total;

    if (unknown_total > 0 && unknown_total <= elimination_cap && check_count() > 0)
      eliminate_residual(known, values, m, payload_len, out);

    out.residual = 0;
    for (std::uint32_t v = 0; v < total_count_; ++v)
      if (!known[v]) ++out.residual;
    out.recovered = true;
    for (std::uint32_t v = 0; v < source_count_; ++v)
      if (!known[v]) { out.recovered = false; break; }
    out.known = std::move(known);
    out.values = std::move(values);
    return out;
  }

 private:
  std::size_t payload_length(const std::vector<SymbolVec>& values,
                             const std::vector<bool>& known) const {
    for (std::uint32_t v = 0; v < total_count_; ++v)
      if (known[v]) return values[v].size();
    return 0;
  }

  void eliminate_residual(std::vector<bool>& known, std::vector<SymbolVec>& values, int m,
                          std::size_t payload_len, DecodeOutcome& out) const {
    std::vector<std::uint32_t> unknown_index(total_count_, 0);
    std::vector<std::uint32_t> unknowns;
    for (std::uint32_t v = 0; v < total_count_; ++v) {
      if (!known[v]) {
        unknown_index[v] = static_cast<std::uint32_t>(unknowns.size());
        unknowns.push_back(v);
      }
    }
    const std::size_t rhs_bits = payload_len * static_cast<std::size_t>(m);
    EliminationState elim(binary_field_, unknowns.size(), rhs_bits);
    SymbolVec row(unknowns.size());
    SymbolVec rhs(rhs_bits);
    for (std::uint32_t c = 0; c < check_count(); ++c) {
      row.assign(unknowns.size(), 0);
      rhs.assign(rhs_bits, 0);
      bool touches = false;
      for (auto v : checks_[c]) {
        if (known[v]) {
          for (std::size_t i = 0; i < payload_len; ++i) {
            const symbol_t s = values[v][i];
            for (int b = 0; b < m; ++b) rhs[i * m + b] ^= (s >> b) & 1u;
          }
        } else {
          row[unknown_index[v]] ^= 1u;
          touches = true;
        }
      }
      if (touches) elim.insert(row, rhs);
      if (elim.full_rank()) break;
    }
    const auto pinned = elim.determined();
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      if (!pinned[u]) continue;
      const std::uint32_t v = unknowns[u];
      SymbolVec value(payload_len, 0);
      for (std::size_t i = 0; i < payload_len; ++i)
        for (int b = 0; b < m; ++b)
          if ((*pinned[u])[i * m + b]) value[i] |= static_cast<symbol_t>(1u << b);
      known[v] = true;
      values[v] = std::move(value);
      ++out.eliminated;
    }
  }

  std::uint32_t source_count_;
  std::uint32_t total_count_;
  std::uint32_t dc_ = 0;
  Field binary_field_;
  std::vector<std::vector<std::uint32_t>> checks_;
  std::vector<std::vector<std::uint32_t>> var_checks_;
};

}  // namespace gnc
