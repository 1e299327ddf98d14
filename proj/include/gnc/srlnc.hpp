#pragma once

// Generation-based SRLNC: random linear packets inside one generation,
// intermediate-node recoding, and the per-generation elimination decoder.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnc/field.hpp"
#include "gnc/linalg.hpp"
#include "gnc/params.hpp"
#include "gnc/rng.hpp"

namespace gnc {

struct CodedPacket {
  std::uint32_t generation = 0;
  SymbolVec coefficients;  // length g
  SymbolVec payload;       // length payload_len
};

/// Fresh packet: generation uniform over [0, n), coefficients i.i.d. uniform
/// over the whole field (zero included), payload the matching combination of
/// the generation's slots.
inline CodedPacket encode_packet(const Field& field, const CodeParams& params,
                                 std::span<const SymbolVec> block, Rng& rng) {
  if (block.size() != params.N) throw std::invalid_argument("block must hold all N slots");
  CodedPacket pkt;
  pkt.generation = static_cast<std::uint32_t>(rng.uniform_below(params.n));
  pkt.coefficients.resize(params.g);
  for (auto& c : pkt.coefficients) c = field.random_element(rng);
  pkt.payload.assign(params.payload_len, 0);
  const std::size_t base = static_cast<std::size_t>(pkt.generation) * params.g;
  for (std::uint32_t j = 0; j < params.g; ++j)
    field.axpy(pkt.payload, pkt.coefficients[j], block[base + j]);
  return pkt;
}

/// Recode a buffer of same-generation packets with fresh uniform coefficients.
inline CodedPacket recode_packets(const Field& field, std::span<const CodedPacket> buffer,
                                  Rng& rng) {
  if (buffer.empty()) throw std::invalid_argument("recode buffer is empty");
  const std::uint32_t gen = buffer.front().generation;
  for (const auto& pkt : buffer)
    if (pkt.generation != gen) throw std::invalid_argument("cannot recode packets from mixed generations");
  CodedPacket out;
  out.generation = gen;
  out.coefficients.assign(buffer.front().coefficients.size(), 0);
  out.payload.assign(buffer.front().payload.size(), 0);
  for (const auto& pkt : buffer) {
    const symbol_t c = field.random_element(rng);
    field.axpy(out.coefficients, c, pkt.coefficients);
    field.axpy(out.payload, c, pkt.payload);
  }
  return out;
}

enum class IngestResult { innovative, redundant, already_decoded };

class GenerationDecoder {
 public:
  GenerationDecoder(const Field& field, std::uint32_t generation, std::uint32_t g,
                    std::uint32_t payload_len)
      : generation_(generation), elim_(field, g, payload_len) {}

  std::uint32_t generation() const { return generation_; }
  std::size_t rank() const { return elim_.rank(); }
  bool decoded() const { return elim_.full_rank(); }

  IngestResult ingest(const CodedPacket& pkt) {
    if (pkt.generation != generation_) throw std::invalid_argument("packet belongs to another generation");
    return ingest_equation(pkt.coefficients, pkt.payload);
  }

  /// Raw equation path used for released outer-code constraints.
  IngestResult ingest_equation(std::span<const symbol_t> coeffs, std::span<const symbol_t> rhs) {
    if (decoded()) return IngestResult::already_decoded;
    return elim_.insert(coeffs, rhs) == InsertOutcome::innovative ? IngestResult::innovative
                                                                  : IngestResult::redundant;
  }

  /// Slot payloads in position order once decoded.
  std::optional<std::vector<SymbolVec>> solution() const { return elim_.solution(); }

 private:
  std::uint32_t generation_;
  EliminationState elim_;
};

// --- packet wire format -----------------------------------------------------
// Symbols are bit-packed m bits each, LSB-first within bytes, padded to a
// whole byte per section.

inline std::size_t packed_size(std::size_t count, int m) { return (count * m + 7) / 8; }

inline void pack_symbols(std::span<const symbol_t> symbols, int m, std::vector<std::uint8_t>& out) {
  const std::size_t start = out.size();
  out.resize(start + packed_size(symbols.size(), m), 0);
  std::size_t bit = start * 8;
  for (symbol_t s : symbols) {
    for (int b = 0; b < m; ++b, ++bit)
      if (s & (1u << b)) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
  }
}

inline SymbolVec unpack_symbols(std::span<const std::uint8_t> bytes, int m, std::size_t count) {
  if (bytes.size() < packed_size(count, m)) throw std::invalid_argument("packed buffer too short");
  SymbolVec out(count, 0);
  std::size_t bit = 0;
  for (auto& s : out) {
    for (int b = 0; b < m; ++b, ++bit)
      if (bytes[bit / 8] & (1u << (bit % 8))) s |= static_cast<symbol_t>(1u << b);
  }
  return out;
}

inline std::vector<std::uint8_t> packet_to_bytes(const CodedPacket& pkt, int m) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + packed_size(pkt.coefficients.size(), m) + packed_size(pkt.payload.size(), m));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(pkt.generation >> (8 * i)));
  pack_symbols(pkt.coefficients, m, out);
  pack_symbols(pkt.payload, m, out);
  return out;
}

inline CodedPacket packet_from_bytes(std::span<const std::uint8_t> bytes, int m, std::uint32_t g,
                                     std::uint32_t payload_len) {
  const std::size_t coeff_bytes = packed_size(g, m);
  const std::size_t payload_bytes = packed_size(payload_len, m);
  if (bytes.size() != 4 + coeff_bytes + payload_bytes)
    throw std::invalid_argument("packet record has wrong length");
  CodedPacket pkt;
  pkt.generation = 0;
  for (int i = 0; i < 4; ++i) pkt.generation |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  pkt.coefficients = unpack_symbols(bytes.subspan(4, coeff_bytes), m, g);
  pkt.payload = unpack_symbols(bytes.subspan(4 + coeff_bytes, payload_bytes), m, payload_len);
  return pkt;
}

}  // namespace gnc
