#pragma once

// End-to-end codec: pre-code -> outer code -> SRLNC on the encode side, and
// the iterative schedule on the decode side. Every received packet feeds its
// generation's eliminator; a generation reaching full rank triggers an
// event-driven cascade over the outer checks incident to it, each check
// releasing one extra equation once exactly one of its generations is open;
// recovered systematic slots are finally handed to the pre-code.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnc/degree_distribution.hpp"
#include "gnc/field.hpp"
#include "gnc/outercode.hpp"
#include "gnc/params.hpp"
#include "gnc/precode.hpp"
#include "gnc/rng.hpp"
#include "gnc/srlnc.hpp"

namespace gnc {

struct PipelineConfig {
  PrecodeConfig precode;
  double handoff_margin = 0.1;  // hand off once known systematic fraction crosses 1 - delta (1 - margin)
};

namespace detail {
constexpr std::uint64_t kPrecodeStream = 0x70726543;  // seed stream tags
constexpr std::uint64_t kOuterStream = 0x6f757452;
constexpr std::uint64_t kPacketStream = 0x70616b74;

inline std::uint32_t effective_dc(const CodeParams& params, const PrecodeConfig& cfg) {
  return cfg.dc != 0 ? cfg.dc : precode_auto_dc(params.delta);
}
}  // namespace detail

class GammaEncoder {
 public:
  GammaEncoder(const CodeParams& params, const PipelineConfig& cfg, const DegreeDistribution& dist,
               std::span<const SymbolVec> source, std::uint64_t seed)
      : params_(params),
        field_(params.m),
        layout_(params),
        packet_rng_(derive_seed(seed, detail::kPacketStream)),
        seed_(seed) {
    if (source.size() != params.K) throw std::invalid_argument("source must hold exactly K payloads");
    for (const auto& payload : source)
      if (payload.size() != params.payload_len || !field_.valid(payload))
        throw std::invalid_argument("source payload malformed");

    std::vector<SymbolVec> systematic;
    if (params.K_prime > params.K) {
      PrecodeGraph pre(params.K, params.K_prime, detail::effective_dc(params, cfg.precode),
                       derive_seed(seed, detail::kPrecodeStream));
      systematic = pre.encode(source);
    } else {
      systematic.assign(source.begin(), source.end());
    }

    if (params.M > 0) {
      OuterCode outer(field_, params, layout_, dist, derive_seed(seed, detail::kOuterStream));
      block_ = outer.encode(systematic);
    } else {
      block_.resize(params.N);
      for (std::uint32_t s = 0; s < params.K_prime; ++s)
        block_[layout_.systematic_slot(s)] = std::move(systematic[s]);
    }
  }

  const CodeParams& params() const { return params_; }
  const Field& field() const { return field_; }
  const BlockLayout& layout() const { return layout_; }
  const std::vector<SymbolVec>& block() const { return block_; }
  std::uint64_t seed() const { return seed_; }

  CodedPacket next_packet() { return encode_packet(field_, params_, block_, packet_rng_); }

 private:
  CodeParams params_;
  Field field_;
  BlockLayout layout_;
  std::vector<SymbolVec> block_;
  Rng packet_rng_;
  std::uint64_t seed_;
};

enum class DecodePhase { collecting, finished_success, finished_failure };

struct StepReport {
  IngestResult ingest = IngestResult::redundant;
  std::uint32_t generations_decoded = 0;  // new decodes caused by this packet
  std::uint32_t equations_released = 0;   // checks released during the cascade
  bool finished = false;
};

struct DecodeReport {
  bool success = false;
  std::uint64_t packets_used = 0;
  double overhead = 0.0;  // (r - K) / K
  std::uint32_t generations_decoded = 0;
  std::uint32_t generations_decoded_by_srlnc_alone = 0;
  std::uint32_t released_equations_used = 0;  // innovative released equations
  std::uint32_t precode_recovered_count = 0;
  std::vector<SymbolVec> source;  // recovered payloads on success
};

class GammaDecoder {
 public:
  GammaDecoder(const CodeParams& params, const PipelineConfig& cfg, const DegreeDistribution& dist,
               std::uint64_t seed)
      : params_(params), cfg_(cfg), field_(params.m), layout_(params) {
    if (params_.M > 0)
      outer_.emplace(field_, params_, layout_, dist, derive_seed(seed, detail::kOuterStream));
    if (params_.K_prime > params_.K)
      pre_.emplace(params_.K, params_.K_prime, detail::effective_dc(params_, cfg.precode),
                   derive_seed(seed, detail::kPrecodeStream));
    gens_.reserve(params_.n);
    for (std::uint32_t gen = 0; gen < params_.n; ++gen)
      gens_.emplace_back(field_, gen, params_.g, params_.payload_len);
    decoded_.assign(params_.n, 0);
    slot_values_.resize(params_.N);
    if (params_.M > 0) {
      spent_.assign(params_.M, 0);
      undecoded_count_.resize(params_.M);
      for (const auto& check : outer_->checks())
        undecoded_count_[check.id] = static_cast<std::uint32_t>(check.generations.size());
    }
    handoff_threshold_ = static_cast<std::uint32_t>(
        static_cast<double>(params_.K_prime) *
        (1.0 - params_.delta * (1.0 - cfg_.handoff_margin)));
  }

  DecodePhase phase() const { return phase_; }
  std::uint64_t packets_consumed() const { return packets_consumed_; }
  std::uint32_t generations_decoded() const { return decoded_count_; }
  std::uint32_t known_systematic() const { return known_systematic_; }

  StepReport push(const CodedPacket& packet) {
    if (phase_ != DecodePhase::collecting) throw std::logic_error("decoder is not collecting");
    if (packet.generation >= params_.n) throw std::invalid_argument("generation index out of range");
    if (packet.coefficients.size() != params_.g || packet.payload.size() != params_.payload_len)
      throw std::invalid_argument("packet dimensions do not match code parameters");
    ++packets_consumed_;
    StepReport report;
    report.ingest = gens_[packet.generation].ingest(packet);
    if (report.ingest == IngestResult::innovative && gens_[packet.generation].decoded()) {
      on_generation_decoded(packet.generation, report);
      run_cascade(report);
      maybe_handoff();
    }
    report.finished = phase_ != DecodePhase::collecting;
    return report;
  }

  /// Exhausts the supplier (or stops at success), makes the final pre-code
  /// attempt, and reports.
  DecodeReport decode_stream(const std::function<std::optional<CodedPacket>()>& next_packet) {
    while (phase_ == DecodePhase::collecting) {
      auto pkt = next_packet();
      if (!pkt) break;
      push(*pkt);
    }
    return finalize();
  }

  /// Final pre-code attempt (stream exhausted or caller gives up).
  DecodeReport finalize() {
    if (phase_ == DecodePhase::collecting) {
      attempt_precode();
      if (phase_ == DecodePhase::collecting) phase_ = DecodePhase::finished_failure;
    }
    DecodeReport report;
    report.success = phase_ == DecodePhase::finished_success;
    report.packets_used = packets_consumed_;
    report.overhead = (static_cast<double>(packets_consumed_) - static_cast<double>(params_.K)) /
                      static_cast<double>(params_.K);
    report.generations_decoded = decoded_count_;
    report.generations_decoded_by_srlnc_alone = decoded_count_ - decoded_with_release_;
    report.released_equations_used = released_used_;
    report.precode_recovered_count = precode_recovered_;
    if (report.success) report.source = source_;
    return report;
  }

 private:
  void on_generation_decoded(std::uint32_t gen, StepReport& report) {
    decoded_[gen] = 1;
    ++decoded_count_;
    ++report.generations_decoded;
    if (release_helped_.size() > gen && release_helped_[gen]) ++decoded_with_release_;
    auto slots = gens_[gen].solution();
    const std::size_t base = static_cast<std::size_t>(gen) * params_.g;
    for (std::uint32_t pos = 0; pos < params_.g; ++pos) slot_values_[base + pos] = std::move((*slots)[pos]);
    known_systematic_ += layout_.systematic_count(gen);
    cascade_stack_.push_back(gen);
  }

  void run_cascade(StepReport& report) {
    if (!outer_) {
      cascade_stack_.clear();
      return;
    }
    ReleasedEquation eq;
    while (!cascade_stack_.empty()) {
      const std::uint32_t gen = cascade_stack_.back();
      cascade_stack_.pop_back();
      for (const std::uint32_t check_id : outer_->incident(gen)) {
        if (spent_[check_id]) continue;
        if (--undecoded_count_[check_id] != 1) {
          if (undecoded_count_[check_id] == 0) spent_[check_id] = 1;
          continue;
        }
        const auto outcome = try_release(outer_->checks()[check_id], params_, field_, decoded_,
                                         slot_values_, eq);
        spent_[check_id] = 1;
        if (outcome != ReleaseOutcome::released) continue;
        ++report.equations_released;
        const auto res = gens_[eq.generation].ingest_equation(eq.coefficients, eq.rhs);
        if (res == IngestResult::innovative) {
          ++released_used_;
          if (release_helped_.empty()) release_helped_.assign(params_.n, 0);
          release_helped_[eq.generation] = 1;
          if (gens_[eq.generation].decoded()) on_generation_decoded(eq.generation, report);
        }
      }
    }
  }

  void maybe_handoff() {
    if (decoded_count_ == params_.n || known_systematic_ >= handoff_threshold_) attempt_precode();
  }

  void attempt_precode() {
    if (phase_ != DecodePhase::collecting) return;
    if (!pre_) {
      // Rate-1 pre-code: success once every systematic slot is known.
      if (known_systematic_ == params_.K_prime) {
        source_.resize(params_.K);
        for (std::uint32_t v = 0; v < params_.K; ++v)
          source_[v] = slot_values_[layout_.systematic_slot(v)];
        precode_recovered_ = 0;
        phase_ = DecodePhase::finished_success;
      }
      return;
    }
    std::vector<bool> known(params_.K_prime, false);
    std::vector<SymbolVec> values(params_.K_prime);
    for (std::uint32_t v = 0; v < params_.K_prime; ++v) {
      const std::uint32_t slot = layout_.systematic_slot(v);
      if (decoded_[layout_.generation_of(slot)]) {
        known[v] = true;
        values[v] = slot_values_[slot];
      }
    }
    auto outcome = pre_->decode(std::move(known), std::move(values), params_.m,
                                cfg_.precode.elimination_cap);
    if (!outcome.recovered) return;
    precode_recovered_ = outcome.peeled + outcome.eliminated;
    source_.assign(outcome.values.begin(), outcome.values.begin() + params_.K);
    phase_ = DecodePhase::finished_success;
  }

  CodeParams params_;
  PipelineConfig cfg_;
  Field field_;
  BlockLayout layout_;
  std::optional<OuterCode> outer_;
  std::optional<PrecodeGraph> pre_;
  std::vector<GenerationDecoder> gens_;
  std::vector<std::uint8_t> decoded_;
  std::vector<SymbolVec> slot_values_;
  std::vector<std::uint8_t> spent_;
  std::vector<std::uint32_t> undecoded_count_;
  std::vector<std::uint8_t> release_helped_;
  std::vector<std::uint32_t> cascade_stack_;
  std::vector<SymbolVec> source_;
  DecodePhase phase_ = DecodePhase::collecting;
  std::uint64_t packets_consumed_ = 0;
  std::uint32_t decoded_count_ = 0;
  std::uint32_t decoded_with_release_ = 0;
  std::uint32_t released_used_ = 0;
  std::uint32_t precode_recovered_ = 0;
  std::uint32_t known_systematic_ = 0;
  std::uint32_t handoff_threshold_ = 0;
};

/// Convenience wrapper mirroring the encode pipeline in one call.
inline GammaEncoder gamma_encode_block(const CodeParams& params, const PipelineConfig& cfg,
                                       const DegreeDistribution& dist,
                                       std::span<const SymbolVec> source, std::uint64_t seed) {
  return GammaEncoder(params, cfg, dist, source, seed);
}

}  // namespace gnc
