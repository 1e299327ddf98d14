#pragma once

// Monte Carlo reception-overhead measurement. Trials are deterministic given
// (params, dist, trials, base_seed): trial t runs on seed base_seed ^ t and
// the aggregation is an index-ordered fold, so results do not depend on the
// worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gnc/degree_distribution.hpp"
#include "gnc/pipeline.hpp"

namespace gnc {

struct TrialResult {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::uint64_t packets_used = 0;
  double overhead = 0.0;
};

struct SimSummary {
  std::uint64_t trials = 0;
  double mean_overhead = 0.0;
  double std_overhead = 0.0;
  double success_rate = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  std::vector<TrialResult> results;
};

namespace detail {
constexpr std::uint64_t kSourceStream = 0x73726370;
}

/// One decode trial: fresh random source block, stream packets until the
/// decoder finishes or the 3K safety valve trips.
inline TrialResult run_trial(const CodeParams& params, const DegreeDistribution& dist,
                             const PipelineConfig& cfg, std::uint64_t seed) {
  Field field(params.m);
  Rng source_rng(derive_seed(seed, detail::kSourceStream));
  std::vector<SymbolVec> source(params.K);
  for (auto& payload : source) {
    payload.resize(params.payload_len);
    for (auto& s : payload) s = field.random_element(source_rng);
  }

  GammaEncoder encoder(params, cfg, dist, source, seed);
  GammaDecoder decoder(params, cfg, dist, seed);
  const std::uint64_t limit = 3ull * params.K;
  while (decoder.phase() == DecodePhase::collecting && decoder.packets_consumed() < limit)
    decoder.push(encoder.next_packet());
  auto report = decoder.finalize();
  if (report.success && report.source != source)
    throw std::logic_error("decoder reported success with wrong payloads");

  TrialResult out;
  out.seed = seed;
  out.success = report.success;
  out.packets_used = report.packets_used;
  out.overhead = report.overhead;
  return out;
}

inline SimSummary summarize(std::vector<TrialResult> results) {
  SimSummary s;
  s.trials = results.size();
  std::uint64_t successes = 0;
  double sum = 0.0;
  for (const auto& r : results) {
    sum += r.overhead;
    successes += r.success ? 1 : 0;
  }
  const double mean = s.trials ? sum / static_cast<double>(s.trials) : 0.0;
  double var = 0.0;
  for (const auto& r : results) var += (r.overhead - mean) * (r.overhead - mean);
  s.mean_overhead = mean;
  s.std_overhead = s.trials > 1 ? std::sqrt(var / static_cast<double>(s.trials - 1)) : 0.0;
  s.success_rate = s.trials ? static_cast<double>(successes) / static_cast<double>(s.trials) : 0.0;
  std::vector<double> sorted;
  sorted.reserve(results.size());
  for (const auto& r : results) sorted.push_back(r.overhead);
  std::sort(sorted.begin(), sorted.end());
  auto pct = [&](double p) {
    if (sorted.empty()) return 0.0;
    const std::size_t idx = std::min(sorted.size() - 1,
                                     static_cast<std::size_t>(p * static_cast<double>(sorted.size())));
    return sorted[idx];
  };
  s.p50 = pct(0.50);
  s.p90 = pct(0.90);
  s.p99 = pct(0.99);
  s.results = std::move(results);
  return s;
}

inline SimSummary run_campaign(const CodeParams& params, const DegreeDistribution& dist,
                               const PipelineConfig& cfg, std::uint64_t trials,
                               std::uint64_t base_seed, int threads = 1) {
  if (trials == 0) throw std::invalid_argument("at least one trial required");
  std::vector<TrialResult> results(trials);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::uint64_t t = next.fetch_add(1);
      if (t >= trials) return;
      results[t] = run_trial(params, dist, cfg, base_seed ^ t);
      results[t].trial = t;
    }
  };
  const int workers = std::max(1, threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return summarize(std::move(results));
}

/// Plain SRLNC baseline: same g and q, no outer code, no pre-code. K is
/// rounded up to a whole number of generations; success means every
/// generation reaches full rank.
inline CodeParams baseline_params(const CodeParams& params) {
  const std::uint32_t k = params.g * ((params.K + params.g - 1) / params.g);
  return CodeParams::create(k, params.payload_len, params.m, 0.0, 1.0, params.g, 2);
}

inline SimSummary run_baseline_srlnc(const CodeParams& params, std::uint64_t trials,
                                     std::uint64_t base_seed, int threads = 1) {
  const CodeParams base = baseline_params(params);
  return run_campaign(base, DegreeDistribution::single(2), PipelineConfig{}, trials, base_seed,
                      threads);
}

// --- deterministic text output ----------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trials_csv(const SimSummary& summary) {
  std::string out = "trial,seed,success,packets_used,overhead\n";
  for (const auto& r : summary.results) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.success ? '1' : '0';
    out += ',';
    out += std::to_string(r.packets_used);
    out += ',';
    out += format_double(r.overhead);
    out += '\n';
  }
  return out;
}

}  // namespace gnc
