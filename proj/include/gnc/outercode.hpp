#pragma once

// Rate-R random outer code over generations. Each check is a zero-syndrome
// constraint dense over every slot of the generations it involves; the number
// of involved generations follows the degree distribution P(x). Checks are
// never transmitted: parity slots are solved for at encode time and travel
// inside ordinary SRLNC packets, and during decoding a check whose involved
// generations are all but one decoded releases an extra equation for the
// remaining generation.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnc/degree_distribution.hpp"
#include "gnc/field.hpp"
#include "gnc/linalg.hpp"
#include "gnc/params.hpp"
#include "gnc/rng.hpp"
#include "gnc/srlnc.hpp"

namespace gnc {

struct CheckSpec {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> generations;  // ascending, distinct, size in [2, D]
  std::vector<SymbolVec> coefficients;     // per involved generation, length g
};

/// Draw one check: degree from the distribution, generations uniform without
/// replacement, coefficients i.i.d. uniform over the field (zero allowed; a
/// per-generation row that comes out all zero is redrawn so every listed
/// generation genuinely participates).
inline CheckSpec sample_check(const DegreeDistribution& dist, std::uint32_t n, std::uint32_t g,
                              const Field& field, Rng& rng, std::uint32_t id = 0) {
  const std::uint32_t degree = dist.sample(rng);
  if (degree > n) throw std::invalid_argument("check degree exceeds generation count");
  CheckSpec check;
  check.id = id;
  check.generations = rng.sample_distinct(n, degree);
  check.coefficients.resize(degree);
  for (auto& row : check.coefficients) {
    row.resize(g);
    for (;;) {
      bool nonzero = false;
      for (auto& c : row) {
        c = field.random_element(rng);
        nonzero |= c != 0;
      }
      if (nonzero) break;
    }
  }
  return check;
}

struct ReleasedEquation {
  std::uint32_t generation = 0;
  SymbolVec coefficients;  // length g, the check's row on the open generation
  SymbolVec rhs;           // combination of the decoded generations' payloads
};

enum class ReleaseOutcome { released, not_ready, spent };

/// Substitute decoded generations into the check. Exactly one open generation
/// yields an equation; zero means the check is spent; two or more, not ready.
inline ReleaseOutcome try_release(const CheckSpec& check, const CodeParams& params,
                                  const Field& field, std::span<const std::uint8_t> decoded,
                                  const std::vector<SymbolVec>& slot_values,
                                  ReleasedEquation& out) {
  std::uint32_t open_count = 0;
  std::size_t open_pos = 0;
  for (std::size_t i = 0; i < check.generations.size(); ++i) {
    if (!decoded[check.generations[i]]) {
      ++open_count;
      open_pos = i;
      if (open_count > 1) return ReleaseOutcome::not_ready;
    }
  }
  if (open_count == 0) return ReleaseOutcome::spent;
  out.generation = check.generations[open_pos];
  out.coefficients = check.coefficients[open_pos];
  out.rhs.assign(params.payload_len, 0);
  for (std::size_t i = 0; i < check.generations.size(); ++i) {
    if (i == open_pos) continue;
    const std::size_t base = static_cast<std::size_t>(check.generations[i]) * params.g;
    for (std::uint32_t j = 0; j < params.g; ++j)
      field.axpy(out.rhs, check.coefficients[i][j], slot_values[base + j]);
  }
  return ReleaseOutcome::released;
}

class OuterCode {
 public:
  OuterCode(const Field& field, const CodeParams& params, const BlockLayout& layout,
            const DegreeDistribution& dist, std::uint64_t seed)
      : field_(&field), params_(params), layout_(&layout) {
    if (params.M > 0 && dist.max_degree() > params.n)
      throw std::invalid_argument("distribution degree exceeds generation count");
    Rng rng(seed);
    checks_.reserve(params.M);
    for (std::uint32_t c = 0; c < params.M; ++c)
      checks_.push_back(sample_check(dist, params.n, params.g, field, rng, c));
    normalize_parity_rank(rng);
    incident_.resize(params.n);
    for (const auto& check : checks_)
      for (auto gen : check.generations) incident_[gen].push_back(check.id);
  }

  const std::vector<CheckSpec>& checks() const { return checks_; }
  const std::vector<std::uint32_t>& incident(std::uint32_t gen) const { return incident_[gen]; }

  /// Systematic encode: place the K' systematic payloads, then solve the
  /// M x M parity system so every check has zero syndrome.
  std::vector<SymbolVec> encode(std::span<const SymbolVec> systematic) const {
    if (systematic.size() != params_.K_prime)
      throw std::invalid_argument("systematic payload count must equal K'");
    std::vector<SymbolVec> slots(params_.N);
    for (std::uint32_t s = 0; s < params_.K_prime; ++s)
      slots[layout_->systematic_slot(s)] = SymbolVec(systematic[s]);
    if (params_.M == 0) return slots;

    EliminationState solver(*field_, params_.M, params_.payload_len);
    SymbolVec row(params_.M);
    SymbolVec rhs(params_.payload_len);
    for (const auto& check : checks_) {
      build_parity_row(check, row);
      rhs.assign(params_.payload_len, 0);
      for (std::size_t i = 0; i < check.generations.size(); ++i) {
        const std::uint32_t gen = check.generations[i];
        const std::uint32_t sys_count = layout_->systematic_count(gen);
        const std::size_t base = static_cast<std::size_t>(gen) * params_.g;
        for (std::uint32_t pos = 0; pos < sys_count; ++pos)
          field_->axpy(rhs, check.coefficients[i][pos], slots[base + pos]);
      }
      solver.insert(row, rhs);
    }
    auto parity = solver.solution();
    if (!parity) throw std::runtime_error("outer encoding hit a singular parity system");
    for (std::uint32_t p = 0; p < params_.M; ++p) slots[layout_->parity_slot(p)] = std::move((*parity)[p]);
    return slots;
  }

 private:
  // The parity-restricted row of a check: coefficient of each parity slot
  // inside the check's generations, indexed by parity ordinal.
  void build_parity_row(const CheckSpec& check, SymbolVec& row) const {
    row.assign(params_.M, 0);
    for (std::size_t i = 0; i < check.generations.size(); ++i) {
      const std::uint32_t gen = check.generations[i];
      const std::uint32_t sys_count = layout_->systematic_count(gen);
      for (std::uint32_t pos = sys_count; pos < params_.g; ++pos) {
        const std::uint32_t slot = layout_->slot_index(gen, pos);
        row[layout_->ordinal(slot)] = check.coefficients[i][pos];
      }
    }
  }

  // The parity submatrix must be invertible for systematic encoding to work
  // for every input. A rank deficit shows up two ways: redundant rows
  // (coefficient collisions - redrawing those checks' coefficients fixes
  // them) and pivot-free columns (parity slots no combination of incident
  // checks can reach, e.g. a generation with fewer incident checks than
  // parity slots). Coefficient redraws handle the former; for the latter the
  // redrawn checks' generation sets are steered to include the starving
  // generations, keeping the check degree. The loop is value-free and
  // deterministic, so a decoder rebuilding the code from the same seed
  // replays it exactly.
  void normalize_parity_rank(Rng& rng) {
    if (params_.M == 0) return;
    SymbolVec row(params_.M);
    const SymbolVec no_rhs;
    std::vector<std::vector<std::uint32_t>> incident(params_.n);
    for (const auto& check : checks_)
      for (auto gen : check.generations) incident[gen].push_back(check.id);
    for (int attempt = 0; attempt < 100; ++attempt) {
      EliminationState elim(*field_, params_.M, 0);
      std::vector<std::uint32_t> dependent;
      for (const auto& check : checks_) {
        build_parity_row(check, row);
        if (elim.insert(row, no_rhs) == InsertOutcome::redundant) dependent.push_back(check.id);
      }
      if (dependent.empty()) return;
#ifdef GNC_NORM_DEBUG
      {
        std::size_t free_cols = 0;
        for (std::uint32_t col = 0; col < params_.M; ++col)
          if (!elim.has_pivot(col)) ++free_cols;
        std::fprintf(stderr, "attempt %d: deficiency %zu, free cols %zu, dep ids:", attempt,
                     dependent.size(), free_cols);
        for (auto id : dependent) std::fprintf(stderr, " %u(deg%zu)", id, checks_[id].generations.size());
        std::fprintf(stderr, "\n");
      }
#endif

      // Two repairs, kept as local as possible to avoid churning rows that
      // already carry pivots:
      //  - dependent rows get fresh coefficients, and, if that keeps failing,
      //    fresh generation sets (a dependency can live in the sets, e.g.
      //    more checks inside a group of generations than the group has
      //    parity slots);
      //  - every pivot-free column belongs to each rank-deficiency
      //    certificate, so perturbing a single incident coefficient there
      //    breaks the certificate; a generation that no check touches gets a
      //    dependent check steered into it first.
      std::vector<std::pair<std::uint32_t, std::uint32_t>> nudges;  // (check id, column)
      std::vector<std::uint32_t> steered_ids;
      std::size_t steer_cursor = 0;
      for (std::uint32_t col = 0; col < params_.M; ++col) {
        if (elim.has_pivot(col)) continue;
        const std::uint32_t gen = layout_->generation_of(layout_->parity_slot(col));
        // After a grace period, stop nudging bystander checks and point a
        // dependent check straight at the uncovered column.
        if (!incident[gen].empty() && attempt < 10) {
          const auto& inc = incident[gen];
          nudges.emplace_back(inc[static_cast<std::size_t>(attempt) % inc.size()], col);
          continue;
        }
        const std::uint32_t id = dependent[steer_cursor++ % dependent.size()];
        auto& gens = checks_[id].generations;
        if (std::find(gens.begin(), gens.end(), gen) == gens.end()) {
          std::size_t victim = 0;
          for (std::size_t i = 1; i < gens.size(); ++i)
            if (incident[gens[i]].size() > incident[gens[victim]].size()) victim = i;
          auto& old_inc = incident[gens[victim]];
          old_inc.erase(std::remove(old_inc.begin(), old_inc.end(), id), old_inc.end());
          gens[victim] = gen;
          std::sort(gens.begin(), gens.end());
          incident[gen].push_back(id);
        }
        nudges.emplace_back(id, col);
        steered_ids.push_back(id);
      }
      std::sort(steered_ids.begin(), steered_ids.end());
      std::vector<std::uint32_t> nudged_ids;
      for (const auto& [id, col] : nudges) nudged_ids.push_back(id);
      std::sort(nudged_ids.begin(), nudged_ids.end());

      for (auto id : dependent) {
        auto& check = checks_[id];
        const bool is_steered = std::binary_search(steered_ids.begin(), steered_ids.end(), id);
        const bool is_nudged = std::binary_search(nudged_ids.begin(), nudged_ids.end(), id);
        if (attempt >= 2 && !is_steered && !is_nudged) {
          for (auto gen : check.generations) {
            auto& inc = incident[gen];
            inc.erase(std::remove(inc.begin(), inc.end(), id), inc.end());
          }
          const auto degree = static_cast<std::uint32_t>(check.generations.size());
          for (int tries = 0; tries < 50; ++tries) {
            check.generations = rng.sample_distinct(params_.n, degree);
            std::uint32_t support = 0;
            for (auto gen : check.generations) support += layout_->parity_count(gen);
            if (support > 0) break;
          }
          for (auto gen : check.generations) incident[gen].push_back(id);
        }
        for (auto& crow : check.coefficients) {
          for (;;) {
            bool nonzero = false;
            for (auto& c : crow) {
              c = field_->random_element(rng);
              nonzero |= c != 0;
            }
            if (nonzero) break;
          }
        }
      }
      for (const auto& [id, col] : nudges) {
        auto& check = checks_[id];
        const std::uint32_t slot = layout_->parity_slot(col);
        const std::uint32_t gen = layout_->generation_of(slot);
        const std::uint32_t pos = slot % params_.g;
        const bool is_steered = std::binary_search(steered_ids.begin(), steered_ids.end(), id);
        for (std::size_t i = 0; i < check.generations.size(); ++i) {
          if (check.generations[i] != gen) continue;
          // a steered row must end up covering the column; a bystander row
          // only needs its entry changed, which shifts the row's inner
          // product with any certificate using this column
          check.coefficients[i][pos] =
              is_steered ? field_->random_nonzero(rng)
                         : field_->add(check.coefficients[i][pos], field_->random_nonzero(rng));
        }
      }
    }
    throw std::runtime_error("outer code construction could not reach a full-rank parity system");
  }

  const Field* field_;
  CodeParams params_;
  const BlockLayout* layout_;
  std::vector<CheckSpec> checks_;
  std::vector<std::vector<std::uint32_t>> incident_;
};

}  // namespace gnc
