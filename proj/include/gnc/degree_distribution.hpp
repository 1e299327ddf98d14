#pragma once

// Check generation-degree distribution P(x) = sum_{i=2..D} p_i x^i.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gnc/rng.hpp"

namespace gnc {

class DegreeDistribution {
 public:
  using Term = std::pair<std::uint32_t, double>;  // (degree, probability)

  explicit DegreeDistribution(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("degree distribution is empty");
    double sum = 0.0;
    std::uint32_t prev = 0;
    for (const auto& [degree, prob] : terms_) {
      if (degree < 2) throw std::invalid_argument("check degrees start at 2");
      if (degree <= prev) throw std::invalid_argument("degrees must be strictly increasing");
      if (prob < 0.0) throw std::invalid_argument("degree probabilities must be nonnegative");
      prev = degree;
      sum += prob;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("degree probabilities must sum to 1");
  }

  static DegreeDistribution single(std::uint32_t degree) {
    return DegreeDistribution({{degree, 1.0}});
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::uint32_t max_degree() const { return terms_.back().first; }

  double eval(double x) const {
    double acc = 0.0;
    for (const auto& [degree, prob] : terms_) acc += prob * std::pow(x, static_cast<double>(degree));
    return acc;
  }

  double deriv(double x) const {
    double acc = 0.0;
    for (const auto& [degree, prob] : terms_)
      acc += prob * static_cast<double>(degree) * std::pow(x, static_cast<double>(degree) - 1.0);
    return acc;
  }

  std::uint32_t sample(Rng& rng) const {
    const double u = rng.uniform_double();
    double cum = 0.0;
    for (const auto& [degree, prob] : terms_) {
      cum += prob;
      if (u < cum) return degree;
    }
    return terms_.back().first;
  }

 private:
  std::vector<Term> terms_;
};

}  // namespace gnc
