#pragma once

// Incremental Gaussian elimination over GF(2^m). Rows are kept in reduced
// row-echelon form at all times so every insert yields an immediate
// innovative/redundant verdict. Coefficients over GF(2) are bit-packed and
// reduced with word-wide XOR; larger fields use dense symbol rows.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnc/field.hpp"

namespace gnc {

enum class InsertOutcome { innovative, redundant };

class EliminationState {
 public:
  EliminationState(const Field& field, std::size_t width, std::size_t rhs_width)
      : field_(&field),
        width_(width),
        rhs_width_(rhs_width),
        packed_(field.q() == 2),
        coeff_words_((width + 63) / 64),
        rhs_words_((rhs_width + 63) / 64),
        pivot_of_col_(width, kNoRow) {
    if (width == 0) throw std::invalid_argument("elimination width must be positive");
  }

  std::size_t width() const { return width_; }
  std::size_t rhs_width() const { return rhs_width_; }
  std::size_t rank() const { return pivot_cols_.size(); }
  bool full_rank() const { return rank() == width_; }

  InsertOutcome insert(std::span<const symbol_t> coeffs, std::span<const symbol_t> rhs) {
    if (coeffs.size() != width_ || rhs.size() != rhs_width_)
      throw std::invalid_argument("row dimensions do not match elimination state");
    return packed_ ? insert_packed(coeffs, rhs) : insert_dense(coeffs, rhs);
  }

  /// Unique solution (one rhs vector per unknown, in column order) when full rank.
  std::optional<std::vector<SymbolVec>> solution() const {
    if (!full_rank()) return std::nullopt;
    std::vector<SymbolVec> out(width_);
    for (std::size_t c = 0; c < width_; ++c) out[c] = row_rhs(pivot_of_col_[c]);
    return out;
  }

  /// Per-column values that are already uniquely pinned down (full rank not required).
  std::vector<std::optional<SymbolVec>> determined() const {
    std::vector<std::optional<SymbolVec>> out(width_);
    for (std::size_t c = 0; c < width_; ++c) {
      const std::size_t r = pivot_of_col_[c];
      if (r == kNoRow) continue;
      if (row_is_singleton(r, c)) out[c] = row_rhs(r);
    }
    return out;
  }

  /// Accumulated rhs combination for the inserted row set; test support.
  SymbolVec row_rhs(std::size_t row) const {
    SymbolVec out(rhs_width_, 0);
    if (packed_) {
      const std::uint64_t* w = packed_rows_.data() + row * stride() + coeff_words_;
      for (std::size_t i = 0; i < rhs_width_; ++i)
        out[i] = static_cast<symbol_t>((w[i / 64] >> (i % 64)) & 1u);
    } else {
      const symbol_t* r = dense_rows_.data() + row * (width_ + rhs_width_) + width_;
      out.assign(r, r + rhs_width_);
    }
    return out;
  }

  bool has_pivot(std::size_t col) const { return pivot_of_col_[col] != kNoRow; }

  symbol_t coefficient(std::size_t row, std::size_t col) const {
    if (packed_) {
      const std::uint64_t* w = packed_rows_.data() + row * stride();
      return static_cast<symbol_t>((w[col / 64] >> (col % 64)) & 1u);
    }
    return dense_rows_[row * (width_ + rhs_width_) + col];
  }

 private:
  static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

  std::size_t stride() const { return coeff_words_ + rhs_words_; }

  InsertOutcome insert_packed(std::span<const symbol_t> coeffs, std::span<const symbol_t> rhs) {
    scratch_.assign(stride(), 0);
    for (std::size_t i = 0; i < width_; ++i)
      if (coeffs[i] & 1u) scratch_[i / 64] |= 1ULL << (i % 64);
    for (std::size_t i = 0; i < rhs_width_; ++i)
      if (rhs[i] & 1u) scratch_[coeff_words_ + i / 64] |= 1ULL << (i % 64);

    // Reduce against existing pivots in column order. The first pivot-free
    // nonzero column becomes the new pivot; reduction continues past it so
    // the stored row has no entries left in other pivot columns.
    std::size_t pivot_col = kNoRow;
    std::size_t w = 0;
    std::uint64_t mask = ~0ULL;
    while (w < coeff_words_) {
      const std::uint64_t bits = scratch_[w] & mask;
      if (bits == 0) {
        ++w;
        mask = ~0ULL;
        continue;
      }
      const int b = __builtin_ctzll(bits);
      const std::size_t col = w * 64 + static_cast<std::size_t>(b);
      if (col >= width_) break;
      mask = b == 63 ? 0 : ~((2ULL << b) - 1);
      const std::size_t r = pivot_of_col_[col];
      if (r == kNoRow) {
        if (pivot_col == kNoRow) pivot_col = col;
      } else {
        const std::uint64_t* prow = packed_rows_.data() + r * stride();
        for (std::size_t i = w; i < stride(); ++i) scratch_[i] ^= prow[i];
      }
    }
    if (pivot_col == kNoRow) return InsertOutcome::redundant;

    // Clear the new pivot column from all existing rows, then install.
    const std::size_t new_row = pivot_cols_.size();
    const std::size_t pw = pivot_col / 64;
    const std::uint64_t pbit = 1ULL << (pivot_col % 64);
    for (std::size_t r = 0; r < new_row; ++r) {
      std::uint64_t* row = packed_rows_.data() + r * stride();
      if (row[pw] & pbit)
        for (std::size_t i = 0; i < stride(); ++i) row[i] ^= scratch_[i];
    }
    packed_rows_.insert(packed_rows_.end(), scratch_.begin(), scratch_.end());
    pivot_of_col_[pivot_col] = new_row;
    pivot_cols_.push_back(pivot_col);
    return InsertOutcome::innovative;
  }

  InsertOutcome insert_dense(std::span<const symbol_t> coeffs, std::span<const symbol_t> rhs) {
    const std::size_t len = width_ + rhs_width_;
    dense_scratch_.assign(len, 0);
    std::copy(coeffs.begin(), coeffs.end(), dense_scratch_.begin());
    std::copy(rhs.begin(), rhs.end(), dense_scratch_.begin() + width_);

    std::size_t pivot_col = kNoRow;
    for (std::size_t col = 0; col < width_; ++col) {
      const symbol_t v = dense_scratch_[col];
      if (v == 0) continue;
      const std::size_t r = pivot_of_col_[col];
      if (r == kNoRow) {
        if (pivot_col == kNoRow) pivot_col = col;
        continue;
      }
      field_->axpy(std::span<symbol_t>(dense_scratch_.data() + col, len - col), v,
                   std::span<const symbol_t>(dense_rows_.data() + r * len + col, len - col));
    }
    if (pivot_col == kNoRow) return InsertOutcome::redundant;

    field_->scale(std::span<symbol_t>(dense_scratch_.data() + pivot_col, len - pivot_col),
                  field_->inv(dense_scratch_[pivot_col]));
    const std::size_t new_row = pivot_cols_.size();
    for (std::size_t r = 0; r < new_row; ++r) {
      symbol_t* row = dense_rows_.data() + r * len;
      const symbol_t v = row[pivot_col];
      if (v != 0)
        field_->axpy(std::span<symbol_t>(row + pivot_col, len - pivot_col), v,
                     std::span<const symbol_t>(dense_scratch_.data() + pivot_col, len - pivot_col));
    }
    dense_rows_.insert(dense_rows_.end(), dense_scratch_.begin(), dense_scratch_.end());
    pivot_of_col_[pivot_col] = new_row;
    pivot_cols_.push_back(pivot_col);
    return InsertOutcome::innovative;
  }

  bool row_is_singleton(std::size_t row, std::size_t pivot_col) const {
    if (packed_) {
      const std::uint64_t* w = packed_rows_.data() + row * stride();
      for (std::size_t i = 0; i < coeff_words_; ++i) {
        std::uint64_t word = w[i];
        if (i == pivot_col / 64) word &= ~(1ULL << (pivot_col % 64));
        if (i == coeff_words_ - 1 && width_ % 64 != 0) word &= (1ULL << (width_ % 64)) - 1;
        if (word != 0) return false;
      }
      return true;
    }
    const symbol_t* r = dense_rows_.data() + row * (width_ + rhs_width_);
    for (std::size_t c = 0; c < width_; ++c)
      if (c != pivot_col && r[c] != 0) return false;
    return true;
  }

  const Field* field_;
  std::size_t width_;
  std::size_t rhs_width_;
  bool packed_;
  std::size_t coeff_words_;
  std::size_t rhs_words_;
  std::vector<std::size_t> pivot_of_col_;
  std::vector<std::size_t> pivot_cols_;  // insertion order
  std::vector<std::uint64_t> packed_rows_;
  std::vector<symbol_t> dense_rows_;
  std::vector<std::uint64_t> scratch_;
  std::vector<symbol_t> dense_scratch_;
};

/// Solve a * x = b for square a (rows of length m) and rhs rows of length l.
/// Returns std::nullopt when a is singular.
inline std::optional<std::vector<SymbolVec>> matrix_solve(const Field& field,
                                                          const std::vector<SymbolVec>& a,
                                                          const std::vector<SymbolVec>& b) {
  const std::size_t m = a.size();
  if (m == 0 || b.size() != m) throw std::invalid_argument("matrix_solve requires square a and matching b");
  EliminationState state(field, m, b[0].size());
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != m || b[i].size() != b[0].size())
      throw std::invalid_argument("matrix_solve row length mismatch");
    state.insert(a[i], b[i]);
  }
  return state.solution();
}

}  // namespace gnc
