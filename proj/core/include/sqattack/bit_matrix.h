// Copyright 2026 The sqattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SQATTACK_BIT_MATRIX_H_
#define SQATTACK_BIT_MATRIX_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sqattack {

using Block64 = std::array<std::uint64_t, 64>;

// In-place transpose of a 64x64 bit block: afterwards bit c of word r holds
// what bit r of word c held before.
void Transpose64(Block64& block);

inline std::size_t WordsFor(std::size_t bits) { return (bits + 63) / 64; }

// Row-major bit-packed matrix. Bit c of row r lives in word c / 64 of the
// row at position c % 64. Padding bits past cols() are always zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }
  std::size_t bytes() const { return words_.size() * sizeof(std::uint64_t); }

  bool Get(std::size_t r, std::size_t c) const {
    return (words_[r * words_per_row_ + c / 64] >> (c % 64)) & 1;
  }
  void Set(std::size_t r, std::size_t c, bool value) {
    std::uint64_t& w = words_[r * words_per_row_ + c / 64];
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    w = value ? (w | bit) : (w & ~bit);
  }

  std::span<const std::uint64_t> Row(std::size_t r) const {
    return {words_.data() + r * words_per_row_, words_per_row_};
  }
  std::span<std::uint64_t> MutableRow(std::size_t r) {
    return {words_.data() + r * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }

  // Clears the padding bits of every row.
  void ClearPadding();

  // Number of ones per column over the listed rows (repeats counted).
  std::vector<std::uint32_t> ColumnCounts(
      std::span<const std::size_t> rows) const;
  std::vector<std::uint32_t> ColumnCounts() const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace sqattack

#endif  // SQATTACK_BIT_MATRIX_H_
