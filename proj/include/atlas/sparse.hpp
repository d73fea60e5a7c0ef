#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace atlas {

/// Compressed sparse row matrix. Column indices within a row are strictly
/// increasing and explicit zeros are never stored.
template <class T>
class CsrMatrix {
 public:
  struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    T value;
  };

  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Duplicate (row, col) entries are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    CsrMatrix m(rows, cols);
    for (std::size_t i = 0; i < triplets.size();) {
      const auto& t = triplets[i];
      if (t.row >= rows || t.col >= cols) throw std::out_of_range("triplet outside matrix");
      T sum{};
      std::size_t j = i;
      for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j) {
        sum += triplets[j].value;
      }
      if (sum != T{}) {
        m.col_idx_.push_back(t.col);
        m.values_.push_back(sum);
        ++m.row_ptr_[t.row + 1];
      }
      i = j;
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
  }

  /// Append the next row. Columns must be strictly increasing.
  void push_row(std::span<const std::uint32_t> cols, std::span<const T> values) {
    if (cols.size() != values.size()) throw std::invalid_argument("row size mismatch");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] >= cols_ || (i > 0 && cols[i] <= cols[i - 1])) {
        throw std::invalid_argument("row columns must be increasing and in range");
      }
      if (values[i] == T{}) continue;
      col_idx_.push_back(cols[i]);
      values_.push_back(values[i]);
    }
    row_ptr_.push_back(col_idx_.size());
    ++rows_;
  }

  static CsrMatrix empty_rows(std::size_t cols) {
    CsrMatrix m;
    m.cols_ = cols;
    m.row_ptr_.assign(1, 0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const T> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  T at(std::size_t r, std::size_t c) const {
    auto cs = row_cols(r);
    auto it = std::lower_bound(cs.begin(), cs.end(), c);
    if (it == cs.end() || *it != c) return T{};
    return row_values(r)[static_cast<std::size_t>(it - cs.begin())];
  }

  T row_sum(std::size_t r) const {
    auto vs = row_values(r);
    return std::accumulate(vs.begin(), vs.end(), T{});
  }

  std::vector<T> column_sums() const {
    std::vector<T> sums(cols_, T{});
    for (std::size_t i = 0; i < col_idx_.size(); ++i) sums[col_idx_[i]] += values_[i];
    return sums;
  }

  /// Number of stored (nonzero) entries per column.
  std::vector<std::uint32_t> column_nnz() const {
    std::vector<std::uint32_t> counts(cols_, 0);
    for (auto c : col_idx_) ++counts[c];
    return counts;
  }

  bool operator==(const CsrMatrix&) const = default;

 private:
  template <class A, class B>
  friend CsrMatrix<B> multiply(const CsrMatrix<A>& lhs, const CsrMatrix<B>& rhs);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<T> values_;
};

/// Sparse product lhs * rhs (row-wise Gustavson with a dense accumulator).
/// The result keeps rhs's value type.
template <class A, class B>
CsrMatrix<B> multiply(const CsrMatrix<A>& lhs, const CsrMatrix<B>& rhs) {
  if (lhs.cols() != rhs.rows()) throw std::invalid_argument("matrix dimension mismatch");
  CsrMatrix<B> out(lhs.rows(), rhs.cols());
  out.row_ptr_.assign(1, 0);
  out.rows_ = 0;

  std::vector<B> acc(rhs.cols(), B{});
  std::vector<char> touched(rhs.cols(), 0);
  std::vector<std::uint32_t> pattern;
  for (std::size_t r = 0; r < lhs.rows(); ++r) {
    pattern.clear();
    auto lc = lhs.row_cols(r);
    auto lv = lhs.row_values(r);
    for (std::size_t k = 0; k < lc.size(); ++k) {
      const B scale = static_cast<B>(lv[k]);
      auto rc = rhs.row_cols(lc[k]);
      auto rv = rhs.row_values(lc[k]);
      for (std::size_t j = 0; j < rc.size(); ++j) {
        if (!touched[rc[j]]) {
          touched[rc[j]] = 1;
          pattern.push_back(rc[j]);
        }
        acc[rc[j]] += scale * rv[j];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (auto c : pattern) {
      if (acc[c] != B{}) {
        out.col_idx_.push_back(c);
        out.values_.push_back(acc[c]);
      }
      acc[c] = B{};
      touched[c] = 0;
    }
    out.row_ptr_.push_back(out.col_idx_.size());
    ++out.rows_;
  }
  return out;
}

/// Sparse times dense: lhs (r x c) times a row-major c x width block.
template <class A, class B>
std::vector<B> multiply_dense(const CsrMatrix<A>& lhs, std::span<const B> dense, std::size_t width) {
  if (dense.size() != lhs.cols() * width) throw std::invalid_argument("matrix dimension mismatch");
  std::vector<B> out(lhs.rows() * width, B{});
  for (std::size_t r = 0; r < lhs.rows(); ++r) {
    auto lc = lhs.row_cols(r);
    auto lv = lhs.row_values(r);
    for (std::size_t k = 0; k < lc.size(); ++k) {
      const B scale = static_cast<B>(lv[k]);
      for (std::size_t w = 0; w < width; ++w) out[r * width + w] += scale * dense[lc[k] * width + w];
    }
  }
  return out;
}

}  // namespace atlas
