#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "formalis/error.hpp"
#include "formalis/number_theory.hpp"

namespace formalis {

using Integer = boost::multiprecision::cpp_int;
using IntVector = std::vector<Integer>;

// Coefficient ring: the integers, or the prime field F_l read off integer data by reduction.
struct Coefficients {
  std::optional<std::uint64_t> prime;

  static Coefficients integers() { return {}; }
  static Coefficients field(std::uint64_t l) {
    require_prime(l);
    return Coefficients{l};
  }

  bool is_field() const { return prime.has_value(); }

  Integer reduce(const Integer& x) const {
    if (!prime) return x;
    Integer l = *prime;
    Integer r = x % l;
    if (r < 0) r += l;
    return r;
  }

  bool is_zero(const Integer& x) const { return prime ? (x % Integer(*prime)) == 0 : x == 0; }
  bool is_zero(const IntVector& v) const {
    return std::all_of(v.begin(), v.end(), [this](const Integer& x) { return is_zero(x); });
  }

  void reduce_in_place(IntVector& v) const {
    if (!prime) return;
    for (auto& x : v) x = reduce(x);
  }

  bool equal(const IntVector& a, const IntVector& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!is_zero(Integer(a[k] - b[k]))) return false;
    return true;
  }

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) throw InvalidInput("matrix entry count does not match its shape");
  }
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    for (const auto& row : rows) {
      if (row.size() != cols_) throw InvalidInput("ragged matrix literal");
      for (long long x : row) data_.emplace_back(x);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t k = 0; k < n; ++k) m(k, k) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw InvalidInput("ragged matrix rows");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  static IntMatrix from_columns(const std::vector<IntVector>& columns, std::size_t rows) {
    IntMatrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].size() != rows) throw InvalidInput("ragged matrix columns");
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<Integer>& entries() const { return data_; }

  IntVector row(std::size_t r) const { return IntVector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_); }
  IntVector column(std::size_t c) const {
    IntVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  IntMatrix reduced(const Coefficients& coeff) const {
    IntMatrix m = *this;
    for (auto& x : m.data_) x = coeff.reduce(x);
    return m;
  }

  IntVector apply(const IntVector& v) const {
    if (v.size() != cols_) throw InvalidInput("matrix-vector shape mismatch");
    IntVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      Integer acc = 0;
      for (std::size_t c = 0; c < cols_; ++c)
        if ((*this)(r, c) != 0 && v[c] != 0) acc += (*this)(r, c) * v[c];
      out[r] = acc;
    }
    return out;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("matrix product shape mismatch");
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& x = a(r, k);
        if (x == 0) continue;
        for (std::size_t c = 0; c < b.cols_; ++c)
          if (b(k, c) != 0) out(r, c) += x * b(k, c);
      }
    return out;
  }

  friend IntMatrix operator+(IntMatrix a, const IntMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("matrix sum shape mismatch");
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }

  friend IntMatrix operator-(IntMatrix a, const IntMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("matrix difference shape mismatch");
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }

  friend IntMatrix operator-(IntMatrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  // Elementary operations; used by the reductions below.
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }
  // row[target] += factor * row[source]
  void add_row(std::size_t target, std::size_t source, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t c = 0; c < cols_; ++c)
      if ((*this)(source, c) != 0) (*this)(target, c) += factor * (*this)(source, c);
  }
  // col[target] += factor * col[source]
  void add_col(std::size_t target, std::size_t source, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t r = 0; r < rows_; ++r)
      if ((*this)(r, source) != 0) (*this)(r, target) += factor * (*this)(r, source);
  }
  void negate_row(std::size_t r) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
  }
  void negate_col(std::size_t c) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
  }

  // Stacks b below a.
  static IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.cols_ && !a.empty() && !b.empty()) throw InvalidInput("vstack column mismatch");
    std::size_t cols = std::max(a.cols_, b.cols_);
    IntMatrix out(a.rows_ + b.rows_, cols);
    for (std::size_t r = 0; r < a.rows_; ++r)
      for (std::size_t c = 0; c < a.cols_; ++c) out(r, c) = a(r, c);
    for (std::size_t r = 0; r < b.rows_; ++r)
      for (std::size_t c = 0; c < b.cols_; ++c) out(a.rows_ + r, c) = b(r, c);
    return out;
  }

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << '[';
    for (std::size_t r = 0; r < m.rows_; ++r) {
      os << (r ? ", [" : "[");
      for (std::size_t c = 0; c < m.cols_; ++c) os << (c ? ", " : "") << m(r, c);
      os << ']';
    }
    return os << ']';
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

// left * original * right is the rows x cols matrix with `diagonal` on its leading diagonal.
struct SmithForm {
  std::vector<Integer> diagonal;
  IntMatrix left;
  IntMatrix right;
  IntMatrix left_inverse;
  IntMatrix right_inverse;

  std::size_t rank() const { return diagonal.size(); }
};

namespace detail {

inline Integer abs_value(const Integer& x) { return x < 0 ? Integer(-x) : x; }

// Smallest nonzero |a(i,j)| over i,j >= t; ties broken by lowest row-major index.
inline std::optional<std::pair<std::size_t, std::size_t>> smallest_entry(const IntMatrix& a, std::size_t t) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  Integer best_value;
  for (std::size_t i = t; i < a.rows(); ++i)
    for (std::size_t j = t; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      Integer v = abs_value(a(i, j));
      if (!best || v < best_value) {
        best = {i, j};
        best_value = v;
      }
    }
  return best;
}

}  // namespace detail

inline SmithForm smith_normal_form(const IntMatrix& m) {
  IntMatrix a = m;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  IntMatrix u = IntMatrix::identity(rows), u_inv = IntMatrix::identity(rows);
  IntMatrix v = IntMatrix::identity(cols), v_inv = IntMatrix::identity(cols);

  auto swap_rows = [&](std::size_t x, std::size_t y) {
    a.swap_rows(x, y);
    u.swap_rows(x, y);
    u_inv.swap_cols(x, y);
  };
  auto swap_cols = [&](std::size_t x, std::size_t y) {
    a.swap_cols(x, y);
    v.swap_cols(x, y);
    v_inv.swap_rows(x, y);
  };
  // row[target] += f * row[source]
  auto add_row = [&](std::size_t target, std::size_t source, const Integer& f) {
    a.add_row(target, source, f);
    u.add_row(target, source, f);
    u_inv.add_col(source, target, -f);
  };
  auto add_col = [&](std::size_t target, std::size_t source, const Integer& f) {
    a.add_col(target, source, f);
    v.add_col(target, source, f);
    v_inv.add_row(source, target, -f);
  };

  std::vector<Integer> diagonal;
  const std::size_t limit = std::min(rows, cols);
  for (std::size_t t = 0; t < limit; ++t) {
    auto pivot = detail::smallest_entry(a, t);
    if (!pivot) break;
    for (;;) {
      swap_rows(t, pivot->first);
      swap_cols(t, pivot->second);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        add_row(i, t, Integer(-(a(i, t) / a(t, t))));
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        add_col(j, t, Integer(-(a(t, j) / a(t, t))));
        if (a(t, j) != 0) clean = false;
      }
      if (clean) {
        // Divisibility: fold the first offending row into the pivot row.
        std::optional<std::size_t> offending;
        for (std::size_t i = t + 1; i < rows && !offending; ++i)
          for (std::size_t j = t + 1; j < cols; ++j)
            if (a(i, j) % a(t, t) != 0) {
              offending = i;
              break;
            }
        if (!offending) break;
        add_row(t, *offending, Integer(1));
      }
      pivot = detail::smallest_entry(a, t);
    }
    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
      u_inv.negate_col(t);
    }
    diagonal.push_back(a(t, t));
  }
  return SmithForm{std::move(diagonal), std::move(u), std::move(v), std::move(u_inv), std::move(v_inv)};
}

// The rows x cols matrix carrying `diagonal` on its leading diagonal.
inline IntMatrix diagonal_matrix(const std::vector<Integer>& diagonal, std::size_t rows, std::size_t cols) {
  IntMatrix d(rows, cols);
  for (std::size_t k = 0; k < diagonal.size(); ++k) d(k, k) = diagonal[k];
  return d;
}

inline std::size_t rank(const IntMatrix& m, const Coefficients& coeff = {}) {
  const auto snf = smith_normal_form(m);
  if (!coeff.is_field()) return snf.rank();
  return static_cast<std::size_t>(std::count_if(snf.diagonal.begin(), snf.diagonal.end(),
                                                [&](const Integer& d) { return !coeff.is_zero(d); }));
}

// Fraction-free (Bareiss) determinant.
inline Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer sign = 1, previous = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      a.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / previous;
    previous = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

// Row echelon normal form of a list of row vectors: Hermite normal form over Z, reduced
// row echelon form over F_l. Zero rows are dropped.
inline std::vector<IntVector> echelon_rows(std::vector<IntVector> rows, const Coefficients& coeff = {}) {
  if (rows.empty()) return rows;
  const std::size_t width = rows.front().size();
  for (auto& r : rows) coeff.reduce_in_place(r);
  std::size_t top = 0;
  auto axpy = [&](IntVector& target, const IntVector& source, const Integer& f) {
    for (std::size_t c = 0; c < width; ++c) target[c] = coeff.reduce(Integer(target[c] + f * source[c]));
  };
  for (std::size_t col = 0; col < width && top < rows.size(); ++col) {
    if (coeff.is_field()) {
      std::size_t p = top;
      while (p < rows.size() && coeff.is_zero(rows[p][col])) ++p;
      if (p == rows.size()) continue;
      std::swap(rows[top], rows[p]);
      const std::uint64_t l = *coeff.prime;
      Integer inv = inverse_mod(static_cast<std::uint64_t>(rows[top][col]), l);
      for (auto& x : rows[top]) x = coeff.reduce(Integer(x * inv));
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (r != top && !coeff.is_zero(rows[r][col])) axpy(rows[r], rows[top], Integer(-rows[r][col]));
      ++top;
      continue;
    }
    // Euclid down the column until a single nonzero entry remains at `top`.
    for (;;) {
      std::optional<std::size_t> best;
      for (std::size_t r = top; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (!best || detail::abs_value(rows[r][col]) < detail::abs_value(rows[*best][col])))
          best = r;
      if (!best) break;
      std::swap(rows[top], rows[*best]);
      bool done = true;
      for (std::size_t r = top + 1; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        axpy(rows[r], rows[top], Integer(-(rows[r][col] / rows[top][col])));
        if (rows[r][col] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[top][col] == 0) continue;
    if (rows[top][col] < 0)
      for (auto& x : rows[top]) x = -x;
    const Integer& pivot = rows[top][col];
    for (std::size_t r = 0; r < top; ++r) {
      Integer q = rows[r][col] / pivot;
      if (rows[r][col] - q * pivot < 0) q -= 1;
      axpy(rows[r], rows[top], Integer(-q));
    }
    ++top;
  }
  rows.resize(top);
  return rows;
}

// Saturated basis of {v : m v = 0} (over F_l: of the kernel mod l), in echelon normal form.
inline std::vector<IntVector> kernel_basis(const IntMatrix& m, const Coefficients& coeff = {}) {
  const auto snf = smith_normal_form(m);
  std::vector<IntVector> basis;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    bool in_kernel = j >= snf.rank() || (coeff.is_field() && coeff.is_zero(snf.diagonal[j]));
    if (in_kernel) basis.push_back(snf.right.column(j));
  }
  return echelon_rows(std::move(basis), coeff);
}

inline bool l_local_torsion(const IntMatrix& m, std::uint64_t l) {
  require_prime(l);
  const auto snf = smith_normal_form(m);
  const Integer prime = l;
  return std::any_of(snf.diagonal.begin(), snf.diagonal.end(),
                     [&](const Integer& d) { return d > 1 && d % prime == 0; });
}

// Solves m x = b over the coefficient ring via a cached Smith form.
class LinearSolver {
 public:
  LinearSolver() = default;
  LinearSolver(const IntMatrix& m, Coefficients coeff)
      : rows_(m.rows()), cols_(m.cols()), coeff_(coeff), snf_(smith_normal_form(m)) {}

  std::optional<IntVector> solve(const IntVector& b) const {
    if (b.size() != rows_) throw InvalidInput("solve: right-hand side has wrong length");
    IntVector y = snf_.left.apply(b);
    IntVector x(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i < snf_.rank()) {
        const Integer& d = snf_.diagonal[i];
        if (coeff_.is_field()) {
          if (coeff_.is_zero(d)) {
            if (!coeff_.is_zero(y[i])) return std::nullopt;
          } else {
            const std::uint64_t l = *coeff_.prime;
            x[i] = coeff_.reduce(Integer(coeff_.reduce(y[i]) * inverse_mod(static_cast<std::uint64_t>(coeff_.reduce(d)), l)));
          }
        } else {
          if (y[i] % d != 0) return std::nullopt;
          x[i] = y[i] / d;
        }
      } else if (!coeff_.is_zero(y[i])) {
        return std::nullopt;
      }
    }
    IntVector out = snf_.right.apply(x);
    coeff_.reduce_in_place(out);
    return out;
  }

  std::size_t rank() const {
    return static_cast<std::size_t>(std::count_if(snf_.diagonal.begin(), snf_.diagonal.end(),
                                                  [&](const Integer& d) { return !coeff_.is_zero(d); }));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Coefficients coeff_;
  SmithForm snf_;
};

inline std::string to_string(const Integer& x) { return x.str(); }

}  // namespace formalis
