// Copyright 2026 The clonebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "clonebound/error.hpp"

namespace clonebound {

using Scalar = std::complex<double>;

/// Dense row-major complex matrix. Small sizes only (n <= ~256).
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Scalar{0.0, 0.0}) {}
  Mat(std::size_t rows, std::size_t cols, std::vector<Scalar> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "matrix entries length does not match rows*cols");
    }
  }

  static Mat zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat diagonal(std::span<const double> d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Mat from_rows(std::initializer_list<std::initializer_list<Scalar>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Mat m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) {
        throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
      }
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  /// Matrix whose columns are the given vectors (all of equal length).
  static Mat from_columns(const std::vector<std::vector<Scalar>>& columns) {
    if (columns.empty()) return {};
    Mat m(columns.front().size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != m.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "columns of unequal length");
      }
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<Scalar> entries() noexcept { return data_; }
  std::span<const Scalar> entries() const noexcept { return data_; }

  std::vector<Scalar> column(std::size_t j) const {
    std::vector<Scalar> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Mat adjoint() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
    return t;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Copy padded with zero rows (or truncated) to `rows` rows.
  Mat with_rows(std::size_t rows) const {
    Mat out(rows, cols_);
    for (std::size_t i = 0; i < std::min(rows, rows_); ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
    return out;
  }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

inline Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cannot multiply " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " by " + std::to_string(b.rows()) +
                    "x" + std::to_string(b.cols()));
  }
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Scalar aik = a(i, k);
      if (aik == Scalar{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Mat operator*(Scalar s, const Mat& a) {
  Mat c = a;
  for (auto& v : c.entries()) v *= s;
  return c;
}

inline Mat operator+(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix sum of unequal shapes");
  }
  Mat c = a;
  auto ce = c.entries();
  auto be = b.entries();
  for (std::size_t k = 0; k < ce.size(); ++k) ce[k] += be[k];
  return c;
}

inline Mat operator-(const Mat& a, const Mat& b) { return a + Scalar{-1.0} * b; }

inline double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (const auto& v : a.entries()) s += std::norm(v);
  return std::sqrt(s);
}

inline Scalar trace(const Mat& a) {
  Scalar t{};
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

inline bool all_finite(const Mat& a) {
  for (const auto& v : a.entries())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

/// ||a - a^dagger||_F.
inline double hermitian_defect(const Mat& a) {
  if (!a.is_square()) return INFINITY;
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      s += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(s);
}

/// ||u^dagger u - I||_F.
inline double unitarity_defect(const Mat& u) {
  return frobenius_norm(u.adjoint() * u - Mat::identity(u.cols()));
}

/// Gram matrix G_ij = <col_i|col_j> of the columns of `a`, i.e. a^dagger a.
inline Mat column_gram(const Mat& a) { return a.adjoint() * a; }

inline Scalar inner(std::span<const Scalar> x, std::span<const Scalar> y) {
  Scalar s{};
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s;
}

}  // namespace clonebound
