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

// Dense Hermitian eigensolver, SVD, PSD square root, Gram factorization and
// the trace-norm-maximizing polar unitary. All kernels are Jacobi based and
// intended for the small matrices (n <= ~12, hard limit ~256) of this library.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "clonebound/error.hpp"
#include "clonebound/matrix.hpp"

namespace clonebound::numerics {

inline constexpr double kDefaultHermitianTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-12;
inline constexpr int kMaxSweeps = 100;

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  Mat eigenvectors;                 // columns, orthonormal
};

struct SvdResult {
  Mat u;                      // rows x rows, unitary
  std::vector<double> sigma;  // min(rows, cols) values, descending
  Mat w;                      // cols x cols, unitary
};

struct PolarResult {
  Mat v_opt;  // maximizes |tr(v o)|
  double trace_norm = 0.0;
  std::vector<double> singular_values;  // descending
};

struct Factor {
  Mat f;  // rank x n, with f^dagger f = x
  std::size_t rank = 0;
};

namespace detail {

// Unitary 2x2 rotation J = [[c, s e], [-s conj(e), c]] acting on indices
// (p, q) that annihilates the (p, q) entry of a Hermitian block with
// diagonal (app, aqq) and off-diagonal apq.
struct Rotation {
  double c = 1.0;
  double s = 0.0;
  Scalar e{1.0, 0.0};
};

inline Rotation jacobi_rotation(double app, double aqq, Scalar apq) {
  const double mag = std::abs(apq);
  Rotation r;
  if (mag == 0.0) return r;
  r.e = apq / mag;
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(1.0 + theta * theta));
  r.c = 1.0 / std::sqrt(1.0 + t * t);
  r.s = t * r.c;
  return r;
}

// m <- m J on columns p, q.
inline void rotate_columns(Mat& m, std::size_t p, std::size_t q, const Rotation& r) {
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const Scalar mp = m(k, p);
    const Scalar mq = m(k, q);
    m(k, p) = r.c * mp - r.s * std::conj(r.e) * mq;
    m(k, q) = r.s * r.e * mp + r.c * mq;
  }
}

// m <- J^dagger m on rows p, q.
inline void rotate_rows(Mat& m, std::size_t p, std::size_t q, const Rotation& r) {
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const Scalar mp = m(p, k);
    const Scalar mq = m(q, k);
    m(p, k) = r.c * mp - r.s * r.e * mq;
    m(q, k) = r.s * std::conj(r.e) * mp + r.c * mq;
  }
}

inline void require_finite(const Mat& m, const char* what) {
  if (!all_finite(m)) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite entry");
  }
}

// Orthonormal completion: fills the columns of `u` flagged in `missing` by
// Gram-Schmidt of canonical basis vectors against all other columns.
inline void complete_columns(Mat& u, std::vector<bool> missing) {
  const std::size_t m = u.rows();
  std::size_t candidate = 0;
  for (std::size_t j = 0; j < u.cols(); ++j) {
    if (!missing[j]) continue;
    bool placed = false;
    while (!placed && candidate < m) {
      std::vector<Scalar> v(m, Scalar{});
      v[candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < u.cols(); ++k) {
          if (missing[k]) continue;
          Scalar proj{};
          for (std::size_t i = 0; i < m; ++i) proj += std::conj(u(i, k)) * v[i];
          for (std::size_t i = 0; i < m; ++i) v[i] -= proj * u(i, k);
        }
      }
      double norm = 0.0;
      for (const auto& x : v) norm += std::norm(x);
      norm = std::sqrt(norm);
      if (norm > 0.5) {
        for (std::size_t i = 0; i < m; ++i) u(i, j) = v[i] / norm;
        missing[j] = false;
        placed = true;
      }
    }
    if (!placed) {
      throw Error(ErrorKind::NumericalFailure, "orthonormal completion failed");
    }
  }
}

// One-sided (Hestenes) Jacobi on the columns of y, accumulating into w.
inline void orthogonalize_columns(Mat& y, Mat& w) {
  const std::size_t n = y.cols();
  const double tol = 1e-15 * static_cast<double>(std::max<std::size_t>(n, 1));
  // Pairs below this scale are rounding noise of a rank-deficient input.
  const double fro = frobenius_norm(y);
  const double floor = 1e-30 * fro * fro;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        Scalar gamma{};
        for (std::size_t k = 0; k < y.rows(); ++k) {
          alpha += std::norm(y(k, p));
          beta += std::norm(y(k, q));
          gamma += std::conj(y(k, p)) * y(k, q);
        }
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta) ||
            std::abs(gamma) <= floor) {
          continue;
        }
        rotated = true;
        const Rotation r = jacobi_rotation(alpha, beta, gamma);
        rotate_columns(y, p, q, r);
        rotate_columns(w, p, q, r);
      }
    }
    if (!rotated) return;
  }
  throw Error(ErrorKind::NoConvergence, "one-sided Jacobi SVD did not converge");
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix. Eigenvalues are
/// returned ascending with matching eigenvector columns.
inline EigResult hermitian_eig(const Mat& h, double tol = kDefaultHermitianTol) {
  if (!h.is_square()) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eig: matrix is not square");
  }
  detail::require_finite(h, "hermitian_eig");
  const double norm = frobenius_norm(h);
  if (hermitian_defect(h) > tol * norm) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eig: matrix is not Hermitian");
  }
  const std::size_t n = h.rows();
  Mat a = Scalar{0.5} * (h + h.adjoint());
  Mat q = Mat::identity(n);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (off_diagonal() <= 1e-14 * norm) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const Scalar apr = a(p, r);
        if (std::abs(apr) == 0.0) continue;
        const auto rot = detail::jacobi_rotation(a(p, p).real(), a(r, r).real(), apr);
        detail::rotate_columns(a, p, r, rot);
        detail::rotate_rows(a, p, r, rot);
        a(p, r) = a(r, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(r, r) = a(r, r).real();
        detail::rotate_columns(q, p, r, rot);
      }
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence, "hermitian_eig: sweep cap exceeded");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  EigResult out{std::vector<double>(n), Mat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = q(i, order[k]);
  }
  return out;
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues down to
/// -tol * (largest eigenvalue) are clamped to zero.
inline Mat matrix_sqrt_psd(const Mat& h, double tol = kDefaultRankTol) {
  const EigResult eig = hermitian_eig(h);
  const std::size_t n = h.rows();
  if (n == 0) return {};
  const double top = std::max(eig.eigenvalues.back(), 0.0);
  if (eig.eigenvalues.front() < -tol * top ||
      (top == 0.0 && eig.eigenvalues.front() < 0.0)) {
    throw Error(ErrorKind::NotPSD, "matrix_sqrt_psd: matrix has a negative eigenvalue");
  }
  Mat s(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double root = std::sqrt(std::max(eig.eigenvalues[k], 0.0));
    if (root == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar qi = root * eig.eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j) s(i, j) += qi * std::conj(eig.eigenvectors(j, k));
    }
  }
  return s;
}

/// Full SVD o = U diag(sigma) W^dagger.
///
/// The right factor is seeded from the eigenvectors of o^dagger o and then
/// refined by one-sided Jacobi on o W, which keeps small singular values
/// accurate. Singular values below 1e-14 * sigma_max are set to zero and the
/// matching left columns are completed by Gram-Schmidt.
inline SvdResult svd(const Mat& o) {
  detail::require_finite(o, "svd");
  if (o.rows() < o.cols()) {
    SvdResult t = svd(o.adjoint());
    return {std::move(t.w), std::move(t.sigma), std::move(t.u)};
  }
  const std::size_t m = o.rows();
  const std::size_t n = o.cols();
  if (n == 0) return {Mat::identity(m), {}, Mat{}};

  // Seed: eigenvectors of o^dagger o, largest first.
  const EigResult seed = hermitian_eig(column_gram(o), 1e-8);
  Mat w(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) w(i, k) = seed.eigenvectors(i, n - 1 - k);
  Mat y = o * w;
  detail::orthogonalize_columns(y, w);

  std::vector<double> norms(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(y(i, k));
    norms[k] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

  SvdResult out{Mat(m, m), std::vector<double>(n), Mat(n, n)};
  const double top = norms[order.front()];
  std::vector<bool> missing(m, true);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    for (std::size_t i = 0; i < n; ++i) out.w(i, k) = w(i, src);
    const double sigma = norms[src];
    if (top > 0.0 && sigma > 1e-14 * top) {
      out.sigma[k] = sigma;
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = y(i, src) / sigma;
      missing[k] = false;
    }
  }
  detail::complete_columns(out.u, std::move(missing));
  return out;
}

/// Unitary V maximizing |tr(V o)| for square o, with the free global phase
/// fixed so that tr(V o) is real and nonnegative: V = W U^dagger.
inline PolarResult polar_max_unitary(const Mat& o) {
  if (!o.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "polar_max_unitary: matrix is not square");
  }
  SvdResult s = svd(o);
  PolarResult out;
  out.v_opt = s.w * s.u.adjoint();
  out.trace_norm = std::accumulate(s.sigma.begin(), s.sigma.end(), 0.0);
  out.singular_values = std::move(s.sigma);
  return out;
}

inline double trace_norm(const Mat& o) {
  const SvdResult s = svd(o);
  return std::accumulate(s.sigma.begin(), s.sigma.end(), 0.0);
}

/// Factor a Hermitian PSD matrix as x = f^dagger f with f of shape rank x n.
/// Rows are ordered by decreasing eigenvalue; eigenvalues at or below
/// tol * (largest eigenvalue) are dropped.
inline Factor psd_factor(const Mat& x, double tol = kDefaultRankTol) {
  const EigResult eig = hermitian_eig(x);
  const std::size_t n = x.rows();
  if (n == 0) return {};
  const double top = std::max(eig.eigenvalues.back(), 0.0);
  if (eig.eigenvalues.front() < -tol * top ||
      (top == 0.0 && eig.eigenvalues.front() < 0.0)) {
    throw Error(ErrorKind::NotPSD, "psd_factor: matrix has a negative eigenvalue");
  }
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n; ++k)
    if (top > 0.0 && eig.eigenvalues[k] > tol * top) kept.push_back(k);
  // Decreasing eigenvalue; equal eigenvalues keep their eigensolver order.
  std::stable_sort(kept.begin(), kept.end(), [&](std::size_t i, std::size_t j) {
    return eig.eigenvalues[i] > eig.eigenvalues[j];
  });
  Factor out{Mat(kept.size(), n), kept.size()};
  for (std::size_t row = 0; row < kept.size(); ++row) {
    const std::size_t k = kept[row];
    const double root = std::sqrt(eig.eigenvalues[k]);
    for (std::size_t j = 0; j < n; ++j)
      out.f(row, j) = root * std::conj(eig.eigenvectors(j, k));
  }
  return out;
}

/// Moore-Penrose pseudo-inverse via the SVD.
inline Mat pseudo_inverse(const Mat& a, double rel_tol = 1e-12) {
  const SvdResult s = svd(a);
  Mat out(a.cols(), a.rows());
  const double top = s.sigma.empty() ? 0.0 : s.sigma.front();
  for (std::size_t k = 0; k < s.sigma.size(); ++k) {
    if (s.sigma[k] <= rel_tol * top || s.sigma[k] == 0.0) continue;
    const double inv = 1.0 / s.sigma[k];
    for (std::size_t i = 0; i < a.cols(); ++i)
      for (std::size_t j = 0; j < a.rows(); ++j)
        out(i, j) += inv * s.w(i, k) * std::conj(s.u(j, k));
  }
  return out;
}

}  // namespace clonebound::numerics
