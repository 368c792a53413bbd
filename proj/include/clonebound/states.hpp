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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonebound/error.hpp"
#include "clonebound/matrix.hpp"
#include "clonebound/numerics.hpp"
#include "clonebound/random.hpp"

namespace clonebound {

using StateVector = std::vector<Scalar>;

/// A finite family of pure states |psi_i> with prior probabilities eta_i.
///
/// The family is known either through explicit vectors or through its Gram
/// matrix gram_ij = <psi_i|psi_j> alone. Everything the bound pipeline needs
/// is a function of the Gram matrix; only the tensor-power check needs the
/// vectors.
class PureStateFamily {
 public:
  std::size_t size() const noexcept { return priors_.size(); }
  const Mat& gram() const noexcept { return gram_; }
  const std::vector<double>& priors() const noexcept { return priors_; }
  bool has_vectors() const noexcept { return vectors_.has_value(); }
  const std::optional<std::vector<StateVector>>& vectors() const noexcept {
    return vectors_;
  }
  /// Hilbert-space dimension; zero for Gram-only families.
  std::size_t dimension() const noexcept {
    return vectors_ ? vectors_->front().size() : 0;
  }

  /// Same states, different priors (validated).
  PureStateFamily with_priors(std::vector<double> priors) const;

  friend PureStateFamily family_from_vectors(std::vector<StateVector> vectors,
                                             std::vector<double> priors);
  friend PureStateFamily family_from_gram(const Mat& gram, std::vector<double> priors);

 private:
  PureStateFamily() = default;

  Mat gram_;
  std::vector<double> priors_;
  std::optional<std::vector<StateVector>> vectors_;
};

/// Entrywise power X^(m)_ij = (gram_ij)^m: the Gram matrix of the m-fold
/// tensor powers |psi_i>^{(x) m}.
struct GramPower {
  int m = 1;
  Mat x;
};

namespace detail {

inline constexpr double kFamilyTol = 1e-12;
inline constexpr double kNormTol = 1e-10;

inline void validate_priors(const std::vector<double>& priors, std::size_t n) {
  if (priors.size() != n) {
    throw Error(ErrorKind::BadPriors, "expected " + std::to_string(n) +
                                          " priors, got " + std::to_string(priors.size()));
  }
  double sum = 0.0;
  for (double p : priors) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorKind::BadPriors, "priors must be finite and nonnegative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kFamilyTol) {
    throw Error(ErrorKind::BadPriors, "priors must sum to 1 (sum is " +
                                          std::to_string(sum) + ")");
  }
}

inline void validate_gram(const Mat& gram) {
  if (!gram.is_square() || gram.rows() == 0) {
    throw Error(ErrorKind::EmptyFamily, "gram matrix must be square and nonempty");
  }
  if (!all_finite(gram)) {
    throw Error(ErrorKind::InvalidInput, "gram matrix has non-finite entries");
  }
  if (hermitian_defect(gram) > kFamilyTol) {
    throw Error(ErrorKind::NotHermitian, "gram matrix must be Hermitian");
  }
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    if (std::abs(gram(i, i) - 1.0) > kFamilyTol) {
      throw Error(ErrorKind::NotNormalized, "gram diagonal must be 1 (states normalized)");
    }
  }
  const auto eig = numerics::hermitian_eig(gram);
  if (eig.eigenvalues.front() < -numerics::kDefaultRankTol * eig.eigenvalues.back()) {
    throw Error(ErrorKind::NotPSD, "gram matrix must be positive semidefinite");
  }
}

}  // namespace detail

inline PureStateFamily family_from_gram(const Mat& gram, std::vector<double> priors) {
  detail::validate_gram(gram);
  detail::validate_priors(priors, gram.rows());
  PureStateFamily f;
  f.gram_ = gram;
  for (std::size_t i = 0; i < gram.rows(); ++i) f.gram_(i, i) = 1.0;
  f.priors_ = std::move(priors);
  return f;
}

/// Build a family from explicit state vectors. Vectors must be normalized to
/// within 1e-10; they are rescaled to unit norm exactly before the Gram
/// matrix is formed.
inline PureStateFamily family_from_vectors(std::vector<StateVector> vectors,
                                           std::vector<double> priors) {
  if (vectors.empty() || vectors.front().empty()) {
    throw Error(ErrorKind::EmptyFamily, "family needs at least one nonempty vector");
  }
  const std::size_t d = vectors.front().size();
  for (auto& v : vectors) {
    if (v.size() != d) {
      throw Error(ErrorKind::DimensionMismatch, "state vectors must have equal length");
    }
    double norm2 = 0.0;
    for (const auto& x : v) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        throw Error(ErrorKind::InvalidInput, "state vector has non-finite entries");
      }
      norm2 += std::norm(x);
    }
    const double norm = std::sqrt(norm2);
    if (std::abs(norm - 1.0) > detail::kNormTol) {
      throw Error(ErrorKind::NotNormalized,
                  "state vectors must have unit norm (found " + std::to_string(norm) + ")");
    }
    for (auto& x : v) x /= norm;
  }
  detail::validate_priors(priors, vectors.size());

  const std::size_t n = vectors.size();
  Mat gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      gram(i, j) = inner(vectors[i], vectors[j]);
      gram(j, i) = std::conj(gram(i, j));
    }
  }
  PureStateFamily f;
  f.gram_ = std::move(gram);
  f.priors_ = std::move(priors);
  f.vectors_ = std::move(vectors);
  return f;
}

inline PureStateFamily PureStateFamily::with_priors(std::vector<double> priors) const {
  detail::validate_priors(priors, size());
  PureStateFamily f = *this;
  f.priors_ = std::move(priors);
  return f;
}

inline std::vector<double> uniform_priors(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

/// Two states with real overlap s, in Gram form.
inline PureStateFamily two_state_family(double s, std::vector<double> priors = {0.5, 0.5}) {
  return family_from_gram(Mat::from_rows({{1.0, s}, {s, 1.0}}), std::move(priors));
}

inline GramPower gram_power(const PureStateFamily& family, int m) {
  if (m < 1) {
    throw Error(ErrorKind::BadExponent, "tensor power must be a positive integer");
  }
  const Mat& g = family.gram();
  GramPower out{m, g};
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      Scalar acc = g(i, j);
      for (int k = 1; k < m; ++k) acc *= g(i, j);
      out.x(i, j) = acc;
    }
  }
  return out;
}

/// n random unit vectors in C^d (normalized complex Gaussians), uniform priors.
inline PureStateFamily random_family(std::uint64_t seed, std::size_t n, std::size_t d) {
  if (n < 1 || d < 1) {
    throw Error(ErrorKind::InvalidInput, "random_family needs n >= 1 and d >= 1");
  }
  Rng rng(seed);
  std::vector<StateVector> vectors(n, StateVector(d));
  for (auto& v : vectors) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& x : v) {
        x = rng.complex_normal();
        norm2 += std::norm(x);
      }
    } while (norm2 == 0.0);
    const double norm = std::sqrt(norm2);
    for (auto& x : v) x /= norm;
  }
  return family_from_vectors(std::move(vectors), uniform_priors(n));
}

namespace detail {

inline StateVector kron(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

}  // namespace detail

inline constexpr std::size_t kDefaultMaxTensorDim = 4096;

/// Builds |psi_i>^{(x) m} (x) |blank> explicitly and checks that their inner
/// products reproduce gram_power(family, m). The blank register is the first
/// canonical basis vector of C^d. Returns the largest absolute deviation.
inline double tensor_power_check(const PureStateFamily& family, int m,
                                 std::size_t max_dim = kDefaultMaxTensorDim) {
  if (!family.has_vectors()) {
    throw Error(ErrorKind::NoVectors, "vectors required for the tensor-power check");
  }
  if (m < 1) {
    throw Error(ErrorKind::BadExponent, "tensor power must be a positive integer");
  }
  const std::size_t d = family.dimension();
  std::size_t dim = 1;
  for (int k = 0; k < m; ++k) {
    if (dim > max_dim / d) {
      throw Error(ErrorKind::DimensionTooLarge,
                  "d^M exceeds the tensor dimension cap of " + std::to_string(max_dim));
    }
    dim *= d;
  }

  StateVector blank(d, Scalar{});
  blank[0] = 1.0;
  std::vector<StateVector> powers;
  powers.reserve(family.size());
  for (const auto& v : *family.vectors()) {
    StateVector p = v;
    for (int k = 1; k < m; ++k) p = detail::kron(p, v);
    powers.push_back(detail::kron(p, blank));
  }
  const GramPower expected = gram_power(family, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i)
    for (std::size_t j = 0; j < powers.size(); ++j)
      worst = std::max(worst, std::abs(inner(powers[i], powers[j]) - expected.x(i, j)));
  return worst;
}

}  // namespace clonebound
