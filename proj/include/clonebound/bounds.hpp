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

// Lower bounds on the optimal global fidelity of a deterministic
// state-dependent cloner and on the average correct-estimation probability.
//
// Coordinates: a family of n states is represented by a matrix whose
// columns are the states, written in an orthonormal basis of an
// r-dimensional space. The auxiliary fidelity for a unitary V and signs
// lambda is |tr(eta lambda B^dagger V A)|, maximized over V by the trace
// norm of O = A eta lambda B^dagger.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "clonebound/error.hpp"
#include "clonebound/matrix.hpp"
#include "clonebound/numerics.hpp"
#include "clonebound/states.hpp"

namespace clonebound {

/// Number of output copies; the estimation limit N -> infinity is a
/// separate variant rather than a large integer.
class CopyCount {
 public:
  static CopyCount finite(int n) { return CopyCount(n); }
  static CopyCount infinite() { return CopyCount(); }

  bool is_infinite() const noexcept { return infinite_; }
  int value() const {
    if (infinite_) throw Error(ErrorKind::InvalidTask, "copy count is infinite");
    return value_;
  }
  bool operator==(const CopyCount&) const = default;

 private:
  CopyCount() : infinite_(true) {}
  explicit CopyCount(int n) : value_(n) {}

  int value_ = 0;
  bool infinite_ = false;
};

struct CloneTask {
  PureStateFamily family;
  int m_copies = 1;
  CopyCount n_copies = CopyCount::finite(1);

  void validate() const {
    if (m_copies < 1) {
      throw Error(ErrorKind::InvalidTask, "M must be a positive integer");
    }
    if (!n_copies.is_infinite() && n_copies.value() < m_copies) {
      throw Error(ErrorKind::InvalidTask, "N must be at least M");
    }
  }
};

/// Sign vector lambda in {+1,-1}^n with lambda_1 = +1.
struct SignPattern {
  std::vector<int> signs;

  std::size_t size() const noexcept { return signs.size(); }
  bool operator==(const SignPattern&) const = default;
};

inline constexpr std::size_t kMaxLambdaStates = 16;

/// All 2^(n-1) sign patterns with a leading +1, in binary counting order on
/// entries 2..n (the last entry toggles fastest, '1' bits mean -1).
inline std::vector<SignPattern> enumerate_lambdas(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidTask, "need at least one state");
  if (n > kMaxLambdaStates) {
    throw Error(ErrorKind::InvalidTask, "sign enumeration is capped at " +
                                            std::to_string(kMaxLambdaStates) + " states");
  }
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::vector<SignPattern> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    SignPattern p{std::vector<int>(n, 1)};
    for (std::size_t i = 1; i < n; ++i)
      if ((k >> (n - 1 - i)) & 1U) p.signs[i] = -1;
    out.push_back(std::move(p));
  }
  return out;
}

/// Column coordinates of the inputs (a_tilde) and targets (b_mat) in a
/// shared r-dimensional space, plus priors. Both are r x n.
struct FidelityProblem {
  Mat a_tilde;
  Mat b_mat;
  std::vector<double> priors;
  std::size_t rank_inputs = 0;
  std::size_t rank_targets = 0;

  std::size_t dimension() const noexcept { return a_tilde.rows(); }
  std::size_t size() const noexcept { return priors.size(); }

  /// Same problem embedded in `extra` additional dimensions (zero rows).
  FidelityProblem embedded(std::size_t extra) const {
    FidelityProblem p = *this;
    p.a_tilde = a_tilde.with_rows(dimension() + extra);
    p.b_mat = b_mat.with_rows(dimension() + extra);
    return p;
  }
};

struct BoundOptions {
  double rank_tol = numerics::kDefaultRankTol;
  double feasibility_tol = 1e-9;
};

struct LambdaDiagnostic {
  SignPattern lambda;
  double trace_norm = 0.0;
  bool feasible = false;
};

struct BoundReport {
  double fprime_opt = 0.0;
  SignPattern lambda_chosen;
  bool feasible = false;
  double fidelity_lower_bound = 0.0;
  Mat v_opt;
  Mat a_tilde;
  Mat b_mat;
  std::vector<double> priors;
  /// coeffs(i, j) = c_ij = <psi_j^N| V |alpha~_i>.
  Mat coeffs;
  std::vector<LambdaDiagnostic> diagnostics;
  std::size_t rank_inputs = 0;
  std::size_t rank_targets = 0;
};

struct EstimationReport {
  double p_lower_bound = 0.0;
  double fprime_opt = 0.0;
  SignPattern lambda_chosen;
  bool feasible = false;
  /// e_mat(i, j) = c_ij, the amplitude of outcome j given state i.
  Mat e_mat;
  /// ||E E^dagger - (X^(M))^T||_F.
  double e_residual = 0.0;
  std::vector<double> correct_probs;
  double achieved_p = 0.0;
  Mat v_opt;
  std::vector<LambdaDiagnostic> diagnostics;
};

inline FidelityProblem make_problem(const Mat& input_gram, const Mat& target_gram,
                                    std::vector<double> priors, double rank_tol) {
  const numerics::Factor a = numerics::psd_factor(input_gram, rank_tol);
  const numerics::Factor b = numerics::psd_factor(target_gram, rank_tol);
  const std::size_t r = std::max<std::size_t>({a.rank, b.rank, 1});
  FidelityProblem p;
  p.a_tilde = a.f.with_rows(r);
  p.b_mat = b.f.with_rows(r);
  p.priors = std::move(priors);
  p.rank_inputs = a.rank;
  p.rank_targets = b.rank;
  return p;
}

/// Factorizations for a finite-N cloning task: A~^dagger A~ = X^(M),
/// B^dagger B = X^(N).
inline FidelityProblem make_clone_problem(const CloneTask& task,
                                          const BoundOptions& options = {}) {
  task.validate();
  if (task.n_copies.is_infinite()) {
    throw Error(ErrorKind::InvalidTask, "cloning bound needs a finite N");
  }
  return make_problem(gram_power(task.family, task.m_copies).x,
                      gram_power(task.family, task.n_copies.value()).x,
                      task.family.priors(), options.rank_tol);
}

/// Estimation limit: targets become orthonormal, B = I_n.
inline FidelityProblem make_estimation_problem(const PureStateFamily& family, int m,
                                               const BoundOptions& options = {}) {
  if (m < 1) throw Error(ErrorKind::InvalidTask, "M must be a positive integer");
  const std::size_t n = family.size();
  return make_problem(gram_power(family, m).x, Mat::identity(n), family.priors(),
                      options.rank_tol);
}

/// overlaps(i, j) = <b_j| v |a_i>.
inline Mat overlap_coefficients(const Mat& v, const Mat& a_tilde, const Mat& b_mat) {
  return (b_mat.adjoint() * v * a_tilde).transpose();
}

namespace detail {

struct LambdaSearch {
  double trace_norm = 0.0;
  SignPattern lambda;
  bool feasible = false;
  Mat v_opt;
  std::vector<LambdaDiagnostic> diagnostics;
};

// O(lambda) = A~ eta lambda B^dagger for every sign pattern; keeps the
// largest trace norm among the feasible patterns (or among all patterns,
// flagged infeasible, when none is feasible). Ties go to the earlier pattern.
inline LambdaSearch search_lambdas(const FidelityProblem& p, double feasibility_tol) {
  const std::size_t n = p.size();
  const Mat b_adj = p.b_mat.adjoint();
  LambdaSearch best;
  best.trace_norm = -1.0;
  LambdaSearch best_any;
  best_any.trace_norm = -1.0;

  for (SignPattern& lambda : enumerate_lambdas(n)) {
    Mat weighted = p.a_tilde;
    for (std::size_t i = 0; i < weighted.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) weighted(i, j) *= p.priors[j] * lambda.signs[j];
    const Mat o = weighted * b_adj;
    numerics::PolarResult polar = numerics::polar_max_unitary(o);

    bool feasible = true;
    const Mat t = b_adj * polar.v_opt * p.a_tilde;
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar ti = static_cast<double>(lambda.signs[i]) * t(i, i);
      if (ti.real() < -feasibility_tol || std::abs(ti.imag()) > feasibility_tol) {
        feasible = false;
        break;
      }
    }
    best.diagnostics.push_back({lambda, polar.trace_norm, feasible});

    if (feasible && polar.trace_norm > best.trace_norm) {
      best.trace_norm = polar.trace_norm;
      best.lambda = lambda;
      best.feasible = true;
      best.v_opt = polar.v_opt;
    }
    if (polar.trace_norm > best_any.trace_norm) {
      best_any.trace_norm = polar.trace_norm;
      best_any.lambda = std::move(lambda);
      best_any.v_opt = std::move(polar.v_opt);
    }
  }
  if (!best.feasible) {
    best.trace_norm = best_any.trace_norm;
    best.lambda = std::move(best_any.lambda);
    best.v_opt = std::move(best_any.v_opt);
  }
  best.trace_norm = std::clamp(best.trace_norm, 0.0, 1.0);
  return best;
}

}  // namespace detail

/// Lower bound on the optimal global fidelity for M -> N cloning, together
/// with the cloner that attains the auxiliary optimum.
inline BoundReport clone_bound(const FidelityProblem& problem,
                               const BoundOptions& options = {}) {
  detail::LambdaSearch search = detail::search_lambdas(problem, options.feasibility_tol);
  BoundReport r;
  r.fprime_opt = search.trace_norm;
  r.fidelity_lower_bound = r.fprime_opt * r.fprime_opt;
  r.lambda_chosen = std::move(search.lambda);
  r.feasible = search.feasible;
  r.v_opt = std::move(search.v_opt);
  r.a_tilde = problem.a_tilde;
  r.b_mat = problem.b_mat;
  r.priors = problem.priors;
  r.coeffs = overlap_coefficients(r.v_opt, r.a_tilde, r.b_mat);
  r.diagnostics = std::move(search.diagnostics);
  r.rank_inputs = problem.rank_inputs;
  r.rank_targets = problem.rank_targets;
  return r;
}

inline BoundReport clone_bound(const CloneTask& task, const BoundOptions& options = {}) {
  return clone_bound(make_clone_problem(task, options), options);
}

/// Output states alpha_i = V alpha~_i as columns.
inline Mat output_states(const BoundReport& report) {
  return report.v_opt * report.a_tilde;
}

/// Expansion coefficients d with alpha_i = sum_j d(i, j) |psi_j^N>, obtained
/// from c through the pseudo-inverse of the target Gram matrix. Exact when
/// the targets are linearly independent.
inline Mat target_expansion(const BoundReport& report) {
  const Mat target_gram = column_gram(report.b_mat);
  return (numerics::pseudo_inverse(target_gram) * report.coeffs.transpose()).transpose();
}

/// Lower bound on the average correct-identification probability from M
/// copies, with the estimation matrix E of the constructed measurement.
inline EstimationReport estimation_bound(const PureStateFamily& family, int m,
                                         const BoundOptions& options = {}) {
  const FidelityProblem problem = make_estimation_problem(family, m, options);
  detail::LambdaSearch search = detail::search_lambdas(problem, options.feasibility_tol);

  EstimationReport r;
  r.fprime_opt = search.trace_norm;
  r.p_lower_bound = r.fprime_opt * r.fprime_opt;
  r.lambda_chosen = std::move(search.lambda);
  r.feasible = search.feasible;
  r.v_opt = std::move(search.v_opt);
  r.e_mat = overlap_coefficients(r.v_opt, problem.a_tilde, problem.b_mat);
  r.diagnostics = std::move(search.diagnostics);

  const Mat xm = gram_power(family, m).x;
  r.e_residual = frobenius_norm(r.e_mat * r.e_mat.adjoint() - xm.transpose());
  const std::size_t n = family.size();
  r.correct_probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.correct_probs[i] = std::norm(r.e_mat(i, i));
    r.achieved_p += family.priors()[i] * r.correct_probs[i];
  }
  return r;
}

}  // namespace clonebound
