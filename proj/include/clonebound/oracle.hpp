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

// Independent checks on the bound: direct maximization of the global
// fidelity over the unitary group, closed-form two-state references and a
// finite-difference check of the analytic gradient.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "clonebound/bounds.hpp"
#include "clonebound/error.hpp"
#include "clonebound/matrix.hpp"
#include "clonebound/numerics.hpp"
#include "clonebound/random.hpp"

namespace clonebound::oracle {

namespace detail {

inline void check_shapes(const Mat& v, const Mat& a_tilde, const Mat& b_mat,
                         std::span<const double> priors) {
  const std::size_t r = a_tilde.rows();
  if (!v.is_square() || v.rows() != r || b_mat.rows() != r ||
      a_tilde.cols() != priors.size() || b_mat.cols() != priors.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "unitary, inputs, targets and priors have inconsistent shapes");
  }
}

// t_i = <b_i| v |a_i>.
inline std::vector<Scalar> diagonal_overlaps(const Mat& v, const Mat& a_tilde,
                                             const Mat& b_mat) {
  const Mat va = v * a_tilde;
  std::vector<Scalar> t(a_tilde.cols());
  for (std::size_t i = 0; i < t.size(); ++i) {
    Scalar s{};
    for (std::size_t k = 0; k < va.rows(); ++k) s += std::conj(b_mat(k, i)) * va(k, i);
    t[i] = s;
  }
  return t;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

/// Global fidelity F = sum_i eta_i |<b_i| v |a_i>|^2.
inline double true_fidelity(const Mat& v, const Mat& a_tilde, const Mat& b_mat,
                            std::span<const double> priors) {
  detail::check_shapes(v, a_tilde, b_mat, priors);
  if (unitarity_defect(v) > 1e-8) {
    throw Error(ErrorKind::DimensionMismatch, "true_fidelity: v is not unitary");
  }
  const auto t = detail::diagonal_overlaps(v, a_tilde, b_mat);
  double f = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) f += priors[i] * std::norm(t[i]);
  return f;
}

inline double true_fidelity(const Mat& v, const FidelityProblem& p) {
  return true_fidelity(v, p.a_tilde, p.b_mat, p.priors);
}

/// Auxiliary fidelity |sum_i eta_i lambda_i <b_i| v |a_i>|.
inline double fprime_value(const Mat& v, const Mat& a_tilde, const Mat& b_mat,
                           std::span<const double> priors, const SignPattern& lambda) {
  detail::check_shapes(v, a_tilde, b_mat, priors);
  if (lambda.size() != priors.size()) {
    throw Error(ErrorKind::DimensionMismatch, "sign pattern length mismatch");
  }
  const auto t = detail::diagonal_overlaps(v, a_tilde, b_mat);
  Scalar s{};
  for (std::size_t i = 0; i < t.size(); ++i) s += priors[i] * lambda.signs[i] * t[i];
  return std::abs(s);
}

/// Skew-Hermitian generator from r^2 real parameters: the first r set the
/// imaginary diagonal, then each upper-triangle entry (k < l, row-major)
/// takes a (real, imaginary) pair.
inline Mat generator(std::size_t dim, std::span<const double> params) {
  if (params.size() != dim * dim) {
    throw Error(ErrorKind::DimensionMismatch, "generator needs dim^2 parameters");
  }
  Mat s(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) s(k, k) = Scalar{0.0, params[k]};
  std::size_t idx = dim;
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = k + 1; l < dim; ++l) {
      const Scalar z{params[idx], params[idx + 1]};
      idx += 2;
      s(k, l) = z;
      s(l, k) = -std::conj(z);
    }
  return s;
}

/// Spectral data of a skew-Hermitian S through H = iS = Q diag(mu) Q^dagger,
/// so that exp(S) = Q diag(exp(-i mu)) Q^dagger is unitary to rounding.
struct SkewSpectrum {
  Mat q;
  std::vector<double> mu;

  static SkewSpectrum of(const Mat& s) {
    const Mat h = Scalar{0.0, 1.0} * s;
    auto eig = numerics::hermitian_eig(Scalar{0.5} * (h + h.adjoint()));
    return {std::move(eig.eigenvectors), std::move(eig.eigenvalues)};
  }

  Mat exp() const {
    const std::size_t n = mu.size();
    Mat out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const Scalar phase = std::polar(1.0, -mu[k]);
      for (std::size_t i = 0; i < n; ++i) {
        const Scalar qi = phase * q(i, k);
        for (std::size_t j = 0; j < n; ++j) out(i, j) += qi * std::conj(q(j, k));
      }
    }
    return out;
  }
};

inline Mat unitary_exp(const Mat& skew) { return SkewSpectrum::of(skew).exp(); }

/// A point V = exp(S(params)) of the unitary group.
struct UnitaryPoint {
  std::size_t dim = 0;
  std::vector<double> params;
  Mat v;

  static UnitaryPoint from_params(std::size_t dim, std::vector<double> params) {
    Mat v = unitary_exp(generator(dim, params));
    return {dim, std::move(params), std::move(v)};
  }

  static UnitaryPoint random(Rng& rng, std::size_t dim, double scale = std::numbers::pi) {
    std::vector<double> params(dim * dim);
    for (auto& p : params) p = rng.uniform(-scale, scale);
    return from_params(dim, std::move(params));
  }
};

/// Analytic gradient of params -> F(exp(S(params)) * base).
///
/// With K = A~ diag(eta_i conj(t_i)) B^dagger, dF = 2 Re tr(base K dexp),
/// and the Frechet derivative of exp is taken in the eigenbasis of S with
/// divided differences of exp (written with a sinc to stay stable for
/// close eigenvalues).
inline std::vector<double> fidelity_gradient(const FidelityProblem& p,
                                             std::span<const double> params,
                                             const Mat& base) {
  const std::size_t r = p.dimension();
  const SkewSpectrum spec = SkewSpectrum::of(generator(r, params));
  const Mat w = spec.exp() * base;
  const auto t = detail::diagonal_overlaps(w, p.a_tilde, p.b_mat);

  Mat weighted = p.a_tilde;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < p.size(); ++j) weighted(i, j) *= p.priors[j] * std::conj(t[j]);
  const Mat m0 = base * (weighted * p.b_mat.adjoint());

  Mat mt = spec.q.adjoint() * m0 * spec.q;
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = 0; l < r; ++l) {
      const double avg = 0.5 * (spec.mu[k] + spec.mu[l]);
      const double half_gap = 0.5 * (spec.mu[k] - spec.mu[l]);
      mt(k, l) *= std::polar(detail::sinc(half_gap), -avg);
    }
  const Mat gamma = spec.q * mt * spec.q.adjoint();

  std::vector<double> grad(r * r);
  for (std::size_t k = 0; k < r; ++k) grad[k] = -2.0 * gamma(k, k).imag();
  std::size_t idx = r;
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = k + 1; l < r; ++l) {
      grad[idx++] = 2.0 * (gamma(l, k) - gamma(k, l)).real();
      grad[idx++] = -2.0 * (gamma(l, k) + gamma(k, l)).imag();
    }
  return grad;
}

/// Max relative deviation between the analytic gradient at `point` and
/// central differences with the given step (denominator max(1, |analytic|)).
inline double gradient_check(const FidelityProblem& p, const UnitaryPoint& point,
                             double step) {
  if (!(step >= 1e-7 && step <= 1e-4)) {
    throw Error(ErrorKind::BadRange, "gradient_check step must lie in [1e-7, 1e-4]");
  }
  if (point.dim != p.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "point dimension differs from problem");
  }
  const Mat identity = Mat::identity(point.dim);
  const auto analytic = fidelity_gradient(p, point.params, identity);
  double worst = 0.0;
  std::vector<double> shifted = point.params;
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    const double saved = shifted[k];
    shifted[k] = saved + step;
    const double up = true_fidelity(unitary_exp(generator(point.dim, shifted)), p);
    shifted[k] = saved - step;
    const double down = true_fidelity(unitary_exp(generator(point.dim, shifted)), p);
    shifted[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic[k] - numeric) /
                                std::max(1.0, std::abs(analytic[k])));
  }
  return worst;
}

inline double gradient_check(const CloneTask& task, const UnitaryPoint& point,
                             double step) {
  return gradient_check(make_clone_problem(task), point, step);
}

struct OracleOptions {
  /// Zero selects the default: 50 restarts for n <= 3, 200 otherwise.
  int restarts = 0;
  std::uint64_t seed = 0;
  int max_iters = 2000;
  double grad_tol = 1e-9;
  /// Extra ambient dimensions beyond the span used by the bound.
  std::size_t extra_dims = 0;
  unsigned threads = 1;
};

struct RestartOutcome {
  double fidelity = 0.0;
  Mat v;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct OracleResult {
  double f_opt_numeric = 0.0;
  Mat v_best;
  int restarts_used = 0;
  bool converged = false;
  int best_restart_index = 0;
};

inline int default_restarts(std::size_t n) { return n <= 3 ? 50 : 200; }

/// Riemannian steepest ascent V <- exp(alpha S(g)) V with Armijo backtracking
/// (halving, constant 1e-4). The trial step of each iteration is the
/// Barzilai-Borwein length from the previous step.
inline RestartOutcome ascend(const FidelityProblem& p, Mat v, int max_iters,
                             double grad_tol) {
  const std::size_t r = p.dimension();
  const std::vector<double> zero(r * r, 0.0);
  auto squared = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double e : x) s += e * e;
    return s;
  };

  RestartOutcome out;
  double f = true_fidelity(v, p);
  double alpha = 1.0;
  std::vector<double> g = fidelity_gradient(p, zero, v);
  std::vector<double> step(g.size());
  for (out.iterations = 0;; ++out.iterations) {
    const double g2 = squared(g);
    out.grad_norm = std::sqrt(g2);
    if (out.grad_norm <= grad_tol) {
      out.converged = true;
      break;
    }
    if (out.iterations == max_iters) break;

    bool accepted = false;
    while (alpha > 1e-18) {
      for (std::size_t k = 0; k < g.size(); ++k) step[k] = alpha * g[k];
      Mat trial = unitary_exp(generator(r, step)) * v;
      const double ft = true_fidelity(trial, p);
      if (ft >= f + 1e-4 * alpha * g2) {
        v = std::move(trial);
        f = ft;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no further ascent resolvable in double precision

    std::vector<double> g_next = fidelity_gradient(p, zero, v);
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      ss += step[k] * step[k];
      sy += step[k] * (g[k] - g_next[k]);
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 1e3) : std::min(2.0 * alpha, 1e3);
    g = std::move(g_next);
  }
  out.fidelity = f;
  out.v = std::move(v);
  return out;
}

/// Best global fidelity found by ascent from `warm_start` (restart 0) and
/// from random unitaries (restarts 1..). Reduction is by (value, lowest
/// restart index), so results do not depend on the thread count.
inline OracleResult maximize_fidelity(const FidelityProblem& p, const Mat& warm_start,
                                      const OracleOptions& options) {
  if (options.restarts < 1) {
    throw Error(ErrorKind::InvalidInput, "restarts must be at least 1");
  }
  const std::size_t r = p.dimension();
  if (warm_start.rows() != r || !warm_start.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "warm start has the wrong dimension");
  }
  const auto n_restarts = static_cast<std::size_t>(options.restarts);
  std::vector<RestartOutcome> outcomes(n_restarts);
  const Rng root(options.seed);

  auto run = [&](std::size_t index) {
    Mat start;
    if (index == 0) {
      start = warm_start;
    } else {
      Rng rng = root.split(index);
      start = UnitaryPoint::random(rng, r).v;
    }
    outcomes[index] = ascend(p, std::move(start), options.max_iters, options.grad_tol);
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, options.restarts));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_restarts; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < n_restarts; i = next++) run(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  OracleResult result;
  result.restarts_used = options.restarts;
  result.f_opt_numeric = -1.0;
  for (std::size_t i = 0; i < n_restarts; ++i) {
    result.converged = result.converged || outcomes[i].converged;
    if (outcomes[i].fidelity > result.f_opt_numeric) {
      result.f_opt_numeric = outcomes[i].fidelity;
      result.best_restart_index = static_cast<int>(i);
    }
  }
  result.v_best = std::move(outcomes[result.best_restart_index].v);
  result.f_opt_numeric = std::clamp(result.f_opt_numeric, 0.0, 1.0);
  return result;
}

/// Block-diagonal v (+) I_extra.
inline Mat embed_unitary(const Mat& v, std::size_t extra) {
  Mat out = Mat::identity(v.rows() + extra);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) out(i, j) = v(i, j);
  return out;
}

/// Maximize the global fidelity of a finite-N cloning task. The warm start
/// is the cloner constructed by clone_bound.
inline OracleResult maximize_fidelity(const CloneTask& task, OracleOptions options = {}) {
  const FidelityProblem base = make_clone_problem(task);
  const BoundReport bound = clone_bound(base);
  if (options.restarts == 0) options.restarts = default_restarts(task.family.size());
  return maximize_fidelity(base.embedded(options.extra_dims),
                           embed_unitary(bound.v_opt, options.extra_dims), options);
}

struct TwoStateValues {
  double fprime = 0.0;
  double fidelity = 0.0;
};

/// Two equiprobable states with real overlap s, cloned m -> n.
inline TwoStateValues two_state_closed_form(double s, int m, int n) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::BadRange, "overlap must lie in [0, 1]");
  if (m < 1 || n < m) throw Error(ErrorKind::BadRange, "need 1 <= m <= n");
  const double sm = std::pow(s, m);
  const double sn = std::pow(s, n);
  TwoStateValues out;
  out.fprime = 0.5 * (std::sqrt((1.0 + sm) * (1.0 + sn)) + std::sqrt((1.0 - sm) * (1.0 - sn)));
  out.fidelity = 0.5 * (1.0 + sm * sn + std::sqrt((1.0 - sm * sm) * (1.0 - sn * sn)));
  return out;
}

/// Optimal probability of identifying one of two equiprobable pure states
/// with overlap s_eff.
inline double helstrom_reference(double s_eff) {
  if (!(s_eff >= 0.0 && s_eff <= 1.0)) {
    throw Error(ErrorKind::BadRange, "overlap must lie in [0, 1]");
  }
  return 0.5 * (1.0 + std::sqrt(1.0 - s_eff * s_eff));
}

}  // namespace clonebound::oracle
