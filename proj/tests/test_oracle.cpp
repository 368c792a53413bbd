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

#include <gtest/gtest.h>

#include <cmath>

#include "clonebound/oracle.hpp"
#include "test_support.hpp"

namespace clonebound {
namespace {

using oracle::OracleOptions;

CloneTask two_state_task(double s, int m, int n) {
  return {two_state_family(s), m, CopyCount::finite(n)};
}

CloneTask equal_overlap_triple(double s) {
  const Mat g = Mat::from_rows({{1, s, s}, {s, 1, s}, {s, s, 1}});
  return {family_from_gram(g, uniform_priors(3)), 1, CopyCount::finite(2)};
}

TEST(TrueFidelity, PerfectCloneWhenMEqualsN) {
  const auto f = random_family(2, 3, 2);
  const FidelityProblem p = make_clone_problem(CloneTask{f, 2, CopyCount::finite(2)});
  EXPECT_NEAR(oracle::true_fidelity(Mat::identity(p.dimension()), p), 1.0, 1e-12);
}

TEST(TrueFidelity, OrthogonalMisroutingGivesZero) {
  const Mat id = Mat::identity(2);
  const Mat swap = Mat::from_rows({{0, 1}, {1, 0}});
  EXPECT_EQ(oracle::true_fidelity(swap, id, id, std::vector<double>{0.5, 0.5}), 0.0);
}

TEST(TrueFidelity, EqualityCaseAtConstructedCloner) {
  const BoundReport r = clone_bound(two_state_task(0.5, 1, 2));
  EXPECT_NEAR(oracle::true_fidelity(r.v_opt, r.a_tilde, r.b_mat, r.priors), 0.9817627, 1e-7);
  EXPECT_NEAR(oracle::true_fidelity(r.v_opt, r.a_tilde, r.b_mat, r.priors),
              testing::two_state_fidelity_formula(0.5, 1, 2), 1e-9);
}

TEST(TrueFidelity, ShapeErrors) {
  const Mat id = Mat::identity(2);
  try {
    oracle::true_fidelity(Mat::identity(3), id, id, std::vector<double>{0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(FprimeValue, ConsistentWithTraceNorm) {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = random_family(seed, 3, 2).with_priors(testing::random_priors(rng, 3));
    const BoundReport r = clone_bound(CloneTask{f, 1, CopyCount::finite(3)});
    EXPECT_NEAR(oracle::fprime_value(r.v_opt, r.a_tilde, r.b_mat, r.priors, r.lambda_chosen),
                r.fprime_opt, 1e-10);
    for (int trial = 0; trial < 100; ++trial) {
      const Mat v = random_unitary(rng, r.v_opt.rows());
      EXPECT_LE(oracle::fprime_value(v, r.a_tilde, r.b_mat, r.priors, r.lambda_chosen),
                r.fprime_opt + 1e-9);
    }
  }
}

TEST(FprimeValue, IdentityWhenMEqualsN) {
  const auto f = random_family(5, 2, 2);
  const BoundReport r = clone_bound(CloneTask{f, 1, CopyCount::finite(1)});
  EXPECT_NEAR(oracle::fprime_value(Mat::identity(r.v_opt.rows()), r.b_mat, r.b_mat, r.priors,
                                   SignPattern{{1, 1}}),
              1.0, 1e-12);
}

TEST(BoundChain, FidelitySquaresAuxiliaryForAnySigns) {
  // F(V) >= F'(V)^2 for every unitary and every sign pattern.
  Rng rng(13);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = random_family(seed, 3, 3).with_priors(testing::random_priors(rng, 3));
    const FidelityProblem p = make_clone_problem(CloneTask{f, 1, CopyCount::finite(2)});
    for (int trial = 0; trial < 20; ++trial) {
      const Mat v = random_unitary(rng, p.dimension());
      const double fid = oracle::true_fidelity(v, p);
      for (const auto& lambda : enumerate_lambdas(3)) {
        const double aux = oracle::fprime_value(v, p.a_tilde, p.b_mat, p.priors, lambda);
        EXPECT_GE(fid, aux * aux - 1e-12);
      }
    }
  }
}

TEST(Maximize, TwoStateEqualityCase) {
  OracleOptions o;
  o.restarts = 20;
  o.seed = 1;
  const auto r = oracle::maximize_fidelity(two_state_task(0.5, 1, 2), o);
  EXPECT_NEAR(r.f_opt_numeric, 0.9817627, 1e-6);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.restarts_used, 20);
  EXPECT_LE(unitarity_defect(r.v_best), 1e-10);
}

TEST(Maximize, OrthogonalFamily) {
  const auto f = family_from_gram(Mat::identity(3), uniform_priors(3));
  OracleOptions o;
  o.restarts = 5;
  EXPECT_NEAR(oracle::maximize_fidelity(CloneTask{f, 1, CopyCount::finite(2)}, o).f_opt_numeric,
              1.0, 1e-9);
}

TEST(Maximize, EqualOverlapTripleBeatsBound) {
  const CloneTask task = equal_overlap_triple(0.5);
  OracleOptions o;
  o.restarts = 200;
  o.seed = 2;
  const auto r = oracle::maximize_fidelity(task, o);
  const BoundReport b = clone_bound(task);
  EXPECT_GE(r.f_opt_numeric, b.fidelity_lower_bound - 1e-7);
  EXPECT_GE(r.f_opt_numeric,
            oracle::true_fidelity(b.v_opt, b.a_tilde, b.b_mat, b.priors) - 1e-9);
}

TEST(Maximize, DeterministicAcrossThreadCounts) {
  const CloneTask task{random_family(9, 3, 3), 1, CopyCount::finite(2)};
  OracleOptions o;
  o.restarts = 16;
  o.seed = 77;
  const auto a = oracle::maximize_fidelity(task, o);
  o.threads = 4;
  const auto b = oracle::maximize_fidelity(task, o);
  EXPECT_EQ(a.f_opt_numeric, b.f_opt_numeric);
  EXPECT_EQ(a.best_restart_index, b.best_restart_index);
  EXPECT_EQ(a.v_best, b.v_best);
  o.seed = 78;
  o.threads = 1;
  EXPECT_EQ(oracle::maximize_fidelity(task, o).restarts_used, 16);
}

TEST(Maximize, ExtraDimensionDoesNotHelp) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const CloneTask task{random_family(seed, 2 + seed % 2, 2), 1, CopyCount::finite(2)};
    OracleOptions o;
    o.restarts = 30;
    o.seed = seed;
    const double base = oracle::maximize_fidelity(task, o).f_opt_numeric;
    o.extra_dims = 1;
    EXPECT_LE(oracle::maximize_fidelity(task, o).f_opt_numeric - base, 1e-6);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = random_family(seed, 3, 3).with_priors(testing::random_priors(rng, 3));
    const CloneTask task{f, 1, CopyCount::finite(2)};
    const std::size_t r = make_clone_problem(task).dimension();
    for (int trial = 0; trial < 10; ++trial) {
      const auto point = oracle::UnitaryPoint::random(rng, r);
      EXPECT_LE(oracle::gradient_check(task, point, 1e-5), 1e-5);
    }
  }
}

TEST(Gradient, VanishesAtConvergedMaximum) {
  const CloneTask task = equal_overlap_triple(0.3);
  OracleOptions o;
  o.restarts = 10;
  const auto r = oracle::maximize_fidelity(task, o);
  ASSERT_TRUE(r.converged);
  const FidelityProblem p = make_clone_problem(task);
  const std::vector<double> zero(p.dimension() * p.dimension(), 0.0);
  double norm2 = 0.0;
  for (double g : oracle::fidelity_gradient(p, zero, r.v_best)) norm2 += g * g;
  EXPECT_LE(std::sqrt(norm2), 1e-8);

  // Same point expressed as exp(S): still consistent with finite differences
  // in a neighbourhood of the identity generator.
  Rng rng(1);
  const auto point = oracle::UnitaryPoint::random(rng, p.dimension(), 1e-3);
  EXPECT_LE(oracle::gradient_check(p, point, 1e-5), 1e-5);
}

TEST(Gradient, SingleStateHasNoGradient) {
  const auto f = family_from_gram(Mat::identity(1), {1.0});
  const CloneTask task{f, 1, CopyCount::finite(3)};
  const FidelityProblem p = make_clone_problem(task);
  ASSERT_EQ(p.dimension(), 1u);
  Rng rng(2);
  const auto point = oracle::UnitaryPoint::random(rng, 1);
  for (double g : oracle::fidelity_gradient(p, point.params, Mat::identity(1)))
    EXPECT_LE(std::abs(g), 1e-15);
  EXPECT_NEAR(oracle::true_fidelity(point.v, p), 1.0, 1e-15);
}

TEST(Gradient, StepRange) {
  const CloneTask task = two_state_task(0.5, 1, 2);
  Rng rng(3);
  const auto point = oracle::UnitaryPoint::random(rng, 2);
  EXPECT_THROW(oracle::gradient_check(task, point, 1e-3), Error);
  EXPECT_THROW(oracle::gradient_check(task, point, 1e-9), Error);
}

TEST(UnitaryPoint, IsUnitary) {
  Rng rng(4);
  for (std::size_t r = 1; r <= 6; ++r) {
    const auto pt = oracle::UnitaryPoint::random(rng, r);
    EXPECT_EQ(pt.params.size(), r * r);
    EXPECT_LE(unitarity_defect(pt.v), 1e-10);
    EXPECT_LE(frobenius_norm(oracle::generator(r, pt.params) +
                             oracle::generator(r, pt.params).adjoint()),
              0.0);
  }
}

TEST(ClosedForms, TwoState) {
  EXPECT_DOUBLE_EQ(oracle::two_state_closed_form(0.0, 1, 2).fidelity, 1.0);
  EXPECT_DOUBLE_EQ(oracle::two_state_closed_form(1.0, 1, 2).fidelity, 1.0);
  const auto v = oracle::two_state_closed_form(0.5, 1, 2);
  EXPECT_NEAR(v.fidelity, 0.9817627, 1e-7);
  EXPECT_NEAR(v.fprime * v.fprime, v.fidelity, 1e-14);
  EXPECT_THROW(oracle::two_state_closed_form(1.5, 1, 2), Error);
  EXPECT_THROW(oracle::two_state_closed_form(0.5, 3, 2), Error);
}

TEST(ClosedForms, Helstrom) {
  EXPECT_NEAR(oracle::helstrom_reference(0.8), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(oracle::helstrom_reference(0.0), 1.0);
  EXPECT_DOUBLE_EQ(oracle::helstrom_reference(1.0), 0.5);
  EXPECT_THROW(oracle::helstrom_reference(-0.1), Error);
}

}  // namespace
}  // namespace clonebound
