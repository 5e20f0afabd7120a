#include <random>

#include <gtest/gtest.h>

#include "xxzroots/bethe.hpp"

using namespace xxzroots;

namespace {

ChainSpec chain(std::vector<Site> sites, Complex gamma, Complex kappa) {
  ChainSpec s;
  s.sites = std::move(sites);
  s.gamma = gamma;
  s.kappa = kappa;
  return s;
}

ChainSpec c1() { return chain({{1, {1.0, 0.0}}}, 0.7, 1.0); }
ChainSpec c2() { return chain({{1, {1.0, 0.0}}, {1, {2.3, 0.0}}}, 0.7, 1.3); }
ChainSpec mixed(Complex kappa = {0.8, 0.5}) { return chain({{1, {1.0, 0.0}}, {2, {2.3, 0.4}}}, 0.7, kappa); }

std::vector<Complex> random_points(std::mt19937_64& rng, int n, double scale = 1.5) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.emplace_back(d(rng), d(rng));
  return out;
}

const std::vector<Complex> kSamples{{0.4, 0.1}, {1.3, -0.6}, {-0.8, 0.9}, {2.1, 0.3}, {0.2, -1.7}};

}  // namespace

TEST(BetheResidual, SingleRapidityIsScalarPolynomial) {
  const auto spec = c2();
  for (Complex t : {Complex(0.3, 0.4), Complex(-1.2, 2.0)}) {
    const std::vector<Complex> ts{t};
    EXPECT_TRUE(near(bethe_residual(spec, ts)[0], script_A(spec, t) - spec.kappa * script_D(spec, t), 1e-14));
  }
}

TEST(BetheResidual, SingleSiteSolutionAtMinusOne) {
  const std::vector<Complex> t{-1.0};
  EXPECT_LT(std::abs(bethe_residual(c1(), t)[0]), 1e-14);
}

TEST(BetheResidual, TwoSiteCompanionRoots) {
  const auto spec = c2();
  const auto roots = polynomial_roots(k1_polynomial(spec));
  ASSERT_EQ(roots.size(), 2u);
  for (const auto& r : roots) {
    const std::vector<Complex> t{r};
    EXPECT_LT(std::abs(bethe_residual(spec, t)[0]), 1e-12);
  }
}

TEST(PolynomialRoots, KnownCubic) {
  // (x - 1)(x + 2)(x - i) = x^3 + (1 - i) x^2 + (-2 - i) x + 2i
  const auto r = polynomial_roots({Complex(0, 2), Complex(-2, -1), Complex(1, -1), 1.0});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_TRUE(near(r[0], -2.0, 1e-12));
  EXPECT_TRUE(near(r[1], kI, 1e-12));
  EXPECT_TRUE(near(r[2], 1.0, 1e-12));
}

TEST(Solve, EmptySolutionAtKZero) {
  const auto spec = c2();
  const auto m = build_monodromy(spec);
  const auto rep = solve_bethe(spec, m, 0);
  ASSERT_EQ(rep.solutions.size(), 1u);
  EXPECT_TRUE(rep.solutions[0].roots.empty());
  EXPECT_LT((*rep.solutions[0].vector - vacuum(spec)).norm(), 1e-15);
  EXPECT_TRUE(rep.census_complete);
}

TEST(Solve, SingleSiteHasExactlyMinusOne) {
  const auto rep = solve_bethe(c1(), 1);
  ASSERT_EQ(rep.solutions.size(), 1u);
  ASSERT_EQ(rep.solutions[0].roots.size(), 1u);
  EXPECT_TRUE(near(rep.solutions[0].roots[0], -1.0, 1e-12));
  EXPECT_TRUE(rep.solutions[0].flags.admissible);
  EXPECT_TRUE(rep.solutions[0].flags.offdiagonal);
}

TEST(Solve, TwoSiteCensusAtKOne) {
  const auto rep = solve_bethe(c2(), 1);
  EXPECT_EQ(rep.admissible_offdiagonal, 2u);
  EXPECT_EQ(rep.weight_dim, 2u);
  EXPECT_EQ(rep.gram_rank, 2u);
  EXPECT_TRUE(rep.census_complete);
}

TEST(Solve, MixedSpinCensusAtKTwo) {
  for (Complex kappa : {Complex(0.8, 0.5), Complex(-1.1, 0.3), Complex(0.6, -1.4)}) {
    const auto spec = mixed(kappa);
    const auto m = build_monodromy(spec);
    const auto rep = solve_bethe(spec, m, 2);
    EXPECT_EQ(rep.admissible_offdiagonal, 2u) << kappa;
    EXPECT_EQ(rep.weight_dim, 2u);
    EXPECT_EQ(rep.gram_rank, 2u);
    for (const auto& s : rep.solutions) {
      if (!(s.flags.admissible && s.flags.offdiagonal)) continue;
      EXPECT_LT(verify_eigen(spec, m, s.roots, kSamples).max_residual, 1e-8);
    }
  }
}

TEST(Solve, DeterministicGivenSeed) {
  const auto spec = mixed();
  const auto m = build_monodromy(spec);
  const auto a = solve_bethe(spec, m, 2);
  const auto b = solve_bethe(spec, m, 2);
  ASSERT_EQ(a.solutions.size(), b.solutions.size());
  EXPECT_EQ(a.attempts, b.attempts);
  for (std::size_t i = 0; i < a.solutions.size(); ++i) EXPECT_EQ(a.solutions[i].roots, b.solutions[i].roots);
}

TEST(Solve, SolutionsArePairwiseDistinctMultisets) {
  const auto rep = solve_bethe(mixed(), 2);
  for (std::size_t i = 0; i < rep.solutions.size(); ++i)
    for (std::size_t j = i + 1; j < rep.solutions.size(); ++j)
      EXPECT_FALSE(same_multiset(rep.solutions[i].roots, rep.solutions[j].roots));
}

TEST(Solve, NegativeKRejected) { EXPECT_THROW(solve_bethe(c2(), -1), PreconditionError); }

TEST(Multiset, PermutationInvariant) {
  const std::vector<Complex> a{{1.0, 2.0}, {-0.5, 0.1}}, b{{-0.5, 0.1}, {1.0, 2.0}};
  EXPECT_TRUE(same_multiset(a, b));
  EXPECT_EQ(sorted_roots(a), sorted_roots(b));
}

TEST(Classify, Definitions) {
  const auto spec = c2();
  const std::vector<Complex> with_zero{0.0, 1.5};
  EXPECT_FALSE(classify(spec, with_zero).admissible);
  const Complex a{0.7, -0.3};
  const std::vector<Complex> string{a, a * qpow(spec.gamma, 2.0)};
  EXPECT_FALSE(classify(spec, string).admissible);
  const std::vector<Complex> repeated{a, a};
  EXPECT_FALSE(classify(spec, repeated).offdiagonal);
  const std::vector<Complex> c1_root{-1.0};
  const auto f = classify(c1(), c1_root);
  EXPECT_TRUE(f.admissible);
  EXPECT_TRUE(f.offdiagonal);
}

TEST(Classify, RecordsSpecialPoints) {
  const auto spec = c2();
  const std::vector<Complex> t{spec.sites[1].z * qpow(spec.gamma, 1.0), 0.4};
  const auto f = classify(spec, t);
  ASSERT_EQ(f.hits_plus_points.size(), 1u);
  EXPECT_EQ(f.hits_plus_points[0], 1);
  EXPECT_TRUE(f.hits_minus_points.empty());
}

TEST(BetheVector, EmptyIsVacuum) {
  const auto spec = c2();
  EXPECT_EQ(bethe_vector(spec, build_monodromy(spec), {}), vacuum(spec));
}

TEST(BetheVector, SymmetricInRapidities) {
  const auto spec = c2();
  const auto m = build_monodromy(spec);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 5; ++i) {
    const auto t = random_points(rng, 2);
    const std::vector<Complex> s{t[1], t[0]};
    const CVec a = bethe_vector(spec, m, t), b = bethe_vector(spec, m, s);
    EXPECT_LT((a - b).norm(), 1e-10 * (1.0 + a.norm()));
  }
}

TEST(BetheVector, SingleSiteAtMinusOne) {
  const auto spec = c1();
  const std::vector<Complex> t{-1.0};
  const CVec psi = bethe_vector(spec, build_monodromy(spec), t);
  const Complex qd = qpow(spec.gamma, 1.0) - qpow(spec.gamma, -1.0);
  EXPECT_LT(std::abs(psi(0)), 1e-15);
  EXPECT_TRUE(near(psi(1), -qd, 1e-14));
}

TEST(BetheVector, WeightLoweredByK) {
  const auto spec = mixed();
  const auto m = build_monodromy(spec);
  const CMat h = total_weight_operator(spec);
  std::mt19937_64 rng(23);
  for (int k = 0; k <= 3; ++k) {
    const auto t = random_points(rng, k);
    const CVec psi = bethe_vector(spec, m, t);
    EXPECT_LT((h * psi - (spec.spin_total() - k) * psi).norm(), 1e-10 * (1.0 + psi.norm()));
  }
}

TEST(Eigenvalue, EmptyRapidities) {
  const auto spec = c2();
  const Complex u{0.3, -0.8};
  EXPECT_TRUE(near(eigenvalue_Tbv(spec, {}, u), script_A(spec, u) + spec.kappa * script_D(spec, u), 1e-14));
}

TEST(Eigenvalue, SingleSiteRayleighQuotient) {
  const auto spec = c1();
  const auto m = build_monodromy(spec);
  const std::vector<Complex> t{-1.0};
  const Complex u{0.4, 0.1};
  const CVec psi = bethe_vector(spec, m, t);
  const Complex rq = psi.dot(transfer_matrix(m, spec.kappa, u) * psi) / psi.squaredNorm();
  EXPECT_TRUE(near(eigenvalue_Tbv(spec, t, u), rq, 1e-10));
}

TEST(Eigenvalue, ResidueVanishesOnSolutions) {
  const auto spec = c2();
  for (const auto& r : polynomial_roots(k1_polynomial(spec))) {
    const std::vector<Complex> t{r};
    EXPECT_LT(std::abs(eigenvalue_residue(spec, t, 0)), 1e-10);
  }
  const auto rep = solve_bethe(mixed(), 2);
  for (const auto& s : rep.solutions)
    if (s.flags.admissible && s.flags.offdiagonal)
      for (std::size_t a = 0; a < 2; ++a) EXPECT_LT(std::abs(eigenvalue_residue(mixed(), s.roots, a)), 1e-8);
}

TEST(Eigenvalue, RemovablePoleAtRapidity) {
  const auto spec = c2();
  const std::vector<Complex> t{polynomial_roots(k1_polynomial(spec))[0]};
  const Complex at = eigenvalue_Tbv(spec, t, t[0]);
  const Complex close = eigenvalue_Tbv(spec, t, t[0] + Complex(1e-5, 0.0));
  EXPECT_TRUE(near(at, close, 1e-4));
  const std::vector<Complex> bad{Complex(0.37, 0.21)};
  EXPECT_THROW(eigenvalue_Tbv(spec, bad, bad[0]), PreconditionError);
}

TEST(VerifyEigen, SingleAndTwoSiteSolutions) {
  {
    const auto spec = c1();
    const std::vector<Complex> t{-1.0};
    EXPECT_LT(verify_eigen(spec, build_monodromy(spec), t, kSamples).max_residual, 1e-10);
  }
  const auto spec = c2();
  const auto m = build_monodromy(spec);
  for (const auto& r : polynomial_roots(k1_polynomial(spec))) {
    const std::vector<Complex> t{r};
    const auto ec = verify_eigen(spec, m, t, kSamples);
    EXPECT_FALSE(ec.zero_vector);
    EXPECT_LT(ec.max_residual, 1e-9);
  }
}

TEST(VerifyEigen, NonSolutionIsNotAnEigenvector) {
  const auto spec = c2();
  const std::vector<Complex> t{Complex(0.37, 0.21)};
  EXPECT_GT(verify_eigen(spec, build_monodromy(spec), t, kSamples).max_residual, 1e-3);
}

TEST(VerifyEigen, ZeroVectorIsReported) {
  // B(t) v0 vanishes on a single spin-1/2 site at t = 0.
  const auto spec = c1();
  const std::vector<Complex> t{0.0};
  EXPECT_TRUE(verify_eigen(spec, build_monodromy(spec), t, kSamples).zero_vector);
}

TEST(ActionFormulas, ArbitraryRapidities) {
  std::mt19937_64 rng(31);
  const std::vector<std::pair<ChainSpec, int>> cases{{c1(), 0}, {c1(), 1}, {c2(), 1}, {c2(), 2}, {mixed(), 2}};
  for (const auto& [spec, k] : cases) {
    const auto m = build_monodromy(spec);
    for (int i = 0; i < 3; ++i) {
      const auto t = random_points(rng, k);
      const auto r = verify_action_formulas(spec, m, t, Complex(0.9, -0.45));
      EXPECT_LT(r.a_residual, 1e-9) << k;
      EXPECT_LT(r.d_residual, 1e-9) << k;
    }
  }
}
