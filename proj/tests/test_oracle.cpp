#include <gtest/gtest.h>

#include "xxzroots/oracle.hpp"

using namespace xxzroots;

namespace {

ChainSpec chain(std::vector<Site> sites, Complex gamma = 0.7, Complex kappa = 1.0) {
  ChainSpec s;
  s.sites = std::move(sites);
  s.gamma = gamma;
  s.kappa = kappa;
  return s;
}

ChainSpec c2() { return chain({{1, 1.0}, {1, 2.3}}, 0.7, 1.3); }

std::vector<ChainSpec> desk_specs() {
  return {chain({{1, 1.0}}), c2(), chain({{1, 1.0}, {2, {2.3, 0.4}}}, 0.7, {0.8, 0.5}),
          chain({{2, 1.0}, {1, {0.6, -0.4}}, {1, {1.7, 0.2}}}, 0.55, {0.9, -0.3})};
}

}  // namespace

TEST(Commutation, ExchangeRelationsHold) {
  for (const auto& spec : desk_specs()) {
    const auto r = check_commutation(spec, build_monodromy(spec), 10);
    EXPECT_LT(r.bb, 1e-10);
    EXPECT_LT(r.ab, 1e-10);
    EXPECT_LT(r.db, 1e-10);
    EXPECT_LT(r.tt, 1e-10);
    EXPECT_LT(r.weight, 1e-10);
  }
}

TEST(Commutation, WrongAnisotropyIsDetected) {
  // Exchange relations evaluated with a q that does not match the monodromy.
  auto spec = c2();
  const auto m = build_monodromy(spec);
  spec.gamma = 0.71;
  EXPECT_GT(check_commutation(spec, m, 5).ab, 1e-4);
}

TEST(ExactSpectrum, SectorStructure) {
  for (const auto& spec : desk_specs()) {
    const auto m = build_monodromy(spec);
    const Complex u0{0.4, 0.9};
    const auto rep = exact_spectrum(spec, m, u0);
    ASSERT_EQ(rep.sectors.size(), static_cast<std::size_t>(spec.two_spin_total() + 1));
    std::size_t total = 0;
    for (const auto& s : rep.sectors) {
      EXPECT_EQ(s.dimension, weight_sector_dim(spec, s.k));
      EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end(), complex_less));
      int mult = 0;
      for (const auto& [v, c] : s.degeneracies) mult += c;
      EXPECT_EQ(static_cast<std::size_t>(mult), s.dimension);
      total += s.dimension;
    }
    EXPECT_EQ(total, spec.dimension());
    const Complex vac = script_A(spec, u0) + spec.kappa * script_D(spec, u0);
    EXPECT_LT(spectrum_distance(rep, 0, vac), 1e-12);
  }
}

TEST(ExactSpectrum, ContainsBetheEigenvaluesOnTwoSite) {
  const auto spec = c2();
  const auto m = build_monodromy(spec);
  const Complex u0{0.4, 0.9};
  const auto rep = exact_spectrum(spec, m, u0);
  const auto sol = solve_bethe(spec, m, 1);
  ASSERT_EQ(sol.solutions.size(), 2u);
  for (const auto& s : sol.solutions) EXPECT_LT(spectrum_distance(rep, 1, eigenvalue_Tbv(spec, s.roots, u0)), 1e-8);
}

TEST(ExactSpectrum, MissingSectorIsInfinite) {
  const auto spec = c2();
  const auto rep = exact_spectrum(spec, build_monodromy(spec), 1.0);
  EXPECT_TRUE(std::isinf(spectrum_distance(rep, 7, 0.0)));
}

TEST(Degeneracy, ClustersCloseValues) {
  const std::vector<Complex> ev{{1.0, 0.0}, {1.0 + 1e-12, 0.0}, {2.0, 0.0}};
  const auto d = degeneracy_multiset(ev);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].second, 2);
  EXPECT_EQ(d[1].second, 1);
}

TEST(Census, TwoSiteSectorsComplete) {
  const auto spec = c2();
  const auto kappas = sample_twists(3, 5);
  for (int k : {0, 1, 2}) {
    const auto t = completeness_census(spec, k, kappas);
    EXPECT_TRUE(t.well_separated);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_TRUE(t.all_agree()) << k;
    for (const auto& r : t.rows) EXPECT_EQ(r.count, weight_sector_dim(spec, k));
  }
}

TEST(Census, FlagsCollidingInhomogeneities) {
  const auto spec = chain({{1, 1.0}, {1, 1.0}});
  const std::vector<Complex> kappas{1.3};
  const auto t = completeness_census(spec, 1, kappas);
  EXPECT_FALSE(t.well_separated);
  EXPECT_EQ(t.rows.size(), 1u);
}

TEST(Census, TwistSamplesDeterministic) {
  EXPECT_EQ(sample_twists(4, 9), sample_twists(4, 9));
  EXPECT_NE(sample_twists(4, 9), sample_twists(4, 10));
}
