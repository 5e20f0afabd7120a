#include <random>

#include <gtest/gtest.h>

#include "xxzroots/qalgebra.hpp"

using namespace xxzroots;

namespace {

ChainSpec chain(std::vector<Site> sites, Complex gamma = 0.7, Complex kappa = 1.0) {
  ChainSpec s;
  s.sites = std::move(sites);
  s.gamma = gamma;
  s.kappa = kappa;
  return s;
}

ChainSpec c2() { return chain({{1, {1.0, 0.0}}, {1, {2.3, 0.0}}}, 0.7, 1.3); }

std::vector<ChainSpec> desk_specs() {
  return {chain({{1, {1.0, 0.0}}}),
          c2(),
          chain({{1, {1.0, 0.0}}, {2, {2.3, 0.4}}}, 0.7, {0.8, 0.5}),
          chain({{2, {1.0, 0.0}}, {1, {0.6, -0.4}}, {1, {1.7, 0.2}}}, 0.55, {0.9, -0.3})};
}

double rel(const CMat& a, const CMat& b) { return (a - b).norm() / (1.0 + std::max(a.norm(), b.norm())); }

}  // namespace

TEST(SiteRep, SpinHalfRaisingAndWeights) {
  const auto rep = build_site_rep(ComplexRing{0.7}, 1);
  ASSERT_EQ(rep.dim(), 2);
  EXPECT_TRUE(near(rep.E(0, 1), 1.0, 1e-15));
  EXPECT_TRUE(near(rep.qH(0, 0), qpow(0.7, 0.5), 1e-15));
  EXPECT_TRUE(near(rep.qH(1, 1), qpow(0.7, -0.5), 1e-15));
}

TEST(SiteRep, SpinOneLoweringAtPiOverThree) {
  const auto rep = build_site_rep(ComplexRing{std::numbers::pi / 3}, 2);
  EXPECT_TRUE(near(rep.F(2, 1), 1.0, 1e-14));
  EXPECT_TRUE(near(rep.F(1, 0), 1.0, 1e-14));  // [2] = 2 cos(pi/3)
}

TEST(SiteRep, CommutatorIsQNumberOfTwoH) {
  for (int two_spin = 1; two_spin <= 4; ++two_spin)
    for (Complex g : {Complex(0.7), Complex(0.45, 0.1)}) {
      const auto rep = build_site_rep(ComplexRing{g}, two_spin);
      const Complex qd = qpow(g, 1.0) - qpow(g, -1.0);
      const CMat lhs = rep.E * rep.F - rep.F * rep.E;
      const CMat rhs = (rep.qH * rep.qH - rep.qHinv * rep.qHinv) / qd;
      EXPECT_LT(rel(lhs, rhs), 1e-10) << two_spin;
    }
}

TEST(SiteRep, ReducibleRepresentationThrows) {
  EXPECT_THROW(build_site_rep(ComplexRing{std::numbers::pi / 2}, 2), PreconditionError);
  EXPECT_NO_THROW(build_site_rep(ComplexRing{std::numbers::pi / 2}, 1));
}

TEST(Monodromy, SingleSpinHalfSite) {
  const Complex z{1.4, -0.3}, u{0.6, 0.9};
  const auto spec = chain({{1, z}});
  const auto m = build_monodromy(spec);
  const Complex qh = qpow(spec.gamma, 0.5), qhi = qpow(spec.gamma, -0.5);
  CMat a = CMat::Zero(2, 2);
  a(0, 0) = u * qh - z * qhi;
  a(1, 1) = u * qhi - z * qh;
  EXPECT_LT(rel(m.a.eval(u), a), 1e-14);
  const auto rep = build_site_rep(ComplexRing{spec.gamma}, 1);
  EXPECT_LT(rel(m.b.eval(u), u * (qpow(spec.gamma, 1.0) - qpow(spec.gamma, -1.0)) * rep.F), 1e-14);
}

TEST(Monodromy, VacuumEigenvaluesAndAnnihilation) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const auto& spec : desk_specs()) {
    const auto m = build_monodromy(spec);
    const CVec v = vacuum(spec);
    for (int i = 0; i < 5; ++i) {
      const Complex u{n(rng), n(rng)};
      EXPECT_LT((m.c.eval(u) * v).norm(), 1e-12 * (1.0 + m.c.eval(u).norm()));
      EXPECT_LT((m.a.eval(u) * v - script_A(spec, u) * v).norm(), 1e-12 * (1.0 + std::abs(script_A(spec, u))));
      EXPECT_LT((m.d.eval(u) * v - script_D(spec, u) * v).norm(), 1e-12 * (1.0 + std::abs(script_D(spec, u))));
    }
  }
}

TEST(Monodromy, DegreeBoundedBySiteCount) {
  for (const auto& spec : desk_specs()) {
    const auto m = build_monodromy(spec);
    for (const auto* p : {&m.a, &m.b, &m.c, &m.d}) EXPECT_LE(p->degree(), static_cast<int>(spec.size()));
  }
}

TEST(Monodromy, DimensionCapEnforced) {
  const auto spec = chain({{2, {1.0, 0.0}}, {2, {2.0, 0.0}}, {2, {3.0, 0.0}}});
  EXPECT_THROW(build_monodromy(spec, 26), PreconditionError);
  EXPECT_NO_THROW(build_monodromy(spec, 27));
}

TEST(Monodromy, JetBuildHasComplexValuePart) {
  const double g0 = std::numbers::pi / 3;
  auto spec = chain({{1, {1.0, 0.0}}, {1, {2.3, 0.2}}}, g0);
  const auto mj = build_monodromy(JetRing{g0}, spec, kDefaultDimensionCap);
  const auto mc = build_monodromy(spec);
  const Complex u{0.8, -0.4};
  const Mat<Jet1> bj = mj.b.eval(Jet1{u});
  const CMat val = bj.unaryExpr([](const Jet1& x) { return x.val; });
  EXPECT_LT(rel(val, mc.b.eval(u)), 1e-13);
}

TEST(OperatorPoly, ZeroAndConstant) {
  const auto z = OperatorPoly<Complex>::zero(3);
  EXPECT_EQ(z.eval(Complex(2.0, 1.0)).norm(), 0.0);
  const CMat c = CMat::Random(3, 3);
  const auto p = OperatorPoly<Complex>::constant(c);
  EXPECT_LT(rel(p.eval(Complex(-1.3, 0.7)), c), 1e-15);
}

TEST(OperatorPoly, JetEvaluationGivesDerivative) {
  std::vector<CMat> coeffs;
  for (int d = 0; d < 4; ++d) coeffs.push_back(CMat::Random(3, 3));
  const OperatorPoly<Complex> p(3, coeffs);
  const Complex u0{0.4, 1.1};
  const Mat<Jet1> j = eval_op_poly(p, Jet1{u0, 1.0});
  const CMat val = j.unaryExpr([](const Jet1& x) { return x.val; });
  const CMat der = j.unaryExpr([](const Jet1& x) { return x.der; });
  CMat expect = CMat::Zero(3, 3);
  for (int d = 1; d < 4; ++d) expect += static_cast<double>(d) * std::pow(u0, d - 1) * coeffs[d];
  EXPECT_LT(rel(val, p.eval(u0)), 1e-14);
  EXPECT_LT(rel(der, expect), 1e-13);
  EXPECT_LT(rel(der, p.derivative().eval(u0)), 1e-13);
}

TEST(Transfer, ZeroTwistIsA) {
  const auto spec = c2();
  const auto m = build_monodromy(spec);
  const Complex u{0.3, 0.5};
  EXPECT_LT(rel(transfer_matrix(m, 0.0, u), m.a.eval(u)), 1e-15);
}

TEST(Transfer, VacuumEigenvector) {
  for (const auto& spec : desk_specs()) {
    const auto m = build_monodromy(spec);
    const Complex u{-0.7, 0.2};
    const CVec v = vacuum(spec);
    const Complex lam = script_A(spec, u) + spec.kappa * script_D(spec, u);
    EXPECT_LT((transfer_matrix(m, spec.kappa, u) * v - lam * v).norm(), 1e-12 * (1.0 + std::abs(lam)));
  }
}

TEST(Transfer, CommutingFamilyOnTwoSite) {
  const auto spec = c2();
  const auto m = build_monodromy(spec);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const CMat tu = transfer_matrix(m, spec.kappa, Complex(n(rng), n(rng)));
    const CMat tv = transfer_matrix(m, spec.kappa, Complex(n(rng), n(rng)));
    EXPECT_LT((tu * tv - tv * tu).norm() / (tu * tv).norm(), 1e-10);
  }
}

TEST(ScriptA, VanishesAtShiftedInhomogeneity) {
  const auto spec = chain({{1, {1.0, 0.0}}, {2, {2.3, 0.4}}});
  for (const auto& s : spec.sites)
    EXPECT_LT(std::abs(script_A(spec, s.z * qpow(spec.gamma, -s.two_spin))), 1e-12);
}

TEST(ScriptA, SingleSiteAtOne) {
  const auto spec = chain({{1, {1.0, 0.0}}});
  EXPECT_TRUE(near(script_A(spec, 1.0), 2.0 * kI * std::sin(0.35), 1e-14));
}

TEST(ScriptA, EmptyChainIsOne) {
  const auto spec = chain({});
  EXPECT_EQ(script_A(spec, Complex(0.3, 0.1)), Complex(1.0));
  EXPECT_EQ(script_D(spec, Complex(0.3, 0.1)), Complex(1.0));
}

TEST(WeightSectors, Dimensions) {
  EXPECT_EQ(weight_sector_dim(chain({{1, 1.0}, {1, 2.0}}), 0), 1u);
  EXPECT_EQ(weight_sector_dim(chain({{1, 1.0}, {1, 2.0}}), 1), 2u);
  EXPECT_EQ(weight_sector_dim(chain({{2, 1.0}}), 2), 1u);
  for (const auto& spec : desk_specs()) {
    std::size_t total = 0;
    for (int k = 0; k <= spec.two_spin_total(); ++k) {
      EXPECT_EQ(weight_sector_dim(spec, k), sector_indices(spec, k).size());
      total += weight_sector_dim(spec, k);
    }
    EXPECT_EQ(total, spec.dimension());
  }
}

TEST(Vacuum, UnitVectorOfTopWeight) {
  const auto spec = chain({{1, 1.0}});
  const CVec v = vacuum(spec);
  EXPECT_EQ(v(0), Complex(1.0));
  EXPECT_EQ(v(1), Complex(0.0));
  for (const auto& s : desk_specs()) {
    const CVec w = vacuum(s);
    EXPECT_LT((total_weight_operator(s) * w - s.spin_total() * w).norm(), 1e-14);
  }
}

TEST(Vacuum, BLowersWeightByOne) {
  for (const auto& spec : desk_specs()) {
    const auto m = build_monodromy(spec);
    const CMat h = total_weight_operator(spec);
    const CMat b = m.b.eval(Complex(0.9, -0.2));
    EXPECT_LT((h * b - b * (h - CMat::Identity(h.rows(), h.cols()))).norm(), 1e-12 * (1.0 + b.norm()));
  }
}

TEST(ChainSpec, ValidationRejectsBadInput) {
  EXPECT_THROW(chain({{1, 0.0}}).validate(), PreconditionError);
  EXPECT_THROW(chain({{1, 1.0}}, 0.7, 0.0).validate(), PreconditionError);
  EXPECT_THROW(chain({{2, 1.0}}, std::numbers::pi / 2).validate(), PreconditionError);
  EXPECT_NO_THROW(c2().validate());
}

TEST(ChainSpec, WellSeparatedDetectsCollisions) {
  EXPECT_TRUE(c2().well_separated());
  EXPECT_FALSE(chain({{1, 1.0}, {1, 1.0}}).well_separated());
  // z_2 = q^2 z_1 makes q^{1} z_1 (r = 1) collide with q^{-1} z_2 (s = 0).
  EXPECT_FALSE(chain({{1, 1.0}, {1, qpow(0.7, 2.0)}}).well_separated());
}
