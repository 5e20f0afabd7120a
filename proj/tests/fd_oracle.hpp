#pragma once
// Central finite difference in q for the M-fold product that defines BB(u;X).
// q0 +- delta is reached through the complex anisotropy
// gamma = gamma0 - i log(1 +- delta/q0), and eta^x = (1 +- delta/q0)^x.
#include "xxzroots/roots_of_unity.hpp"

namespace xxzroots::fd {

inline CMat shifted_product(const ChainSpec& spec, const RootCtx& ctx, Complex u, std::span<const Complex> x,
                            double delta) {
  const Complex log_eta = std::log(1.0 + delta / ctx.q0);
  const Complex gamma = ctx.gamma0 - kI * log_eta;
  ChainSpec s = spec;
  s.gamma = gamma;
  const auto m = build_monodromy(ComplexRing{gamma}, s, kDefaultDimensionCap);
  CMat prod = CMat::Identity(m.b.dim(), m.b.dim());
  for (int r = 0; r < ctx.M; ++r) {
    const Complex arg = u * qpow(gamma, 2.0 * r) * std::exp(x[static_cast<std::size_t>(r)] * log_eta);
    prod = prod * m.b.eval(arg);
  }
  return prod;
}

inline CMat finite_difference_bb(const ChainSpec& spec, const RootCtx& ctx, Complex u, std::span<const Complex> x,
                                 double delta = 1e-5) {
  return (shifted_product(spec, ctx, u, x, delta) - shifted_product(spec, ctx, u, x, -delta)) / (2.0 * delta);
}

}  // namespace xxzroots::fd
