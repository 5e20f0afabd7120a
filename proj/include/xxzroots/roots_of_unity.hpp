#pragma once
// Root-of-unity construction: q0 = exp(i pi K / M), so that q0^2 is a primitive
// M-th root of unity and B(u) B(u q0^2) ... B(u q0^{2M-2}) = 0.
//
// The creation operator BB(u; X) is the first-order coefficient in eps = q - q0
// of the product B(u eta^{x_1}) B(u q^2 eta^{x_2}) ... B(u q^{2M-2} eta^{x_M}),
// eta = q/q0, taken exactly in the Jet1 ring.
#include <numeric>
#include <string>
#include <vector>

#include "xxzroots/bethe.hpp"

namespace xxzroots {

struct RootCtx {
  int M = 2;
  int K = 1;
  double gamma0 = std::numbers::pi / 2;
  Complex q0{0.0, 1.0};

  /// q0^x = exp(i gamma0 x)
  Complex qpow(Complex x) const { return xxzroots::qpow(gamma0, x); }
};

inline RootCtx make_root_ctx(int M, int K) {
  if (M <= 1) throw PreconditionError("root_of_unity.M must be > 1");
  if (std::gcd(M, K) != 1) throw PreconditionError("root_of_unity: gcd(M, K) must be 1");
  RootCtx c;
  c.M = M;
  c.K = K;
  c.gamma0 = std::numbers::pi * K / M;
  c.q0 = std::exp(kI * c.gamma0);
  return c;
}

/// Copy of spec with gamma set to gamma0.
inline ChainSpec at_root(ChainSpec spec, const RootCtx& ctx) {
  spec.gamma = ctx.gamma0;
  return spec;
}

inline void require_root_gamma(const ChainSpec& spec, const RootCtx& ctx) {
  if (std::abs(spec.gamma - Complex(ctx.gamma0)) > 1e-12)
    throw PreconditionError("gamma must equal pi*K/M for the root-of-unity operations");
}

/// kappa = q0^{2(p - l_tot)}
inline Complex twist_for(const ChainSpec& spec, const RootCtx& ctx, int p) {
  return ctx.qpow(2.0 * p - spec.two_spin_total());
}

/// Smallest p in [0, M) with kappa = q0^{2(p - l_tot)}, if any.
inline std::optional<int> twist_exponent(const ChainSpec& spec, const RootCtx& ctx, double tol = 1e-10) {
  for (int p = 0; p < ctx.M; ++p)
    if (near(spec.kappa, twist_for(spec, ctx, p), tol)) return p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Nilpotency.

struct ProductNorms {
  CMat product;
  double norm = 0.0;
  double scale = 0.0;  // prod_r ||B(u q^{2r})||
};

/// B(u) B(u q^2) ... B(u q^{2M-2}) at the spec's own q.
inline ProductNorms b_string_product(const ChainSpec& spec, const Monodromy<Complex>& m, Complex u, int M) {
  ProductNorms out;
  out.product = CMat::Identity(m.dim(), m.dim());
  out.scale = 1.0;
  for (int r = 0; r < M; ++r) {
    const CMat b = m.b.eval(u * qpow(spec.gamma, 2.0 * r));
    out.scale *= b.norm();
    out.product = out.product * b;
  }
  out.norm = out.product.norm();
  return out;
}

inline ProductNorms nilpotent_product(const ChainSpec& spec, const RootCtx& ctx, const Monodromy<Complex>& m,
                                      Complex u) {
  require_root_gamma(spec, ctx);
  return b_string_product(spec, m, u, ctx.M);
}

// ---------------------------------------------------------------------------
// The limit creation operator.

namespace detail {
inline CMat jet_value(const Mat<Jet1>& m) {
  return m.unaryExpr([](const Jet1& j) { return j.val; });
}
inline CMat jet_derivative(const Mat<Jet1>& m) {
  return m.unaryExpr([](const Jet1& j) { return j.der; });
}
}  // namespace detail

/// BB(u; X) for a fixed chain and root of unity. B(u) is built once over Jet1.
class LimitCreationOperator {
 public:
  LimitCreationOperator(const ChainSpec& spec, const RootCtx& ctx, std::size_t cap = kDefaultDimensionCap)
      : ctx_(ctx), ring_(ctx.gamma0), b_(build_monodromy(ring_, spec, cap).b) {}

  const RootCtx& ctx() const { return ctx_; }
  Eigen::Index dim() const { return b_.dim(); }

  /// The jet arguments u q^{2r} eta^{x_{r+1}}, r = 0..M-1.
  std::vector<Jet1> arguments(Complex u, std::span<const Complex> x) const {
    if (static_cast<int>(x.size()) != ctx_.M)
      throw PreconditionError("BB(u;X): X must have M = " + std::to_string(ctx_.M) + " entries");
    std::vector<Jet1> args;
    for (int r = 0; r < ctx_.M; ++r) {
      const Jet1 eta_x{1.0, x[static_cast<std::size_t>(r)] / ctx_.q0};
      args.push_back(Jet1{u} * ring_.qpow(2.0 * r) * eta_x);
    }
    return args;
  }

  /// Returns the eps-coefficient of the product. The value part vanishes by
  /// nilpotency; a violation above 1e-9 * prod||B|| throws.
  CMat operator()(Complex u, std::span<const Complex> x) const {
    Mat<Jet1> prod = Mat<Jet1>::Identity(dim(), dim());
    double scale = 1.0;
    for (const auto& arg : arguments(u, x)) {
      const Mat<Jet1> b = b_.eval(arg);
      scale *= detail::jet_value(b).norm();
      prod = prod * b;
    }
    last_value_norm_ = detail::jet_value(prod).norm();
    last_scale_ = scale;
    if (last_value_norm_ > 1e-9 * std::max(scale, 1e-300))
      throw PreconditionError("BB(u;X): value part of the product does not vanish, nilpotency fails");
    return detail::jet_derivative(prod);
  }

  double last_value_norm() const { return last_value_norm_; }
  double last_scale() const { return last_scale_; }

 private:
  RootCtx ctx_;
  JetRing ring_;
  OperatorPoly<Jet1> b_;
  mutable double last_value_norm_ = 0.0;
  mutable double last_scale_ = 0.0;
};

inline CMat bb_operator(const ChainSpec& spec, const RootCtx& ctx, Complex u, std::span<const Complex> x) {
  return LimitCreationOperator(spec, ctx)(u, x);
}

// ---------------------------------------------------------------------------
// P, Q_n, F_n, G_n.

/// Ascending coefficients of P(u) = prod_i prod_{r=0}^{2l_i-1} (u - z_i q0^{2(l_i - r)}).
inline std::vector<Complex> poly_P(const ChainSpec& spec, const RootCtx& ctx) {
  std::vector<Complex> p{1.0};
  for (const auto& s : spec.sites) {
    for (int r = 0; r < s.two_spin; ++r) {
      const Complex root = s.z * ctx.qpow(static_cast<double>(s.two_spin - 2 * r));
      std::vector<Complex> next(p.size() + 1, 0.0);
      for (std::size_t i = 0; i < p.size(); ++i) {
        next[i] -= root * p[i];
        next[i + 1] += p[i];
      }
      p = std::move(next);
    }
  }
  return p;
}

inline Complex eval_poly(std::span<const Complex> coeffs, Complex u) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

/// Q_n(u; t) = u^{k-n} P(u) / prod_a (u - t_a)(u - t_a q0^2)
inline Complex q_fn(const ChainSpec& spec, const RootCtx& ctx, int n, Complex u, std::span<const Complex> t) {
  const auto p = poly_P(spec, ctx);
  const Complex q2 = ctx.qpow(2.0);
  Complex den = 1.0;
  for (const auto& ta : t) den *= (u - ta) * (u - ta * q2);
  const double tau = classification_threshold(spec);
  if (std::abs(den) <= tau * tau) throw PreconditionError("Q_n: u is at a pole");
  return std::pow(u, static_cast<int>(t.size()) - n) * eval_poly(p, u) / den;
}

/// F_n(u) = (1/M) sum_{r=0}^{M-1} Q_n(u q0^{2r})
inline Complex f_fn(const ChainSpec& spec, const RootCtx& ctx, int n, Complex u, std::span<const Complex> t) {
  Complex acc = 0.0;
  for (int r = 0; r < ctx.M; ++r) acc += q_fn(spec, ctx, n, u * ctx.qpow(2.0 * r), t);
  return acc / static_cast<double>(ctx.M);
}

/// G_n(u) = (1/M) sum_{r=1}^{M-1} r Q_n(u q0^{2r})
inline Complex g_fn(const ChainSpec& spec, const RootCtx& ctx, int n, Complex u, std::span<const Complex> t) {
  Complex acc = 0.0;
  for (int r = 1; r < ctx.M; ++r) acc += static_cast<double>(r) * q_fn(spec, ctx, n, u * ctx.qpow(2.0 * r), t);
  return acc / static_cast<double>(ctx.M);
}

// ---------------------------------------------------------------------------
// Schedules.

struct XSchedule {
  int p = 0;
  int M = 2;
  std::vector<Complex> u;               // u_1..u_m
  std::vector<std::vector<Complex>> X;  // X_i = (x_{i1}, ..., x_{iM})

  std::size_t m() const { return u.size(); }

  /// x_{i,r} for r = 0..M+1 with x_{i0} = x_{iM} + 2M and x_{i,M+1} = x_{i1} - 2M (i is 0-based).
  Complex x(std::size_t i, int r) const {
    const auto& xi = X.at(i);
    if (r == 0) return xi.back() + 2.0 * M;
    if (r == M + 1) return xi.front() - 2.0 * M;
    return xi.at(static_cast<std::size_t>(r - 1));
  }
};

/// x_r(u_i) = 2 (1 - r - G_p(u_i q0^{2r}) / F_p(u_i)), r = 1..M.
inline XSchedule x_schedule(const ChainSpec& spec, const RootCtx& ctx, int p, std::span<const Complex> t,
                            std::span<const Complex> u_list) {
  require_root_gamma(spec, ctx);
  if (!near(spec.kappa, twist_for(spec, ctx, p), 1e-10))
    throw PreconditionError("x_schedule: kappa != q0^{2(p - l_tot)} for p = " + std::to_string(p));
  XSchedule s;
  s.p = p;
  s.M = ctx.M;
  for (std::size_t i = 0; i < u_list.size(); ++i) {
    const Complex ui = u_list[i];
    const Complex uM = std::pow(ui, ctx.M);
    for (std::size_t a = 0; a < t.size(); ++a)
      if (near(uM, std::pow(t[a], ctx.M), 1e-10))
        throw PreconditionError("x_schedule: u_" + std::to_string(i + 1) + "^M = t_" + std::to_string(a + 1) + "^M");
    const Complex f = f_fn(spec, ctx, p, ui, t);
    double fscale = 0.0;
    for (int r = 0; r < ctx.M; ++r) fscale += std::abs(q_fn(spec, ctx, p, ui * ctx.qpow(2.0 * r), t));
    if (std::abs(f) <= 1e-10 * fscale / ctx.M)
      throw PreconditionError("x_schedule: F_p(u_" + std::to_string(i + 1) + ") = 0");
    std::vector<Complex> xi;
    for (int r = 1; r <= ctx.M; ++r)
      xi.push_back(2.0 * (1.0 - r - g_fn(spec, ctx, p, ui * ctx.qpow(2.0 * r), t) / f));
    s.u.push_back(ui);
    s.X.push_back(std::move(xi));
  }
  return s;
}

enum class XeqStatus { ok, not_solvable, incompatible_twist };

inline const char* to_string(XeqStatus s) {
  switch (s) {
    case XeqStatus::ok: return "ok";
    case XeqStatus::not_solvable: return "not_solvable";
    case XeqStatus::incompatible_twist: return "incompatible_twist";
  }
  return "unknown";
}

struct XeqResult {
  XeqStatus status = XeqStatus::ok;
  std::vector<Complex> x;  // x_1..x_M
  std::vector<Complex> y;  // y_1..y_M
  Complex solvability_sum{};
};

/// General solution of the cancellation system for one u_i:
///   x_r = x_start - 2M (sum_{s=1}^{r-1} y_1..y_s) / (sum_{s=0}^{M-1} y_1..y_s).
inline XeqResult solve_xeq(const ChainSpec& spec, const RootCtx& ctx, std::span<const Complex> t, Complex ui,
                           Complex x_start) {
  require_root_gamma(spec, ctx);
  XeqResult out;
  if (!near(std::pow(spec.kappa, ctx.M), ctx.qpow(static_cast<double>(ctx.M) * spec.two_spin_total()), 1e-10)) {
    out.status = XeqStatus::incompatible_twist;
    return out;
  }
  const Complex q2 = ctx.qpow(2.0);
  for (int r = 1; r <= ctx.M; ++r) {
    const Complex w = ui * ctx.qpow(2.0 * r - 2);
    Complex y = script_A(spec, w) / (spec.kappa * script_D(spec, w));
    for (const auto& ta : t) y *= (w - ta * q2) / (w * q2 - ta);
    out.y.push_back(y);
  }
  // partial[s] = y_1 ... y_s, partial[0] = 1
  std::vector<Complex> partial{1.0};
  for (int s = 1; s < ctx.M; ++s) partial.push_back(partial.back() * out.y[static_cast<std::size_t>(s - 1)]);
  Complex total = 0.0;
  double mag = 0.0;
  for (const auto& v : partial) {
    total += v;
    mag += std::abs(v);
  }
  out.solvability_sum = total;
  if (std::abs(total) <= 1e-12 * mag) {
    out.status = XeqStatus::not_solvable;
    return out;
  }
  Complex run = 0.0;
  for (int r = 1; r <= ctx.M; ++r) {
    if (r >= 2) run += partial[static_cast<std::size_t>(r - 1)];
    out.x.push_back(x_start - 2.0 * ctx.M * run / total);
  }
  return out;
}

/// Largest relative defect of the cancellation system for one u_i over r = 0..M-1:
///   (x_{r+1} - x_r) A(w) prod (w - t_a q0^2)/(w - t_a)
///     = kappa (x_{r+2} - x_{r+1}) D(w) prod (w q0^2 - t_a)/(w - t_a),  w = u_i q0^{2r}.
inline double xeq_residual(const ChainSpec& spec, const RootCtx& ctx, std::span<const Complex> t, Complex ui,
                           std::span<const Complex> x) {
  if (static_cast<int>(x.size()) != ctx.M) throw PreconditionError("xeq_residual: need M values");
  XSchedule s;
  s.M = ctx.M;
  s.u = {ui};
  s.X = {std::vector<Complex>(x.begin(), x.end())};
  const Complex q2 = ctx.qpow(2.0);
  double worst = 0.0;
  for (int r = 0; r < ctx.M; ++r) {
    const Complex w = ui * ctx.qpow(2.0 * r);
    Complex lhs = (s.x(0, r + 1) - s.x(0, r)) * script_A(spec, w);
    Complex rhs = spec.kappa * (s.x(0, r + 2) - s.x(0, r + 1)) * script_D(spec, w);
    for (const auto& ta : t) {
      lhs *= (w - ta * q2) / (w - ta);
      rhs *= (w * q2 - ta) / (w - ta);
    }
    worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Degenerate vectors.

/// BB(u_1;X_1) ... BB(u_m;X_m) |t_1..t_k>
inline CVec degenerate_vector(const ChainSpec& spec, const Monodromy<Complex>& m, const LimitCreationOperator& bb,
                              std::span<const Complex> t, std::span<const Complex> u_list,
                              std::span<const std::vector<Complex>> xs) {
  if (u_list.size() != xs.size()) throw PreconditionError("degenerate_vector: u and X lists differ in length");
  CVec psi = bethe_vector(spec, m, t);
  for (std::size_t i = u_list.size(); i-- > 0;) psi = bb(u_list[i], xs[i]) * psi;
  return psi;
}

inline CVec degenerate_vector(const ChainSpec& spec, const Monodromy<Complex>& m, const LimitCreationOperator& bb,
                              std::span<const Complex> t, const XSchedule& sched) {
  return degenerate_vector(spec, m, bb, t, sched.u, sched.X);
}

struct DegenerateCheck {
  double max_residual = 0.0;  // max_u ||T(u) Psi - q0^{mM} Lambda_t(u) Psi|| / ||Psi||
  double vector_norm = 0.0;
  bool zero_vector = false;
  std::vector<Complex> eigenvalues;
  CVec vector;
};

/// Checks T(u) Psi = q0^{mM} Lambda_t(u) Psi for the degenerate family vector
/// built from the x-schedule of integer p.
inline DegenerateCheck verify_bam(const ChainSpec& spec, const RootCtx& ctx, const Monodromy<Complex>& m,
                                  const LimitCreationOperator& bb, int p, std::span<const Complex> t,
                                  std::span<const Complex> u_list, std::span<const Complex> u_samples) {
  const XSchedule sched = x_schedule(spec, ctx, p, t, u_list);
  DegenerateCheck out;
  out.vector = degenerate_vector(spec, m, bb, t, sched);
  double scale = 1.0;
  for (const auto& ta : t) scale *= m.b.eval(ta).norm();
  // The natural size of BB(u;X) is prod ||B(u q0^{2r})|| times the spread of X;
  // its own norm can be accidentally small and is not a safe yardstick.
  for (std::size_t i = 0; i < sched.m(); ++i) {
    bb(sched.u[i], sched.X[i]);
    double xmax = 0.0;
    for (const auto& x : sched.X[i]) xmax = std::max(xmax, std::abs(x));
    scale *= bb.last_scale() * (1.0 + xmax);
  }
  out.vector_norm = out.vector.norm();
  out.zero_vector = is_zero_state(out.vector, scale);
  if (out.zero_vector) return out;
  const Complex pref = ctx.qpow(static_cast<double>(sched.m()) * ctx.M);
  for (const auto& u : u_samples) {
    const Complex lambda = pref * eigenvalue_Tbv(spec, t, u);
    out.eigenvalues.push_back(lambda);
    const CVec r = transfer_matrix(m, spec.kappa, u) * out.vector - lambda * out.vector;
    out.max_residual = std::max(out.max_residual, r.norm() / out.vector_norm);
  }
  return out;
}

/// Action of A(u) and D(u) on BB(u_1;X_1)..BB(u_m;X_m)|t> for arbitrary t and X,
/// with both kinds of exchange terms built by direct construction.
inline ActionResiduals verify_degenerate_action(const ChainSpec& spec, const RootCtx& ctx,
                                                const Monodromy<Complex>& m, const LimitCreationOperator& bb,
                                                std::span<const Complex> t, std::span<const Complex> u_list,
                                                std::span<const std::vector<Complex>> xs, Complex u) {
  require_root_gamma(spec, ctx);
  const int M = ctx.M;
  const Complex q = ctx.q0;
  const Complex qi = 1.0 / ctx.q0;
  const Complex qd = q - qi;
  const std::size_t mm = u_list.size();
  const Complex pref = ctx.qpow(static_cast<double>(mm) * M);

  XSchedule sched;
  sched.M = M;
  sched.u.assign(u_list.begin(), u_list.end());
  sched.X.assign(xs.begin(), xs.end());

  const CVec psi = degenerate_vector(spec, m, bb, t, u_list, xs);

  Complex a_diag = script_A(spec, u);
  Complex d_diag = script_D(spec, u);
  for (const auto& ta : t) {
    a_diag *= (u * qi - ta * q) / (u - ta);
    d_diag *= (u * q - ta * qi) / (u - ta);
  }
  CVec rhs_a = a_diag * psi;
  CVec rhs_d = d_diag * psi;

  // First kind: t_a replaced by u.
  for (std::size_t a = 0; a < t.size(); ++a) {
    std::vector<Complex> hatted{u};
    Complex ca = qd * t[a] / (u - t[a]) * script_A(spec, t[a]);
    Complex cd = -qd * t[a] / (u - t[a]) * script_D(spec, t[a]);
    for (std::size_t b = 0; b < t.size(); ++b) {
      if (b == a) continue;
      hatted.push_back(t[b]);
      ca *= (t[a] * qi - t[b] * q) / (t[a] - t[b]);
      cd *= (t[a] * q - t[b] * qi) / (t[a] - t[b]);
    }
    const CVec exch = degenerate_vector(spec, m, bb, hatted, u_list, xs);
    rhs_a += ca * exch;
    rhs_d += cd * exch;
  }

  // Second kind: BB(u_i;X_i) replaced by B(u) and M-1 of the B(u_i q0^{2s}).
  std::vector<Complex> with_u{u};
  with_u.insert(with_u.end(), t.begin(), t.end());
  for (std::size_t i = 0; i < mm; ++i) {
    std::vector<Complex> other_u;
    std::vector<std::vector<Complex>> other_x;
    for (std::size_t j = 0; j < mm; ++j) {
      if (j == i) continue;
      other_u.push_back(u_list[j]);
      other_x.push_back(xs[j]);
    }
    const CVec base = degenerate_vector(spec, m, bb, with_u, other_u, other_x);
    for (int r = 0; r < M; ++r) {
      const Complex w = u_list[i] * ctx.qpow(2.0 * r);
      CVec v = base;
      for (int s = 0; s < M; ++s)
        if (s != r) v = m.b.eval(u_list[i] * ctx.qpow(2.0 * s)) * v;
      Complex ca = qi * w / (u - w) * (sched.x(i, r + 1) - sched.x(i, r)) * script_A(spec, w);
      Complex cd = qi * w / (u - w) * (sched.x(i, r + 2) - sched.x(i, r + 1)) * script_D(spec, w);
      for (const auto& ta : t) {
        ca *= (w * qi - ta * q) / (w - ta);
        cd *= (w * q - ta * qi) / (w - ta);
      }
      rhs_a -= ca * v;
      rhs_d += cd * v;
    }
  }
  rhs_a *= pref;
  rhs_d *= pref;

  const CVec lhs_a = m.a.eval(u) * psi;
  const CVec lhs_d = m.d.eval(u) * psi;
  auto rel = [](const CVec& x, const CVec& y) {
    return (x - y).norm() / std::max({x.norm(), y.norm(), 1e-300});
  };
  return {rel(lhs_a, rhs_a), rel(lhs_d, rhs_d)};
}

}  // namespace xxzroots
