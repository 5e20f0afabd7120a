#pragma once
// Bethe equations, their numerical solution, classification of solutions,
// Bethe vectors and the eigenvalue formula for T(u).
#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "xxzroots/qalgebra.hpp"

namespace xxzroots {

// ---------------------------------------------------------------------------
// Residuals.

/// a-th component: A(t_a) prod_{b!=a}(t_a - t_b q^2) - kappa D(t_a) prod_{b!=a}(t_a q^2 - t_b).
template <ScalarRing R>
std::vector<typename R::Scalar> bethe_residual(const R& ring, const ChainSpec& spec,
                                               std::span<const typename R::Scalar> t) {
  using S = typename R::Scalar;
  const S q2 = ring.qpow(2.0);
  const S kappa = ring.lift(spec.kappa);
  std::vector<S> out;
  out.reserve(t.size());
  for (std::size_t a = 0; a < t.size(); ++a) {
    S left = script_A(ring, spec, t[a]);
    S right = kappa * script_D(ring, spec, t[a]);
    for (std::size_t b = 0; b < t.size(); ++b) {
      if (b == a) continue;
      left *= t[a] - t[b] * q2;
      right *= t[a] * q2 - t[b];
    }
    out.push_back(left - right);
  }
  return out;
}

inline std::vector<Complex> bethe_residual(const ChainSpec& spec, std::span<const Complex> t) {
  return bethe_residual(ComplexRing{spec.gamma}, spec, t);
}

/// Magnitude of the two sides of each equation; used to make residuals relative.
inline std::vector<double> bethe_residual_scale(const ChainSpec& spec, std::span<const Complex> t) {
  const Complex q2 = qpow(spec.gamma, 2.0);
  std::vector<double> out;
  for (std::size_t a = 0; a < t.size(); ++a) {
    double left = std::abs(script_A(spec, t[a]));
    double right = std::abs(spec.kappa * script_D(spec, t[a]));
    for (std::size_t b = 0; b < t.size(); ++b) {
      if (b == a) continue;
      left *= std::abs(t[a] - t[b] * q2);
      right *= std::abs(t[a] * q2 - t[b]);
    }
    out.push_back(left + right + 1e-300);
  }
  return out;
}

/// max_a |residual_a| / scale_a
inline double bethe_relative_residual(const ChainSpec& spec, std::span<const Complex> t) {
  const auto r = bethe_residual(spec, t);
  const auto s = bethe_residual_scale(spec, t);
  double m = 0.0;
  for (std::size_t a = 0; a < r.size(); ++a) m = std::max(m, std::abs(r[a]) / s[a]);
  return m;
}

// ---------------------------------------------------------------------------
// Classification.

struct BetheFlags {
  bool offdiagonal = true;
  bool admissible = true;
  std::vector<int> hits_plus_points;   // sites i with some t_a ~ q^{2l_i} z_i
  std::vector<int> hits_minus_points;  // sites i with some t_a ~ q^{-2l_i} z_i
};

/// tau_zero = tau_sep = 1e-8 (1 + max|z_i|)
inline double classification_threshold(const ChainSpec& spec) { return 1e-8 * (1.0 + spec.max_abs_z()); }

inline BetheFlags classify(const ChainSpec& spec, std::span<const Complex> t) {
  const double tau = classification_threshold(spec);
  const Complex q2 = qpow(spec.gamma, 2.0);
  BetheFlags f;
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (std::abs(t[a]) <= tau) f.admissible = false;
    for (std::size_t b = 0; b < t.size(); ++b) {
      if (a != b && std::abs(t[a] - t[b]) <= tau) f.offdiagonal = false;
      if (std::abs(t[a] - q2 * t[b]) <= tau) f.admissible = false;
    }
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& s = spec.sites[i];
    const Complex plus = qpow(spec.gamma, s.two_spin) * s.z;
    const Complex minus = qpow(spec.gamma, -s.two_spin) * s.z;
    for (const auto& ta : t) {
      if (std::abs(ta - plus) <= tau) {
        f.hits_plus_points.push_back(static_cast<int>(i));
        break;
      }
    }
    for (const auto& ta : t) {
      if (std::abs(ta - minus) <= tau) {
        f.hits_minus_points.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Bethe vectors and eigenvalues.

/// |t_1, ..., t_k> = B(t_1) ... B(t_k) v_0 x ... x v_0
inline CVec bethe_vector(const ChainSpec& spec, const Monodromy<Complex>& m, std::span<const Complex> t) {
  CVec psi = vacuum(spec);
  for (std::size_t a = t.size(); a-- > 0;) psi = m.b.eval(t[a]) * psi;
  return psi;
}

/// Numerator and denominator of Lambda(u) written as a single fraction:
///   [A(u) prod(u q^{-1} - t_a q) + kappa D(u) prod(u q - t_a q^{-1})] / prod(u - t_a).
template <ScalarRing R>
std::pair<typename R::Scalar, typename R::Scalar> eigenvalue_fraction(const R& ring, const ChainSpec& spec,
                                                                      std::span<const Complex> t,
                                                                      const typename R::Scalar& u) {
  using S = typename R::Scalar;
  const S q = ring.qpow(1.0);
  const S qi = ring.qpow(-1.0);
  S left = script_A(ring, spec, u);
  S right = ring.lift(spec.kappa) * script_D(ring, spec, u);
  S den = ring.lift(1.0);
  for (const auto& ta : t) {
    const S tj = ring.lift(ta);
    left *= u * qi - tj * q;
    right *= u * q - tj * qi;
    den *= u - tj;
  }
  return {left + right, den};
}

/// Lambda(u) for rapidities t. Near a rapidity the removable singularity is
/// resolved by l'Hopital on the single-fraction form, provided the Bethe
/// equations hold; otherwise PreconditionError (pole).
inline Complex eigenvalue_Tbv(const ChainSpec& spec, std::span<const Complex> t, Complex u) {
  const double tau = classification_threshold(spec);
  bool at_pole = false;
  for (const auto& ta : t)
    if (std::abs(u - ta) <= tau) at_pole = true;
  if (!at_pole) {
    const auto [num, den] = eigenvalue_fraction(ComplexRing{spec.gamma}, spec, t, u);
    return num / den;
  }
  if (bethe_relative_residual(spec, t) > 1e-6)
    throw PreconditionError("eigenvalue_Tbv: u is a pole and the Bethe equations do not hold");
  const auto [num, den] = eigenvalue_fraction(DualRing{spec.gamma}, spec, t, Jet1{u, 1.0});
  if (std::abs(den.der) < 1e-300) throw PreconditionError("eigenvalue_Tbv: higher-order pole (diagonal rapidities)");
  return num.der / den.der;
}

/// Residue of Lambda at u = t_a; vanishes when t solves the Bethe equations.
inline Complex eigenvalue_residue(const ChainSpec& spec, std::span<const Complex> t, std::size_t a) {
  const auto [num, den] = eigenvalue_fraction(ComplexRing{spec.gamma}, spec, t, t[a]);
  (void)den;
  Complex rest = 1.0;
  for (std::size_t b = 0; b < t.size(); ++b)
    if (b != a) rest *= t[a] - t[b];
  return num / rest;
}

struct EigenCheck {
  double max_residual = 0.0;  // max_u ||T(u) psi - Lambda(u) psi|| / ||psi||
  double vector_norm = 0.0;
  bool zero_vector = false;
  std::vector<Complex> eigenvalues;  // Lambda at each sample
};

/// Decides whether a product of k creation operators applied to the vacuum
/// vanished: ||psi|| <= 1e-12 * prod ||B(t_a)||.
inline bool is_zero_state(const CVec& psi, double operator_scale) {
  return psi.norm() <= 1e-12 * std::max(operator_scale, 1e-300);
}

inline EigenCheck verify_eigen(const ChainSpec& spec, const Monodromy<Complex>& m, std::span<const Complex> t,
                               std::span<const Complex> u_samples) {
  EigenCheck out;
  const CVec psi = bethe_vector(spec, m, t);
  double op_scale = 1.0;
  for (const auto& ta : t) op_scale *= m.b.eval(ta).norm();
  out.vector_norm = psi.norm();
  out.zero_vector = is_zero_state(psi, op_scale);
  if (out.zero_vector) return out;
  for (const auto& u : u_samples) {
    const Complex lambda = eigenvalue_Tbv(spec, t, u);
    out.eigenvalues.push_back(lambda);
    const CVec r = transfer_matrix(m, spec.kappa, u) * psi - lambda * psi;
    out.max_residual = std::max(out.max_residual, r.norm() / psi.norm());
  }
  return out;
}

struct ActionResiduals {
  double a_residual = 0.0;
  double d_residual = 0.0;
};

/// Checks the action of A(u) and D(u) on |t_1..t_k> for arbitrary t, including
/// the exchange terms with |u, t_1..^t_a..t_k>. Residuals are relative to the
/// larger side.
inline ActionResiduals verify_action_formulas(const ChainSpec& spec, const Monodromy<Complex>& m,
                                              std::span<const Complex> t, Complex u) {
  const Complex q = qpow(spec.gamma, 1.0);
  const Complex qi = qpow(spec.gamma, -1.0);
  const Complex qd = q - qi;
  const CVec psi = bethe_vector(spec, m, t);

  Complex a_diag = script_A(spec, u);
  Complex d_diag = script_D(spec, u);
  for (const auto& ta : t) {
    a_diag *= (u * qi - ta * q) / (u - ta);
    d_diag *= (u * q - ta * qi) / (u - ta);
  }
  CVec rhs_a = a_diag * psi;
  CVec rhs_d = d_diag * psi;
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
    const CVec exch = bethe_vector(spec, m, hatted);
    rhs_a += ca * exch;
    rhs_d += cd * exch;
  }
  const CVec lhs_a = m.a.eval(u) * psi;
  const CVec lhs_d = m.d.eval(u) * psi;
  auto rel = [](const CVec& x, const CVec& y) {
    return (x - y).norm() / std::max({x.norm(), y.norm(), 1e-300});
  };
  return {rel(lhs_a, rhs_a), rel(lhs_d, rhs_d)};
}

// ---------------------------------------------------------------------------
// Solving.

struct BetheState {
  std::vector<Complex> roots;  // sorted by (re, im)
  double residual_norm = 0.0;
  BetheFlags flags;
  std::optional<CVec> vector;
};

struct SolveOptions {
  std::uint64_t seed = 20021;
  int max_starts = 400;
  double newton_tol = 1e-13;
  int newton_iters = 100;
};

struct SolveReport {
  std::vector<BetheState> solutions;
  int attempts = 0;
  int failed_starts = 0;    // non-convergent or singular-Jacobian starts
  std::uint64_t seed = 0;
  std::size_t weight_dim = 0;
  std::size_t gram_rank = 0;
  std::size_t admissible_offdiagonal = 0;
  bool census_complete = false;  // admissible_offdiagonal == weight_dim == gram_rank
};

inline bool complex_less(Complex a, Complex b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

inline std::vector<Complex> sorted_roots(std::vector<Complex> t) {
  std::sort(t.begin(), t.end(), complex_less);
  return t;
}

/// Distance between two root multisets under greedy nearest pairing.
inline double multiset_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < best) {
        best = d;
        bi = j;
      }
    }
    used[bi] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline bool same_multiset(std::span<const Complex> a, std::span<const Complex> b, double rel = 1e-6) {
  double scale = 1.0;
  for (const auto& x : a) scale = std::max(scale, std::abs(x));
  return multiset_distance(a, b) <= rel * scale;
}

/// Coefficients (ascending) of A(t) - kappa D(t).
inline std::vector<Complex> k1_polynomial(const ChainSpec& spec) {
  std::vector<Complex> pa{1.0}, pd{1.0};
  auto mul_linear = [](std::vector<Complex>& p, Complex c1, Complex c0) {
    std::vector<Complex> out(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i] += c0 * p[i];
      out[i + 1] += c1 * p[i];
    }
    p = std::move(out);
  };
  for (const auto& s : spec.sites) {
    const double l = 0.5 * s.two_spin;
    mul_linear(pa, qpow(spec.gamma, l), -s.z * qpow(spec.gamma, -l));
    mul_linear(pd, qpow(spec.gamma, -l), -s.z * qpow(spec.gamma, l));
  }
  std::vector<Complex> p(pa.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = pa[i] - spec.kappa * pd[i];
  return p;
}

/// All roots of a polynomial (ascending coefficients) via the companion matrix.
inline std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-14 * cmax) coeffs.pop_back();
  if (coeffs.size() <= 1) return {};
  const auto n = static_cast<Eigen::Index>(coeffs.size() - 1);
  CMat comp = CMat::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) comp(i, n - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
  Eigen::ComplexEigenSolver<CMat> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("polynomial_roots: eigensolver failed");
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  // A few Newton polishing steps on the original polynomial.
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      Complex p = 0.0, dp = 0.0;
      for (auto c = coeffs.rbegin(); c != coeffs.rend(); ++c) {
        dp = dp * r + p;
        p = p * r + *c;
      }
      if (std::abs(dp) < 1e-300) break;
      const Complex step = p / dp;
      if (std::abs(step) > 1e-6 * (1.0 + std::abs(r))) break;
      r -= step;
    }
  }
  return sorted_roots(std::move(roots));
}

namespace detail {

// Coincident roots and t = 0 are isolated zeros of the cleared-denominator
// system that attract Newton; the iteration runs on the residual divided by
// prod_{a<b}(t_a - t_b) prod_c t_c so that they stop being zeros.
template <class S>
std::vector<S> deflated_residual(const ChainSpec& spec, std::span<const S> t) {
  auto r = [&] {
    if constexpr (std::is_same_v<S, Jet1>) return bethe_residual(DualRing{spec.gamma}, spec, t);
    else return bethe_residual(ComplexRing{spec.gamma}, spec, t);
  }();
  S g{1.0};
  for (std::size_t a = 0; a < t.size(); ++a) {
    g *= t[a];
    for (std::size_t b = a + 1; b < t.size(); ++b) g *= t[a] - t[b];
  }
  for (auto& x : r) x /= g;
  return r;
}

/// Jacobian of the deflated residual, one jet evaluation per column.
inline CMat bethe_jacobian(const ChainSpec& spec, std::span<const Complex> t) {
  const auto k = static_cast<Eigen::Index>(t.size());
  CMat jac(k, k);
  std::vector<Jet1> tj(t.begin(), t.end());
  for (Eigen::Index j = 0; j < k; ++j) {
    tj[static_cast<std::size_t>(j)].der = 1.0;
    const auto r = deflated_residual(spec, std::span<const Jet1>(tj));
    for (Eigen::Index a = 0; a < k; ++a) jac(a, j) = r[static_cast<std::size_t>(a)].der;
    tj[static_cast<std::size_t>(j)].der = 0.0;
  }
  return jac;
}

inline double residual_norm(const ChainSpec& spec, std::span<const Complex> t) {
  double s = 0.0;
  for (const auto& r : deflated_residual(spec, t)) s += std::norm(r);
  return std::sqrt(s);
}

/// Damped Newton from a start; returns converged roots or nullopt.
inline std::optional<std::vector<Complex>> newton_bethe(const ChainSpec& spec, std::vector<Complex> t,
                                                        const SolveOptions& opts, double radius) {
  const auto k = static_cast<Eigen::Index>(t.size());
  auto degenerate = [&](std::span<const Complex> v) {
    for (std::size_t a = 0; a < v.size(); ++a) {
      if (std::abs(v[a]) < 1e-12 * radius) return true;
      for (std::size_t b = a + 1; b < v.size(); ++b)
        if (std::abs(v[a] - v[b]) < 1e-12 * radius) return true;
    }
    return false;
  };
  if (degenerate(t)) return std::nullopt;
  double fnorm = residual_norm(spec, t);
  for (int it = 0; it < opts.newton_iters; ++it) {
    if (bethe_relative_residual(spec, t) <= opts.newton_tol) break;
    const CMat jac = bethe_jacobian(spec, t);
    Eigen::FullPivLU<CMat> lu(jac);
    if (lu.rank() < k) return std::nullopt;  // singular Jacobian: restart
    const auto r = deflated_residual(spec, std::span<const Complex>(t));
    CVec rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) rhs(a) = -r[static_cast<std::size_t>(a)];
    const CVec step = lu.solve(rhs);
    double lambda = 1.0;
    bool improved = false;
    std::vector<Complex> trial(t.size());
    for (int h = 0; h < 30; ++h) {
      for (Eigen::Index a = 0; a < k; ++a) trial[static_cast<std::size_t>(a)] = t[static_cast<std::size_t>(a)] + lambda * step(a);
      const double fn = degenerate(trial) ? std::numeric_limits<double>::infinity() : residual_norm(spec, trial);
      if (std::isfinite(fn) && fn < fnorm) {
        t = trial;
        fnorm = fn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
    for (const auto& x : t)
      if (std::abs(x) > 1e6 * radius) return std::nullopt;
  }
  if (bethe_relative_residual(spec, t) > 1e-9) return std::nullopt;
  return t;
}

}  // namespace detail

inline std::size_t gram_rank(std::span<const CVec> vectors, double tol = 1e-8) {
  if (vectors.empty()) return 0;
  CMat cols(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    const double n = vectors[j].norm();
    cols.col(static_cast<Eigen::Index>(j)) = n > 0 ? CVec(vectors[j] / n) : vectors[j];
  }
  Eigen::JacobiSVD<CMat> svd(cols);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return rank;
}

inline BetheState make_state(const ChainSpec& spec, const Monodromy<Complex>& m, std::vector<Complex> roots) {
  BetheState st;
  st.roots = sorted_roots(std::move(roots));
  st.residual_norm = st.roots.empty() ? 0.0 : bethe_relative_residual(spec, st.roots);
  st.flags = classify(spec, st.roots);
  st.vector = bethe_vector(spec, m, st.roots);
  return st;
}

/// k = 0: the empty solution. k = 1: all roots of A(t) - kappa D(t) (companion
/// matrix). k >= 2: damped Newton from seeded random starts spread log-uniformly
/// around the inhomogeneity scale, deduplicated as multisets.
inline SolveReport solve_bethe(const ChainSpec& spec, const Monodromy<Complex>& m, int k,
                               const SolveOptions& opts = {}) {
  if (k < 0) throw PreconditionError("solve_bethe: k must be nonnegative");
  SolveReport rep;
  rep.seed = opts.seed;
  rep.weight_dim = weight_sector_dim(spec, k);

  auto add_unique = [&](std::vector<Complex> roots) {
    for (const auto& s : rep.solutions)
      if (same_multiset(s.roots, roots)) return;
    rep.solutions.push_back(make_state(spec, m, std::move(roots)));
  };
  auto count_good = [&] {
    return static_cast<std::size_t>(std::count_if(rep.solutions.begin(), rep.solutions.end(), [](const auto& s) {
      return s.flags.admissible && s.flags.offdiagonal;
    }));
  };

  if (k == 0) {
    add_unique({});
    rep.attempts = 1;
  } else if (k == 1) {
    rep.attempts = 1;
    for (const auto& r : polynomial_roots(k1_polynomial(spec))) add_unique({r});
  } else {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Roots spread over several decades around the inhomogeneity scale, so the
    // start moduli are log-uniform in [scale e^-3, scale e^3].
    const double scale = std::max(1.0, spec.max_abs_z());
    const double radius = scale * std::exp(3.0);
    for (int s = 0; s < opts.max_starts; ++s) {
      ++rep.attempts;
      std::vector<Complex> start(static_cast<std::size_t>(k));
      for (auto& x : start)
        x = std::polar(scale * std::exp(6.0 * (unif(rng) - 0.5)), 2.0 * std::numbers::pi * unif(rng));
      auto sol = detail::newton_bethe(spec, std::move(start), opts, radius);
      if (!sol) {
        ++rep.failed_starts;
        continue;
      }
      add_unique(std::move(*sol));
      if (count_good() >= rep.weight_dim) break;
    }
  }
  std::sort(rep.solutions.begin(), rep.solutions.end(), [](const BetheState& a, const BetheState& b) {
    return std::lexicographical_compare(a.roots.begin(), a.roots.end(), b.roots.begin(), b.roots.end(),
                                        complex_less);
  });

  std::vector<CVec> good;
  for (const auto& s : rep.solutions)
    if (s.flags.admissible && s.flags.offdiagonal && s.vector) good.push_back(*s.vector);
  rep.admissible_offdiagonal = good.size();
  rep.gram_rank = gram_rank(good);
  rep.census_complete = rep.admissible_offdiagonal == rep.weight_dim && rep.gram_rank == rep.weight_dim;
  return rep;
}

inline SolveReport solve_bethe(const ChainSpec& spec, int k, const SolveOptions& opts = {}) {
  return solve_bethe(spec, build_monodromy(spec), k, opts);
}

}  // namespace xxzroots
