#pragma once
// U_q(sl2) site representations, the L-operator and the monodromy matrix.
//
// All builders are generic over the scalar ring (ComplexRing or JetRing), so
// the same code produces A(u), B(u), C(u), D(u) at a fixed q or as first-order
// jets around q0.
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "xxzroots/chain.hpp"

namespace xxzroots {

template <class S>
struct SiteRep {
  int two_spin = 1;
  Mat<S> E, F, qH, qHinv;

  Eigen::Index dim() const { return E.rows(); }
};

/// Matrices of E, F, q^H, q^{-H} in the basis v_0, ..., v_{2l}:
///   E v_r = [r] v_{r-1},  F v_r = [2l-r] v_{r+1},  H v_r = (l-r) v_r.
template <ScalarRing R>
SiteRep<typename R::Scalar> build_site_rep(const R& ring, int two_spin) {
  using S = typename R::Scalar;
  if (two_spin <= 0) throw PreconditionError("build_site_rep: 2l must be a positive integer");
  for (int k = 1; k <= two_spin; ++k) {
    const Complex q2k = ring.value(ring.qpow(2.0 * k));
    if (std::abs(q2k - 1.0) < 1e-10)
      throw PreconditionError("build_site_rep: q^" + std::to_string(2 * k) + " = 1, representation is reducible");
  }
  const Eigen::Index n = two_spin + 1;
  SiteRep<S> rep;
  rep.two_spin = two_spin;
  rep.E = Mat<S>::Zero(n, n);
  rep.F = Mat<S>::Zero(n, n);
  rep.qH = Mat<S>::Zero(n, n);
  rep.qHinv = Mat<S>::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double weight = 0.5 * two_spin - static_cast<double>(r);
    rep.qH(r, r) = ring.qpow(weight);
    rep.qHinv(r, r) = ring.qpow(-weight);
    if (r > 0) rep.E(r - 1, r) = ring.qnum(static_cast<double>(r));
    if (r < n - 1) rep.F(r + 1, r) = ring.qnum(static_cast<double>(two_spin - r));
  }
  return rep;
}

// ---------------------------------------------------------------------------

/// Kronecker product with the left factor as the more significant index.
template <class S>
Mat<S> kron(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Polynomial in u with dense square matrix coefficients; coeffs[d] multiplies u^d.
template <class S>
class OperatorPoly {
 public:
  OperatorPoly() = default;
  OperatorPoly(Eigen::Index dim, std::vector<Mat<S>> coeffs) : dim_(dim), coeffs_(std::move(coeffs)) {}

  static OperatorPoly zero(Eigen::Index dim) { return OperatorPoly(dim, {}); }
  static OperatorPoly constant(Mat<S> m) {
    const auto d = m.rows();
    return OperatorPoly(d, {std::move(m)});
  }

  Eigen::Index dim() const { return dim_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Mat<S>>& coeffs() const { return coeffs_; }

  /// Horner evaluation.
  template <class U>
  Mat<S> eval(const U& u) const {
    Mat<S> acc = Mat<S>::Zero(dim_, dim_);
    const S us(u);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc *= us;
      acc += *it;
    }
    return acc;
  }

  /// Coefficientwise derivative in u.
  OperatorPoly derivative() const {
    std::vector<Mat<S>> c;
    for (std::size_t d = 1; d < coeffs_.size(); ++d) c.push_back(S(static_cast<double>(d)) * coeffs_[d]);
    return OperatorPoly(dim_, std::move(c));
  }

  OperatorPoly& operator+=(const OperatorPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Mat<S>::Zero(dim_, dim_));
    for (std::size_t d = 0; d < o.coeffs_.size(); ++d) coeffs_[d] += o.coeffs_[d];
    return *this;
  }

  OperatorPoly scaled(const S& s) const {
    auto c = coeffs_;
    for (auto& m : c) m *= s;
    return OperatorPoly(dim_, std::move(c));
  }

  /// (this (x) other)(u) = this(u) (x) other(u); this acts on the more significant factor.
  OperatorPoly kron_with(const OperatorPoly& other) const {
    const Eigen::Index d = dim_ * other.dim_;
    if (coeffs_.empty() || other.coeffs_.empty()) return zero(d);
    std::vector<Mat<S>> c(coeffs_.size() + other.coeffs_.size() - 1, Mat<S>::Zero(d, d));
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      for (std::size_t j = 0; j < other.coeffs_.size(); ++j) c[i + j] += kron(coeffs_[i], other.coeffs_[j]);
    return OperatorPoly(d, std::move(c));
  }

 private:
  Eigen::Index dim_ = 0;
  std::vector<Mat<S>> coeffs_;
};

/// eval_op_poly for a complex polynomial at a jet argument: lifts coefficients.
inline Mat<Jet1> eval_op_poly(const OperatorPoly<Complex>& p, const Jet1& u) {
  Mat<Jet1> acc = Mat<Jet1>::Zero(p.dim(), p.dim());
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc *= u;
    acc += it->template cast<Jet1>();
  }
  return acc;
}

template <class S, class U>
Mat<S> eval_op_poly(const OperatorPoly<S>& p, const U& u) {
  return p.eval(u);
}

// ---------------------------------------------------------------------------

template <class S>
struct Monodromy {
  OperatorPoly<S> a, b, c, d;

  Eigen::Index dim() const { return a.dim(); }
};

/// Entries of z_1...z_N L_N(u/z_N) ... L_1(u/z_1), with
///   L(u) = [[u q^H - q^{-H}, u (q - q^{-1}) F], [(q - q^{-1}) E, u q^{-H} - q^H]].
/// Site i acts on tensor factor i (site 1 most significant).
template <ScalarRing R>
Monodromy<typename R::Scalar> build_monodromy(const R& ring, const ChainSpec& spec,
                                              std::size_t cap = kDefaultDimensionCap) {
  using S = typename R::Scalar;
  if (spec.dimension() > cap)
    throw PreconditionError("build_monodromy: dimension " + std::to_string(spec.dimension()) +
                            " exceeds the cap " + std::to_string(cap));
  for (const auto& s : spec.sites)
    if (s.z == Complex{}) throw PreconditionError("build_monodromy: inhomogeneity z must be nonzero");

  const S qdiff = ring.qpow(1.0) - ring.qpow(-1.0);
  Monodromy<S> m;
  Mat<S> one = Mat<S>::Identity(1, 1);
  m.a = OperatorPoly<S>::constant(one);
  m.b = OperatorPoly<S>::zero(1);
  m.c = OperatorPoly<S>::zero(1);
  m.d = OperatorPoly<S>::constant(one);

  for (const auto& site : spec.sites) {
    const auto rep = build_site_rep(ring, site.two_spin);
    const Eigen::Index n = rep.dim();
    const S z = ring.lift(site.z);
    // z L(u/z), each entry of degree <= 1
    const OperatorPoly<S> l00(n, {(-z) * rep.qHinv, rep.qH});
    const OperatorPoly<S> l01(n, {Mat<S>::Zero(n, n), qdiff * rep.F});
    const OperatorPoly<S> l10(n, {(z * qdiff) * rep.E});
    const OperatorPoly<S> l11(n, {(-z) * rep.qH, rep.qHinv});

    // new_{ab} = sum_c L_{ac} * old_{cb}
    auto entry = [&](const OperatorPoly<S>& la0, const OperatorPoly<S>& old0b, const OperatorPoly<S>& la1,
                     const OperatorPoly<S>& old1b) {
      OperatorPoly<S> r = old0b.kron_with(la0);
      r += old1b.kron_with(la1);
      return r;
    };
    Monodromy<S> next;
    next.a = entry(l00, m.a, l01, m.c);
    next.b = entry(l00, m.b, l01, m.d);
    next.c = entry(l10, m.a, l11, m.c);
    next.d = entry(l10, m.b, l11, m.d);
    m = std::move(next);
  }
  return m;
}

inline Monodromy<Complex> build_monodromy(const ChainSpec& spec, std::size_t cap = kDefaultDimensionCap) {
  return build_monodromy(ComplexRing{spec.gamma}, spec, cap);
}

/// T(u) = A(u) + kappa D(u)
template <class S, class U>
Mat<S> transfer_matrix(const Monodromy<S>& m, const S& kappa, const U& u) {
  return m.a.eval(u) + kappa * m.d.eval(u);
}

inline CMat transfer_matrix(const Monodromy<Complex>& m, Complex kappa, Complex u) {
  return m.a.eval(u) + kappa * m.d.eval(u);
}

/// H_Sigma as a dense diagonal matrix.
inline CMat total_weight_operator(const ChainSpec& spec) {
  return total_weight_diagonal(spec).cast<Complex>().asDiagonal();
}

}  // namespace xxzroots
