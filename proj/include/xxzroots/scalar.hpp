#pragma once
//
// Scalar rings used throughout the library.
//
// Everything is parametrized by the anisotropy gamma rather than by q, with
// q^x := exp(i*gamma*x). This fixes the branch of every fractional power
// (q^{1/2}, q^{l}) once and for all.
//
// Two rings are provided:
//   ComplexRing  - plain complex<double> at a given (possibly complex) gamma
//   JetRing      - first-order dual numbers a + b*eps with eps = q - q0,
//                  used to take the q -> q0 limit of a vanishing product
//                  algebraically instead of by differencing.
//
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <type_traits>

#include <Eigen/Core>

namespace xxzroots {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when an operation's mathematical precondition does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Relative closeness with the library-wide convention |a-b| <= tol*(1+max(|a|,|b|)).
inline bool near(Complex a, Complex b, double tol = 1e-10) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// ---------------------------------------------------------------------------
// Jet1: val + der*eps, eps^2 = 0.

struct Jet1 {
  Complex val{};
  Complex der{};

  constexpr Jet1() = default;
  constexpr Jet1(Complex v, Complex d) : val(v), der(d) {}
  // Implicit lift of constants into the ring.
  constexpr Jet1(Complex v) : val(v) {}  // NOLINT
  template <class T>
    requires std::is_arithmetic_v<T>
  constexpr Jet1(T v) : val(static_cast<double>(v)) {}  // NOLINT

  Jet1& operator+=(const Jet1& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  Jet1& operator-=(const Jet1& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  Jet1& operator*=(const Jet1& o) {
    der = val * o.der + der * o.val;
    val *= o.val;
    return *this;
  }
  Jet1& operator/=(const Jet1& o) {
    if (o.val == Complex{}) throw std::domain_error("Jet1: division by a jet with zero value part");
    der = (der * o.val - val * o.der) / (o.val * o.val);
    val /= o.val;
    return *this;
  }
};

inline Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
inline Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
inline Jet1 operator*(Jet1 a, const Jet1& b) { return a *= b; }
inline Jet1 operator/(Jet1 a, const Jet1& b) { return a /= b; }
inline Jet1 operator-(const Jet1& a) { return {-a.val, -a.der}; }
inline Jet1 operator+(const Jet1& a) { return a; }
inline bool operator==(const Jet1& a, const Jet1& b) { return a.val == b.val && a.der == b.der; }
inline bool operator!=(const Jet1& a, const Jet1& b) { return !(a == b); }

inline std::ostream& operator<<(std::ostream& os, const Jet1& j) {
  return os << j.val << " + " << j.der << "*eps";
}

// Needed by Eigen for a handful of generic reductions.
inline Jet1 conj(const Jet1& a) { return a; }
inline const Jet1& real(const Jet1& a) { return a; }
inline Jet1 imag(const Jet1&) { return Jet1{}; }
inline double abs2(const Jet1& a) { return std::norm(a.val); }

// ---------------------------------------------------------------------------
// q-powers.

/// q^x = exp(i*gamma*x).
inline Complex qpow(Complex gamma, Complex x) { return std::exp(kI * gamma * x); }

/// [x]_q = sin(gamma*x)/sin(gamma).
inline Complex qnum(Complex gamma, Complex x) {
  const Complex s = std::sin(gamma);
  if (std::abs(s) < 1e-14) throw PreconditionError("qnum: sin(gamma) = 0, degenerate anisotropy");
  return std::sin(gamma * x) / s;
}

/// First-order expansion of q^x at q = q0 + eps, with q0 = exp(i*gamma0):
/// q0^x * (1 + x*eps/q0).
inline Jet1 jet_qpow(Complex q0, Complex gamma0, Complex x) {
  const Complex p = std::exp(kI * gamma0 * x);
  return {p, p * x / q0};
}

/// Anisotropy context for the complex ring.
struct ComplexRing {
  using Scalar = Complex;
  Complex gamma;

  explicit ComplexRing(Complex g) : gamma(g) {
    if (std::abs(std::exp(2.0 * kI * gamma) - 1.0) < 1e-14)
      throw PreconditionError("anisotropy with q^2 = 1 is not allowed");
  }
  Scalar lift(Complex c) const { return c; }
  Scalar qpow(Complex x) const { return xxzroots::qpow(gamma, x); }
  Scalar qnum(Complex x) const { return xxzroots::qnum(gamma, x); }
  Complex value(const Scalar& s) const { return s; }
};

/// Jet context: gamma(eps) = gamma0 - i*eps/q0, so that q = q0 + eps to first order.
struct JetRing {
  using Scalar = Jet1;
  Complex q0;
  Complex gamma0;

  explicit JetRing(Complex g0) : q0(std::exp(kI * g0)), gamma0(g0) {
    if (std::abs(q0 * q0 - 1.0) < 1e-14) throw PreconditionError("anisotropy with q^2 = 1 is not allowed");
  }
  Scalar lift(Complex c) const { return Jet1{c}; }
  Scalar qpow(Complex x) const { return jet_qpow(q0, gamma0, x); }
  Scalar qnum(Complex x) const {
    const Jet1 num = qpow(x) - qpow(-x);
    const Jet1 den = qpow(1.0) - qpow(-1.0);
    return num / den;
  }
  Complex value(const Scalar& s) const { return s.val; }
};

/// Fixed q, jet-valued scalars: carries derivatives in the spectral variables
/// (Bethe Jacobians, du-derivatives) rather than in q.
struct DualRing {
  using Scalar = Jet1;
  Complex gamma;

  explicit DualRing(Complex g) : gamma(g) {}
  Scalar lift(Complex c) const { return Jet1{c}; }
  Scalar qpow(Complex x) const { return Jet1{xxzroots::qpow(gamma, x)}; }
  Scalar qnum(Complex x) const { return Jet1{xxzroots::qnum(gamma, x)}; }
  Complex value(const Scalar& s) const { return s.val; }
};

template <class R>
concept ScalarRing = requires(const R& r, Complex c) {
  typename R::Scalar;
  { r.qpow(c) } -> std::convertible_to<typename R::Scalar>;
  { r.qnum(c) } -> std::convertible_to<typename R::Scalar>;
  { r.lift(c) } -> std::convertible_to<typename R::Scalar>;
};

}  // namespace xxzroots

namespace Eigen {

template <>
struct NumTraits<xxzroots::Jet1> : GenericNumTraits<xxzroots::Jet1> {
  using Real = double;
  using NonInteger = xxzroots::Jet1;
  using Nested = xxzroots::Jet1;
  using Literal = xxzroots::Jet1;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 4,
    MulCost = 12,
  };
  static inline Real epsilon() { return NumTraits<double>::epsilon(); }
  static inline Real dummy_precision() { return NumTraits<double>::dummy_precision(); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen
