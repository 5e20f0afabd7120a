#pragma once
// Chain description, tensor-product basis and vacuum eigenvalue functions.
//
// Basis convention: a basis state is a tuple (r_1, ..., r_N), 0 <= r_i <= 2l_i,
// encoded as a mixed-radix integer with site 1 as the most significant digit.
#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xxzroots/scalar.hpp"

namespace xxzroots {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using CMat = Mat<Complex>;
using CVec = Vec<Complex>;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

struct Site {
  int two_spin = 1;  // 2l, a positive integer
  Complex z{1.0, 0.0};
};

struct ChainSpec {
  std::vector<Site> sites;
  Complex gamma{0.7, 0.0};
  Complex kappa{1.0, 0.0};

  std::size_t size() const { return sites.size(); }

  /// 2(l_1 + ... + l_N)
  int two_spin_total() const {
    int s = 0;
    for (const auto& site : sites) s += site.two_spin;
    return s;
  }
  double spin_total() const { return 0.5 * two_spin_total(); }

  int max_two_spin() const {
    int m = 0;
    for (const auto& site : sites) m = std::max(m, site.two_spin);
    return m;
  }

  double max_abs_z() const {
    double m = 0.0;
    for (const auto& site : sites) m = std::max(m, std::abs(site.z));
    return m;
  }

  std::size_t dimension() const {
    std::size_t d = 1;
    for (const auto& site : sites) d *= static_cast<std::size_t>(site.two_spin + 1);
    return d;
  }

  /// Throws PreconditionError on z = 0, kappa = 0, 2l <= 0 or a reducible site representation.
  void validate() const {
    if (!is_finite(gamma) || !is_finite(kappa)) throw PreconditionError("gamma and kappa must be finite");
    if (std::abs(std::exp(2.0 * kI * gamma) - 1.0) < 1e-12) throw PreconditionError("q^2 = 1 is not allowed");
    if (kappa == Complex{}) throw PreconditionError("kappa must be nonzero");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const auto& s = sites[i];
      if (s.two_spin <= 0) throw PreconditionError("sites[" + std::to_string(i) + "].spin must be positive");
      if (!is_finite(s.z) || s.z == Complex{})
        throw PreconditionError("sites[" + std::to_string(i) + "].z must be finite and nonzero");
    }
    for (int r = 1; r <= max_two_spin(); ++r) {
      if (std::abs(qpow(gamma, 2.0 * r) - 1.0) < 1e-10)
        throw PreconditionError("q^" + std::to_string(2 * r) +
                                " = 1: site representation of spin " + std::to_string(max_two_spin()) +
                                "/2 is reducible");
    }
  }

  /// q^{2l_i} z_i != q^{-2l_j} z_j for all i, j (vacuum eigenvalues coprime).
  bool vacuum_coprime(double tol = 1e-10) const {
    for (const auto& a : sites)
      for (const auto& b : sites)
        if (near(qpow(gamma, a.two_spin) * a.z, qpow(gamma, -b.two_spin) * b.z, tol)) return false;
    return true;
  }

  /// q^{2(r-l_i)} z_i != q^{2(s-l_j)} z_j for all (i,r) != (j,s) with i != j.
  bool well_separated(double tol = 1e-10) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = 0; j < sites.size(); ++j) {
        if (i == j) continue;
        for (int r = 0; r <= sites[i].two_spin; ++r)
          for (int s = 0; s <= sites[j].two_spin; ++s) {
            const Complex a = qpow(gamma, 2.0 * r - sites[i].two_spin) * sites[i].z;
            const Complex b = qpow(gamma, 2.0 * s - sites[j].two_spin) * sites[j].z;
            if (near(a, b, tol)) return false;
          }
      }
    return true;
  }
};

// ---------------------------------------------------------------------------
// Basis helpers.

/// Digits (r_1, ..., r_N) of a basis index.
inline std::vector<int> basis_digits(const ChainSpec& spec, std::size_t index) {
  std::vector<int> digits(spec.size());
  for (std::size_t i = spec.size(); i-- > 0;) {
    const auto radix = static_cast<std::size_t>(spec.sites[i].two_spin + 1);
    digits[i] = static_cast<int>(index % radix);
    index /= radix;
  }
  return digits;
}

/// Number of lowering steps k = r_1 + ... + r_N of a basis index.
inline int basis_lowering(const ChainSpec& spec, std::size_t index) {
  int k = 0;
  for (std::size_t i = spec.size(); i-- > 0;) {
    const auto radix = static_cast<std::size_t>(spec.sites[i].two_spin + 1);
    k += static_cast<int>(index % radix);
    index /= radix;
  }
  return k;
}

/// Diagonal of H_Sigma = H_1 + ... + H_N.
inline Eigen::VectorXd total_weight_diagonal(const ChainSpec& spec) {
  const auto dim = spec.dimension();
  Eigen::VectorXd h(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) h(static_cast<Eigen::Index>(s)) = spec.spin_total() - basis_lowering(spec, s);
  return h;
}

/// Basis indices with r_1 + ... + r_N = k, in increasing order.
inline std::vector<Eigen::Index> sector_indices(const ChainSpec& spec, int k) {
  std::vector<Eigen::Index> out;
  const auto dim = spec.dimension();
  for (std::size_t s = 0; s < dim; ++s)
    if (basis_lowering(spec, s) == k) out.push_back(static_cast<Eigen::Index>(s));
  return out;
}

/// Dimension of the H_Sigma = l_tot - k eigenspace, by convolving the
/// per-site sequences (1, 1, ..., 1) of length 2l_i + 1.
inline std::size_t weight_sector_dim(const ChainSpec& spec, int k) {
  if (k < 0) return 0;
  std::vector<std::size_t> counts{1};
  for (const auto& site : spec.sites) {
    std::vector<std::size_t> next(counts.size() + static_cast<std::size_t>(site.two_spin), 0);
    for (std::size_t a = 0; a < counts.size(); ++a)
      for (int r = 0; r <= site.two_spin; ++r) next[a + static_cast<std::size_t>(r)] += counts[a];
    counts = std::move(next);
  }
  return static_cast<std::size_t>(k) < counts.size() ? counts[static_cast<std::size_t>(k)] : 0;
}

/// v_0 x ... x v_0
inline CVec vacuum(const ChainSpec& spec) {
  CVec v = CVec::Zero(static_cast<Eigen::Index>(spec.dimension()));
  v(0) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Vacuum eigenvalues.

/// prod_i (u q^{l_i} - z_i q^{-l_i})
template <ScalarRing R>
typename R::Scalar script_A(const R& ring, const ChainSpec& spec, const typename R::Scalar& u) {
  typename R::Scalar acc = ring.lift(1.0);
  for (const auto& s : spec.sites) {
    const double l = 0.5 * s.two_spin;
    acc *= u * ring.qpow(l) - ring.lift(s.z) * ring.qpow(-l);
  }
  return acc;
}

/// prod_i (u q^{-l_i} - z_i q^{l_i})
template <ScalarRing R>
typename R::Scalar script_D(const R& ring, const ChainSpec& spec, const typename R::Scalar& u) {
  typename R::Scalar acc = ring.lift(1.0);
  for (const auto& s : spec.sites) {
    const double l = 0.5 * s.two_spin;
    acc *= u * ring.qpow(-l) - ring.lift(s.z) * ring.qpow(l);
  }
  return acc;
}

inline Complex script_A(const ChainSpec& spec, Complex u) { return script_A(ComplexRing{spec.gamma}, spec, u); }
inline Complex script_D(const ChainSpec& spec, Complex u) { return script_D(ComplexRing{spec.gamma}, spec, u); }

}  // namespace xxzroots
