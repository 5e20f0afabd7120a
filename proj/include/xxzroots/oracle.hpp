#pragma once
// Brute-force checks independent of the Bethe ansatz: exact diagonalization of
// T(u) per weight sector, commutation-relation sweeps and the completeness census.
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "xxzroots/bethe.hpp"

namespace xxzroots {

struct SectorSpectrum {
  int k = 0;  // H_Sigma = l_tot - k
  std::size_t dimension = 0;
  std::vector<Complex> eigenvalues;  // sorted by (re, im)
  std::vector<std::pair<Complex, int>> degeneracies;
};

struct SpectrumReport {
  Complex u0;
  std::vector<SectorSpectrum> sectors;
};

/// Clusters sorted eigenvalues within tol * (1 + |lambda|).
inline std::vector<std::pair<Complex, int>> degeneracy_multiset(const std::vector<Complex>& ev, double tol = 1e-8) {
  std::vector<std::pair<Complex, int>> out;
  std::vector<bool> used(ev.size(), false);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    int count = 0;
    for (std::size_t j = i; j < ev.size(); ++j)
      if (!used[j] && std::abs(ev[j] - ev[i]) <= tol * (1.0 + std::abs(ev[i]))) {
        used[j] = true;
        ++count;
      }
    out.emplace_back(ev[i], count);
  }
  return out;
}

/// Diagonalizes T(u0) block by block in the H_Sigma weight decomposition.
inline SpectrumReport exact_spectrum(const ChainSpec& spec, const Monodromy<Complex>& m, Complex u0) {
  const CMat t = transfer_matrix(m, spec.kappa, u0);
  SpectrumReport rep;
  rep.u0 = u0;
  for (int k = 0; k <= spec.two_spin_total(); ++k) {
    const auto idx = sector_indices(spec, k);
    const auto n = static_cast<Eigen::Index>(idx.size());
    CMat block(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) block(i, j) = t(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    Eigen::ComplexEigenSolver<CMat> es(block, false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("exact_spectrum: eigensolver did not converge in sector k = " + std::to_string(k));
    SectorSpectrum s;
    s.k = k;
    s.dimension = idx.size();
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), complex_less);
    s.degeneracies = degeneracy_multiset(s.eigenvalues);
    rep.sectors.push_back(std::move(s));
  }
  return rep;
}

/// Distance from lambda to the nearest eigenvalue of sector k, relative to 1 + |lambda|.
inline double spectrum_distance(const SpectrumReport& rep, int k, Complex lambda) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.sectors) {
    if (s.k != k) continue;
    for (const auto& e : s.eigenvalues) best = std::min(best, std::abs(e - lambda) / (1.0 + std::abs(lambda)));
  }
  return best;
}

// ---------------------------------------------------------------------------

struct CommutationResiduals {
  double bb = 0.0;  // [B(u), B(v)]
  double ab = 0.0;  // A(u) B(v) exchange
  double db = 0.0;  // D(u) B(v) exchange
  double tt = 0.0;  // [T(u), T(v)]
  double weight = 0.0;  // [H_Sigma, T(u)] and B lowering the weight by one
};

/// Random spectral parameter in the annulus 0.5 <= |u| <= 2 (scaled by the inhomogeneities).
inline Complex random_spectral(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::polar(scale * (0.5 + 1.5 * unif(rng)), 2.0 * std::numbers::pi * unif(rng));
}

/// Evaluates the exchange relations at `trials` random (u, v). Each residual is
/// ||lhs - rhs|| divided by the sum of the norms of the individual terms.
inline CommutationResiduals check_commutation(const ChainSpec& spec, const Monodromy<Complex>& m, int trials,
                                              std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  const Complex q = qpow(spec.gamma, 1.0);
  const Complex qi = qpow(spec.gamma, -1.0);
  const Complex qd = q - qi;
  const double zs = std::max(1.0, spec.max_abs_z());
  const CMat h = total_weight_operator(spec);
  CommutationResiduals out;
  for (int n = 0; n < trials; ++n) {
    const Complex u = random_spectral(rng, zs);
    const Complex v = random_spectral(rng, zs);
    const CMat au = m.a.eval(u), av = m.a.eval(v), bu = m.b.eval(u), bv = m.b.eval(v), du = m.d.eval(u),
               dv = m.d.eval(v);

    {
      const CMat l = bu * bv, r = bv * bu;
      out.bb = std::max(out.bb, (l - r).norm() / (l.norm() + r.norm() + 1e-300));
    }
    {
      const CMat l = (u - v) * au * bv;
      const CMat r1 = (u * qi - v * q) * bv * au;
      const CMat r2 = v * qd * bu * av;
      out.ab = std::max(out.ab, (l - r1 - r2).norm() / (l.norm() + r1.norm() + r2.norm() + 1e-300));
    }
    {
      const CMat l = (u - v) * du * bv;
      const CMat r1 = (u * q - v * qi) * bv * du;
      const CMat r2 = -v * qd * bu * dv;
      out.db = std::max(out.db, (l - r1 - r2).norm() / (l.norm() + r1.norm() + r2.norm() + 1e-300));
    }
    {
      const CMat tu = au + spec.kappa * du, tv = av + spec.kappa * dv;
      const CMat l = tu * tv, r = tv * tu;
      out.tt = std::max(out.tt, (l - r).norm() / (l.norm() + r.norm() + 1e-300));
      const CMat c = h * tu - tu * h;
      const CMat lower = h * bu - bu * (h - CMat::Identity(h.rows(), h.cols()));
      out.weight = std::max({out.weight, c.norm() / (tu.norm() + 1e-300), lower.norm() / (bu.norm() + 1e-300)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct CensusRow {
  Complex kappa;
  std::size_t count = 0;  // admissible offdiagonal solutions found
  std::size_t dimension = 0;
  std::size_t gram_rank = 0;
  int attempts = 0;
  bool agree = false;
};

struct CensusTable {
  int k = 0;
  bool well_separated = true;
  std::vector<CensusRow> rows;

  bool all_agree() const {
    return std::all_of(rows.begin(), rows.end(), [](const CensusRow& r) { return r.agree; });
  }
};

/// Twists drawn on the annulus 0.5 <= |kappa| <= 2 from a seeded generator.
inline std::vector<Complex> sample_twists(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) out.push_back(random_spectral(rng));
  return out;
}

/// For each twist: number of admissible offdiagonal solutions, sector dimension and
/// Gram rank of the Bethe vectors. Non-well-separated z still runs (flag only).
inline CensusTable completeness_census(const ChainSpec& spec, int k, std::span<const Complex> kappas,
                                       const SolveOptions& opts = {}) {
  CensusTable table;
  table.k = k;
  table.well_separated = spec.well_separated();
  const auto m = build_monodromy(spec);
  for (const auto& kappa : kappas) {
    ChainSpec s = spec;
    s.kappa = kappa;
    const auto rep = solve_bethe(s, m, k, opts);
    CensusRow row;
    row.kappa = kappa;
    row.count = rep.admissible_offdiagonal;
    row.dimension = rep.weight_dim;
    row.gram_rank = rep.gram_rank;
    row.attempts = rep.attempts;
    row.agree = rep.census_complete;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace xxzroots
