// Acceptance run: one line per criterion, nonzero exit if any is red.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "fd_oracle.hpp"
#include "xxzroots/xxzroots.hpp"

using namespace xxzroots;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

ChainSpec chain(std::vector<Site> sites, Complex gamma = 0.7, Complex kappa = 1.0) {
  ChainSpec s;
  s.sites = std::move(sites);
  s.gamma = gamma;
  s.kappa = kappa;
  return s;
}

ChainSpec c1() { return chain({{1, 1.0}}); }
ChainSpec c2() { return chain({{1, 1.0}, {1, 2.3}}, 0.7, 1.3); }
ChainSpec mixed() { return chain({{1, 1.0}, {2, {2.3, 0.4}}}, 0.7, {0.8, 0.5}); }

std::vector<ChainSpec> desk_specs() {
  return {c1(), c2(), mixed(), chain({{2, 1.0}, {1, {0.6, -0.4}}, {1, {1.7, 0.2}}}, 0.55, {0.9, -0.3})};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Complex> draws(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.push_back(random_spectral(rng, scale));
  return out;
}

struct RootSetup {
  RootCtx ctx;
  ChainSpec spec;
  Monodromy<Complex> m;
  LimitCreationOperator bb;
  RootSetup(std::vector<Complex> zs, int M, int p)
      : ctx(make_root_ctx(M, 1)), spec(make(std::move(zs), p)), m(build_monodromy(spec)), bb(spec, ctx) {}
  ChainSpec make(std::vector<Complex> zs, int p) const {
    ChainSpec s;
    for (const auto& z : zs) s.sites.push_back({1, z});
    s = at_root(s, ctx);
    s.kappa = twist_for(s, ctx, p);
    return s;
  }
};

RootSetup c3() { return RootSetup({1.0, 2.3}, 2, 0); }
RootSetup m3() { return RootSetup({1.0, 2.3, {0.6, 0.4}}, 3, 0); }

Verdict commutation() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& spec : desk_specs()) {
    const auto r = check_commutation(spec, build_monodromy(spec), 10);
    worst = std::max({worst, r.bb, r.ab, r.db, r.tt, r.weight});
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-10 && dt < 10.0, "max residual " + fmt("%.2e", worst) + " (limit 1e-10), " + fmt("%.2f", dt) + " s"};
}

Verdict action_formulas() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (const auto& spec : desk_specs()) {
    const auto m = build_monodromy(spec);
    const double sc = std::max(1.0, spec.max_abs_z());
    for (int k = 0; k <= std::min(2, spec.two_spin_total()); ++k)
      for (int trial = 0; trial < 3; ++trial) {
        const auto t = draws(rng, k, sc);
        const auto r = verify_action_formulas(spec, m, t, random_spectral(rng, sc));
        worst = std::max({worst, r.a_residual, r.d_residual});
      }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-9 && dt < 10.0, "max residual " + fmt("%.2e", worst) + " (limit 1e-9), " + fmt("%.2f", dt) + " s"};
}

Verdict bethe_eigenvectors() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  int states = 0;
  bool ok = true;
  for (const auto& spec : {c1(), c2()}) {
    const auto m = build_monodromy(spec);
    for (int k = 0; k <= spec.two_spin_total(); ++k) {
      const auto rep = solve_bethe(spec, m, k);
      ok &= rep.census_complete;
      for (const auto& s : rep.solutions) {
        if (!s.flags.offdiagonal || !s.flags.admissible) continue;
        const auto chk = verify_eigen(spec, m, s.roots, draws(rng, 5, 2.3));
        if (chk.zero_vector) continue;
        ++states;
        worst = std::max(worst, chk.max_residual);
      }
    }
  }
  return {ok && worst <= 1e-8 && states > 0,
          std::to_string(states) + " states, max residual " + fmt("%.2e", worst) + " (limit 1e-8)"};
}

Verdict census() {
  const auto kappas = sample_twists(3, 11);
  std::string detail;
  bool ok = true;
  const std::vector<std::pair<ChainSpec, std::vector<int>>> cases{{c2(), {1}}, {mixed(), {1, 2}}};
  for (const auto& [spec, ks] : cases)
    for (int k : ks) {
      const auto t = completeness_census(spec, k, kappas);
      ok &= t.all_agree() && t.rows.size() >= 3;
      for (const auto& r : t.rows) {
        ok &= r.count == r.dimension && r.gram_rank == r.dimension;
        detail += " " + std::to_string(r.count) + "/" + std::to_string(r.dimension) + "/" + std::to_string(r.gram_rank);
      }
      detail += " |";
    }
  return {ok, "count/dim/rank per twist:" + detail};
}

Verdict nilpotency() {
  std::mt19937_64 rng(107);
  double worst = 0.0, contrast = std::numeric_limits<double>::infinity();
  for (int M : {2, 3}) {
    const auto ctx = make_root_ctx(M, 1);
    for (const auto& base : {chain({{1, 1.0}, {1, 2.3}}), chain({{1, 1.0}, {1, 2.3}, {1, {0.6, 0.4}}})}) {
      const auto spec = at_root(base, ctx);
      const auto m = build_monodromy(spec);
      ChainSpec generic = base;
      generic.gamma = 0.7;
      const auto mg = build_monodromy(generic);
      for (const auto& u : draws(rng, 10, 2.3)) {
        const auto pn = nilpotent_product(spec, ctx, m, u);
        const auto pg = b_string_product(generic, mg, u, M);
        worst = std::max(worst, pn.norm / pn.scale);
        // The contrast is only meaningful where the product can be nonzero.
        if (M <= generic.two_spin_total()) contrast = std::min(contrast, pg.norm / pg.scale);
      }
    }
  }
  return {worst <= 1e-10 && contrast >= 1e-3,
          "max " + fmt("%.2e", worst) + " (limit 1e-10), generic min " + fmt("%.2e", contrast) + " (floor 1e-3)"};
}

Verdict limit_operator() {
  std::mt19937_64 rng(109);
  std::normal_distribution<double> n(0.0, 0.7);
  double fd_err = 0.0, shift = 0.0, comm = 0.0;
  auto rx = [&](int M) {
    std::vector<Complex> x;
    for (int i = 0; i < M; ++i) x.emplace_back(n(rng), n(rng));
    return x;
  };
  for (auto s : {c3(), m3(), RootSetup({1.0, 2.3, {0.6, 0.4}, {1.7, -0.5}}, 2, 0)}) {
    const int M = s.ctx.M;
    for (int i = 0; i < 3; ++i) {
      const auto uv = draws(rng, 2, 2.0);
      const auto x = rx(M), y = rx(M);
      const CMat a = s.bb(uv[0], x);
      const CMat f = fd::finite_difference_bb(s.spec, s.ctx, uv[0], x);
      fd_err = std::max(fd_err, (a - f).norm() / std::max(a.norm(), f.norm()));
      auto xs = x;
      for (auto& v : xs) v += Complex(0.9, -1.4);
      shift = std::max(shift, (s.bb(uv[0], xs) - a).norm() / (1.0 + a.norm()));
      const CMat b = s.m.b.eval(uv[1]), c = s.bb(uv[1], y);
      comm = std::max({comm, (a * b - b * a).norm() / (1.0 + (a * b).norm()),
                       (a * c - c * a).norm() / (1.0 + (a * c).norm())});
    }
  }
  return {fd_err <= 1e-4 && shift <= 1e-9 && comm <= 1e-9,
          "finite difference " + fmt("%.2e", fd_err) + " (1e-4), shift " + fmt("%.2e", shift) + ", commutators " +
              fmt("%.2e", comm) + " (1e-9)"};
}

Verdict functional_equations() {
  std::mt19937_64 rng(113);
  double worst = 0.0;
  for (auto s : {c3(), m3(), RootSetup({1.0, 2.3}, 2, 1), RootSetup({1.0, 2.3, {0.6, 0.4}}, 3, 2)}) {
    const int p = *twist_exponent(s.spec, s.ctx);
    const Complex q2 = s.ctx.qpow(2.0);
    for (int k = 0; k <= 1; ++k) {
      const auto t = draws(rng, k, 2.0);
      for (const auto& u : draws(rng, 10, 2.0)) {
        const Complex f = f_fn(s.spec, s.ctx, p, u, t);
        const Complex g0 = g_fn(s.spec, s.ctx, p, u, t), g1 = g_fn(s.spec, s.ctx, p, u * q2, t);
        const Complex q0 = q_fn(s.spec, s.ctx, p, u, t), q1 = q_fn(s.spec, s.ctx, p, u * q2, t);
        Complex ratio = s.ctx.qpow(static_cast<double>(s.spec.two_spin_total() - 2 * p)) *
                        script_A(s.spec, u) / script_D(s.spec, u);
        for (const auto& ta : t) ratio *= (u - ta * q2) / (u * q2 - ta);
        worst = std::max({worst, std::abs(f_fn(s.spec, s.ctx, p, u * q2, t) - f) / (1.0 + std::abs(f)),
                          std::abs(g1 - g0 - (q0 - f)) / (1.0 + std::abs(q0) + std::abs(f)),
                          std::abs(q1 / q0 - ratio) / (1.0 + std::abs(ratio))});
      }
    }
  }
  return {worst <= 1e-10, "max relative defect " + fmt("%.2e", worst) + " (limit 1e-10)"};
}

Verdict degenerate_family() {
  const std::vector<Complex> samples{{0.3, 0.2}, {1.1, -0.4}, {-0.7, 0.8}, {2.2, 0.5}, {0.1, -1.3}};
  const std::vector<Complex> ua{{0.7, 0.4}}, ub{{1.9, -0.8}};
  double res = 0.0, formula = 0.0, spec_d = 0.0, indep = 0.0;
  bool nonzero = true;
  for (auto s : {c3(), m3()}) {
    const auto a = verify_bam(s.spec, s.ctx, s.m, s.bb, 0, {}, ua, samples);
    const auto b = verify_bam(s.spec, s.ctx, s.m, s.bb, 0, {}, ub, samples);
    nonzero &= !a.zero_vector && !b.zero_vector;
    if (!nonzero) break;
    res = std::max({res, a.max_residual, b.max_residual});
    const auto exact = exact_spectrum(s.spec, s.m, samples[0]);
    spec_d = std::max(spec_d, spectrum_distance(exact, s.ctx.M, a.eigenvalues[0]));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Complex u = samples[i];
      const Complex vac = script_A(s.spec, u) + s.spec.kappa * script_D(s.spec, u);
      const Complex expect = s.ctx.qpow(static_cast<double>(s.ctx.M)) * vac;
      formula = std::max(formula, std::abs(a.eigenvalues[i] - expect) / (1.0 + std::abs(expect)));
      indep = std::max(indep, std::abs(a.eigenvalues[i] - b.eigenvalues[i]) / (1.0 + std::abs(a.eigenvalues[i])));
    }
  }
  return {nonzero && res <= 1e-8 && formula <= 1e-10 && spec_d <= 1e-8 && indep <= 1e-10,
          "residual " + fmt("%.2e", res) + ", formula " + fmt("%.2e", formula) + ", spectrum " + fmt("%.2e", spec_d) +
              ", two-u spread " + fmt("%.2e", indep)};
}

Verdict cancellation_consistency() {
  std::mt19937_64 rng(127);
  double spread = 0.0, vec = 0.0;
  for (auto s : {c3(), m3()}) {
    for (const auto& u : draws(rng, 3, 1.5)) {
      const std::vector<Complex> one{u};
      const auto sched = x_schedule(s.spec, s.ctx, 0, {}, one);
      const auto r = solve_xeq(s.spec, s.ctx, {}, u, Complex(0.4, -0.9));
      if (r.status != XeqStatus::ok) return {false, "solve_xeq failed at a generic u"};
      const Complex shift = r.x[0] - sched.X[0][0];
      for (int i = 0; i < s.ctx.M; ++i)
        spread = std::max(spread, std::abs(r.x[static_cast<std::size_t>(i)] - sched.X[0][static_cast<std::size_t>(i)] - shift));
      const std::vector<std::vector<Complex>> xs{r.x};
      const CVec a = degenerate_vector(s.spec, s.m, s.bb, {}, one, xs);
      const CVec b = degenerate_vector(s.spec, s.m, s.bb, {}, sched);
      vec = std::max(vec, (a - b).norm() / std::max(1.0, b.norm()));
    }
  }
  auto s = c3();
  ChainSpec bad = s.spec;
  bad.kappa = {0.3, 0.8};
  const bool twist = solve_xeq(bad, s.ctx, {}, {0.7, 0.4}, 0.0).status == XeqStatus::incompatible_twist;
  ChainSpec flipped = s.spec;
  flipped.kappa = -s.spec.kappa;
  const auto roots = polynomial_roots(k1_polynomial(flipped));
  const bool solv = !roots.empty() && solve_xeq(s.spec, s.ctx, {}, roots[0], 0.0).status == XeqStatus::not_solvable;
  return {spread <= 1e-10 && vec <= 1e-9 && twist && solv,
          "shift spread " + fmt("%.2e", spread) + ", vectors " + fmt("%.2e", vec) + ", twist check " +
              (twist ? "enforced" : "missing") + ", solvability check " + (solv ? "enforced" : "missing")};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"commutation relations", commutation},
      {"action formulas", action_formulas},
      {"Bethe eigenvectors", bethe_eigenvectors},
      {"completeness census", census},
      {"nilpotency", nilpotency},
      {"limit operator", limit_operator},
      {"F/G/Q relations", functional_equations},
      {"degenerate family", degenerate_family},
      {"cancellation system", cancellation_consistency}};
  bool all = true;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all &= v.pass;
    std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", ++n, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  const double dt = seconds_since(t0);
  const bool fast = dt <= 120.0;
  all &= fast;
  std::printf("[%s] 10 wall time: %.2f s (limit 120 s)\n", fast ? "PASS" : "FAIL", dt);
  return all ? 0 : 1;
}
