#pragma once
// Subcommand runners. Each builds a complete JSON report in memory; the caller
// only serializes it once everything has succeeded or failed cleanly.
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "xxzroots/cli/config.hpp"
#include "xxzroots/oracle.hpp"

namespace xxzroots::cli {

enum ExitCode : int { kPass = 0, kInternal = 1, kPrecondition = 2, kChecksFailed = 3 };

struct Outcome {
  json report;
  int code = kPass;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"identities", "solve",      "verify", "census",
                                              "nilpotency", "degenerate", "xeq",    "spectrum"};
  return names;
}

/// Residual tolerance asserted by each subcommand unless --tol / "tol" overrides it.
inline double default_tolerance(const std::string& sub) {
  if (sub == "identities" || sub == "nilpotency" || sub == "xeq" || sub == "spectrum") return 1e-10;
  return 1e-8;
}

namespace detail {

class Checks {
 public:
  void add(const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value <= limit;
    list_.push_back({{"name", name}, {"value", std::isfinite(value) ? json(value) : json("inf")},
                     {"limit", limit}, {"pass", ok}});
    all_ &= ok;
  }
  void add_bool(const std::string& name, bool ok) {
    list_.push_back({{"name", name}, {"pass", ok}});
    all_ &= ok;
  }
  bool all() const { return all_; }
  const json& list() const { return list_; }

 private:
  json list_ = json::array();
  bool all_ = true;
};

struct Context {
  const RunConfig& cfg;
  double tol;
  json results = json::object();
  json residuals = json::object();
  Checks checks;
  std::vector<std::string> notices;
  std::mt19937_64 rng;

  Context(const RunConfig& c, double t) : cfg(c), tol(t), rng(c.seed) {}

  /// Configured spectral samples, or `count` seeded draws on the inhomogeneity annulus.
  std::vector<Complex> samples(int count) {
    if (!cfg.u_samples.empty()) return cfg.u_samples;
    std::vector<Complex> out;
    const double scale = std::max(1.0, cfg.chain.max_abs_z());
    for (int i = 0; i < count; ++i) out.push_back(random_spectral(rng, scale));
    return out;
  }

  void residual(const std::string& name, double v) {
    residuals[name] = std::isfinite(v) ? json(v) : json("inf");
  }
};

inline RootCtx require_root(const RunConfig& cfg) {
  if (!cfg.root_of_unity)
    throw PreconditionError("gamma must be a root-of-unity value: set root_of_unity {M, K}");
  return make_root_ctx(cfg.root_of_unity->M, cfg.root_of_unity->K);
}

inline void run_identities(Context& c) {
  const auto& spec = c.cfg.chain;
  const auto m = build_monodromy(spec, c.cfg.cap);
  const auto cr = check_commutation(spec, m, c.cfg.trials, c.cfg.seed);
  const CVec vac = vacuum(spec);
  double vc = 0.0, va = 0.0, vd = 0.0;
  for (const auto& u : c.samples(c.cfg.trials)) {
    vc = std::max(vc, (m.c.eval(u) * vac).norm() / (1.0 + m.c.eval(u).norm()));
    va = std::max(va, (m.a.eval(u) * vac - script_A(spec, u) * vac).norm() / (1.0 + std::abs(script_A(spec, u))));
    vd = std::max(vd, (m.d.eval(u) * vac - script_D(spec, u) * vac).norm() / (1.0 + std::abs(script_D(spec, u))));
  }
  c.results["dimension"] = spec.dimension();
  c.results["trials"] = c.cfg.trials;
  c.results["vacuum_coprime"] = spec.vacuum_coprime();
  c.results["well_separated"] = spec.well_separated();
  const std::map<std::string, double> r{{"commutation_bb", cr.bb},    {"commutation_ab", cr.ab},
                                        {"commutation_db", cr.db},    {"transfer_commute", cr.tt},
                                        {"weight_structure", cr.weight}, {"vacuum_c", vc},
                                        {"vacuum_a", va},             {"vacuum_d", vd}};
  for (const auto& [name, v] : r) {
    c.residual(name, v);
    c.checks.add(name, v, c.tol);
  }
}

inline json state_json(const BetheState& s) {
  return {{"roots", to_json(s.roots)},
          {"relative_residual", s.residual_norm},
          {"offdiagonal", s.flags.offdiagonal},
          {"admissible", s.flags.admissible},
          {"hits_plus_points", s.flags.hits_plus_points},
          {"hits_minus_points", s.flags.hits_minus_points},
          {"vector_norm", s.vector ? s.vector->norm() : 0.0}};
}

inline void run_solve(Context& c) {
  const auto& spec = c.cfg.chain;
  const auto m = build_monodromy(spec, c.cfg.cap);
  SolveOptions opts;
  opts.seed = c.cfg.seed;
  opts.max_starts = c.cfg.max_starts;
  const auto rep = solve_bethe(spec, m, c.cfg.k, opts);
  const auto us = c.samples(5);
  json sols = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
    const auto& s = rep.solutions[i];
    json js = state_json(s);
    if (s.flags.offdiagonal) {
      const auto ec = verify_eigen(spec, m, s.roots, us);
      js["zero_vector"] = ec.zero_vector;
      js["eigen_residual"] = ec.max_residual;
      if (!ec.zero_vector && s.flags.admissible) worst = std::max(worst, ec.max_residual);
    }
    sols.push_back(std::move(js));
  }
  c.results["k"] = c.cfg.k;
  c.results["solutions"] = std::move(sols);
  c.results["attempts"] = rep.attempts;
  c.results["failed_starts"] = rep.failed_starts;
  c.results["weight_dim"] = rep.weight_dim;
  c.results["admissible_offdiagonal"] = rep.admissible_offdiagonal;
  c.results["gram_rank"] = rep.gram_rank;
  c.results["census_complete"] = rep.census_complete;
  c.results["u_samples"] = to_json(us);
  if (!rep.census_complete) c.notices.push_back("admissible offdiagonal count falls short of the sector dimension");
  c.residual("eigen_max", worst);
  c.checks.add("eigen_admissible_offdiagonal", worst, c.tol);
}

inline void run_verify(Context& c) {
  const auto& spec = c.cfg.chain;
  const auto m = build_monodromy(spec, c.cfg.cap);
  const auto& t = c.cfg.roots;
  const auto flags = classify(spec, t);
  if (!flags.offdiagonal) throw PreconditionError("roots: must be pairwise distinct (offdiagonal)");
  const auto us = c.samples(5);
  const auto ec = verify_eigen(spec, m, t, us);
  double action = 0.0;
  for (const auto& u : us) {
    const auto ar = verify_action_formulas(spec, m, t, u);
    action = std::max({action, ar.a_residual, ar.d_residual});
  }
  c.results["roots"] = to_json(t);
  c.results["bethe_relative_residual"] = t.empty() ? 0.0 : bethe_relative_residual(spec, t);
  c.results["zero_vector"] = ec.zero_vector;
  c.results["vector_norm"] = ec.vector_norm;
  c.results["eigenvalues"] = to_json(ec.eigenvalues);
  c.results["u_samples"] = to_json(us);
  c.residual("action_formulas", action);
  c.checks.add("action_formulas", action, c.tol);
  if (ec.zero_vector) {
    c.notices.push_back("Bethe vector is zero; eigenvector check skipped");
  } else {
    c.residual("eigen", ec.max_residual);
    c.checks.add("eigen", ec.max_residual, c.tol);
  }
}

inline void run_census(Context& c) {
  const auto& spec = c.cfg.chain;
  const auto kappas = c.cfg.kappa_samples.empty() ? sample_twists(c.cfg.kappa_count, c.cfg.seed) : c.cfg.kappa_samples;
  SolveOptions opts;
  opts.seed = c.cfg.seed;
  opts.max_starts = c.cfg.max_starts;
  const auto table = completeness_census(spec, c.cfg.k, kappas, opts);
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"kappa", to_json(r.kappa)},
                    {"count", r.count},
                    {"dimension", r.dimension},
                    {"gram_rank", r.gram_rank},
                    {"attempts", r.attempts},
                    {"agree", r.agree}});
  c.results["k"] = c.cfg.k;
  c.results["well_separated"] = table.well_separated;
  c.results["rows"] = std::move(rows);
  if (!table.well_separated) {
    c.notices.push_back("inhomogeneities are not well separated: census runs as an experiment, no assertion");
    return;
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    c.checks.add_bool("census_row_" + std::to_string(i), table.rows[i].agree);
}

inline void run_nilpotency(Context& c) {
  const RootCtx ctx = require_root(c.cfg);
  const auto& spec = c.cfg.chain;
  spec.validate();
  const auto m = build_monodromy(spec, c.cfg.cap);
  ChainSpec generic = spec;
  generic.gamma = 0.7;
  const auto mg = build_monodromy(generic, c.cfg.cap);
  double worst = 0.0, contrast = std::numeric_limits<double>::infinity();
  json per = json::array();
  for (const auto& u : c.samples(c.cfg.trials)) {
    const auto pn = nilpotent_product(spec, ctx, m, u);
    const auto pg = b_string_product(generic, mg, u, ctx.M);
    const double rel = pn.norm / std::max(pn.scale, 1e-300);
    const double relg = pg.norm / std::max(pg.scale, 1e-300);
    worst = std::max(worst, rel);
    contrast = std::min(contrast, relg);
    per.push_back({{"u", to_json(u)}, {"relative_norm", rel}, {"generic_gamma_relative_norm", relg}});
  }
  c.results["M"] = ctx.M;
  c.results["K"] = ctx.K;
  c.results["samples"] = std::move(per);
  c.results["contrast_gamma"] = 0.7;
  c.results["contrast_min_relative_norm"] = contrast;
  c.residual("nilpotent_product", worst);
  c.checks.add("nilpotent_product", worst, c.tol);
}

inline int resolve_p(const RunConfig& cfg, const ChainSpec& spec, const RootCtx& ctx) {
  if (cfg.p) {
    if (!near(spec.kappa, twist_for(spec, ctx, *cfg.p), 1e-10))
      throw PreconditionError("p: kappa != q0^{2(p - l_tot)}");
    return *cfg.p;
  }
  const auto p = twist_exponent(spec, ctx);
  if (!p) throw PreconditionError("kappa: not of the form q0^{2(p - l_tot)} for an integer p");
  return *p;
}

inline void require_bethe_at_root(const ChainSpec& spec, std::span<const Complex> t) {
  if (!classify(spec, t).offdiagonal) throw PreconditionError("roots: must be pairwise distinct");
  if (!t.empty() && bethe_relative_residual(spec, t) > 1e-9)
    throw PreconditionError("roots: not a solution of the Bethe equations at q0");
}

inline void run_degenerate(Context& c) {
  const RootCtx ctx = require_root(c.cfg);
  const auto& spec = c.cfg.chain;
  spec.validate();
  const int p = resolve_p(c.cfg, spec, ctx);
  const auto& t = c.cfg.roots;
  require_bethe_at_root(spec, t);
  if (c.cfg.u_list.empty()) throw PreconditionError("u_list: at least one u_i is required");
  const auto m = build_monodromy(spec, c.cfg.cap);
  const LimitCreationOperator bb(spec, ctx, c.cfg.cap);
  const auto us = c.samples(5);
  const auto sched = x_schedule(spec, ctx, p, t, c.cfg.u_list);
  const auto chk = verify_bam(spec, ctx, m, bb, p, t, c.cfg.u_list, us);
  const int sector = static_cast<int>(t.size() + sched.m() * static_cast<std::size_t>(ctx.M));
  json xs = json::array();
  for (const auto& x : sched.X) xs.push_back(to_json(x));
  c.results["p"] = p;
  c.results["m"] = sched.m();
  c.results["sector_k"] = sector;
  c.results["x_schedule"] = std::move(xs);
  c.results["zero_vector"] = chk.zero_vector;
  c.results["vector_norm"] = chk.vector_norm;
  c.results["u_samples"] = to_json(us);
  if (!c.cfg.x_lists.empty()) {
    if (c.cfg.x_lists.size() != c.cfg.u_list.size()) throw PreconditionError("x_lists: need one list per u_i");
    double action = 0.0;
    for (const auto& u : us) {
      const auto ar = verify_degenerate_action(spec, ctx, m, bb, t, c.cfg.u_list, c.cfg.x_lists, u);
      action = std::max({action, ar.a_residual, ar.d_residual});
    }
    c.residual("degenerate_action", action);
    c.checks.add("degenerate_action", action, c.tol);
  }
  if (chk.zero_vector) {
    c.notices.push_back("degenerate vector is zero; eigenvector checks skipped");
    return;
  }
  c.results["eigenvalues"] = to_json(chk.eigenvalues);
  c.residual("eigen", chk.max_residual);
  c.checks.add("eigen", chk.max_residual, c.tol);
  if (sector <= spec.two_spin_total()) {
    const auto rep = exact_spectrum(spec, m, us.front());
    const double dist = spectrum_distance(rep, sector, chk.eigenvalues.front());
    c.residual("spectrum_match", dist);
    c.checks.add("spectrum_match", dist, c.tol);
  }
}

inline void run_xeq(Context& c) {
  const RootCtx ctx = require_root(c.cfg);
  const auto& spec = c.cfg.chain;
  const auto& t = c.cfg.roots;
  if (c.cfg.u_list.empty()) throw PreconditionError("u_list: at least one u_i is required");
  const auto p = c.cfg.p ? c.cfg.p : twist_exponent(spec, ctx);
  json per = json::array();
  double worst = 0.0, spread = 0.0;
  bool compared = false;
  for (const auto& ui : c.cfg.u_list) {
    const auto r = solve_xeq(spec, ctx, t, ui, c.cfg.x_start);
    json j{{"u", to_json(ui)}, {"status", to_string(r.status)}, {"y", to_json(r.y)},
           {"solvability_sum", to_json(r.solvability_sum)}};
    if (r.status == XeqStatus::ok) {
      j["x"] = to_json(r.x);
      const double res = xeq_residual(spec, ctx, t, ui, r.x);
      j["system_residual"] = res;
      worst = std::max(worst, res);
      if (p && near(spec.kappa, twist_for(spec, ctx, *p), 1e-10)) {
        const std::vector<Complex> one{ui};
        const auto s = x_schedule(spec, ctx, *p, t, one);
        const Complex shift = r.x.front() - s.X.front().front();
        double sp = 0.0;
        for (int i = 0; i < ctx.M; ++i)
          sp = std::max(sp, std::abs(r.x[static_cast<std::size_t>(i)] - s.X.front()[static_cast<std::size_t>(i)] - shift) /
                                (1.0 + std::abs(shift)));
        j["schedule_shift"] = to_json(shift);
        j["shift_spread"] = sp;
        spread = std::max(spread, sp);
        compared = true;
      }
    }
    per.push_back(std::move(j));
  }
  c.results["per_u"] = std::move(per);
  if (p) c.results["p"] = *p;
  c.residual("xeq_system", worst);
  c.checks.add("xeq_system", worst, c.tol);
  if (compared) {
    c.residual("schedule_shift_spread", spread);
    c.checks.add("schedule_shift_spread", spread, c.tol);
  }
}

inline void run_spectrum(Context& c) {
  const auto& spec = c.cfg.chain;
  const auto m = build_monodromy(spec, c.cfg.cap);
  const Complex u0 = c.cfg.u0 ? *c.cfg.u0 : c.samples(1).front();
  const auto rep = exact_spectrum(spec, m, u0);
  json sectors = json::array();
  bool dims_ok = true;
  for (const auto& s : rep.sectors) {
    json deg = json::array();
    for (const auto& [v, n] : s.degeneracies) deg.push_back({{"value", to_json(v)}, {"multiplicity", n}});
    sectors.push_back({{"k", s.k}, {"dimension", s.dimension}, {"eigenvalues", to_json(s.eigenvalues)},
                       {"degeneracies", std::move(deg)}});
    dims_ok &= s.dimension == weight_sector_dim(spec, s.k);
  }
  c.results["u0"] = to_json(u0);
  c.results["sectors"] = std::move(sectors);
  const Complex vac = script_A(spec, u0) + spec.kappa * script_D(spec, u0);
  const double vd = std::abs(rep.sectors.front().eigenvalues.front() - vac) / (1.0 + std::abs(vac));
  c.residual("vacuum_eigenvalue", vd);
  c.checks.add("vacuum_eigenvalue", vd, c.tol);
  c.checks.add_bool("sector_dimensions", dims_ok);
}

}  // namespace detail

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> cap;
};

/// Runs one subcommand. Never throws: precondition and internal failures are
/// folded into the report and the exit code. wall_time_s is filled by the caller.
inline Outcome run(const std::string& sub, RunConfig cfg, const Overrides& ov = {}) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.cap) cfg.cap = *ov.cap;
  if (ov.tol) cfg.tol = *ov.tol;
  const double tol = cfg.tol.value_or(default_tolerance(sub));

  Outcome out;
  json& r = out.report;
  r["format_version"] = kFormatVersion;
  r["subcommand"] = sub;
  r["config"] = echo(cfg);
  r["seed"] = cfg.seed;
  r["tolerance"] = tol;
  r["wall_time_s"] = 0.0;

  static const std::map<std::string, std::function<void(detail::Context&)>> table{
      {"identities", detail::run_identities}, {"solve", detail::run_solve},
      {"verify", detail::run_verify},         {"census", detail::run_census},
      {"nilpotency", detail::run_nilpotency}, {"degenerate", detail::run_degenerate},
      {"xeq", detail::run_xeq},               {"spectrum", detail::run_spectrum}};

  detail::Context ctx(cfg, tol);
  ctx.notices = cfg.notices;
  auto finish = [&](const std::string& status, int code) {
    r["status"] = status;
    r["notices"] = ctx.notices;
    r["results"] = ctx.results;
    r["residuals"] = ctx.residuals;
    r["checks"] = ctx.checks.list();
    out.code = code;
    return out;
  };

  const auto it = table.find(sub);
  if (it == table.end()) {
    r["error"] = "unknown subcommand: " + sub;
    return finish("precondition_failed", kPrecondition);
  }
  try {
    cfg.chain.validate();
    it->second(ctx);
  } catch (const PreconditionError& e) {
    r["error"] = e.what();
    ctx.results = json::object();
    ctx.residuals = json::object();
    ctx.checks = detail::Checks{};
    return finish("precondition_failed", kPrecondition);
  } catch (const std::exception& e) {
    r["error"] = e.what();
    ctx.results = json::object();
    ctx.residuals = json::object();
    ctx.checks = detail::Checks{};
    return finish("internal_error", kInternal);
  }
  return ctx.checks.all() ? finish("pass", kPass) : finish("fail", kChecksFailed);
}

}  // namespace xxzroots::cli
