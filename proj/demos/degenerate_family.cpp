// Root of unity q0 = i (M = 2): build the limit operator BB(u;X) on two sites,
// check that BB(u;X)|0> is an eigenvector and that its eigenvalue does not move with u.
#include <iostream>

#include "xxzroots/xxzroots.hpp"

using namespace xxzroots;

int main() {
  const auto ctx = make_root_ctx(2, 1);
  ChainSpec spec;
  spec.sites = {{1, 1.0}, {1, 2.3}};
  spec = at_root(spec, ctx);
  spec.kappa = twist_for(spec, ctx, 0);
  const auto m = build_monodromy(spec);
  const LimitCreationOperator bb(spec, ctx);
  const std::vector<Complex> samples{{0.3, 0.2}, {1.1, -0.4}, {-0.7, 0.8}};
  const auto exact = exact_spectrum(spec, m, samples[0]);

  for (Complex u : {Complex(0.7, 0.4), Complex(1.9, -0.8), Complex(-0.5, 1.2)}) {
    const std::vector<Complex> us{u};
    const auto sched = x_schedule(spec, ctx, 0, {}, us);
    const auto chk = verify_bam(spec, ctx, m, bb, 0, {}, us, samples);
    std::cout << "u = " << u << "  X = (" << sched.X[0][0] << ", " << sched.X[0][1] << ")"
              << "  |Psi| = " << chk.vector_norm << "  residual " << chk.max_residual;
    if (!chk.zero_vector)
      std::cout << "  Lambda = " << chk.eigenvalues[0] << "  spectrum distance "
                << spectrum_distance(exact, 2, chk.eigenvalues[0]);
    std::cout << "\n";
  }

  // Any other solution of the cancellation system differs by a constant shift.
  const auto sol = solve_xeq(spec, ctx, {}, Complex(0.7, 0.4), Complex(3.0, -1.0));
  std::cout << "xeq status " << to_string(sol.status) << ", x = (" << sol.x[0] << ", " << sol.x[1] << ")\n";
}
