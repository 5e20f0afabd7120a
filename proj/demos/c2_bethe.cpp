// Two spin-1/2 sites, one magnon: solve the Bethe equations, build the vectors
// and compare the eigenvalues against exact diagonalization.
#include <iostream>

#include "xxzroots/xxzroots.hpp"

using namespace xxzroots;

int main() {
  ChainSpec spec;
  spec.sites = {{1, 1.0}, {1, 2.3}};
  spec.gamma = 0.7;
  spec.kappa = 1.3;
  const auto m = build_monodromy(spec);
  const auto rep = solve_bethe(spec, m, 1);
  const Complex u0{0.4, 0.9};
  const auto exact = exact_spectrum(spec, m, u0);

  std::cout << "sector k=1: dimension " << rep.weight_dim << ", solutions " << rep.solutions.size() << "\n";
  for (const auto& s : rep.solutions) {
    const Complex lam = eigenvalue_Tbv(spec, s.roots, u0);
    const std::vector<Complex> us{u0};
    const auto chk = verify_eigen(spec, m, s.roots, us);
    std::cout << "  t = " << s.roots[0] << "  Lambda(u0) = " << lam << "  residual " << chk.max_residual
              << "  spectrum distance " << spectrum_distance(exact, 1, lam) << "\n";
  }
  std::cout << "exact sector k=1:";
  for (const auto& e : exact.sectors[1].eigenvalues) std::cout << " " << e;
  std::cout << "\n";
}
