// Splits the 2-torsion of the height-2 module over F_2((t)) at u0 = u1 = t
// and prints the tower, the roots and their labels.

#include <iostream>

#include "drinfeld/drinfeld.hpp"

using namespace drinfeld;

int main() {
  const auto X = build_model(2, 2);
  const auto S = reduce_to_stratum(X, 0);
  const auto& fq = S.scalars;
  const auto spec = specialize(S, {{0, LaurentSeries::monomial(fq, 1, 1)}, {1, LaurentSeries::monomial(fq, 1, 1)}});

  std::cout << "[pi](T) = " << spoly::to_string(to_series_poly(spec.g)) << "\n";
  const auto T = torsion_module(spec, 1);
  std::cout << "field: " << T.splitting().field.describe() << "\n";
  std::cout << "geometric degree: " << T.splitting().geometric_degree << "\n";
  for (std::size_t i = 0; i < T.roots().size(); ++i)
    std::cout << "  " << to_string(T.root_coordinates()[i]) << "  " << truncate(T.roots()[i], 6).to_string("z") << "\n";
  const auto M = tame_monodromy_matrix(T);
  std::cout << "inertia generator: " << M.to_string() << " of order " << matrix_order(M) << "\n";
}
