#pragma once

#include <cstdint>
#include <vector>

#include <algorithm>

#include "drinfeld/formal_module.hpp"

namespace testing {

// splitmix64; fixed seeds keep every run identical.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  std::int64_t range(std::int64_t lo, std::int64_t hi) { return lo + static_cast<std::int64_t>(below(hi - lo + 1)); }
};

inline drinfeld::LaurentSeries random_series(Rng& rng, const drinfeld::Field& F, std::int64_t v_lo, std::int64_t v_hi,
                                              int max_len, bool exact) {
  const auto v = rng.range(v_lo, v_hi);
  const int len = static_cast<int>(rng.range(1, max_len));
  std::vector<std::uint32_t> c(len);
  for (auto& x : c) x = static_cast<std::uint32_t>(rng.below(F->size()));
  c[0] = static_cast<std::uint32_t>(1 + rng.below(F->size() - 1));
  const auto prec = exact ? drinfeld::LaurentSeries::kExact : v + len + rng.range(0, 3);
  return drinfeld::LaurentSeries::from_coefficients(F, v, std::move(c), prec);
}

inline drinfeld::OPolynomial random_o(Rng& rng, const drinfeld::Field& fq, int m) {
  std::vector<std::uint32_t> a(m);
  for (auto& x : a) x = static_cast<std::uint32_t>(rng.below(fq->size()));
  return drinfeld::OPolynomial(fq, a);
}

// Unit-led series t^v (c_0 + c_1 t + ...) known to `len` terms.
inline drinfeld::LaurentSeries known_series(Rng& rng, const drinfeld::Field& F, std::int64_t v, int len) {
  std::vector<std::uint32_t> c(len);
  for (auto& x : c) x = static_cast<std::uint32_t>(rng.below(F->size()));
  c[0] = static_cast<std::uint32_t>(1 + rng.below(F->size() - 1));
  return drinfeld::LaurentSeries::from_coefficients(F, v, std::move(c), v + len);
}

inline drinfeld::OPolynomial widen(const drinfeld::OPolynomial& a, int m) {
  auto c = a.coefficients();
  c.resize(m, 0);
  return drinfeld::OPolynomial(a.field(), c);
}

inline bool same_poly(const drinfeld::AdditivePolynomial<drinfeld::LaurentSeries>& a,
                      const drinfeld::AdditivePolynomial<drinfeld::LaurentSeries>& b) {
  const auto n = std::max(a.coefficients().size(), b.coefficients().size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& F = a[0].field();
    auto x = i < a.coefficients().size() ? a[i] : drinfeld::LaurentSeries::zero(F);
    auto y = i < b.coefficients().size() ? b[i] : drinfeld::LaurentSeries::zero(F);
    if (!drinfeld::approx_equal(x, y)) return false;
  }
  return true;
}

}  // namespace testing
