#pragma once

// Dense polynomials in T whose coefficients are truncated Laurent series, plus
// the small amount of linear algebra the tower construction needs.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drinfeld/error.hpp"
#include "drinfeld/laurent_series.hpp"

namespace drinfeld {

/// Coefficients low to high.
using SeriesPoly = std::vector<LaurentSeries>;

namespace spoly {

inline LaurentSeries zero_like(const SeriesPoly& p) { return LaurentSeries::zero(p.front().field()); }

/// Drops exact-zero leading coefficients.
inline SeriesPoly trim(SeriesPoly p) {
  while (p.size() > 1 && p.back().is_exact_zero()) p.pop_back();
  return p;
}

/// Drops leading coefficients that vanish at the available precision.
inline SeriesPoly trim_approximate(SeriesPoly p) {
  while (p.size() > 1 && p.back().is_zero()) p.pop_back();
  return p;
}

inline int degree(const SeriesPoly& p) {
  auto t = trim(p);
  if (t.size() == 1 && t[0].is_exact_zero()) return -1;
  return static_cast<int>(t.size()) - 1;
}

inline bool is_zero(const SeriesPoly& p) {
  return std::all_of(p.begin(), p.end(), [](const LaurentSeries& c) { return c.is_zero(); });
}

inline SeriesPoly truncate(SeriesPoly p, std::int64_t cap) {
  for (auto& c : p) c = drinfeld::truncate(c, cap);
  return p;
}

inline SeriesPoly add(const SeriesPoly& a, const SeriesPoly& b) {
  SeriesPoly r;
  const auto& f = a.empty() ? b.front().field() : a.front().field();
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i < a.size() && i < b.size()) r.push_back(a[i] + b[i]);
    else r.push_back(i < a.size() ? a[i] : b[i]);
  }
  if (r.empty()) r.push_back(LaurentSeries::zero(f));
  return trim(r);
}

inline SeriesPoly sub(const SeriesPoly& a, const SeriesPoly& b) {
  SeriesPoly r;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i < a.size() && i < b.size()) r.push_back(a[i] - b[i]);
    else r.push_back(i < a.size() ? a[i] : -b[i]);
  }
  return trim(r);
}

inline SeriesPoly mul(const SeriesPoly& a, const SeriesPoly& b, std::int64_t cap) {
  SeriesPoly r(a.size() + b.size() - 1, LaurentSeries::zero(a.front().field()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_exact_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_exact_zero()) continue;
      r[i + j] = drinfeld::truncate(r[i + j] + a[i] * b[j], cap);
    }
  }
  return trim(r);
}

inline SeriesPoly scale(const SeriesPoly& a, const LaurentSeries& s, std::int64_t cap) {
  SeriesPoly r;
  for (auto& c : a) r.push_back(drinfeld::truncate(c * s, cap));
  return r;
}

inline LaurentSeries eval(const SeriesPoly& p, const LaurentSeries& x, std::int64_t cap) {
  LaurentSeries acc = p.back();
  for (int i = static_cast<int>(p.size()) - 2; i >= 0; --i) acc = drinfeld::truncate(acc * x + p[i], cap);
  return acc;
}

inline SeriesPoly derivative(const SeriesPoly& p) {
  const FiniteField& F = *p.front().field();
  SeriesPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i].scaled(F.from_int(static_cast<long long>(i))));
  if (d.empty()) d.push_back(LaurentSeries::zero(p.front().field()));
  return trim(d);
}

/// P(c + T).
inline SeriesPoly taylor_shift(const SeriesPoly& p, const LaurentSeries& c, std::int64_t cap) {
  const auto& f = p.front().field();
  SeriesPoly acc{p.back()};
  SeriesPoly lin{c, LaurentSeries::constant(f, 1)};
  for (int i = static_cast<int>(p.size()) - 2; i >= 0; --i) {
    acc = mul(acc, lin, cap);
    acc[0] = drinfeld::truncate(acc[0] + p[i], cap);
  }
  return acc;
}

/// Long division by a polynomial whose leading coefficient is not an approximate zero.
inline std::pair<SeriesPoly, SeriesPoly> divmod(SeriesPoly a, SeriesPoly b, std::int64_t cap) {
  b = trim_approximate(trim(b));
  a = trim(a);
  if (b.back().is_zero()) throw error(errc::division_by_zero, "division by an approximately zero polynomial");
  const auto& f = a.front().field();
  const int db = static_cast<int>(b.size()) - 1;
  if (a.size() < b.size()) return {SeriesPoly{LaurentSeries::zero(f)}, a};
  const auto lc_inv = invert(b.back(), cap);
  SeriesPoly q(a.size() - b.size() + 1, LaurentSeries::zero(f));
  for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
    auto c = drinfeld::truncate(a[i] * lc_inv, cap);
    q[i - db] = c;
    a[i] = LaurentSeries::zero(f);
    if (c.is_exact_zero()) continue;
    for (int j = 0; j < db; ++j) a[i - db + j] = drinfeld::truncate(a[i - db + j] - c * b[j], cap);
  }
  a.resize(std::max(db, 1), LaurentSeries::zero(f));
  return {trim(q), trim(a)};
}

inline SeriesPoly from_roots(const std::vector<LaurentSeries>& roots, const Field& f, std::int64_t cap) {
  SeriesPoly acc{LaurentSeries::constant(f, 1)};
  for (auto& r : roots) acc = mul(acc, SeriesPoly{-r, LaurentSeries::constant(f, 1)}, cap);
  return acc;
}

inline SeriesPoly compose_coefficients(const SeriesPoly& p, const LaurentSeries& rho, std::int64_t cap) {
  SeriesPoly r;
  for (auto& c : p) r.push_back(compose(c, rho, cap));
  return r;
}

inline SeriesPoly change_field(const SeriesPoly& p, const Field& target, const Field& ambient = nullptr) {
  SeriesPoly r;
  for (auto& c : p) r.push_back(drinfeld::change_field(c, target, ambient));
  return r;
}

/// Degree of gcd(a, b) by the Euclidean algorithm; coefficients that vanish
/// at the working precision are treated as zero.
inline int gcd_degree(SeriesPoly a, SeriesPoly b, std::int64_t cap) {
  a = trim_approximate(trim(a));
  b = trim_approximate(trim(b));
  if (is_zero(b)) return static_cast<int>(a.size()) - 1;
  if (is_zero(a)) return static_cast<int>(b.size()) - 1;
  if (a.size() < b.size()) std::swap(a, b);
  while (!is_zero(b)) {
    if (b.size() == 1) return 0;
    auto r = trim_approximate(divmod(a, b, cap).second);
    a = std::move(b);
    b = std::move(r);
  }
  return static_cast<int>(a.size()) - 1;
}

/// Valuation of Res(a, b), or nullopt when the polynomials share a factor at
/// the working precision.
inline std::optional<std::int64_t> resultant_valuation(SeriesPoly a, SeriesPoly b, std::int64_t cap) {
  a = trim_approximate(trim(a));
  b = trim_approximate(trim(b));
  if (is_zero(a) || is_zero(b)) return std::nullopt;
  if (a.size() < b.size()) std::swap(a, b);
  std::int64_t acc = 0;
  while (true) {
    const std::int64_t da = static_cast<std::int64_t>(a.size()) - 1;
    if (b.size() == 1) return acc + da * b[0].v0();
    auto r = trim_approximate(divmod(a, b, cap).second);
    if (is_zero(r)) return std::nullopt;
    const std::int64_t dr = static_cast<std::int64_t>(r.size()) - 1;
    acc += (da - dr) * b.back().v0();
    a = std::move(b);
    b = std::move(r);
  }
}

inline std::string to_string(const SeriesPoly& p, const std::string& var = "T", const std::string& svar = "t") {
  std::string s;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
    if (p[i].is_exact_zero()) continue;
    std::string c = p[i].to_string(svar);
    if (!s.empty()) s += " + ";
    bool simple = c.find(' ') == std::string::npos;
    if (i == 0) {
      s += c;
    } else {
      if (!p[i].is_one()) s += (simple ? c : "(" + c + ")") + "*";
      s += var + (i > 1 ? "^" + std::to_string(i) : "");
    }
  }
  return s.empty() ? "0" : s;
}

}  // namespace spoly

/// Square matrices of series, row-major.
struct SeriesMatrix {
  int n;
  std::vector<LaurentSeries> a;
  LaurentSeries& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const LaurentSeries& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/**
 * Solves M x = rhs by Gaussian elimination with full pivoting on the smallest
 * valuation, the stable choice over a discretely valued field.
 */
inline std::vector<LaurentSeries> solve_linear(SeriesMatrix m, std::vector<LaurentSeries> rhs, std::int64_t cap) {
  const int n = m.n;
  std::vector<int> col(n);
  std::iota(col.begin(), col.end(), 0);
  for (int k = 0; k < n; ++k) {
    int pi = -1, pj = -1;
    std::int64_t best = LaurentSeries::kExact;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        const auto& e = m.at(i, col[j]);
        if (!e.is_zero() && e.v0() < best) best = e.v0(), pi = i, pj = j;
      }
    if (pi < 0) throw error(errc::precision_exhausted, "linear system is singular at the working precision");
    if (pi != k) {
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(pi, j));
      std::swap(rhs[k], rhs[pi]);
    }
    std::swap(col[k], col[pj]);
    const auto inv = invert(m.at(k, col[k]), cap);
    for (int i = k + 1; i < n; ++i) {
      const auto& lead = m.at(i, col[k]);
      if (lead.is_exact_zero()) continue;
      auto factor = drinfeld::truncate(lead * inv, cap);
      for (int j = k; j < n; ++j) m.at(i, col[j]) = drinfeld::truncate(m.at(i, col[j]) - factor * m.at(k, col[j]), cap);
      rhs[i] = drinfeld::truncate(rhs[i] - factor * rhs[k], cap);
    }
  }
  std::vector<LaurentSeries> x(n, LaurentSeries::zero(rhs.front().field()));
  for (int k = n - 1; k >= 0; --k) {
    auto s = rhs[k];
    for (int j = k + 1; j < n; ++j) s = s - m.at(k, col[j]) * x[col[j]];
    x[col[k]] = drinfeld::truncate(divide(s, m.at(k, col[k]), cap), cap);
  }
  return x;
}

}  // namespace drinfeld
