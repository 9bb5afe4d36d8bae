#pragma once

// Torsion of the etale part over a specialized stratum, the level structure
// given by a basis, and checks of the product and reduction identities.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drinfeld/error.hpp"
#include "drinfeld/finite_field.hpp"
#include "drinfeld/formal_module.hpp"
#include "drinfeld/laurent_series.hpp"
#include "drinfeld/local_tower.hpp"
#include "drinfeld/series_poly.hpp"

namespace drinfeld {

/// A vector in (o/(pi^m))^k.
using Coordinates = std::vector<OPolynomial>;

/// All of (o/(pi^m))^k, first coordinate varying slowest.
inline std::vector<Coordinates> all_coordinates(const Field& fq, int m, int k) {
  const auto elems = all_o_elements(fq, m);
  std::vector<Coordinates> out{Coordinates{}};
  for (int i = 0; i < k; ++i) {
    std::vector<Coordinates> next;
    for (auto& v : out)
      for (auto& e : elems) {
        auto w = v;
        w.push_back(e);
        next.push_back(std::move(w));
      }
    out = std::move(next);
  }
  return out;
}

inline std::string to_string(const Coordinates& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + a[i].to_string();
  return s + ")";
}

struct TorsionOptions {
  std::int64_t precision = kDefaultPrecision;
  std::int64_t margin = 8;
};

class TorsionModule {
 public:
  int level() const noexcept { return m_; }
  int rank() const noexcept { return k_; }
  std::uint64_t q() const noexcept { return q_; }
  const Field& scalars() const noexcept { return fq_; }
  const Field& ambient() const noexcept { return split_.field.ambient(); }
  const SplittingData& splitting() const noexcept { return split_; }
  const std::vector<LaurentSeries>& roots() const noexcept { return split_.roots; }
  const std::vector<Coordinates>& root_coordinates() const noexcept { return coords_; }
  const std::vector<LaurentSeries>& basis() const noexcept { return basis_; }
  /// g over the top field.
  const AdditivePolynomial<LaurentSeries>& etale_polynomial() const noexcept { return g_; }
  std::int64_t threshold() const noexcept { return split_.max_root_gap + margin_; }
  std::int64_t precision() const noexcept { return split_.precision; }

  /// F_q code moved into the ambient field.
  std::uint32_t scalar(std::uint32_t c) const { return scalar_map_.at(c); }

  LaurentSeries apply_g(const LaurentSeries& x) const { return evaluate(g_, x, precision()); }

  /// The level structure: a -> sum_i sum_j a_{ij} g^{o j}(b_i).
  LaurentSeries element(const Coordinates& a) const {
    if (static_cast<int>(a.size()) != k_) throw error(errc::invalid_argument, "coordinate vector of the wrong rank");
    LaurentSeries acc = LaurentSeries::zero(ambient());
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < m_; ++j)
        if (a[i][j]) acc = acc + basis_powers_[i][j].scaled(scalar(a[i][j]));
    return truncate(acc, precision());
  }

  /**
   * Margin-checked equality: distinct roots differ at valuation at most the
   * largest root gap, one root's approximations agree beyond gap + margin.
   */
  bool same(const LaurentSeries& x, const LaurentSeries& y) const {
    auto d = x - y;
    const auto v = d.valuation_or_bound();
    if (!d.is_zero() && v <= split_.max_root_gap) return false;
    if (v > threshold()) return true;
    throw error(errc::ambiguous_identification,
                "difference " + d.to_string("z") + " falls inside the identification margin");
  }

  bool is_zero_point(const LaurentSeries& x) const { return same(x, LaurentSeries::zero(ambient())); }

  /// Index of the root equal to x, or nullopt.
  std::optional<std::size_t> find_root(const LaurentSeries& x) const {
    std::optional<std::size_t> hit;
    for (std::size_t r = 0; r < roots().size(); ++r)
      if (same(x, roots()[r])) {
        if (hit) throw error(errc::ambiguous_identification, "element matches two roots");
        hit = r;
      }
    return hit;
  }

  Coordinates express(const LaurentSeries& x) const {
    auto r = find_root(x);
    if (!r) throw error(errc::not_a_root, "element is not a torsion point");
    return coords_[*r];
  }

  Coordinates unit_vector(int i) const {
    Coordinates a(k_, OPolynomial::zero(fq_, m_));
    a.at(i) = OPolynomial::one(fq_, m_);
    return a;
  }

 private:
  friend TorsionModule torsion_module(const StratumModule<LaurentSeries>&, int, const TorsionOptions&);

  int m_ = 1, k_ = 1;
  std::uint64_t q_ = 2;
  Field fq_;
  std::int64_t margin_ = 8;
  SplittingData split_;
  AdditivePolynomial<LaurentSeries> g_{2, {LaurentSeries::zero(make_field(2, 1, {}))}};
  std::vector<LaurentSeries> basis_;
  std::vector<std::vector<LaurentSeries>> basis_powers_;  // g^{o j}(b_i)
  std::vector<Coordinates> coords_;
  std::map<std::uint32_t, std::uint32_t> scalar_map_;
};

/**
 * Splits g^{o m} and chooses a basis greedily in root order: each new b has
 * exact order pi^m and enlarges the span to q^{m i} distinct roots.
 */
inline TorsionModule torsion_module(const StratumModule<LaurentSeries>& S, int m, const TorsionOptions& opt = {}) {
  if (m < 1) throw error(errc::invalid_argument, "level must be positive");
  if (S.g[0].is_zero()) throw error(errc::outside_open_stratum, "etale part is inseparable");
  TorsionModule T;
  T.m_ = m;
  T.k_ = S.rank();
  T.q_ = S.q;
  T.fq_ = S.scalars;
  T.margin_ = opt.margin;
  const auto P = S.etale_division_polynomial(m);
  SplitOptions so;
  so.precision = opt.precision;
  so.margin = opt.margin;
  T.split_ = splitting_tower(to_series_poly(P), LocalField::base(S.scalars), so);
  const std::uint64_t expected = checked_pow(S.q, static_cast<std::uint64_t>(m) * T.k_);
  if (T.split_.roots.size() != expected)
    throw error(errc::rank_mismatch, std::to_string(T.split_.roots.size()) + " roots, expected " + std::to_string(expected));

  const auto& amb = T.ambient();
  for (std::uint32_t c = 0; c < S.scalars->size(); ++c)
    T.scalar_map_[c] = embed(FFElement(S.scalars, c), amb, amb).code();
  std::vector<LaurentSeries> gt;
  for (auto& c : S.g.coefficients())
    gt.push_back(compose(change_field(c, amb, amb), T.split_.field.base_uniformizer(), opt.precision));
  T.g_ = AdditivePolynomial<LaurentSeries>(S.q, gt);

  const auto& R = T.split_.roots;
  const auto o_elems = all_o_elements(T.fq_, m);
  std::vector<std::optional<Coordinates>> coords(R.size());
  struct SpanPoint {
    Coordinates a;
    LaurentSeries x;
  };
  std::vector<SpanPoint> span;
  {
    auto z = T.find_root(LaurentSeries::zero(amb));
    if (!z) throw error(errc::internal_soundness, "zero is missing from the torsion roots");
    Coordinates zero(T.k_, OPolynomial::zero(T.fq_, m));
    coords[*z] = zero;
    span.push_back({zero, LaurentSeries::zero(amb)});
  }
  for (int i = 0; i < T.k_; ++i) {
    bool found = false;
    for (std::size_t cand = 0; cand < R.size() && !found; ++cand) {
      if (coords[cand]) continue;
      std::vector<LaurentSeries> gp{R[cand]};
      for (int j = 1; j < m; ++j) gp.push_back(T.apply_g(gp.back()));
      if (T.is_zero_point(gp.back())) continue;
      std::vector<std::pair<std::size_t, SpanPoint>> fresh;
      std::vector<bool> taken(R.size(), false);
      bool ok = true;
      for (auto& c : o_elems) {
        if (c.is_zero()) continue;
        LaurentSeries cx = LaurentSeries::zero(amb);
        for (int j = 0; j < m; ++j)
          if (c[j]) cx = cx + gp[j].scaled(T.scalar(c[j]));
        for (auto& s : span) {
          auto x = truncate(s.x + cx, opt.precision);
          auto idx = T.find_root(x);
          if (!idx) throw error(errc::internal_soundness, "module combination left the root set");
          if (coords[*idx] || taken[*idx]) {
            ok = false;
            break;
          }
          taken[*idx] = true;
          auto a = s.a;
          a[i] = c;
          fresh.push_back({*idx, {a, x}});
        }
        if (!ok) break;
      }
      if (!ok) continue;
      for (auto& [idx, sp] : fresh) {
        coords[idx] = sp.a;
        span.push_back(sp);
      }
      T.basis_.push_back(R[cand]);
      T.basis_powers_.push_back(gp);
      found = true;
    }
    if (!found) throw error(errc::rank_mismatch, "could not extend the basis beyond rank " + std::to_string(i));
  }
  for (auto& c : coords) {
    if (!c) throw error(errc::rank_mismatch, "some roots are not reached by the basis");
    T.coords_.push_back(*c);
  }
  return T;
}

struct ProductReport {
  SeriesPoly epsilon;  // quotient, in the top uniformizer
  bool pass = false;
  std::string detail;
};

/**
 * Divides prod (T - x) by the monic `target` and demands quotient 1 and
 * remainder 0 at the working precision.
 */
inline ProductReport check_product_identity(const std::vector<LaurentSeries>& values, const SeriesPoly& target,
                                            std::int64_t cap) {
  const auto& F = target.front().field();
  auto prod = spoly::from_roots(values, F, cap);
  ProductReport rep;
  if (prod.size() != target.size()) {
    rep.detail = "degree " + std::to_string(prod.size() - 1) + " against " + std::to_string(target.size() - 1);
    throw error(errc::identity_failed, rep.detail);
  }
  auto [quo, rem] = spoly::divmod(prod, target, cap);
  rep.epsilon = quo;
  std::string diff;
  for (std::size_t i = 0; i < rem.size(); ++i)
    if (!rem[i].is_zero()) diff += " T^" + std::to_string(i) + ": " + rem[i].to_string("z") + ";";
  const bool unit_one = quo.size() == 1 && approx_equal(quo[0], LaurentSeries::constant(F, 1));
  if (!unit_one) diff += " epsilon = " + spoly::to_string(quo, "T", "z") + ";";
  if (!diff.empty()) throw error(errc::identity_failed, "product identity:" + diff);
  rep.pass = true;
  rep.detail = "epsilon = 1";
  return rep;
}

/// Product of (T - phi(a)) over the level-1 labels at h = 0 equals [pi](T).
inline ProductReport verify_product_identity(const TorsionModule& T, int n) {
  if (T.level() != 1 || T.rank() != n)
    throw error(errc::invalid_argument, "product identity needs the full level-1 module at h = 0");
  std::vector<LaurentSeries> values;
  for (auto& a : all_coordinates(T.scalars(), 1, n)) values.push_back(T.element(a));
  return check_product_identity(values, T.etale_polynomial().dense(), T.precision());
}

struct ReductionReport {
  std::vector<LaurentSeries> epsilon;  // coefficients of T^0, T^1, ... over F_q((t))
  LaurentSeries epsilon0 = LaurentSeries::zero(make_field(2, 1, {}));
  LaurentSeries expected0 = LaurentSeries::zero(make_field(2, 1, {}));
  bool multiset = false;
  bool pass = false;
  std::string detail;
};

/**
 * g(T)^{q^h} = eps(T) g(T^{q^h}) with eps a unit power series and
 * eps(0) = u_h^{q^h - 1}; the level-1 labels of the full module map onto the
 * roots of g, each hit q^h times once connected labels are sent to 0.
 */
inline ReductionReport verify_reduction_identity(const StratumModule<LaurentSeries>& S, int m,
                                                 const TorsionOptions& opt = {}) {
  const auto& fq = S.scalars;
  const std::uint64_t qh = checked_pow(S.q, S.h);
  const auto& c = S.g.coefficients();
  if (c[0].is_zero()) throw error(errc::outside_open_stratum, "u_h vanishes");
  const std::int64_t cap = opt.precision;

  // A = g(T)^{q^h} / T^{q^h} and B = g(T^{q^h}) / T^{q^h}.
  const std::size_t len = static_cast<std::size_t>(checked_pow(S.q, c.size() - 1) * qh) + 1;
  std::vector<LaurentSeries> A(len, LaurentSeries::zero(fq)), B(len, LaurentSeries::zero(fq));
  std::uint64_t qi = 1;
  for (std::size_t i = 0; i < c.size(); ++i, qi *= S.q) {
    const std::size_t e = static_cast<std::size_t>(qi * qh - qh);
    A[e] = coeff_frobenius(c[i], qh);
    B[e] = c[i];
  }
  ReductionReport rep;
  const auto binv = invert(B[0], cap);
  rep.epsilon.assign(len, LaurentSeries::zero(fq));
  for (std::size_t k = 0; k < len; ++k) {
    LaurentSeries s = A[k];
    for (std::size_t j = 1; j <= k; ++j)
      if (!B[j].is_exact_zero()) s = s - B[j] * rep.epsilon[k - j];
    rep.epsilon[k] = truncate(s * binv, cap);
  }
  rep.epsilon0 = rep.epsilon[0];
  rep.expected0 = pow(c[0], static_cast<std::int64_t>(qh - 1));
  std::string diff;
  if (rep.epsilon0.is_zero()) diff += " eps(0) is not a unit;";
  if (!approx_equal(rep.epsilon0, rep.expected0))
    diff += " eps(0) = " + rep.epsilon0.to_string() + " but u_h^(q^h-1) = " + rep.expected0.to_string() + ";";
  for (std::size_t k = 0; k < len; ++k) {
    LaurentSeries s = LaurentSeries::zero(fq);
    for (std::size_t j = 0; j <= k; ++j)
      if (!B[j].is_exact_zero()) s = s + B[j] * rep.epsilon[k - j];
    if (!approx_equal(s, A[k])) diff += " eps * g(T^{q^h}) differs at T^" + std::to_string(k) + ";";
  }

  auto T = torsion_module(S, m, opt);
  const auto& amb = T.ambient();
  std::vector<LaurentSeries> layer;
  std::string multi;
  std::vector<int> hits(T.roots().size(), 0);
  for (auto& a : all_coordinates(fq, 1, S.n)) {
    Coordinates shifted;
    for (int i = S.h; i < S.n; ++i) {
      auto x = OPolynomial::zero(fq, m);
      auto coeffs = x.coefficients();
      coeffs[m - 1] = a[i][0];
      shifted.emplace_back(fq, coeffs);
    }
    auto x = T.element(shifted);
    layer.push_back(x);
    if (!T.is_zero_point(T.apply_g(x))) multi += " level-1 label outside the roots of g;";
    if (auto r = T.find_root(x)) ++hits[*r];
  }
  std::size_t g_roots = 0;
  for (std::size_t r = 0; r < T.roots().size(); ++r) {
    const bool is_g_root = T.is_zero_point(T.apply_g(T.roots()[r]));
    if (is_g_root) ++g_roots;
    if (is_g_root && hits[r] != static_cast<int>(qh)) multi += " root hit " + std::to_string(hits[r]) + " times;";
    if (!is_g_root && hits[r]) multi += " label lands outside the level-1 layer;";
  }
  if (g_roots != checked_pow(S.q, S.rank())) multi += " level-1 layer has " + std::to_string(g_roots) + " roots;";

  SeriesPoly gq(static_cast<std::size_t>(checked_pow(S.q, S.n)) + 1, LaurentSeries::zero(amb));
  qi = 1;
  for (std::size_t i = 0; i < c.size(); ++i, qi *= S.q)
    gq[qi * qh] = coeff_frobenius(T.etale_polynomial()[i], qh);
  try {
    check_product_identity(layer, gq, T.precision());
  } catch (const error& e) {
    if (e.kind() != errc::identity_failed) throw;
    multi += std::string(" ") + e.what() + ";";
  }
  rep.multiset = multi.empty();
  diff += multi;
  if (!diff.empty()) throw error(errc::identity_failed, "reduction identity:" + diff);
  rep.pass = true;
  rep.detail = "eps(0) = " + rep.epsilon0.to_string();
  return rep;
}

/// Every nonzero label maps to a nonzero point.
inline bool verify_nonvanishing(const TorsionModule& T) {
  for (auto& a : all_coordinates(T.scalars(), T.level(), T.rank())) {
    if (std::all_of(a.begin(), a.end(), [](const OPolynomial& x) { return x.is_zero(); })) continue;
    auto x = T.element(a);
    if (!x.is_zero()) continue;
    if (x.absolute_precision() > T.threshold()) return false;
    throw error(errc::precision_exhausted, "cannot decide whether phi" + to_string(a) + " vanishes");
  }
  return true;
}

}  // namespace drinfeld
