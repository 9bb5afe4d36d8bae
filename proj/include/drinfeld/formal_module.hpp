#pragma once

// The additive model [pi](T) = sum_{i<n} u_i T^{q^i} + T^{q^n} of the universal
// deformation, its o-action, and its restriction to a Newton stratum.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drinfeld/error.hpp"
#include "drinfeld/finite_field.hpp"
#include "drinfeld/laurent_series.hpp"
#include "drinfeld/series_poly.hpp"

namespace drinfeld {

/// Checked integer power; throws Overflow beyond 2^63.
inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  unsigned __int128 r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > (static_cast<unsigned __int128>(1) << 63)) throw error(errc::overflow, "integer power exceeds 2^63");
  }
  return static_cast<std::uint64_t>(r);
}

/**
 * Polynomials over a finite field in a fixed number of named indeterminates.
 * Used for symbolic u_i; the last variable is conventionally t.
 */
class MPoly {
 public:
  using Monomial = std::vector<std::uint64_t>;

  MPoly(Field f, int nvars) : f_(std::move(f)), nvars_(nvars) {}

  static MPoly constant(Field f, int nvars, std::uint32_t c) {
    MPoly p(std::move(f), nvars);
    if (c) p.terms_[Monomial(nvars, 0)] = c;
    return p;
  }
  static MPoly variable(Field f, int nvars, int i) {
    MPoly p(std::move(f), nvars);
    Monomial m(nvars, 0);
    m.at(i) = 1;
    p.terms_[m] = 1;
    return p;
  }

  const Field& field() const noexcept { return f_; }
  int nvars() const noexcept { return nvars_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<Monomial, std::uint32_t>& terms() const noexcept { return terms_; }

  friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

  friend MPoly operator+(const MPoly& a, const MPoly& b) {
    MPoly r = a;
    for (auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend MPoly operator-(const MPoly& a, const MPoly& b) {
    MPoly r = a;
    for (auto& [m, c] : b.terms_) r.add_term(m, a.f_->neg(c));
    return r;
  }
  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly r(a.f_, a.nvars_);
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) {
        Monomial m(a.nvars_);
        for (int i = 0; i < a.nvars_; ++i) m[i] = ma[i] + mb[i];
        r.add_term(m, a.f_->mul(ca, cb));
      }
    return r;
  }

  MPoly scaled(std::uint32_t s) const {
    MPoly r(f_, nvars_);
    for (auto& [m, c] : terms_) r.add_term(m, f_->mul(c, s));
    return r;
  }

  /// Raises to the power e, e a power of the characteristic.
  MPoly frobenius_power(std::uint64_t e) const {
    MPoly r(f_, nvars_);
    for (auto& [m, c] : terms_) {
      Monomial mm = m;
      for (auto& x : mm) x *= e;
      r.add_term(mm, f_->pow(c, e));
    }
    return r;
  }

  /// Sets variable i to zero.
  MPoly without(int i) const {
    MPoly r(f_, nvars_);
    for (auto& [m, c] : terms_)
      if (m[i] == 0) r.terms_[m] = c;
    return r;
  }

  /// Substitutes series for every variable that occurs.
  LaurentSeries evaluate(const std::vector<std::optional<LaurentSeries>>& values, const Field& target) const {
    LaurentSeries acc = LaurentSeries::zero(target);
    for (auto& [m, c] : terms_) {
      LaurentSeries term = LaurentSeries::constant(target, c);
      for (int i = 0; i < nvars_; ++i) {
        if (!m[i]) continue;
        if (!values.at(i)) throw error(errc::invalid_argument, "variable " + std::to_string(i) + " is unassigned");
        term = term * pow(*values[i], static_cast<std::int64_t>(m[i]));
      }
      acc = acc + term;
    }
    return acc;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      std::string mon;
      for (int i = 0; i < nvars_; ++i) {
        if (!it->first[i]) continue;
        if (!mon.empty()) mon += "*";
        mon += names.at(i) + (it->first[i] > 1 ? "^" + std::to_string(it->first[i]) : "");
      }
      std::string c = f_->to_string(it->second);
      if (!s.empty()) s += " + ";
      if (mon.empty()) s += c;
      else s += (it->second == 1 ? "" : c + "*") + mon;
    }
    return s;
  }

 private:
  void add_term(const Monomial& m, std::uint32_t c) {
    if (!c) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second = f_->add(it->second, c);
      if (!it->second) terms_.erase(it);
    }
  }

  Field f_;
  int nvars_;
  std::map<Monomial, std::uint32_t> terms_;
};

// Coefficient operations the additive-polynomial template relies on.
inline MPoly coeff_frobenius(const MPoly& a, std::uint64_t e) { return a.frobenius_power(e); }
inline LaurentSeries coeff_frobenius(const LaurentSeries& a, std::uint64_t e) {
  const std::uint64_t p = a.field()->characteristic();
  int r = 0;
  for (std::uint64_t x = e; x > 1; x /= p) ++r;
  return frobenius(a, r);
}
inline MPoly coeff_scalar(const MPoly& like, std::uint32_t c) { return MPoly::constant(like.field(), like.nvars(), c); }
inline LaurentSeries coeff_scalar(const LaurentSeries& like, std::uint32_t c) {
  return LaurentSeries::constant(like.field(), c);
}
inline bool coeff_is_zero(const MPoly& a) { return a.is_zero(); }
inline bool coeff_is_zero(const LaurentSeries& a) { return a.is_exact_zero(); }
inline bool coeff_equal(const MPoly& a, const MPoly& b) { return a == b; }
inline bool coeff_equal(const LaurentSeries& a, const LaurentSeries& b) { return approx_equal(a, b); }
inline MPoly coeff_scaled(const MPoly& a, std::uint32_t s) { return a.scaled(s); }
inline LaurentSeries coeff_scaled(const LaurentSeries& a, std::uint32_t s) { return a.scaled(s); }

/**
 * sum_i c_i T^{q^i}.  Composition is twisted: coefficients of the outer
 * polynomial meet q^i-th powers of the inner ones.
 */
template <class C>
class AdditivePolynomial {
 public:
  AdditivePolynomial(std::uint64_t q, std::vector<C> c) : q_(q), c_(std::move(c)) {
    if (c_.empty()) throw error(errc::invalid_argument, "additive polynomial needs a coefficient prototype");
    trim();
  }

  static AdditivePolynomial zero(std::uint64_t q, const C& like) { return {q, {coeff_scalar(like, 0)}}; }
  static AdditivePolynomial identity(std::uint64_t q, const C& like) { return {q, {coeff_scalar(like, 1)}}; }

  std::uint64_t q() const noexcept { return q_; }
  const std::vector<C>& coefficients() const noexcept { return c_; }
  const C& operator[](std::size_t i) const { return c_.at(i); }
  bool is_zero() const { return c_.size() == 1 && coeff_is_zero(c_[0]); }
  /// Largest i with a nonzero coefficient, -1 for zero.
  int q_degree() const { return is_zero() ? -1 : static_cast<int>(c_.size()) - 1; }
  std::uint64_t degree() const { return is_zero() ? 0 : checked_pow(q_, c_.size() - 1); }

  friend AdditivePolynomial operator+(const AdditivePolynomial& a, const AdditivePolynomial& b) {
    std::vector<C> r;
    for (std::size_t i = 0; i < std::max(a.c_.size(), b.c_.size()); ++i) {
      if (i < a.c_.size() && i < b.c_.size()) r.push_back(a.c_[i] + b.c_[i]);
      else r.push_back(i < a.c_.size() ? a.c_[i] : b.c_[i]);
    }
    return {a.q_, std::move(r)};
  }
  friend AdditivePolynomial operator-(const AdditivePolynomial& a, const AdditivePolynomial& b) {
    std::vector<C> r;
    for (std::size_t i = 0; i < std::max(a.c_.size(), b.c_.size()); ++i) {
      if (i < a.c_.size() && i < b.c_.size()) r.push_back(a.c_[i] - b.c_[i]);
      else r.push_back(i < a.c_.size() ? a.c_[i] : coeff_scalar(b.c_[i], 0) - b.c_[i]);
    }
    return {a.q_, std::move(r)};
  }
  friend bool operator==(const AdditivePolynomial& a, const AdditivePolynomial& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      if (!coeff_equal(a.c_[i], b.c_[i])) return false;
    return true;
  }

  AdditivePolynomial scaled(std::uint32_t s) const {
    std::vector<C> r;
    for (auto& c : c_) r.push_back(coeff_scaled(c, s));
    return {q_, std::move(r)};
  }

  /// (this o other)(T) = this(other(T)).
  AdditivePolynomial compose(const AdditivePolynomial& inner) const {
    std::vector<C> r(c_.size() + inner.c_.size() - 1, coeff_scalar(c_[0], 0));
    std::uint64_t qi = 1;
    for (std::size_t i = 0; i < c_.size(); ++i, qi *= q_) {
      if (coeff_is_zero(c_[i])) continue;
      for (std::size_t j = 0; j < inner.c_.size(); ++j) {
        if (coeff_is_zero(inner.c_[j])) continue;
        r[i + j] = r[i + j] + c_[i] * coeff_frobenius(inner.c_[j], qi);
      }
    }
    return {q_, std::move(r)};
  }

  /// Coefficients raised to the e-th power, e a power of p.
  AdditivePolynomial twisted(std::uint64_t e) const {
    std::vector<C> r;
    for (auto& c : c_) r.push_back(coeff_frobenius(c, e));
    return {q_, std::move(r)};
  }

  /// Dense coefficient list of T^0..T^deg.
  std::vector<C> dense() const {
    std::vector<C> r(degree() + 1, coeff_scalar(c_[0], 0));
    std::uint64_t qi = 1;
    for (std::size_t i = 0; i < c_.size(); ++i, qi *= q_) r[qi] = c_[i];
    return r;
  }

  /// Rendering convention for reports: (i, coefficient of T^{q^i}) pairs.
  template <class Fmt>
  std::string to_string(Fmt&& fmt) const {
    std::string s = "[";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (coeff_is_zero(c_[i])) continue;
      if (s.size() > 1) s += ", ";
      s += "(" + std::to_string(i) + ", " + fmt(c_[i]) + ")";
    }
    return s + "]";
  }

 private:
  void trim() {
    while (c_.size() > 1 && coeff_is_zero(c_.back())) c_.pop_back();
  }

  std::uint64_t q_;
  std::vector<C> c_;
};

/// P(x) for a series x, each term kept to `cap` coefficients.
inline LaurentSeries evaluate(const AdditivePolynomial<LaurentSeries>& P, const LaurentSeries& x, std::int64_t cap) {
  LaurentSeries acc = LaurentSeries::zero(x.field());
  std::uint64_t qi = 1;
  for (std::size_t i = 0; i < P.coefficients().size(); ++i, qi *= P.q()) {
    const auto& c = P[i];
    if (c.is_exact_zero()) continue;
    acc = acc + truncate(c * truncate(coeff_frobenius(x, qi), cap), cap);
  }
  return truncate(acc, cap);
}

/// Element a_0 + a_1 pi + ... + a_{m-1} pi^{m-1} of o/(pi^m) with a_j in F_q.
class OPolynomial {
 public:
  OPolynomial(Field fq, std::vector<std::uint32_t> a) : f_(std::move(fq)), a_(std::move(a)) {
    if (a_.empty()) throw error(errc::invalid_argument, "o/(pi^m) needs m >= 1");
  }
  static OPolynomial zero(Field fq, int m) { return {std::move(fq), std::vector<std::uint32_t>(m, 0)}; }
  static OPolynomial one(Field fq, int m) {
    std::vector<std::uint32_t> a(m, 0);
    a[0] = 1;
    return {std::move(fq), std::move(a)};
  }

  const Field& field() const noexcept { return f_; }
  int level() const noexcept { return static_cast<int>(a_.size()); }
  const std::vector<std::uint32_t>& coefficients() const noexcept { return a_; }
  std::uint32_t operator[](std::size_t j) const { return a_.at(j); }
  bool is_zero() const { return std::all_of(a_.begin(), a_.end(), [](auto x) { return x == 0; }); }
  bool is_unit() const { return a_[0] != 0; }

  friend bool operator==(const OPolynomial& a, const OPolynomial& b) { return a.a_ == b.a_; }
  friend auto operator<=>(const OPolynomial& a, const OPolynomial& b) { return a.a_ <=> b.a_; }

  friend OPolynomial operator+(const OPolynomial& a, const OPolynomial& b) {
    auto r = a;
    for (std::size_t j = 0; j < r.a_.size(); ++j) r.a_[j] = a.f_->add(a.a_[j], b.a_.at(j));
    return r;
  }
  friend OPolynomial operator-(const OPolynomial& a, const OPolynomial& b) {
    auto r = a;
    for (std::size_t j = 0; j < r.a_.size(); ++j) r.a_[j] = a.f_->sub(a.a_[j], b.a_.at(j));
    return r;
  }
  friend OPolynomial operator*(const OPolynomial& a, const OPolynomial& b) {
    auto r = zero(a.f_, a.level());
    for (std::size_t i = 0; i < a.a_.size(); ++i)
      for (std::size_t j = 0; i + j < a.a_.size(); ++j)
        r.a_[i + j] = a.f_->add(r.a_[i + j], a.f_->mul(a.a_[i], b.a_.at(j)));
    return r;
  }
  OPolynomial operator-() const { return zero(f_, level()) - *this; }

  /// Multiplication by pi.
  OPolynomial shifted() const {
    auto r = zero(f_, level());
    for (std::size_t j = 0; j + 1 < a_.size(); ++j) r.a_[j + 1] = a_[j];
    return r;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t j = 0; j < a_.size(); ++j) {
      if (!a_[j]) continue;
      if (!s.empty()) s += " + ";
      std::string c = f_->to_string(a_[j]);
      if (j == 0) s += c;
      else s += (a_[j] == 1 ? "" : c + "*") + std::string("pi") + (j > 1 ? "^" + std::to_string(j) : "");
    }
    return s.empty() ? "0" : s;
  }

 private:
  Field f_;
  std::vector<std::uint32_t> a_;
};

/// Every element of o/(pi^m) in lexicographic order of coefficient codes.
inline std::vector<OPolynomial> all_o_elements(const Field& fq, int m) {
  std::vector<OPolynomial> out;
  const std::uint64_t q = fq->size();
  const std::uint64_t total = checked_pow(q, m);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::vector<std::uint32_t> a(m);
    std::uint64_t x = idx;
    for (int j = 0; j < m; ++j) a[j] = static_cast<std::uint32_t>(x % q), x /= q;
    out.emplace_back(fq, std::move(a));
  }
  return out;
}

template <class C>
struct FormalOModule {
  std::uint64_t q;
  int n;
  Field scalars;       // F_q
  std::vector<C> u;    // u_0 .. u_n, with u_n = 1 in the canonical model

  AdditivePolynomial<C> pi() const { return {q, u}; }
};

/// Index of t among the symbolic variables u_0..u_{n-1}, t.
inline int t_variable(int n) { return n; }

inline std::vector<std::string> variable_names(int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back("u" + std::to_string(i));
  v.push_back("t");
  return v;
}

/// Symbolic model over F_q[u_0, ..., u_{n-1}, t].
inline FormalOModule<MPoly> build_model(std::uint64_t q, int n, std::uint32_t working_characteristic) {
  auto [p, r] = prime_power(q);
  if (p != working_characteristic)
    throw error(errc::characteristic_mismatch,
                "q = " + std::to_string(q) + " is not a power of " + std::to_string(working_characteristic));
  if (n < 1) throw error(errc::invalid_argument, "height must be at least 1");
  auto fq = make_field(p, r, {});
  FormalOModule<MPoly> X{q, n, fq, {}};
  for (int i = 0; i < n; ++i) X.u.push_back(MPoly::variable(fq, n + 1, i));
  X.u.push_back(MPoly::constant(fq, n + 1, 1));
  return X;
}

inline FormalOModule<MPoly> build_model(std::uint64_t q, int n) { return build_model(q, n, prime_power(q).first); }

/// Model with the u_i given as series over F_q((t)).
inline FormalOModule<LaurentSeries> build_model(std::uint64_t q, int n, const std::vector<LaurentSeries>& u) {
  auto [p, r] = prime_power(q);
  if (static_cast<int>(u.size()) != n) throw error(errc::invalid_argument, "expected n coefficients");
  auto fq = make_field(p, r, {});
  FormalOModule<LaurentSeries> X{q, n, fq, {}};
  for (auto& c : u) {
    if (c.field()->characteristic() != p)
      throw error(errc::characteristic_mismatch, "coefficient series over the wrong characteristic");
    X.u.push_back(change_field(c, fq, fq));
  }
  X.u.push_back(LaurentSeries::constant(fq, 1));
  return X;
}

struct CongruenceReport {
  std::vector<bool> pass;  // index i = 0..n
  bool non_additive = false;
  std::vector<std::string> messages;
  bool ok() const { return !non_additive && std::all_of(pass.begin(), pass.end(), [](bool b) { return b; }); }
};

/**
 * For each i: [pi](T), with u_0..u_{i-1} set to zero and terms of degree above
 * q^i dropped, must equal u_i T^{q^i} (u_n = 1).  `dense` lists the
 * coefficients of T^0, T^1, ... so that non-additive shapes can be checked.
 */
inline CongruenceReport check_congruences(const std::vector<MPoly>& dense, std::uint64_t q, int n) {
  CongruenceReport rep;
  const auto& fq = dense.front().field();
  const int nv = dense.front().nvars();
  auto is_q_power = [q](std::uint64_t d) {
    while (d > 1 && d % q == 0) d /= q;
    return d == 1;
  };
  for (std::size_t d = 0; d < dense.size(); ++d)
    if (!dense[d].is_zero() && !is_q_power(d)) {
      rep.non_additive = true;
      rep.messages.push_back("non-additive term of degree " + std::to_string(d));
    }
  std::uint64_t qi = 1;
  for (int i = 0; i <= n; ++i, qi *= q) {
    bool ok = true;
    for (std::size_t d = 0; d < dense.size() && d <= qi; ++d) {
      MPoly c = dense[d];
      for (int j = 0; j < i; ++j) c = c.without(j);
      MPoly expected(fq, nv);
      if (d == qi) expected = i < n ? MPoly::variable(fq, nv, i) : MPoly::constant(fq, nv, 1);
      if (!(c == expected)) ok = false;
    }
    rep.pass.push_back(ok);
    if (!ok) rep.messages.push_back("congruence fails at i = " + std::to_string(i));
  }
  return rep;
}

inline CongruenceReport check_congruences(const FormalOModule<MPoly>& X) {
  return check_congruences(X.pi().dense(), X.q, X.n);
}

/// [a]_X = sum_j a_j [pi]^{o j}.
template <class C>
AdditivePolynomial<C> act(const OPolynomial& a, const FormalOModule<C>& X) {
  const auto& like = X.u.front();
  auto power = AdditivePolynomial<C>::identity(X.q, like);
  auto acc = AdditivePolynomial<C>::zero(X.q, like);
  const auto pi = X.pi();
  for (int j = 0; j < a.level(); ++j) {
    if (a[j]) acc = acc + power.scaled(a[j]);
    if (j + 1 < a.level()) power = pi.compose(power);
  }
  return acc;
}

template <class C>
AdditivePolynomial<C> division_polynomial(const FormalOModule<C>& X, int m) {
  if (m < 1) throw error(errc::invalid_argument, "level must be positive");
  auto P = X.pi();
  for (int j = 1; j < m; ++j) P = X.pi().compose(P);
  return P;
}

template <class C>
struct StratumModule {
  std::uint64_t q;
  int n;
  int h;
  Field scalars;
  AdditivePolynomial<C> g;  // sum_{i=h}^n u_i S^{q^{i-h}}

  int rank() const noexcept { return n - h; }
  std::uint64_t inseparable_degree(int m) const { return checked_pow(q, static_cast<std::uint64_t>(m) * h); }

  /// g(T^{q^h}) as a polynomial in T.
  AdditivePolynomial<C> recompose() const {
    std::vector<C> c(h, coeff_scalar(g[0], 0));
    for (auto& x : g.coefficients()) c.push_back(x);
    return {q, std::move(c)};
  }

  /// g^{o m}: the polynomial whose roots are the level-m torsion of the etale part.
  AdditivePolynomial<C> etale_division_polynomial(int m) const {
    if (m < 1) throw error(errc::invalid_argument, "level must be positive");
    auto P = g;
    for (int j = 1; j < m; ++j) P = g.compose(P);
    return P;
  }

  /// g o g^{(q^h)} o ... o g^{(q^{(m-1)h})}: the separable factor G_m with [pi^m](T) = G_m(T^{q^{mh}}).
  AdditivePolynomial<C> twisted_etale_division_polynomial(int m) const {
    if (m < 1) throw error(errc::invalid_argument, "level must be positive");
    auto P = g;
    const std::uint64_t e = checked_pow(q, h);
    auto tw = g;
    for (int j = 1; j < m; ++j) {
      tw = tw.twisted(e);
      P = P.compose(tw);
    }
    return P;
  }
};

template <class C>
StratumModule<C> reduce_to_stratum(const FormalOModule<C>& X, int h) {
  if (h < 0 || h >= X.n) throw error(errc::invalid_argument, "stratum index must satisfy 0 <= h < n");
  std::vector<C> c(X.u.begin() + h, X.u.end());
  return {X.q, X.n, h, X.scalars, AdditivePolynomial<C>(X.q, std::move(c))};
}

/**
 * Substitutes series for u_h..u_{n-1}; t maps to the uniformizer.  The
 * assignment must land in the maximal ideal with u_h nonzero.
 */
inline StratumModule<LaurentSeries> specialize(const StratumModule<MPoly>& S, const std::map<int, LaurentSeries>& assignment) {
  const auto& fq = S.scalars;
  std::vector<std::optional<LaurentSeries>> values(S.n + 1);
  values[t_variable(S.n)] = LaurentSeries::monomial(fq, 1, 1);
  for (auto& [i, v] : assignment) {
    if (i < 0 || i >= S.n) throw error(errc::invalid_argument, "u" + std::to_string(i) + " is not a parameter");
    auto x = change_field(v, fq, fq);
    if (i < S.h) {
      if (!x.is_exact_zero())
        throw error(errc::invalid_argument, "u" + std::to_string(i) + " vanishes on the stratum");
      continue;
    }
    if (x.valuation_or_bound() < 1)
      throw error(errc::non_positive_valuation, "u" + std::to_string(i) + " must have positive valuation");
    values[i] = x;
  }
  for (int i = 0; i < S.h; ++i) values[i] = LaurentSeries::zero(fq);
  for (int i = S.h; i < S.n; ++i)
    if (!values[i]) values[i] = LaurentSeries::zero(fq);
  if (values[S.h]->is_zero()) throw error(errc::outside_open_stratum, "u" + std::to_string(S.h) + " must be nonzero");
  std::vector<LaurentSeries> c;
  for (auto& x : S.g.coefficients()) c.push_back(x.evaluate(values, fq));
  return {S.q, S.n, S.h, fq, AdditivePolynomial<LaurentSeries>(S.q, std::move(c))};
}

/// Dense monic polynomial over F_q((t)) from an additive one.
inline SeriesPoly to_series_poly(const AdditivePolynomial<LaurentSeries>& P) { return P.dense(); }

}  // namespace drinfeld
