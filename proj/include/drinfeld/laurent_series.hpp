#pragma once

/**
 * @file laurent_series.hpp
 * @brief Truncated Laurent series over a finite field with absolute precision.
 *
 * A series is stored as t^{v0} (c_0 + c_1 t + ... + c_{N-1} t^{N-1}) together
 * with the statement "known modulo t^{v0+N}".  Nonzero series are normalized
 * (c_0 != 0).  A series whose known coefficients all vanish is an approximate
 * zero and carries only the bound "valuation >= v0 + N".  Series with finite
 * support may be exact (infinite precision); arithmetic keeps exactness when
 * every operand is exact.
 *
 * Precision propagation:
 *   - sums are known modulo the smaller absolute precision;
 *   - products keep min(N_a, N_b) known coefficients;
 *   - inverses keep N_a known coefficients (capped for exact non-monomials).
 */

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "drinfeld/error.hpp"
#include "drinfeld/finite_field.hpp"

namespace drinfeld {

/// Valuation of a series, or a lower bound for an approximate zero.
struct Valuation {
  std::int64_t value;
  bool lower_bound;  ///< true: the series is an approximate zero with valuation >= value

  friend bool operator==(const Valuation&, const Valuation&) = default;
  std::string to_string() const { return (lower_bound ? ">= " : "") + std::to_string(value); }
};

class LaurentSeries {
 public:
  using code = std::uint32_t;
  static constexpr std::int64_t kExact = std::numeric_limits<std::int64_t>::max() / 8;

  static LaurentSeries zero(Field f) { return LaurentSeries(std::move(f), kExact, {}, kExact); }

  static LaurentSeries approximate_zero(Field f, std::int64_t bound) {
    return LaurentSeries(std::move(f), bound, {}, bound);
  }

  static LaurentSeries constant(Field f, code c) { return monomial(std::move(f), c, 0); }

  static LaurentSeries monomial(Field f, code c, std::int64_t exponent) {
    if (c == 0) return zero(std::move(f));
    return LaurentSeries(std::move(f), exponent, {c}, kExact);
  }

  /// Coefficients of t^{v0}, t^{v0+1}, ...; `absolute_precision` = kExact for exact input.
  static LaurentSeries from_coefficients(Field f, std::int64_t v0, std::vector<code> c,
                                         std::int64_t absolute_precision = kExact) {
    LaurentSeries s(std::move(f), v0, std::move(c), absolute_precision);
    s.normalize();
    return s;
  }

  const Field& field() const noexcept { return f_; }
  bool is_zero() const noexcept { return c_.empty(); }
  bool is_exact() const noexcept { return prec_ >= kExact; }
  bool is_exact_zero() const noexcept { return c_.empty() && prec_ >= kExact; }

  Valuation valuation() const noexcept { return is_zero() ? Valuation{prec_, true} : Valuation{v_, false}; }

  /// Valuation of a nonzero series; for an approximate zero, its lower bound.
  std::int64_t valuation_or_bound() const noexcept { return is_zero() ? prec_ : v_; }
  std::int64_t v0() const noexcept { return v_; }
  std::int64_t absolute_precision() const noexcept { return prec_; }
  std::int64_t relative_precision() const noexcept {
    if (is_exact()) return kExact;
    return is_zero() ? 0 : prec_ - v_;
  }
  const std::vector<code>& coefficients() const noexcept { return c_; }
  code leading_coefficient() const noexcept { return c_.empty() ? 0 : c_.front(); }

  /// Coefficient of t^e; throws PrecisionExhausted when e is beyond the known range.
  code coefficient(std::int64_t e) const {
    if (e >= prec_) throw error(errc::precision_exhausted, "coefficient of t^" + std::to_string(e) + " is unknown");
    if (c_.empty() || e < v_) return 0;
    std::int64_t i = e - v_;
    return i < static_cast<std::int64_t>(c_.size()) ? c_[i] : 0;
  }

  bool is_one() const noexcept { return is_exact() && v_ == 0 && c_.size() == 1 && c_[0] == 1; }

  /// Exact series consisting of one term.
  bool is_exact_monomial() const noexcept { return is_exact() && c_.size() == 1; }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return combine(a, b, false); }
  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return combine(a, b, true); }

  LaurentSeries operator-() const {
    LaurentSeries r = *this;
    for (auto& c : r.c_) c = f_->neg(c);
    return r;
  }

  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    require_same_field(a.f_, b.f_);
    const FiniteField& F = *a.f_;
    if (a.is_exact_zero() || b.is_exact_zero()) return zero(a.f_);
    if (a.is_zero() || b.is_zero()) {
      std::int64_t bound = sat_add(a.valuation_or_bound(), b.valuation_or_bound());
      return approximate_zero(a.f_, bound);
    }
    std::int64_t v = a.v_ + b.v_;
    if (a.is_exact() && b.is_exact()) {
      std::vector<code> c(a.c_.size() + b.c_.size() - 1, 0);
      for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = F.add(c[i + j], F.mul(a.c_[i], b.c_[j]));
      }
      return from_coefficients(a.f_, v, std::move(c), kExact);
    }
    std::int64_t n = std::min(a.relative_precision(), b.relative_precision());
    std::vector<code> c(static_cast<std::size_t>(n), 0);
    const std::size_t na = std::min<std::size_t>(a.c_.size(), n), nb = std::min<std::size_t>(b.c_.size(), n);
    for (std::size_t i = 0; i < na; ++i) {
      if (a.c_[i] == 0) continue;
      const code ai = a.c_[i];
      const std::size_t lim = std::min<std::size_t>(nb, n - i);
      for (std::size_t j = 0; j < lim; ++j) c[i + j] = F.add(c[i + j], F.mul(ai, b.c_[j]));
    }
    return from_coefficients(a.f_, v, std::move(c), v + n);
  }

  LaurentSeries& operator+=(const LaurentSeries& o) { return *this = *this + o; }
  LaurentSeries& operator-=(const LaurentSeries& o) { return *this = *this - o; }
  LaurentSeries& operator*=(const LaurentSeries& o) { return *this = *this * o; }

  /// Multiplication by a field constant.
  LaurentSeries scaled(code s) const {
    if (s == 0) return zero(f_);
    LaurentSeries r = *this;
    for (auto& c : r.c_) c = f_->mul(c, s);
    return r;
  }

  /// Multiplication by t^k.
  LaurentSeries shifted(std::int64_t k) const {
    LaurentSeries r = *this;
    if (is_zero()) {
      if (!is_exact()) r.prec_ += k, r.v_ = r.prec_;
      return r;
    }
    r.v_ += k;
    if (!is_exact()) r.prec_ += k;
    return r;
  }

  std::string to_string(const std::string& var = "t") const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      std::int64_t e = v_ + static_cast<std::int64_t>(i);
      std::string coef = f_->to_string(c_[i]);
      if (f_->degree() > 1 && coef.find('+') != std::string::npos) coef = "(" + coef + ")";
      std::string term;
      if (e == 0) {
        term = coef;
      } else {
        term = (c_[i] == 1 ? std::string() : coef + "*") + var + (e == 1 ? "" : "^" + std::to_string(e));
      }
      if (!s.empty()) s += " + ";
      s += term;
    }
    if (!is_exact()) {
      if (!s.empty()) s += " + ";
      s += "O(" + var + (prec_ == 1 ? "" : "^" + std::to_string(prec_)) + ")";
    }
    return s.empty() ? "0" : s;
  }

  /// Deterministic total order used for reports: zero first, then valuation, then codes.
  friend bool canonical_less(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.is_zero() != b.is_zero()) return a.is_zero();
    if (a.is_zero()) return false;
    if (a.v_ != b.v_) return a.v_ < b.v_;
    return a.c_ < b.c_;
  }

  static std::int64_t sat_add(std::int64_t a, std::int64_t b) noexcept {
    if (a >= kExact || b >= kExact) return kExact;
    return a + b;
  }

 private:
  LaurentSeries(Field f, std::int64_t v, std::vector<code> c, std::int64_t prec)
      : f_(std::move(f)), v_(v), c_(std::move(c)), prec_(prec) {
    if (!f_) throw error(errc::invalid_argument, "series without coefficient field");
  }

  void normalize() {
    std::size_t lead = 0;
    std::int64_t known = is_exact() ? static_cast<std::int64_t>(c_.size()) : std::max<std::int64_t>(0, prec_ - v_);
    if (static_cast<std::int64_t>(c_.size()) > known) c_.resize(static_cast<std::size_t>(known));
    while (lead < c_.size() && c_[lead] == 0) ++lead;
    if (lead == c_.size()) {
      c_.clear();
      v_ = prec_;
      return;
    }
    if (lead) {
      c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
      v_ += static_cast<std::int64_t>(lead);
    }
    if (is_exact()) {
      while (!c_.empty() && c_.back() == 0) c_.pop_back();
    } else {
      c_.resize(static_cast<std::size_t>(prec_ - v_), 0);
    }
  }

  static LaurentSeries combine(const LaurentSeries& a, const LaurentSeries& b, bool subtract) {
    require_same_field(a.f_, b.f_);
    const FiniteField& F = *a.f_;
    std::int64_t prec = std::min(a.prec_, b.prec_);
    if (a.is_zero() && b.is_zero()) return prec >= kExact ? zero(a.f_) : approximate_zero(a.f_, prec);
    std::int64_t lo = std::min(a.is_zero() ? kExact : a.v_, b.is_zero() ? kExact : b.v_);
    if (lo >= prec) return approximate_zero(a.f_, prec);
    std::int64_t hi = prec;
    if (prec >= kExact) {
      hi = std::max(a.is_zero() ? lo : a.v_ + static_cast<std::int64_t>(a.c_.size()),
                    b.is_zero() ? lo : b.v_ + static_cast<std::int64_t>(b.c_.size()));
    }
    std::vector<code> c(static_cast<std::size_t>(hi - lo), 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      std::int64_t e = a.v_ + static_cast<std::int64_t>(i);
      if (e >= hi) break;
      c[e - lo] = a.c_[i];
    }
    for (std::size_t i = 0; i < b.c_.size(); ++i) {
      std::int64_t e = b.v_ + static_cast<std::int64_t>(i);
      if (e >= hi) break;
      c[e - lo] = subtract ? F.sub(c[e - lo], b.c_[i]) : F.add(c[e - lo], b.c_[i]);
    }
    return from_coefficients(a.f_, lo, std::move(c), prec);
  }

  Field f_;
  std::int64_t v_;
  std::vector<code> c_;
  std::int64_t prec_;
};

/// Keeps at most n known coefficients; exact series that already fit stay exact.
inline LaurentSeries truncate(const LaurentSeries& a, std::int64_t n) {
  if (a.is_zero()) return a;
  if (a.is_exact() && static_cast<std::int64_t>(a.coefficients().size()) <= n) return a;
  std::int64_t prec = std::min(a.absolute_precision(), a.v0() + n);
  auto c = a.coefficients();
  return LaurentSeries::from_coefficients(a.field(), a.v0(), std::move(c), prec);
}

/// Forgets everything at or beyond t^bound.
inline LaurentSeries truncate_absolute(const LaurentSeries& a, std::int64_t bound) {
  if (bound >= a.absolute_precision()) return a;
  if (a.is_zero()) return LaurentSeries::approximate_zero(a.field(), bound);
  auto c = a.coefficients();
  return LaurentSeries::from_coefficients(a.field(), a.v0(), std::move(c), bound);
}

/**
 * Multiplicative inverse.  The result keeps the relative precision of `a`;
 * exact inputs with more than one term are expanded to `cap` coefficients.
 */
inline LaurentSeries invert(const LaurentSeries& a, std::int64_t cap = 64) {
  if (a.is_zero()) throw error(errc::division_by_zero, "inverse of an (approximate) zero series");
  const FiniteField& F = *a.field();
  if (a.is_exact_monomial())
    return LaurentSeries::monomial(a.field(), F.inv(a.leading_coefficient()), -a.v0());
  std::int64_t n = std::min(a.relative_precision(), cap);
  const auto& c = a.coefficients();
  std::vector<std::uint32_t> b(static_cast<std::size_t>(n), 0);
  const auto inv0 = F.inv(c[0]);
  b[0] = inv0;
  for (std::int64_t k = 1; k < n; ++k) {
    std::uint32_t s = 0;
    std::int64_t lim = std::min<std::int64_t>(k, static_cast<std::int64_t>(c.size()) - 1);
    for (std::int64_t i = 1; i <= lim; ++i) s = F.add(s, F.mul(c[i], b[k - i]));
    b[k] = F.neg(F.mul(inv0, s));
  }
  return LaurentSeries::from_coefficients(a.field(), -a.v0(), std::move(b), -a.v0() + n);
}

inline LaurentSeries divide(const LaurentSeries& a, const LaurentSeries& b, std::int64_t cap = 64) {
  return a * invert(b, cap);
}

/// a^p: coefficients raised to the p-th power, exponents multiplied by p.
inline LaurentSeries frobenius(const LaurentSeries& a) {
  const FiniteField& F = *a.field();
  const std::int64_t p = F.characteristic();
  if (a.is_exact_zero()) return a;
  if (a.is_zero()) return LaurentSeries::approximate_zero(a.field(), a.absolute_precision() * p);
  const auto& c = a.coefficients();
  std::vector<std::uint32_t> out((c.size() - 1) * p + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) out[i * p] = F.frobenius(c[i]);
  std::int64_t prec = a.is_exact() ? LaurentSeries::kExact : a.absolute_precision() * p;
  return LaurentSeries::from_coefficients(a.field(), a.v0() * p, std::move(out), prec);
}

/// a^{p^r}.
inline LaurentSeries frobenius(const LaurentSeries& a, int r) {
  LaurentSeries x = a;
  for (int i = 0; i < r; ++i) x = frobenius(x);
  return x;
}

inline LaurentSeries pow(const LaurentSeries& a, std::int64_t e, std::int64_t cap = 64) {
  if (e < 0) return invert(pow(a, -e, cap), cap);
  LaurentSeries r = LaurentSeries::constant(a.field(), 1);
  LaurentSeries b = a;
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

/// Formal derivative d/dt.
inline LaurentSeries derivative(const LaurentSeries& a) {
  const FiniteField& F = *a.field();
  if (a.is_exact_zero()) return a;
  if (a.is_zero()) return LaurentSeries::approximate_zero(a.field(), a.absolute_precision() - 1);
  const auto& c = a.coefficients();
  std::vector<std::uint32_t> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    out[i] = F.mul(F.from_int(a.v0() + static_cast<std::int64_t>(i)), c[i]);
  std::int64_t prec = a.is_exact() ? LaurentSeries::kExact : a.absolute_precision() - 1;
  return LaurentSeries::from_coefficients(a.field(), a.v0() - 1, std::move(out), prec);
}

/// True when a - b is an approximate zero at the available precision.
inline bool approx_equal(const LaurentSeries& a, const LaurentSeries& b) { return (a - b).is_zero(); }

/**
 * Substitution t -> rho(s) for a series rho of positive valuation; the result
 * keeps at most `cap` known coefficients.
 */
inline LaurentSeries compose(const LaurentSeries& a, const LaurentSeries& rho, std::int64_t cap) {
  require_same_field(a.field(), rho.field());
  if (rho.is_zero() || rho.v0() < 1)
    throw error(errc::invalid_argument, "substituted series must have positive valuation");
  const FiniteField& F = *a.field();
  const std::int64_t e = rho.v0();
  if (a.is_exact_zero()) return a;
  if (a.is_zero()) return LaurentSeries::approximate_zero(a.field(), a.absolute_precision() * e);
  const auto& c = a.coefficients();
  if (rho.is_exact_monomial()) {
    const auto r0 = rho.leading_coefficient();
    std::vector<std::uint32_t> out((c.size() - 1) * e + 1, 0);
    // (r0 s^e)^{v0+i} contributes r0^{v0+i} to the coefficient.
    std::int64_t vexp = a.v0();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      std::int64_t k = vexp + static_cast<std::int64_t>(i);
      std::uint32_t factor = k >= 0 ? F.pow(r0, static_cast<std::uint64_t>(k)) : F.inv(F.pow(r0, static_cast<std::uint64_t>(-k)));
      out[i * e] = F.mul(c[i], factor);
    }
    std::int64_t prec = a.is_exact() ? LaurentSeries::kExact : a.absolute_precision() * e;
    return truncate(LaurentSeries::from_coefficients(a.field(), a.v0() * e, std::move(out), prec), cap);
  }
  // Horner on the power-series part; terms beyond the cap cannot influence the result.
  std::int64_t terms = static_cast<std::int64_t>(c.size());
  std::int64_t tail_bound = a.is_exact() ? LaurentSeries::kExact : a.absolute_precision() * e;
  std::int64_t useful = cap / e + 1;
  if (terms > useful) {
    terms = useful;
    tail_bound = std::min(tail_bound, (a.v0() + terms) * e);
  }
  LaurentSeries rho_c = truncate(rho, cap);
  LaurentSeries acc = LaurentSeries::constant(a.field(), c[terms - 1]);
  for (std::int64_t i = terms - 2; i >= 0; --i) {
    acc = truncate(acc * rho_c, cap) + LaurentSeries::constant(a.field(), c[i]);
  }
  LaurentSeries result = acc;
  if (a.v0() != 0) result = result * pow(rho_c, a.v0(), cap);
  result = truncate_absolute(result, tail_bound);
  return truncate(result, cap);
}

/// Moves every coefficient into `target` through the canonical embedding.
inline LaurentSeries change_field(const LaurentSeries& a, const Field& target, const Field& ambient = nullptr) {
  if (same_field(a.field(), target)) {
    if (a.field() == target) return a;
  }
  if (a.is_exact_zero()) return LaurentSeries::zero(target);
  if (a.is_zero()) return LaurentSeries::approximate_zero(target, a.absolute_precision());
  std::vector<std::uint32_t> c;
  c.reserve(a.coefficients().size());
  for (auto x : a.coefficients()) c.push_back(embed(FFElement(a.field(), x), target, ambient).code());
  return LaurentSeries::from_coefficients(target, a.v0(), std::move(c), a.absolute_precision());
}

}  // namespace drinfeld
