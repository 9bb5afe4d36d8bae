#pragma once

/**
 * @file finite_field.hpp
 * @brief Finite fields F_{p^k} with canonical defining polynomials.
 *
 * Elements are stored as packed codes: the coefficient vector (c_0, ..., c_{k-1})
 * in the polynomial basis 1, a, ..., a^{k-1} is encoded as sum c_i p^i, so the
 * natural order on codes is the coefficient-tuple order read from the most
 * significant coefficient.  The defining polynomial of F_{p^k} is the
 * lexicographically least monic irreducible polynomial of degree k over F_p,
 * which makes every construction reproducible without external tables.
 *
 * Multiplication goes through log/antilog tables for fields of at most 2^16
 * elements and through polynomial reduction otherwise; both routes give the
 * same codes.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "drinfeld/error.hpp"

namespace drinfeld {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Prime factors of n without multiplicity, ascending.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// If q = p^r for a prime p, returns {p, r}; otherwise {0, 0}.
inline std::pair<std::uint32_t, int> prime_power(std::uint64_t q) {
  if (q < 2) return {0, 0};
  auto f = prime_factors(q);
  if (f.size() != 1) return {0, 0};
  int r = 0;
  while (q > 1) {
    q /= f[0];
    ++r;
  }
  return {static_cast<std::uint32_t>(f[0]), r};
}

class FiniteField;
using Field = std::shared_ptr<const FiniteField>;

struct FieldLimits {
  std::uint64_t max_size = std::uint64_t{1} << 30;
};

Field make_field(std::uint32_t p, int k, const FieldLimits& limits = {});

class FiniteField {
 public:
  using code = std::uint32_t;

  std::uint32_t characteristic() const noexcept { return p_; }
  int degree() const noexcept { return k_; }
  std::uint64_t size() const noexcept { return size_; }
  /// Monic defining polynomial over F_p, coefficients low to high (length k+1).
  const std::vector<std::uint32_t>& defining_polynomial() const noexcept { return defpoly_; }
  code generator() const noexcept { return k_ == 1 ? 0 : static_cast<code>(p_); }
  code primitive_element() const noexcept { return primitive_; }

  code zero() const noexcept { return 0; }
  code one() const noexcept { return 1; }

  code from_int(long long v) const noexcept {
    long long m = v % static_cast<long long>(p_);
    if (m < 0) m += p_;
    return static_cast<code>(m);
  }

  std::vector<std::uint32_t> digits(code x) const {
    std::vector<std::uint32_t> d(k_);
    for (int i = 0; i < k_; ++i) {
      d[i] = x % p_;
      x /= p_;
    }
    return d;
  }

  code from_digits(const std::vector<std::uint32_t>& d) const {
    code x = 0;
    for (int i = k_ - 1; i >= 0; --i) x = x * p_ + (i < static_cast<int>(d.size()) ? d[i] % p_ : 0);
    return x;
  }

  code add(code a, code b) const noexcept {
    if (p_ == 2) return a ^ b;
    if (k_ == 1) {
      code s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    code r = 0;
    for (int i = 0; i < k_; ++i) {
      code s = a % p_ + b % p_;
      if (s >= p_) s -= p_;
      r += s * pw_[i];
      a /= p_;
      b /= p_;
    }
    return r;
  }

  code neg(code a) const noexcept {
    if (p_ == 2) return a;
    code r = 0;
    for (int i = 0; i < k_; ++i) {
      code d = a % p_;
      r += (d == 0 ? 0 : p_ - d) * pw_[i];
      a /= p_;
    }
    return r;
  }

  code sub(code a, code b) const noexcept { return add(a, neg(b)); }

  code mul(code a, code b) const noexcept {
    if (a == 0 || b == 0) return 0;
    if (k_ == 1) return static_cast<code>((static_cast<std::uint64_t>(a) * b) % p_);
    if (!log_.empty()) {
      std::uint32_t s = log_[a] + log_[b];
      if (s >= size_ - 1) s -= static_cast<std::uint32_t>(size_ - 1);
      return exp_[s];
    }
    return slow_mul(a, b);
  }

  code pow(code a, std::uint64_t e) const noexcept {
    code r = 1;
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  code inv(code a) const {
    if (a == 0) throw error(errc::division_by_zero, "inverse of zero in F_" + std::to_string(size_));
    if (!log_.empty() && k_ > 1) {
      std::uint32_t l = log_[a];
      return exp_[l == 0 ? 0 : static_cast<std::uint32_t>(size_ - 1) - l];
    }
    return pow(a, size_ - 2);
  }

  code div(code a, code b) const { return mul(a, inv(b)); }

  /// x -> x^p.
  code frobenius(code a) const noexcept { return pow(a, p_); }

  /// Smallest j dividing k with x^{p^j} = x.
  int element_degree(code x) const noexcept {
    for (int j = 1; j < k_; ++j) {
      if (k_ % j) continue;
      code y = x;
      for (int i = 0; i < j; ++i) y = frobenius(y);
      if (y == x) return j;
    }
    return k_;
  }

  /// Polynomial-basis rendering: "0", "2", "a", "a^2+a+1".
  std::string to_string(code x) const {
    if (k_ == 1) return std::to_string(x);
    auto d = digits(x);
    std::string s;
    for (int i = k_ - 1; i >= 0; --i) {
      if (d[i] == 0) continue;
      if (!s.empty()) s += "+";
      if (i == 0) {
        s += std::to_string(d[i]);
        continue;
      }
      if (d[i] != 1) s += std::to_string(d[i]) + "*";
      s += "a";
      if (i > 1) s += "^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }

  /// Human-readable polynomial with indeterminate `var`, e.g. "x^4+x+1".
  std::string defining_polynomial_string(const std::string& var = "x") const {
    std::string s;
    for (int i = k_; i >= 0; --i) {
      std::uint32_t c = defpoly_[i];
      if (c == 0) continue;
      if (!s.empty()) s += "+";
      if (i == 0) {
        s += std::to_string(c);
        continue;
      }
      if (c != 1) s += std::to_string(c) + "*";
      s += var;
      if (i > 1) s += "^" + std::to_string(i);
    }
    return s;
  }

  FiniteField(std::uint32_t p, int k, std::vector<std::uint32_t> defpoly)
      : p_(p), k_(k), defpoly_(std::move(defpoly)) {
    size_ = 1;
    pw_.resize(k_ + 1);
    for (int i = 0; i <= k_; ++i) {
      pw_[i] = static_cast<code>(size_);
      if (i < k_) size_ *= p_;
    }
    primitive_ = find_primitive();
    if (size_ <= (std::uint64_t{1} << 16) && k_ > 1) build_tables();
  }

 private:
  code slow_mul(code a, code b) const noexcept {
    auto da = digits(a), db = digits(b);
    std::vector<std::uint64_t> prod(2 * k_ - 1, 0);
    for (int i = 0; i < k_; ++i)
      if (da[i])
        for (int j = 0; j < k_; ++j) prod[i + j] += static_cast<std::uint64_t>(da[i]) * db[j];
    for (auto& c : prod) c %= p_;
    for (int i = 2 * k_ - 2; i >= k_; --i) {
      std::uint64_t c = prod[i];
      if (c == 0) continue;
      prod[i] = 0;
      // x^i = x^{i-k} * x^k and x^k = -sum defpoly_j x^j.
      for (int j = 0; j < k_; ++j) {
        if (defpoly_[j] == 0) continue;
        prod[i - k_ + j] = (prod[i - k_ + j] + (p_ - defpoly_[j]) * c) % p_;
      }
    }
    code r = 0;
    for (int i = k_ - 1; i >= 0; --i) r = r * p_ + static_cast<code>(prod[i]);
    return r;
  }

  code slow_pow(code a, std::uint64_t e) const noexcept {
    code r = 1;
    while (e) {
      if (e & 1) r = k_ == 1 ? static_cast<code>((std::uint64_t{r} * a) % p_) : slow_mul(r, a);
      a = k_ == 1 ? static_cast<code>((std::uint64_t{a} * a) % p_) : slow_mul(a, a);
      e >>= 1;
    }
    return r;
  }

  code find_primitive() const {
    if (size_ == 2) return 1;
    auto fac = prime_factors(size_ - 1);
    for (code g = 1; g < size_; ++g) {
      bool ok = true;
      for (auto l : fac)
        if (slow_pow(g, (size_ - 1) / l) == 1) {
          ok = false;
          break;
        }
      if (ok) return g;
    }
    return 1;
  }

  void build_tables() {
    exp_.resize(size_ - 1);
    log_.assign(size_, 0);
    code x = 1;
    for (std::uint32_t i = 0; i + 1 < size_; ++i) {
      exp_[i] = x;
      log_[x] = i;
      x = slow_mul(x, primitive_);
    }
  }

  std::uint32_t p_;
  int k_;
  std::uint64_t size_ = 0;
  std::vector<std::uint32_t> defpoly_;
  std::vector<code> pw_;
  code primitive_ = 1;
  std::vector<code> exp_;
  std::vector<std::uint32_t> log_;
};

inline bool same_field(const Field& a, const Field& b) noexcept {
  return a == b || (a && b && a->characteristic() == b->characteristic() && a->degree() == b->degree());
}

inline void require_same_field(const Field& a, const Field& b) {
  if (!same_field(a, b))
    throw error(errc::field_mismatch, "operands live in different finite fields");
}

/// A field element together with its field.
class FFElement {
 public:
  FFElement(Field f, std::uint32_t code) : f_(std::move(f)), c_(code) {}

  const Field& field() const noexcept { return f_; }
  std::uint32_t code() const noexcept { return c_; }
  std::vector<std::uint32_t> coefficients() const { return f_->digits(c_); }
  bool is_zero() const noexcept { return c_ == 0; }
  bool is_one() const noexcept { return c_ == 1; }

  friend FFElement operator+(const FFElement& a, const FFElement& b) {
    require_same_field(a.f_, b.f_);
    return {a.f_, a.f_->add(a.c_, b.c_)};
  }
  friend FFElement operator-(const FFElement& a, const FFElement& b) {
    require_same_field(a.f_, b.f_);
    return {a.f_, a.f_->sub(a.c_, b.c_)};
  }
  friend FFElement operator*(const FFElement& a, const FFElement& b) {
    require_same_field(a.f_, b.f_);
    return {a.f_, a.f_->mul(a.c_, b.c_)};
  }
  friend FFElement operator/(const FFElement& a, const FFElement& b) {
    require_same_field(a.f_, b.f_);
    return {a.f_, a.f_->div(a.c_, b.c_)};
  }
  FFElement operator-() const { return {f_, f_->neg(c_)}; }
  FFElement pow(std::uint64_t e) const { return {f_, f_->pow(c_, e)}; }
  FFElement inverse() const { return {f_, f_->inv(c_)}; }

  friend bool operator==(const FFElement& a, const FFElement& b) noexcept {
    return same_field(a.f_, b.f_) && a.c_ == b.c_;
  }
  friend bool operator<(const FFElement& a, const FFElement& b) noexcept { return a.c_ < b.c_; }

  std::string to_string() const { return f_->to_string(c_); }

 private:
  Field f_;
  std::uint32_t c_;
};

/// Dense polynomials over a finite field, coefficient codes low to high.
namespace ffpoly {

using poly = std::vector<std::uint32_t>;

inline void trim(poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int degree(const poly& f) { return static_cast<int>(f.size()) - 1; }

inline poly add(const FiniteField& F, const poly& a, const poly& b) {
  poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = F.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

inline poly sub(const FiniteField& F, const poly& a, const poly& b) {
  poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = F.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

inline poly mul(const FiniteField& F, const poly& a, const poly& b) {
  if (a.empty() || b.empty()) return {};
  poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

/// Quotient and remainder; `b` must be nonzero.
inline std::pair<poly, poly> divmod(const FiniteField& F, poly a, const poly& b) {
  if (b.empty()) throw error(errc::division_by_zero, "polynomial division by zero");
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  auto lc_inv = F.inv(b.back());
  poly q(a.size() - b.size() + 1, 0);
  for (int i = degree(a); i >= degree(b); --i) {
    auto c = F.mul(a[i], lc_inv);
    q[i - degree(b)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= degree(b); ++j) a[i - degree(b) + j] = F.sub(a[i - degree(b) + j], F.mul(c, b[j]));
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline poly mod(const FiniteField& F, const poly& a, const poly& b) { return divmod(F, a, b).second; }

inline poly monic(const FiniteField& F, poly f) {
  trim(f);
  if (f.empty()) return f;
  auto inv = F.inv(f.back());
  for (auto& c : f) c = F.mul(c, inv);
  return f;
}

inline poly gcd(const FiniteField& F, poly a, poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

inline poly mulmod(const FiniteField& F, const poly& a, const poly& b, const poly& m) {
  return mod(F, mul(F, a, b), m);
}

/// base^e mod m, with e given as a big exponent through repeated squaring on a
/// 64-bit value.
inline poly powmod(const FiniteField& F, poly base, std::uint64_t e, const poly& m) {
  poly r{1};
  r = mod(F, r, m);
  base = mod(F, base, m);
  while (e) {
    if (e & 1) r = mulmod(F, r, base, m);
    base = mulmod(F, base, base, m);
    e >>= 1;
  }
  return r;
}

inline std::uint32_t eval(const FiniteField& F, const poly& f, std::uint32_t x) {
  std::uint32_t r = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) r = F.add(F.mul(r, x), *it);
  return r;
}

inline poly derivative(const FiniteField& F, const poly& f) {
  poly d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(F.mul(F.from_int(static_cast<long long>(i)), f[i]));
  trim(d);
  return d;
}

/// x^{Q^j} mod m where Q = |F|, computed by j successive Q-th powers.
inline poly frobenius_power_of_x(const FiniteField& F, int j, const poly& m) {
  poly x = mod(F, poly{0, 1}, m);
  for (int i = 0; i < j; ++i) x = powmod(F, x, F.size(), m);
  return x;
}

/// Irreducibility over F via Ben-Or: gcd(f, x^{Q^i} - x) = 1 for i <= deg/2.
inline bool is_irreducible(const FiniteField& F, poly f) {
  trim(f);
  int d = degree(f);
  if (d < 1) return false;
  if (d == 1) return true;
  f = monic(F, f);
  poly xq = mod(F, poly{0, 1}, f);
  for (int i = 1; i <= d / 2; ++i) {
    xq = powmod(F, xq, F.size(), f);
    auto g = gcd(F, f, sub(F, xq, poly{0, 1}));
    if (degree(g) > 0) return false;
  }
  return true;
}

}  // namespace ffpoly

namespace detail {

struct FieldCache {
  std::mutex mu;
  std::map<std::pair<std::uint32_t, int>, Field> fields;
};

inline FieldCache& field_cache() {
  static FieldCache cache;
  return cache;
}

inline std::vector<std::uint32_t> least_irreducible(std::uint32_t p, int k, const Field& prime) {
  std::uint64_t count = 1;
  for (int i = 0; i < k; ++i) count *= p;
  for (std::uint64_t c = 0; c < count; ++c) {
    std::vector<std::uint32_t> f(k + 1);
    std::uint64_t x = c;
    for (int i = 0; i < k; ++i) {
      f[i] = static_cast<std::uint32_t>(x % p);
      x /= p;
    }
    f[k] = 1;
    if (k == 1 || (f[0] != 0 && ffpoly::is_irreducible(*prime, f))) return f;
  }
  throw error(errc::invalid_argument, "no irreducible polynomial found");
}

}  // namespace detail

/**
 * Returns F_{p^k} with the lexicographically least monic irreducible defining
 * polynomial.  Fields are memoized, so equal (p, k) give the same object.
 */
inline Field make_field(std::uint32_t p, int k, const FieldLimits& limits) {
  if (!is_prime(p)) throw error(errc::non_prime_characteristic, std::to_string(p) + " is not prime");
  if (k < 1) throw error(errc::invalid_argument, "field degree must be positive");
  std::uint64_t size = 1;
  for (int i = 0; i < k; ++i) {
    size *= p;
    if (size > limits.max_size)
      throw error(errc::size_cap_exceeded,
                  std::to_string(p) + "^" + std::to_string(k) + " exceeds the field size cap");
  }
  auto& cache = detail::field_cache();
  {
    std::lock_guard lock(cache.mu);
    if (auto it = cache.fields.find({p, k}); it != cache.fields.end()) return it->second;
  }
  Field prime = k == 1 ? nullptr : make_field(p, 1, limits);
  auto defpoly = k == 1 ? std::vector<std::uint32_t>{0, 1} : detail::least_irreducible(p, k, prime);
  auto made = std::make_shared<const FiniteField>(p, k, std::move(defpoly));
  std::lock_guard lock(cache.mu);
  return cache.fields.emplace(std::pair{p, k}, made).first->second;
}

inline FFElement element(const Field& f, std::uint32_t code) { return {f, code}; }

/// Root of a polynomial together with its multiplicity.
struct RootMultiplicity {
  std::uint32_t root;
  int multiplicity;
};

namespace detail {

inline void split_into_linear(const FiniteField& F, const ffpoly::poly& h, std::mt19937_64& rng,
                              std::vector<std::uint32_t>& out) {
  int d = ffpoly::degree(h);
  if (d <= 0) return;
  if (d == 1) {
    out.push_back(F.neg(F.div(h[0], h[1])));
    return;
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, F.size() - 1);
  for (int attempt = 0; attempt < 256; ++attempt) {
    ffpoly::poly w;
    if (F.characteristic() == 2) {
      // Trace map of (delta * x): splits h since all its roots lie in F.
      ffpoly::poly t{0, static_cast<std::uint32_t>(pick(rng))};
      ffpoly::poly acc = ffpoly::mod(F, t, h);
      ffpoly::poly term = acc;
      int bits = 0;
      for (std::uint64_t s = F.size(); s > 1; s >>= 1) ++bits;
      for (int i = 1; i < bits; ++i) {
        term = ffpoly::mulmod(F, term, term, h);
        acc = ffpoly::add(F, acc, term);
      }
      w = acc;
    } else {
      ffpoly::poly t{static_cast<std::uint32_t>(pick(rng)), 1};
      w = ffpoly::powmod(F, t, (F.size() - 1) / 2, h);
      w = ffpoly::sub(F, w, ffpoly::poly{1});
    }
    auto g = ffpoly::gcd(F, h, w);
    int dg = ffpoly::degree(g);
    if (dg > 0 && dg < d) {
      split_into_linear(F, g, rng, out);
      split_into_linear(F, ffpoly::divmod(F, h, g).first, rng, out);
      return;
    }
  }
  throw error(errc::invalid_argument, "root splitting did not converge");
}

}  // namespace detail

/**
 * Roots of f in its coefficient field, with multiplicities, ordered by code.
 * Small fields are searched exhaustively; larger ones use gcd with x^Q - x and
 * equal-degree splitting with a fixed seed.
 */
inline std::vector<RootMultiplicity> find_roots(const Field& field, ffpoly::poly f) {
  const FiniteField& F = *field;
  ffpoly::trim(f);
  if (f.empty()) throw error(errc::invalid_argument, "find_roots of the zero polynomial");
  std::vector<std::uint32_t> distinct;
  if (ffpoly::degree(f) == 0) return {};
  if (F.size() <= 4096) {
    for (std::uint32_t x = 0; x < F.size(); ++x)
      if (ffpoly::eval(F, f, x) == 0) distinct.push_back(x);
  } else {
    auto fm = ffpoly::monic(F, f);
    auto xq = ffpoly::powmod(F, ffpoly::poly{0, 1}, F.size(), fm);
    auto h = ffpoly::gcd(F, fm, ffpoly::sub(F, xq, ffpoly::poly{0, 1}));
    std::mt19937_64 rng(0x5eedULL);
    detail::split_into_linear(F, h, rng, distinct);
    std::sort(distinct.begin(), distinct.end());
  }
  std::vector<RootMultiplicity> out;
  for (auto r : distinct) {
    int mult = 0;
    ffpoly::poly g = f;
    ffpoly::poly lin{F.neg(r), 1};
    while (true) {
      auto [q, rem] = ffpoly::divmod(F, g, lin);
      if (!rem.empty()) break;
      ++mult;
      g = q;
    }
    out.push_back({r, mult});
  }
  return out;
}

inline std::vector<RootMultiplicity> find_roots(const std::vector<FFElement>& f) {
  if (f.empty()) throw error(errc::invalid_argument, "find_roots of the zero polynomial");
  ffpoly::poly c;
  for (auto& e : f) {
    require_same_field(e.field(), f.front().field());
    c.push_back(e.code());
  }
  return find_roots(f.front().field(), c);
}

/**
 * Smallest j such that f splits into linear factors over the degree-j
 * extension of its coefficient field (the lcm of its irreducible factor
 * degrees).
 */
inline int splitting_degree(const Field& field, ffpoly::poly f) {
  const FiniteField& F = *field;
  f = ffpoly::monic(F, f);
  int result = 1;
  auto rem = f;
  for (int i = 1; ffpoly::degree(rem) > 0; ++i) {
    auto xq = ffpoly::frobenius_power_of_x(F, i, rem);
    auto g = ffpoly::gcd(F, rem, ffpoly::sub(F, xq, ffpoly::poly{0, 1}));
    if (ffpoly::degree(g) > 0) {
      // g collects the distinct irreducible factors whose degree divides i;
      // earlier passes removed those of smaller degree.
      result = std::lcm(result, i);
      while (true) {
        auto c = ffpoly::gcd(F, rem, g);
        if (ffpoly::degree(c) <= 0) break;
        rem = ffpoly::divmod(F, rem, c).first;
      }
    }
  }
  return result;
}

namespace detail {

struct EmbeddingCache {
  std::mutex mu;
  // (p, source degree, target degree, ambient degree) -> image of the source generator
  std::map<std::tuple<std::uint32_t, int, int, int>, std::uint32_t> images;
};

inline EmbeddingCache& embedding_cache() {
  static EmbeddingCache cache;
  return cache;
}

/// Evaluates the polynomial-basis vector of x (from field `src`) at `gen_image` in `dst`.
inline std::uint32_t evaluate_basis(const FiniteField& src, std::uint32_t x, const FiniteField& dst,
                                    std::uint32_t gen_image) {
  auto d = src.digits(x);
  std::uint32_t r = 0;
  for (int i = src.degree() - 1; i >= 0; --i) r = dst.add(dst.mul(r, gen_image), dst.from_int(d[i]));
  return r;
}

inline std::vector<std::uint32_t> roots_of_defpoly(const FiniteField& src, const Field& dst) {
  ffpoly::poly f;
  for (auto c : src.defining_polynomial()) f.push_back(dst->from_int(c));
  std::vector<std::uint32_t> out;
  for (auto& r : find_roots(dst, f)) out.push_back(r.root);
  return out;
}

}  // namespace detail

/**
 * Image of the generator of F_{p^a} in F_{p^b}, compatible with the canonical
 * embeddings of both fields into the ambient F_{p^K}: each field is placed in
 * the ambient by sending its generator to the least root of its defining
 * polynomial there, and the returned image is the unique root in F_{p^b} that
 * agrees with that placement.
 */
inline std::uint32_t embedding_generator_image(const Field& src, const Field& dst, const Field& ambient) {
  const int a = src->degree(), b = dst->degree(), K = ambient->degree();
  auto key = std::tuple{src->characteristic(), a, b, K};
  auto& cache = detail::embedding_cache();
  {
    std::lock_guard lock(cache.mu);
    if (auto it = cache.images.find(key); it != cache.images.end()) return it->second;
  }
  std::uint32_t image = 0;
  if (a == 1) {
    image = 0;
  } else {
    auto in_dst = detail::roots_of_defpoly(*src, dst);
    if (in_dst.empty()) throw error(errc::incompatible_degrees, "source field does not embed in target");
    if (b == K) {
      image = in_dst.front();
    } else {
      auto src_amb = detail::roots_of_defpoly(*src, ambient).front();
      auto dst_amb = detail::roots_of_defpoly(*dst, ambient).front();
      bool found = false;
      for (auto y : in_dst) {
        if (detail::evaluate_basis(*dst, y, *ambient, dst_amb) == src_amb) {
          image = y;
          found = true;
          break;
        }
      }
      if (!found) throw error(errc::incompatible_degrees, "no compatible embedding found");
    }
  }
  std::lock_guard lock(cache.mu);
  cache.images.emplace(key, image);
  return image;
}

/**
 * Ring embedding F_{p^a} -> F_{p^b}, a | b | K, compatible with the fixed
 * ambient F_{p^K} (default: the target itself).
 */
inline FFElement embed(const FFElement& x, const Field& target, const Field& ambient = nullptr) {
  const Field& src = x.field();
  const Field& amb = ambient ? ambient : target;
  if (src->characteristic() != target->characteristic() || target->degree() % src->degree() != 0 ||
      amb->characteristic() != target->characteristic() || amb->degree() % target->degree() != 0)
    throw error(errc::incompatible_degrees, "cannot embed F_" + std::to_string(src->size()) + " into F_" +
                                                std::to_string(target->size()));
  if (same_field(src, target)) return {target, x.code()};
  if (src->degree() == 1) return {target, target->from_int(x.code())};
  auto g = embedding_generator_image(src, target, amb);
  return {target, detail::evaluate_basis(*src, x.code(), *target, g)};
}

}  // namespace drinfeld
