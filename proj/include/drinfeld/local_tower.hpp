#pragma once

// Towers of extensions of F_q((t)) built from Newton polygons.  Every series
// lives over one ambient coefficient field F_{p^K}; residue growth inside it is
// tracked but costs nothing, only ramification changes the uniformizer.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "drinfeld/error.hpp"
#include "drinfeld/finite_field.hpp"
#include "drinfeld/laurent_series.hpp"
#include "drinfeld/series_poly.hpp"

namespace drinfeld {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw error(errc::division_by_zero, "rational with zero denominator");
    if (den < 0) num = -num, den = -den;
    auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }

  bool is_integer() const noexcept { return den == 1; }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend Rational operator-(const Rational& a) { return {-a.num, a.den}; }
  friend Rational operator*(const Rational& a, std::int64_t k) { return {a.num * k, a.den}; }
  friend Rational operator/(const Rational& a, std::int64_t k) { return {a.num, a.den * k}; }

  std::string to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

struct NewtonSegment {
  Rational slope;  // rise over run along the lower hull
  int length = 0;
  int start = 0, end = 0;
  std::int64_t start_height = 0, end_height = 0;

  /// Valuation shared by the roots this segment accounts for.
  Rational root_valuation() const { return -slope; }
};

struct NewtonPolygon {
  std::vector<NewtonSegment> segments;
  int zero_roots = 0;
};

struct TowerStep {
  enum class Kind { unramified, ramified };
  Kind kind = Kind::unramified;
  int degree = 1;
  SeriesPoly defining_polynomial;  // over the field below; ramified steps only
  Rational root_valuation;         // of the adjoined root, in units of the previous uniformizer
  bool tame = true;
  std::int64_t bezout_x = 1, bezout_y = 0;   // new uniformizer = alpha^x * previous^y
  std::optional<LaurentSeries> reexpansion;  // previous uniformizer in terms of the new one

  int ramification_index() const noexcept { return kind == Kind::ramified ? degree : 1; }
};

class LocalField {
 public:
  /// F_q((t)) with coefficients carried in `ambient`, which must contain `base`.
  static LocalField base(Field base_field, Field ambient = nullptr) {
    if (!ambient) ambient = base_field;
    if (base_field->characteristic() != ambient->characteristic() || ambient->degree() % base_field->degree() != 0)
      throw error(errc::incompatible_degrees, "ambient field does not contain the base field");
    LocalField k;
    k.base_ = std::move(base_field);
    k.ambient_ = ambient;
    k.residue_degree_ = k.base_->degree();
    k.tmap_ = LaurentSeries::monomial(ambient, 1, 1);
    return k;
  }

  const Field& base_field() const noexcept { return base_; }
  const Field& ambient() const noexcept { return ambient_; }
  const std::vector<TowerStep>& steps() const noexcept { return steps_; }
  std::int64_t ramification_index() const noexcept { return e_; }
  /// Degree over F_p of the residue field reached so far, a divisor of the ambient degree.
  int residue_degree() const noexcept { return residue_degree_; }
  /// t written in the top uniformizer.
  const LaurentSeries& base_uniformizer() const noexcept { return tmap_; }
  bool is_base() const noexcept { return steps_.empty(); }

  LocalField with_ramified(TowerStep step, LaurentSeries tmap) const {
    LocalField k = *this;
    k.e_ *= step.degree;
    k.steps_.push_back(std::move(step));
    k.tmap_ = std::move(tmap);
    return k;
  }

  LocalField with_residue_degree(int degree) const {
    LocalField k = *this;
    if (degree == residue_degree_) return k;
    TowerStep s;
    s.kind = TowerStep::Kind::unramified;
    s.degree = degree / residue_degree_;
    k.steps_.push_back(std::move(s));
    k.residue_degree_ = degree;
    return k;
  }

  std::string describe() const {
    std::ostringstream os;
    os << "F_" << base_->size() << "((t))";
    for (auto& s : steps_) {
      if (s.kind == TowerStep::Kind::unramified) os << " -> unramified(" << s.degree << ")";
      else os << " -> " << (s.tame ? "tame" : "wild") << "(" << s.degree << ", " << s.root_valuation.to_string() << ")";
    }
    return os.str();
  }

 private:
  Field base_, ambient_;
  std::vector<TowerStep> steps_;
  std::int64_t e_ = 1;
  int residue_degree_ = 1;
  LaurentSeries tmap_ = LaurentSeries::zero(make_field(2, 1, {}));
};

/// Coefficients of a polynomial over F_q((t)) given as lists of t-adic codes.
inline SeriesPoly series_poly(const Field& f, const std::vector<std::vector<std::pair<std::int64_t, std::uint32_t>>>& terms) {
  SeriesPoly p;
  for (auto& c : terms) {
    LaurentSeries s = LaurentSeries::zero(f);
    for (auto [e, x] : c) s = s + LaurentSeries::monomial(f, x, e);
    p.push_back(s);
  }
  return p;
}

inline NewtonPolygon newton_polygon(const SeriesPoly& f) {
  auto g = spoly::trim(f);
  if (g.empty() || (g.size() == 1 && g[0].is_exact_zero()))
    throw error(errc::invalid_argument, "Newton polygon of the zero polynomial");
  const int d = static_cast<int>(g.size()) - 1;
  if (g.back().is_zero()) throw error(errc::precision_exhausted, "leading coefficient vanishes at working precision");
  NewtonPolygon np;
  while (np.zero_roots < d && g[np.zero_roots].is_exact_zero()) ++np.zero_roots;
  if (g[np.zero_roots].is_zero())
    throw error(errc::precision_exhausted, "lowest coefficient vanishes at working precision");

  std::vector<std::pair<int, std::int64_t>> hull;
  for (int i = np.zero_roots; i <= d; ++i) {
    if (g[i].is_zero()) continue;
    std::pair<int, std::int64_t> pt{i, g[i].v0()};
    while (hull.size() >= 2) {
      auto [x1, y1] = hull[hull.size() - 2];
      auto [x2, y2] = hull.back();
      // Drop the middle point when it lies on or above the chord.
      if ((y2 - y1) * (pt.first - x1) >= (pt.second - y1) * (x2 - x1)) hull.pop_back();
      else break;
    }
    hull.push_back(pt);
  }
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    auto [x0, y0] = hull[s];
    auto [x1, y1] = hull[s + 1];
    NewtonSegment seg;
    seg.slope = Rational(y1 - y0, x1 - x0);
    seg.length = x1 - x0;
    seg.start = x0, seg.end = x1;
    seg.start_height = y0, seg.end_height = y1;
    // Unknown coefficients must sit strictly above the hull for it to be decided.
    for (int i = x0 + 1; i < x1; ++i) {
      if (!g[i].is_zero() || g[i].is_exact()) continue;
      if (g[i].absolute_precision() * (x1 - x0) <= y0 * (x1 - x0) + (y1 - y0) * (i - x0))
        throw error(errc::precision_exhausted, "coefficient of T^" + std::to_string(i) + " too imprecise for the hull");
    }
    np.segments.push_back(seg);
  }
  return np;
}

inline bool certify_irreducible(const SeriesPoly& f) {
  const int d = spoly::degree(f);
  if (d == 1) return true;
  if (d < 1) return false;
  auto np = newton_polygon(f);
  return np.zero_roots == 0 && np.segments.size() == 1 && np.segments[0].slope.den == d;
}

/**
 * Reduction of f(pi^a u) / pi^L for a segment of integral slope -a, as a
 * polynomial in u over the ambient field.  Indices below the segment are zero,
 * so the degree is the segment end.
 */
inline ffpoly::poly residual_polynomial(const SeriesPoly& f, const NewtonSegment& seg) {
  if (!seg.slope.is_integer())
    throw error(errc::slope_not_realized, "slope " + seg.slope.to_string() + " is not integral in the current field");
  const std::int64_t a = -seg.slope.num;
  ffpoly::poly r(static_cast<std::size_t>(seg.end) + 1, 0);
  for (int i = seg.start; i <= seg.end; ++i) {
    const std::int64_t line = seg.start_height - a * (i - seg.start);
    const auto& c = f[i];
    if (c.is_zero()) {
      if (!c.is_exact() && c.absolute_precision() <= line)
        throw error(errc::precision_exhausted, "coefficient too imprecise for the residual polynomial");
      continue;
    }
    if (c.v0() == line) r[i] = c.leading_coefficient();
  }
  return r;
}

/// Newton iteration from r0; requires the normalized dominance v(Q(u0)) > 2 v(Q'(u0)).
inline LaurentSeries hensel_lift(const SeriesPoly& f, const LaurentSeries& r0, std::int64_t precision = 64) {
  auto fp = spoly::derivative(f);
  auto val = spoly::eval(f, r0, precision);
  auto dval = spoly::eval(fp, r0, precision);
  if (val.is_exact_zero()) {
    if (dval.is_zero()) throw error(errc::not_simple, "approximate root is a multiple root");
    return r0;
  }
  if (dval.is_zero()) throw error(errc::not_simple, "derivative vanishes at the approximate root");
  const std::int64_t a = r0.is_zero() ? 0 : r0.v0();
  std::int64_t L = LaurentSeries::kExact;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f[i].is_zero()) L = std::min(L, f[i].v0() + a * static_cast<std::int64_t>(i));
  if (val.valuation_or_bound() - L <= 2 * (dval.v0() + a - L))
    throw error(errc::not_simple, "Hensel dominance fails at the approximate root");

  LaurentSeries r = r0;
  for (int iter = 0; iter < 96; ++iter) {
    if (val.is_zero()) {
      if (!val.is_exact()) r = truncate_absolute(r, val.absolute_precision() - dval.v0());
      return truncate(r, precision);
    }
    auto delta = divide(val, dval, precision);
    r = truncate(r - delta, precision);
    val = spoly::eval(f, r, precision);
    dval = spoly::eval(fp, r, precision);
    if (dval.is_zero()) throw error(errc::precision_exhausted, "derivative lost during Hensel iteration");
    if (delta.is_zero()) return r;
  }
  throw error(errc::precision_exhausted, "Hensel iteration did not converge");
}

namespace detail {

/**
 * Splits monic P = A * B at hull vertex k: A monic of degree k collecting the
 * roots of larger valuation.  Newton iteration on the Sylvester system.
 */
inline std::pair<SeriesPoly, SeriesPoly> split_at_vertex(const SeriesPoly& P, int k, std::int64_t cap) {
  const int d = static_cast<int>(P.size()) - 1;
  const auto& F = P.front().field();
  const auto inv = invert(P[k], cap);
  SeriesPoly A(k + 1, LaurentSeries::zero(F)), B(d - k + 1, LaurentSeries::zero(F));
  for (int i = 0; i < k; ++i) A[i] = truncate(P[i] * inv, cap);
  A[k] = LaurentSeries::constant(F, 1);
  for (int j = 0; j <= d - k; ++j) B[j] = P[k + j];
  for (int iter = 0; iter < 128; ++iter) {
    auto AB = spoly::mul(A, B, cap);
    AB.resize(d + 1, LaurentSeries::zero(F));
    std::vector<LaurentSeries> E(d, LaurentSeries::zero(F));
    bool done = true;
    for (int j = 0; j < d; ++j) {
      E[j] = truncate(P[j] - AB[j], cap);
      if (!E[j].is_zero()) done = false;
    }
    if (done) return {A, B};
    SeriesMatrix m{d, std::vector<LaurentSeries>(static_cast<std::size_t>(d) * d, LaurentSeries::zero(F))};
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < k; ++i)
        if (j - i >= 0 && j - i <= d - k) m.at(j, i) = B[j - i];
      for (int i = 0; i < d - k; ++i)
        if (j - i >= 0 && j - i <= k) m.at(j, k + i) = A[j - i];
    }
    auto x = solve_linear(std::move(m), E, cap);
    bool tiny = true;
    for (int i = 0; i < k; ++i) {
      A[i] = truncate(A[i] + x[i], cap);
      tiny = tiny && x[i].is_zero();
    }
    for (int i = 0; i < d - k; ++i) {
      B[i] = truncate(B[i] + x[k + i], cap);
      tiny = tiny && x[k + i].is_zero();
    }
    if (tiny) return {A, B};
  }
  throw error(errc::precision_exhausted, "slope factorization did not converge");
}

}  // namespace detail

/// Monic factor of P whose roots are exactly those of the given segment.
inline SeriesPoly segment_factor(const SeriesPoly& P, const NewtonSegment& seg, std::int64_t cap) {
  const int d = static_cast<int>(spoly::trim(P).size()) - 1;
  SeriesPoly left = seg.end < d ? detail::split_at_vertex(P, seg.end, cap).first : P;
  return seg.start > 0 ? detail::split_at_vertex(left, seg.start, cap).second : left;
}

namespace detail {

/// Solves H(rho, Z) = sum M_i(rho) Z^i = 0 for rho = pi as a series in Z.
inline LaurentSeries solve_uniformizer(const SeriesPoly& M, std::int64_t cap) {
  const int b = static_cast<int>(M.size()) - 1;
  const auto& F = M.front().field();
  const FiniteField& FF = *F;
  const auto mu = M[0].coefficient(1);
  LaurentSeries rho = LaurentSeries::monomial(F, FF.neg(FF.inv(mu)), b);
  SeriesPoly dM;
  for (auto& c : M) dM.push_back(derivative(c));
  for (int iter = 0; iter < 96; ++iter) {
    LaurentSeries H = LaurentSeries::zero(F), dH = LaurentSeries::zero(F);
    for (int i = 0; i <= b; ++i) {
      if (!M[i].is_exact_zero()) H = H + compose(M[i], rho, cap + b).shifted(i);
      if (!dM[i].is_exact_zero()) dH = dH + compose(dM[i], rho, cap + b).shifted(i);
    }
    if (dH.is_zero() || dH.v0() != 0)
      throw error(errc::internal_soundness, "implicit uniformizer equation is not smooth");
    if (H.is_zero()) {
      if (!H.is_exact()) rho = truncate_absolute(rho, H.absolute_precision());
      return truncate(rho, cap);
    }
    auto next = truncate(rho - divide(H, dH, cap + b), cap);
    if (approx_equal(next, rho) && iter > 0) return next;
    rho = next;
  }
  throw error(errc::precision_exhausted, "uniformizer re-expansion did not converge");
}

/// Minimal polynomial of alpha^x where alpha is a root of the monic f.
inline SeriesPoly power_minimal_polynomial(const SeriesPoly& f, std::int64_t x, std::int64_t cap) {
  const int b = static_cast<int>(f.size()) - 1;
  const auto& F = f.front().field();
  auto reduce = [&](SeriesPoly p) {
    if (static_cast<int>(p.size()) <= b) {
      p.resize(b, LaurentSeries::zero(F));
      return p;
    }
    auto r = spoly::divmod(p, f, cap).second;
    r.resize(b, LaurentSeries::zero(F));
    return r;
  };
  SeriesPoly beta{LaurentSeries::constant(F, 1)};
  SeriesPoly z{LaurentSeries::zero(F), LaurentSeries::constant(F, 1)};
  for (std::int64_t i = 0; i < x; ++i) beta = reduce(spoly::mul(beta, z, cap));
  std::vector<SeriesPoly> pw{reduce(SeriesPoly{LaurentSeries::constant(F, 1)})};
  for (int i = 1; i <= b; ++i) pw.push_back(reduce(spoly::mul(pw.back(), beta, cap)));
  SeriesMatrix m{b, std::vector<LaurentSeries>(static_cast<std::size_t>(b) * b, LaurentSeries::zero(F))};
  std::vector<LaurentSeries> rhs(b, LaurentSeries::zero(F));
  for (int row = 0; row < b; ++row) {
    for (int col = 0; col < b; ++col) m.at(row, col) = pw[col][row];
    rhs[row] = -pw[b][row];
  }
  auto c = solve_linear(std::move(m), rhs, cap);
  c.push_back(LaurentSeries::constant(F, 1));
  return c;
}

}  // namespace detail

/**
 * Adjoins a root alpha of a certified polynomial.  The new uniformizer is
 * alpha^x * pi^y with x a + y b = 1, and the old uniformizer is re-expanded in
 * it to `precision` relative coefficients.
 */
inline LocalField extend_ramified(const LocalField& K, const SeriesPoly& f_in, std::int64_t precision = 64) {
  auto f = spoly::trim(f_in);
  const int b = static_cast<int>(f.size()) - 1;
  if (!certify_irreducible(f)) throw error(errc::not_certified, "polynomial is not certified irreducible");
  if (!f.back().is_one()) throw error(errc::invalid_argument, "extend_ramified expects a monic polynomial");
  if (b == 1) return K;
  auto fp = spoly::derivative(f);
  if (spoly::is_zero(fp) || spoly::gcd_degree(f, fp, precision) > 0)
    throw error(errc::inseparable_extension, "defining polynomial is inseparable");
  const auto seg = newton_polygon(f).segments.front();
  const Rational rv = seg.root_valuation();
  const std::int64_t a = rv.num;
  std::int64_t x = 0;
  while ((((x * a) % b) + b) % b != 1) ++x;
  const std::int64_t y = (1 - x * a) / b;

  const auto& F = K.ambient();
  SeriesPoly M = x == 1 ? f : detail::power_minimal_polynomial(f, x, precision);
  for (int i = 0; i < b; ++i) M[i] = M[i] * LaurentSeries::monomial(F, 1, y * (b - i));
  if (M[0].is_zero() || M[0].v0() != 1)
    throw error(errc::internal_soundness, "uniformizer polynomial has the wrong constant term");
  auto rho = detail::solve_uniformizer(M, precision);

  TowerStep step;
  step.kind = TowerStep::Kind::ramified;
  step.degree = b;
  step.defining_polynomial = f;
  step.root_valuation = rv;
  step.tame = b % static_cast<int>(F->characteristic()) != 0;
  step.bezout_x = x;
  step.bezout_y = y;
  step.reexpansion = rho;
  return K.with_ramified(std::move(step), compose(K.base_uniformizer(), rho, precision));
}

/// One line of the per-segment trace.
struct SegmentRecord {
  Rational slope;  // in units of the base uniformizer
  int length = 0;
  std::string action;
  std::string kind;
};

struct SplitOptions {
  std::int64_t precision = 64;
  int degree_cap = 256;
  std::int64_t margin = 8;
  int max_ambient_degree = 24;
};

struct SplittingData {
  LocalField field;
  std::vector<LaurentSeries> roots;  // canonical order
  std::int64_t geometric_degree = 1;
  std::vector<SegmentRecord> diagnostics;
  std::int64_t discriminant_valuation = 0;  // v_t(Res(f, f')) over the base
  std::int64_t max_root_gap = 0;            // largest v(r_i - r_j), top units
  std::int64_t precision = 64;
};

namespace detail {

class Splitter {
 public:
  Splitter(LocalField K, SeriesPoly f, const SplitOptions& opt) : field_(std::move(K)), f_(std::move(f)), opt_(opt) {}

  SplittingData run() {
    const auto fp = spoly::derivative(f_);
    if (spoly::is_zero(fp)) throw error(errc::inseparable, "polynomial has zero derivative");
    auto disc = spoly::resultant_valuation(f_, fp, opt_.precision);
    if (!disc) throw error(errc::inseparable, "polynomial shares a factor with its derivative");
    disc_ = *disc;
    e0_ = field_.ramification_index();
    stack_.push_back({f_, LaurentSeries::zero(field_.ambient()), std::nullopt, 0});
    while (!stack_.empty()) {
      Item it = std::move(stack_.back());
      stack_.pop_back();
      process(std::move(it));
    }
    return finish();
  }

 private:
  struct Item {
    SeriesPoly P;
    LaurentSeries offset;
    std::optional<std::int64_t> floor;
    int depth;
  };

  std::int64_t cap() const { return opt_.precision; }
  std::int64_t e() const { return field_.ramification_index(); }
  std::int64_t disc_top() const { return disc_ * e() / e0_; }
  Rational base_units(const Rational& r) const { return r / e(); }

  void record(const Rational& root_val, int length, std::string action, std::string kind) {
    diag_.push_back({-base_units(root_val), length, std::move(action), std::move(kind)});
  }

  void reexpand(const LaurentSeries& rho, std::int64_t b) {
    for (auto& it : stack_) {
      it.P = spoly::compose_coefficients(it.P, rho, cap());
      it.offset = compose(it.offset, rho, cap());
      if (it.floor) *it.floor *= b;
    }
    for (auto& r : roots_) r = compose(r, rho, cap());
  }

  void adjoin(const SeriesPoly& g, Item pending) {
    const std::int64_t b = static_cast<std::int64_t>(g.size()) - 1;
    field_ = extend_ramified(field_, g, cap());
    stack_.push_back(std::move(pending));
    reexpand(*field_.steps().back().reexpansion, b);
  }

  void process(Item it) {
    auto P = spoly::trim(it.P);
    const auto& F = field_.ambient();
    if (it.depth > 4 * static_cast<int>(f_.size()) + disc_top() + 8)
      throw error(errc::depth_exceeded, "shift recursion exceeded its bound");
    while (P.size() > 1 && P[0].is_zero()) {
      LaurentSeries root = it.offset;
      if (!P[0].is_exact()) {
        if (P[1].is_zero()) throw error(errc::precision_exhausted, "cannot isolate a root at working precision");
        const std::int64_t gap = P[0].absolute_precision() - P[1].v0();
        if (gap <= disc_top()) throw error(errc::precision_exhausted, "root not separated at working precision");
        root = root + LaurentSeries::approximate_zero(F, gap);
      }
      roots_.push_back(root);
      diag_.push_back({Rational(0), 1, "zero-root", "zero"});
      P.erase(P.begin());
    }
    if (P.size() <= 1) return;
    auto np = newton_polygon(P);
    std::vector<NewtonSegment> above;
    for (auto& s : np.segments)
      if (!it.floor || s.root_valuation() > Rational(*it.floor)) above.push_back(s);
    if (above.empty()) throw error(errc::internal_soundness, "cluster without segments above its floor");

    for (auto& s : above) {
      const auto den = s.slope.den;
      if (den > 1 && den % F->characteristic() != 0) {
        record(s.root_valuation(), s.length, "tame-step", "tame");
        SeriesPoly g(static_cast<std::size_t>(den) + 1, LaurentSeries::zero(F));
        g[0] = -LaurentSeries::monomial(F, 1, 1);
        g[den] = LaurentSeries::constant(F, 1);
        it.P = P;
        adjoin(g, std::move(it));
        return;
      }
    }
    for (auto& s : above) {
      if (s.slope.den == 1) continue;
      const bool whole = !it.floor && np.segments.size() == 1;
      if (whole) {
        if (s.length != s.slope.den)
          throw error(errc::not_certified, "wild segment of slope " + base_units(s.slope).to_string() +
                                               " and length " + std::to_string(s.length) + " cannot be certified");
        record(s.root_valuation(), s.length, "certified-step", "wild");
        it.P = P;
        adjoin(P, std::move(it));
        return;
      }
    }
    for (auto& s : above) {
      if (s.slope.den == 1) continue;
      record(s.root_valuation(), s.length, "factor", "wild");
      stack_.push_back({segment_factor(P, s, cap()), it.offset, std::nullopt, it.depth});
    }
    for (auto& s : above) {
      if (s.slope.den != 1) continue;
      split_integral(P, s, it);
    }
  }

  void split_integral(const SeriesPoly& P, const NewtonSegment& s, const Item& it) {
    const auto& F = field_.ambient();
    const FiniteField& FF = *F;
    const std::int64_t a = -s.slope.num;
    auto R = residual_polynomial(P, s);
    R.erase(R.begin(), R.begin() + s.start);
    auto rts = find_roots(F, R);
    int total = 0, rdeg = field_.residue_degree();
    for (auto& r : rts) total += r.multiplicity;
    if (total < s.length) throw residue_field_too_small(splitting_degree(F, R));
    for (auto& r : rts)
      if (r.root != 0) rdeg = std::lcm(rdeg, FF.element_degree(r.root));
    if (rdeg != field_.residue_degree()) {
      record(s.root_valuation(), s.length, "residue-extension", "unramified");
      field_ = field_.with_residue_degree(rdeg);
    }
    for (auto& r : rts) {
      auto r0 = LaurentSeries::monomial(F, r.root, a);
      if (r.multiplicity == 1) {
        roots_.push_back(truncate(it.offset + hensel_lift(P, r0, cap()), cap()));
        record(s.root_valuation(), 1, "hensel", "integral");
      } else {
        if (a > disc_top()) throw error(errc::depth_exceeded, "cluster floor exceeds the discriminant bound");
        record(s.root_valuation(), r.multiplicity, "shift", "integral");
        stack_.push_back({spoly::taylor_shift(P, r0, cap()), it.offset + r0, a, it.depth + 1});
      }
    }
  }

  SplittingData finish() {
    const auto& F = field_.ambient();
    const int d = static_cast<int>(f_.size()) - 1;
    if (static_cast<int>(roots_.size()) != d)
      throw error(errc::internal_soundness, "found " + std::to_string(roots_.size()) + " roots for degree " + std::to_string(d));
    std::sort(roots_.begin(), roots_.end(), [](auto& x, auto& y) { return canonical_less(x, y); });

    std::int64_t sum = 0, gap = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        auto diff = roots_[i] - roots_[j];
        if (diff.is_zero()) throw error(errc::precision_exhausted, "two roots agree at working precision");
        sum += 2 * diff.v0();
        gap = std::max(gap, diff.v0());
      }
    if (sum != disc_top())
      throw error(errc::precision_exhausted, "root separations do not account for the discriminant");

    SeriesPoly top;
    for (auto& c : f_) top.push_back(compose(c, field_.base_uniformizer(), cap()));
    auto prod = spoly::from_roots(roots_, F, cap());
    for (int i = 0; i <= d; ++i)
      if (!approx_equal(prod[i], top[i]))
        throw error(errc::precision_exhausted, "root product does not reconstruct the polynomial");

    auto np = newton_polygon(f_);
    std::vector<Rational> expected(np.zero_roots, Rational(LaurentSeries::kExact));
    for (auto& s : np.segments)
      for (int k = 0; k < s.length; ++k) expected.push_back(s.root_valuation() * (e() / e0_));
    std::vector<Rational> got;
    for (auto& r : roots_) got.push_back(r.is_zero() ? Rational(LaurentSeries::kExact) : Rational(r.v0()));
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (int i = 0; i < d; ++i) {
      bool approx_zero_root = got[i].num == LaurentSeries::kExact;
      if (got[i] != expected[i] && !(approx_zero_root && expected[i].num == LaurentSeries::kExact))
        throw error(errc::internal_soundness, "root valuation disagrees with its Newton slope");
    }

    SplittingData out{field_, roots_, e() / e0_, diag_, disc_, gap, opt_.precision};
    return out;
  }

  LocalField field_;
  SeriesPoly f_;
  SplitOptions opt_;
  std::int64_t disc_ = 0, e0_ = 1;
  std::vector<Item> stack_;
  std::vector<LaurentSeries> roots_;
  std::vector<SegmentRecord> diag_;
};

}  // namespace detail

/**
 * All roots of a monic separable f over K in a tower built on K.  When K is a
 * base field the ambient coefficient field is enlarged automatically as
 * residual polynomials demand.
 */
inline SplittingData splitting_tower(const SeriesPoly& f_in, const LocalField& K, const SplitOptions& opt = {}) {
  auto f = spoly::trim(f_in);
  const int d = static_cast<int>(f.size()) - 1;
  if (d < 1) throw error(errc::invalid_argument, "splitting_tower needs a polynomial of positive degree");
  if (d > opt.degree_cap) throw error(errc::degree_cap_exceeded, "degree " + std::to_string(d) + " exceeds the cap");
  if (!f.back().is_one()) throw error(errc::invalid_argument, "splitting_tower expects a monic polynomial");
  LocalField field = K;
  const auto original = f;
  while (true) {
    try {
      return detail::Splitter(field, f, opt).run();
    } catch (const residue_field_too_small& r) {
      if (!K.is_base()) throw;
      const int next = field.ambient()->degree() * r.degree();
      if (next > opt.max_ambient_degree) throw;
      auto amb = make_field(field.ambient()->characteristic(), next, {});
      field = LocalField::base(K.base_field(), amb);
      f = spoly::change_field(original, amb, amb);
    }
  }
}

/// Default first precision and the doubling ceiling of the retry driver.
inline constexpr std::int64_t kDefaultPrecision = 64;
inline constexpr std::int64_t kMaxPrecision = 1024;

/**
 * Runs fn(precision), doubling the precision after a retryable failure until
 * `max_precision` has been tried.
 */
template <class Fn>
auto with_precision_retry(Fn&& fn, std::int64_t start = kDefaultPrecision, std::int64_t max_precision = kMaxPrecision)
    -> decltype(fn(start)) {
  std::int64_t prec = start;
  while (true) {
    try {
      return fn(prec);
    } catch (const error& e) {
      if (!e.retryable() || prec * 2 > max_precision) throw;
      prec *= 2;
    }
  }
}

}  // namespace drinfeld
