#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "drinfeld/local_tower.hpp"
#include "support.hpp"

using namespace drinfeld;

namespace {

LaurentSeries mono(const Field& F, std::uint32_t c, std::int64_t e) { return LaurentSeries::monomial(F, c, e); }

// Andrew's monotone chain on (i, v(a_i)); returns (slope, run) per hull edge.
std::vector<std::pair<Rational, int>> naive_lower_hull(const SeriesPoly& f) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pts;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f[i].is_zero()) pts.push_back({static_cast<std::int64_t>(i), f[i].v0()});
  std::vector<std::pair<std::int64_t, std::int64_t>> h;
  for (auto& p : pts) {
    while (h.size() >= 2) {
      auto& a = h[h.size() - 2];
      auto& b = h.back();
      const auto cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross <= 0) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  std::vector<std::pair<Rational, int>> out;
  for (std::size_t i = 0; i + 1 < h.size(); ++i)
    out.push_back({Rational(h[i + 1].second - h[i].second, h[i + 1].first - h[i].first),
                   static_cast<int>(h[i + 1].first - h[i].first)});
  return out;
}

// f re-expressed over the top field of the tower.
SeriesPoly lift(const SeriesPoly& f, const SplittingData& d) {
  const auto& amb = d.field.ambient();
  return spoly::compose_coefficients(spoly::change_field(f, amb, amb), d.field.base_uniformizer(), d.precision);
}

void check_splitting(const SeriesPoly& f, const SplittingData& d) {
  const auto top = lift(f, d);
  const auto prod = spoly::from_roots(d.roots, d.field.ambient(), d.precision);
  REQUIRE(prod.size() == top.size());
  for (std::size_t i = 0; i < top.size(); ++i) CHECK(approx_equal(prod[i], top[i]));
  // root valuations against the slopes of f over the base
  auto np = newton_polygon(f);
  std::multiset<std::pair<std::int64_t, std::int64_t>> want, got;  // (num, den) in base units
  for (auto& s : np.segments)
    for (int i = 0; i < s.length; ++i) want.insert({s.root_valuation().num, s.root_valuation().den});
  for (auto& r : d.roots) {
    if (r.is_exact_zero()) continue;
    Rational v(r.v0(), d.field.ramification_index());
    got.insert({v.num, v.den});
  }
  CHECK(got == want);
  CHECK(static_cast<int>(d.roots.size()) == spoly::degree(f));
}

}  // namespace

TEST_CASE("Newton polygons of the documented polynomials") {
  auto F2 = make_field(2, 1);
  auto np = newton_polygon(series_poly(F2, {{{1, 1}}, {{0, 1}}}));
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rational(-1));
  CHECK(np.segments[0].length == 1);

  np = newton_polygon(series_poly(F2, {{}, {{1, 1}}, {{1, 1}}, {}, {{0, 1}}}));
  CHECK(np.zero_roots == 1);
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rational(-1, 3));
  CHECK(np.segments[0].length == 3);

  np = newton_polygon(series_poly(F2, {{{1, 1}}, {{1, 1}}, {{0, 1}}}));
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rational(-1, 2));
  CHECK(np.segments[0].length == 2);
}

TEST_CASE("Newton polygons against a naive hull") {
  testing::Rng rng(4242);
  auto F3 = make_field(3, 1);
  for (int it = 0; it < 300; ++it) {
    const int d = static_cast<int>(rng.range(1, 9));
    SeriesPoly f;
    for (int i = 0; i < d; ++i)
      f.push_back(rng.below(4) == 0 ? LaurentSeries::zero(F3) : testing::random_series(rng, F3, 0, 6, 3, true));
    f.push_back(LaurentSeries::constant(F3, 1));
    auto np = newton_polygon(f);
    int z = 0;
    while (f[z].is_zero()) ++z;
    CHECK(np.zero_roots == z);
    SeriesPoly tail(f.begin() + z, f.end());
    auto naive = naive_lower_hull(tail);
    // merge collinear naive edges
    std::vector<std::pair<Rational, int>> merged;
    for (auto& e : naive) {
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(e);
    }
    REQUIRE(np.segments.size() == merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
      CHECK(np.segments[i].slope == merged[i].first);
      CHECK(np.segments[i].length == merged[i].second);
    }
  }
}

TEST_CASE("Newton polygon refuses an undecidable hull") {
  auto F2 = make_field(2, 1);
  SeriesPoly f{mono(F2, 1, 4), LaurentSeries::approximate_zero(F2, 1), LaurentSeries::constant(F2, 1)};
  CHECK_THROWS_AS(newton_polygon(f), error);
}

TEST_CASE("irreducibility certificates") {
  auto F2 = make_field(2, 1);
  CHECK(certify_irreducible(series_poly(F2, {{{1, 1}}, {{1, 1}}, {{0, 1}}})));
  CHECK_FALSE(certify_irreducible(series_poly(F2, {{{2, 1}}, {}, {{0, 1}}})));
  CHECK(certify_irreducible(series_poly(F2, {{{1, 1}}, {}, {}, {{0, 1}}})));
  CHECK(certify_irreducible(series_poly(F2, {{{1, 1}}, {{0, 1}}})));
}

TEST_CASE("residual polynomials") {
  auto F2 = make_field(2, 1), F3 = make_field(3, 1);
  auto f = series_poly(F2, {{{1, 1}}, {{0, 1}}});
  auto np = newton_polygon(f);
  CHECK(residual_polynomial(f, np.segments[0]) == ffpoly::poly{1, 1});
  // (T - t)(T - 2t) = T^2 + 2t^2 over F_3
  auto g = series_poly(F3, {{{2, 2}}, {}, {{0, 1}}});
  np = newton_polygon(g);
  CHECK(residual_polynomial(g, np.segments[0]) == ffpoly::poly{2, 0, 1});
  auto h = series_poly(F2, {{{1, 1}}, {{1, 1}}, {{0, 1}}});
  CHECK_THROWS_AS(residual_polynomial(h, newton_polygon(h).segments[0]), error);
}

TEST_CASE("Hensel lifting") {
  auto F3 = make_field(3, 1);
  // (T - t)(T - 2t - t^2)
  auto r1 = mono(F3, 1, 1), r2 = mono(F3, 2, 1) + mono(F3, 1, 2);
  auto f = spoly::from_roots({r1, r2}, F3, 64);
  auto x = hensel_lift(f, mono(F3, 2, 1), 40);
  CHECK(approx_equal(x, r2));
  CHECK(x.absolute_precision() >= 40);

  auto F2 = make_field(2, 1);
  auto lin = series_poly(F2, {{{1, 1}}, {{0, 1}}});
  auto exact = hensel_lift(lin, mono(F2, 1, 1));
  CHECK(exact.is_exact());
  // (T + t)^2 has a double residual root
  auto dbl = series_poly(F3, {{{2, 1}}, {{1, 2}}, {{0, 1}}});
  CHECK_THROWS_AS(hensel_lift(dbl, mono(F3, 2, 1)), error);
}

TEST_CASE("ramified steps") {
  auto F2 = make_field(2, 1);
  auto K = LocalField::base(F2);
  auto L = extend_ramified(K, series_poly(F2, {{{1, 1}}, {}, {}, {{0, 1}}}));
  CHECK(L.ramification_index() == 3);
  CHECK(L.base_uniformizer().is_exact_monomial());
  CHECK(L.base_uniformizer().v0() == 3);

  auto W = extend_ramified(K, series_poly(F2, {{{1, 1}}, {{1, 1}}, {{0, 1}}}), 30);
  CHECK(W.ramification_index() == 2);
  CHECK_FALSE(W.steps().back().tame);
  // t = z^2 / (1 + z)
  const auto& t = W.base_uniformizer();
  CHECK(t.v0() == 2);
  for (std::int64_t e = 2; e < 30; ++e) CHECK(t.coefficient(e) == 1);

  auto same = extend_ramified(K, series_poly(F2, {{{1, 1}}, {{0, 1}}}));
  CHECK(same.ramification_index() == 1);
}

TEST_CASE("splitting the documented polynomials") {
  auto F2 = make_field(2, 1);
  auto K = LocalField::base(F2);

  auto f1 = series_poly(F2, {{}, {{1, 1}}, {{1, 1}}, {}, {{0, 1}}});
  auto d1 = splitting_tower(f1, K);
  CHECK(d1.geometric_degree == 3);
  check_splitting(f1, d1);

  auto f2 = series_poly(F2, {{}, {{2, 1}}, {{1, 1}}, {}, {{0, 1}}});
  auto d2 = splitting_tower(f2, K);
  CHECK(d2.geometric_degree == 2);
  check_splitting(f2, d2);

  auto f3 = series_poly(F2, {{{1, 1}}, {{1, 1}}, {{0, 1}}});
  auto d3 = splitting_tower(f3, K);
  CHECK(d3.geometric_degree == 2);
  check_splitting(f3, d3);
  // the two roots differ by t
  auto diff = d3.roots[0] - d3.roots[1];
  CHECK(approx_equal(diff, d3.field.base_uniformizer()));
}

TEST_CASE("polynomials with roots in the base split trivially") {
  testing::Rng rng(99);
  for (auto [p, k] : std::vector<std::pair<std::uint32_t, int>>{{2, 1}, {3, 1}, {5, 1}}) {
    auto F = make_field(p, k);
    for (int it = 0; it < 25; ++it) {
      std::vector<LaurentSeries> roots;
      const int d = static_cast<int>(rng.range(1, 4));
      while (static_cast<int>(roots.size()) < d) {
        auto r = testing::random_series(rng, F, 0, 3, 3, true);
        if (std::none_of(roots.begin(), roots.end(), [&](auto& x) { return approx_equal(x, r); })) roots.push_back(r);
      }
      auto f = spoly::from_roots(roots, F, 64);
      auto data = splitting_tower(f, LocalField::base(F));
      CHECK(data.geometric_degree == 1);
      check_splitting(f, data);
    }
  }
}

TEST_CASE("Kummer polynomials T^e - c t") {
  for (auto [p, e] : std::vector<std::pair<std::uint32_t, int>>{{2, 3}, {3, 2}, {3, 4}, {5, 2}, {5, 3}, {2, 5}}) {
    auto F = make_field(p, 1);
    SeriesPoly f(e + 1, LaurentSeries::zero(F));
    f[0] = mono(F, F->neg(1), 1);
    f[e] = LaurentSeries::constant(F, 1);
    auto data = splitting_tower(f, LocalField::base(F));
    CHECK(data.geometric_degree == e);
    check_splitting(f, data);
  }
}

TEST_CASE("precision retry doubles until success") {
  std::vector<std::int64_t> seen;
  auto r = with_precision_retry(
      [&](std::int64_t p) {
        seen.push_back(p);
        if (p < 256) throw error(errc::precision_exhausted, "more");
        return p;
      },
      64, 1024);
  CHECK(r == 256);
  CHECK(seen == std::vector<std::int64_t>{64, 128, 256});
  CHECK_THROWS_AS(with_precision_retry([](std::int64_t) -> int { throw error(errc::not_simple, "x"); }), error);
}
