#include <catch_amalgamated.hpp>

#include "drinfeld/formal_module.hpp"
#include "support.hpp"

using namespace drinfeld;

namespace {

LaurentSeries mono(const Field& F, std::uint32_t c, std::int64_t e) { return LaurentSeries::monomial(F, c, e); }

std::string render(const AdditivePolynomial<MPoly>& P, int n) {
  const auto names = variable_names(n);
  return P.to_string([&](const MPoly& c) { return c.to_string(names); });
}

std::string render(const AdditivePolynomial<LaurentSeries>& P) {
  return P.to_string([](const LaurentSeries& c) { return c.to_string(); });
}

}  // namespace

TEST_CASE("model shapes") {
  CHECK(render(build_model(3, 1).pi(), 1) == "[(0, u0), (1, 1)]");
  CHECK(render(build_model(2, 2).pi(), 2) == "[(0, u0), (1, u1), (2, 1)]");
  CHECK_THROWS_AS(build_model(3, 2, 2), error);
  try {
    build_model(3, 2, 2);
  } catch (const error& e) {
    CHECK(e.kind() == errc::characteristic_mismatch);
  }
  auto X = build_model(2, 2);
  auto dense = X.pi().dense();
  REQUIRE(dense.size() == 5);
  CHECK(dense[3].is_zero());
}

TEST_CASE("congruences") {
  for (auto [q, n] : std::vector<std::pair<std::uint64_t, int>>{{2, 1}, {2, 2}, {3, 2}, {2, 3}, {4, 2}, {5, 1}}) {
    auto rep = check_congruences(build_model(q, n));
    CHECK(rep.ok());
    CHECK(rep.pass.size() == static_cast<std::size_t>(n + 1));
  }
  // top coefficient t instead of 1
  auto X = build_model(2, 2);
  auto dense = X.pi().dense();
  dense[4] = MPoly::variable(X.scalars, 3, t_variable(2));
  auto rep = check_congruences(dense, 2, 2);
  CHECK(rep.pass == std::vector<bool>{true, true, false});

  // extra T^2 for q = 2: the degree-2 truncation first sees it at i = 1
  dense = X.pi().dense();
  dense[2] = dense[2] + MPoly::constant(X.scalars, 3, 1);
  rep = check_congruences(dense, 2, 2);
  CHECK_FALSE(rep.non_additive);
  CHECK(rep.pass == std::vector<bool>{true, false, false});

  // extra T^2 for q = 3 is not additive
  auto Y = build_model(3, 2);
  auto d3 = Y.pi().dense();
  d3[2] = MPoly::constant(Y.scalars, 3, 1);
  rep = check_congruences(d3, 3, 2);
  CHECK(rep.non_additive);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("o-action") {
  auto X = build_model(2, 2);
  auto fq = X.scalars;
  CHECK(render(act(OPolynomial(fq, {1, 1}), X), 2) == "[(0, u0 + 1), (1, u1), (2, 1)]");
  CHECK(act(OPolynomial(fq, {0, 0, 1}), X).degree() == 16);
  CHECK(act(OPolynomial::zero(fq, 3), X).is_zero());
  CHECK(act(OPolynomial::one(fq, 2), X) == AdditivePolynomial<MPoly>::identity(2, X.u[0]));
}

TEST_CASE("division polynomials") {
  auto X = build_model(2, 2);
  CHECK(division_polynomial(X, 1) == X.pi());
  CHECK(division_polynomial(X, 2).degree() == 16);
  CHECK(division_polynomial(X, 2) == X.pi().compose(X.pi()));

  auto F2 = make_field(2, 1);
  auto t = mono(F2, 1, 1);
  AdditivePolynomial<LaurentSeries> g(2, {t, LaurentSeries::constant(F2, 1)});
  StratumModule<LaurentSeries> S{2, 2, 1, F2, g};
  CHECK(render(S.etale_division_polynomial(2)) == "[(0, t^2), (1, t + t^2), (2, 1)]");
}

TEST_CASE("composition agrees with evaluation") {
  testing::Rng rng(31337);
  auto F = make_field(3, 1);
  for (int it = 0; it < 40; ++it) {
    std::vector<LaurentSeries> a, b;
    for (int i = 0; i < 3; ++i) a.push_back(testing::random_series(rng, F, 1, 3, 2, true));
    for (int i = 0; i < 2; ++i) b.push_back(testing::random_series(rng, F, 1, 3, 2, true));
    AdditivePolynomial<LaurentSeries> P(3, a), Q(3, b);
    auto x = testing::random_series(rng, F, 1, 2, 3, true);
    const std::int64_t cap = 200;
    CHECK(approx_equal(evaluate(P.compose(Q), x, cap), evaluate(P, evaluate(Q, x, cap), cap)));
    CHECK(approx_equal(evaluate(P + Q, x, cap), evaluate(P, x, cap) + evaluate(Q, x, cap)));
  }
}

TEST_CASE("strata") {
  auto X2 = build_model(2, 2);
  CHECK(render(reduce_to_stratum(X2, 1).g, 2) == "[(0, u1), (1, 1)]");
  CHECK(reduce_to_stratum(X2, 0).g == X2.pi());
  CHECK(render(reduce_to_stratum(build_model(2, 3), 2).g, 3) == "[(0, u2), (1, 1)]");
  CHECK_THROWS_AS(reduce_to_stratum(X2, 2), error);

  // recompose g(T^{q^h}) equals [pi] on the stratum u_0 = ... = u_{h-1} = 0
  auto X3 = build_model(3, 3);
  for (int h = 0; h < 3; ++h) {
    auto S = reduce_to_stratum(X3, h);
    auto full = X3.pi().coefficients();
    for (int j = 0; j < h; ++j) full[j] = MPoly(X3.scalars, 4);
    CHECK(S.recompose() == AdditivePolynomial<MPoly>(3, full));
  }
}

TEST_CASE("specialization") {
  auto S0 = reduce_to_stratum(build_model(2, 2), 0);
  const auto& F = S0.scalars;
  auto t = mono(F, 1, 1);
  auto s = specialize(S0, {{0, t}, {1, t}});
  CHECK(render(s.g) == "[(0, t), (1, t), (2, 1)]");

  auto S1 = reduce_to_stratum(build_model(3, 2), 1);
  auto s3 = specialize(S1, {{1, mono(S1.scalars, 1, 1)}});
  CHECK(render(s3.g) == "[(0, t), (1, 1)]");

  auto expect_kind = [](auto&& fn, errc kind) {
    try {
      fn();
      FAIL("no error");
    } catch (const error& e) {
      CHECK(e.kind() == kind);
    }
  };
  expect_kind([&] { specialize(S1, {{1, LaurentSeries::constant(S1.scalars, 1)}}); }, errc::non_positive_valuation);
  expect_kind([&] { specialize(S1, {}); }, errc::outside_open_stratum);
  expect_kind([&] { specialize(S1, {{0, mono(S1.scalars, 1, 1)}, {1, mono(S1.scalars, 1, 1)}}); }, errc::invalid_argument);
}

TEST_CASE("twisted factorization [pi^m](T) = G_m(T^{q^{mh}})") {
  // q = 2, n = 2, h = 1, u_1 = t; compare coefficient lists in the q-power basis.
  auto F2 = make_field(2, 1);
  auto t = mono(F2, 1, 1);
  auto X = build_model(2, 2, {LaurentSeries::zero(F2), t});
  auto S = reduce_to_stratum(X, 1);
  for (int m = 1; m <= 3; ++m) {
    auto lhs = division_polynomial(X, m).coefficients();
    auto G = S.twisted_etale_division_polynomial(m).coefficients();
    REQUIRE(lhs.size() == G.size() + m);
    for (int j = 0; j < m; ++j) CHECK(lhs[j].is_exact_zero());
    for (std::size_t j = 0; j < G.size(); ++j) CHECK(approx_equal(lhs[j + m], G[j]));
  }
}

TEST_CASE("o/(pi^m) arithmetic") {
  auto F3 = make_field(3, 1);
  OPolynomial a(F3, {1, 2, 0}), b(F3, {2, 1, 1});
  CHECK((a + b).to_string() == "pi^2");
  CHECK((a * b).coefficients() == std::vector<std::uint32_t>{2, 2, 0});
  CHECK(all_o_elements(F3, 2).size() == 9);
  CHECK(a.is_unit());
  CHECK_FALSE(OPolynomial(F3, {0, 1, 0}).is_unit());
}
