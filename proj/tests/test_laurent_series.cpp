#include <catch_amalgamated.hpp>

#include <map>

#include "drinfeld/laurent_series.hpp"
#include "support.hpp"

using namespace drinfeld;

namespace {

LaurentSeries mono(const Field& F, std::uint32_t c, std::int64_t e) { return LaurentSeries::monomial(F, c, e); }

// Coefficient map of the known terms below `bound`.
std::map<std::int64_t, std::uint32_t> terms(const LaurentSeries& a, std::int64_t bound) {
  std::map<std::int64_t, std::uint32_t> r;
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
    const auto e = a.v0() + static_cast<std::int64_t>(i);
    if (e < bound && a.coefficients()[i]) r[e] = a.coefficients()[i];
  }
  return r;
}

// Naive convolution truncated at `bound`.
std::map<std::int64_t, std::uint32_t> naive_product(const FiniteField& F, const LaurentSeries& a, const LaurentSeries& b,
                                                    std::int64_t bound) {
  std::map<std::int64_t, std::uint32_t> r;
  for (auto [ea, ca] : terms(a, bound - b.v0()))
    for (auto [eb, cb] : terms(b, bound - a.v0()))
      if (ea + eb < bound) r[ea + eb] = F.add(r[ea + eb], F.mul(ca, cb));
  std::erase_if(r, [](auto& kv) { return kv.second == 0; });
  return r;
}

}  // namespace

TEST_CASE("basic products and inverses") {
  auto F2 = make_field(2, 1);
  auto t = mono(F2, 1, 1);
  CHECK((t * mono(F2, 1, -1)).is_one());
  auto one_t = LaurentSeries::constant(F2, 1) + t;
  auto sq = one_t * one_t;
  CHECK(sq.is_exact());
  CHECK(terms(sq, 100) == std::map<std::int64_t, std::uint32_t>{{0, 1}, {2, 1}});
  CHECK(invert(LaurentSeries::constant(F2, 1)).is_one());
  CHECK_THROWS_AS(invert(LaurentSeries::zero(F2)), error);
  CHECK_THROWS_AS(invert(LaurentSeries::approximate_zero(F2, 5)), error);

  auto inv = invert(t + t * t, 10);
  CHECK(inv.v0() == -1);
  CHECK(inv.absolute_precision() == 9);
  for (std::int64_t e = -1; e < 9; ++e) CHECK(inv.coefficient(e) == 1);
}

TEST_CASE("precision propagation") {
  auto F3 = make_field(3, 1);
  auto a = LaurentSeries::from_coefficients(F3, 0, {1, 2, 0, 1, 1}, 5);
  auto b = LaurentSeries::from_coefficients(F3, 0, {2, 1, 1}, 3);
  auto c = a * b;
  CHECK(c.absolute_precision() == 3);
  CHECK(c.v0() == 0);
  auto s = a + b;
  CHECK(s.absolute_precision() == 3);
}

TEST_CASE("valuations and the lower-bound signal") {
  auto F2 = make_field(2, 1);
  CHECK((mono(F2, 1, 3) + mono(F2, 1, 5)).v0() == 3);
  CHECK((mono(F2, 1, -2) + mono(F2, 1, 0)).v0() == -2);
  auto z = LaurentSeries::approximate_zero(F2, 7);
  CHECK(z.is_zero());
  CHECK(!z.is_exact_zero());
  CHECK(z.valuation_or_bound() == 7);
  auto x = mono(F2, 1, 2) + LaurentSeries::approximate_zero(F2, 5);
  CHECK(approx_equal(x - mono(F2, 1, 2), LaurentSeries::approximate_zero(F2, 5)));
}

TEST_CASE("random products against naive convolution") {
  testing::Rng rng(0x5eed01);
  for (auto [p, k] : std::vector<std::pair<std::uint32_t, int>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
    auto F = make_field(p, k);
    for (int it = 0; it < 200; ++it) {
      const bool exact = it % 3 == 0;
      auto a = testing::random_series(rng, F, -3, 4, 12, exact);
      auto b = testing::random_series(rng, F, -3, 4, 12, exact);
      auto c = a * b;
      const auto bound = std::min({c.absolute_precision(), a.v0() + b.absolute_precision(), b.v0() + a.absolute_precision()});
      if (!exact) CHECK(c.absolute_precision() == bound);
      CHECK(terms(c, bound) == naive_product(*F, a, b, bound));

      auto ia = invert(a, 20);
      auto one = a * ia;
      CHECK(approx_equal(one, LaurentSeries::constant(F, 1)));
      CHECK(terms(frobenius(a + b), 1000) == terms(frobenius(a) + frobenius(b), 1000));
    }
  }
}

TEST_CASE("substitution t -> rho") {
  testing::Rng rng(77);
  auto F2 = make_field(2, 2);
  for (int it = 0; it < 100; ++it) {
    auto a = testing::random_series(rng, F2, -2, 3, 6, true);
    auto b = testing::random_series(rng, F2, -2, 3, 6, true);
    auto rho = testing::random_series(rng, F2, 1, 2, 4, true);
    // composition is a ring map
    CHECK(approx_equal(compose(a * b, rho, 40), compose(a, rho, 40) * compose(b, rho, 40)));
    CHECK(approx_equal(compose(a + b, rho, 40), compose(a, rho, 40) + compose(b, rho, 40)));
  }
  auto t = mono(F2, 1, 1);
  CHECK_THROWS_AS(compose(t, LaurentSeries::constant(F2, 1), 10), error);
}

TEST_CASE("rendering") {
  auto F2 = make_field(2, 1);
  CHECK((mono(F2, 1, 1) + mono(F2, 1, 3)).to_string() == "t + t^3");
  CHECK(LaurentSeries::from_coefficients(F2, 0, {1}, 4).to_string() == "1 + O(t^4)");
  CHECK(LaurentSeries::zero(F2).to_string() == "0");
}
