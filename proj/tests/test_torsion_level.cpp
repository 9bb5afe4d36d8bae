#include <catch_amalgamated.hpp>

#include <set>

#include "drinfeld/torsion_level.hpp"

using namespace drinfeld;

namespace {

LaurentSeries mono(const Field& F, std::uint32_t c, std::int64_t e) { return LaurentSeries::monomial(F, c, e); }

StratumModule<LaurentSeries> spec(std::uint64_t q, int n, int h, const std::map<int, std::pair<int, int>>& u) {
  auto S = reduce_to_stratum(build_model(q, n), h);
  std::map<int, LaurentSeries> v;
  for (auto& [i, ce] : u) v.emplace(i, mono(S.scalars, S.scalars->from_int(ce.first), ce.second));
  return specialize(S, v);
}

Coordinates add(const Coordinates& a, const Coordinates& b) {
  Coordinates r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] + b[i]);
  return r;
}

// Labels form a group isomorphic to (o/pi^m)^k and phi respects + and pi.
void check_module_laws(const TorsionModule& T) {
  const auto labels = all_coordinates(T.scalars(), T.level(), T.rank());
  std::set<Coordinates> seen(T.root_coordinates().begin(), T.root_coordinates().end());
  CHECK(seen.size() == T.roots().size());
  CHECK(seen.size() == labels.size());
  for (std::size_t r = 0; r < T.roots().size(); ++r) CHECK(T.same(T.element(T.root_coordinates()[r]), T.roots()[r]));
  for (auto& a : labels) {
    Coordinates pa;
    for (auto& x : a) pa.push_back(x.shifted());
    CHECK(T.same(T.apply_g(T.element(a)), T.element(pa)));
    for (auto& b : labels) CHECK(T.same(T.element(a) + T.element(b), T.element(add(a, b))));
  }
  for (int i = 0; i < T.rank(); ++i) CHECK(T.express(T.basis()[i]) == T.unit_vector(i));
}

}  // namespace

TEST_CASE("rank 2, level 1, h = 0") {
  auto S = spec(2, 2, 0, {{0, {1, 1}}, {1, {1, 1}}});
  auto T = torsion_module(S, 1);
  CHECK(T.rank() == 2);
  CHECK(T.roots().size() == 4);
  CHECK(T.splitting().geometric_degree == 3);
  check_module_laws(T);
  auto e1 = T.unit_vector(0), e2 = T.unit_vector(1);
  CHECK(T.express(T.basis()[0] + T.basis()[1]) == add(e1, e2));
  CHECK(verify_nonvanishing(T));
  auto rep = verify_product_identity(T, 2);
  CHECK(rep.pass);
}

TEST_CASE("rank 1, q = 3, h = 1") {
  auto S = spec(3, 2, 1, {{1, {1, 1}}});
  auto T = torsion_module(S, 1);
  CHECK(T.roots().size() == 3);
  check_module_laws(T);
  const auto t = T.splitting().field.base_uniformizer();
  for (auto& r : T.roots()) {
    if (r.is_exact_zero()) continue;
    CHECK(approx_equal(r * r + t, LaurentSeries::approximate_zero(T.ambient(), T.precision())));
    CHECK(r.v0() * 2 == T.splitting().field.ramification_index());
  }
  CHECK(verify_nonvanishing(T));
}

TEST_CASE("rank 1, level 2, wild") {
  auto S = spec(2, 2, 1, {{1, {1, 1}}});
  auto T = torsion_module(S, 2);
  CHECK(T.roots().size() == 4);
  check_module_laws(T);
  const auto& b = T.basis()[0];
  Coordinates pi_e1{OPolynomial(T.scalars(), {0, 1})};
  CHECK(T.express(T.apply_g(b)) == pi_e1);
  // the pi-torsion is {0, t}
  const auto t = T.splitting().field.base_uniformizer();
  std::size_t hits = 0;
  for (std::size_t r = 0; r < T.roots().size(); ++r)
    if (T.root_coordinates()[r][0][0] == 0) {
      ++hits;
      CHECK((T.roots()[r].is_exact_zero() || T.same(T.roots()[r], t)));
    }
  CHECK(hits == 2);
  CHECK(verify_nonvanishing(T));
}

TEST_CASE("root counts with connected multiplicity") {
  for (auto [q, n, h, m] : std::vector<std::tuple<int, int, int, int>>{{2, 2, 1, 1}, {2, 3, 1, 1}, {3, 2, 1, 1}, {2, 2, 1, 2}}) {
    std::map<int, std::pair<int, int>> u;
    for (int i = h; i < n; ++i) u[i] = {1, 1};
    auto S = spec(q, n, h, u);
    auto T = torsion_module(S, m);
    CHECK(T.roots().size() == checked_pow(q, static_cast<std::uint64_t>(m) * (n - h)));
    CHECK(S.inseparable_degree(m) == checked_pow(q, static_cast<std::uint64_t>(m) * h));
  }
}

TEST_CASE("product identity rejects a wrong root set") {
  auto S = spec(2, 2, 0, {{0, {1, 1}}, {1, {1, 1}}});
  auto T = torsion_module(S, 1);
  std::vector<LaurentSeries> values;
  for (auto& a : all_coordinates(T.scalars(), 1, 2)) values.push_back(T.element(a));
  auto target = T.etale_polynomial().dense();
  CHECK(check_product_identity(values, target, T.precision()).pass);
  auto dropped = values;
  dropped.pop_back();
  CHECK_THROWS_AS(check_product_identity(dropped, target, T.precision()), error);
  auto doubled = values;
  doubled.back() = doubled[1];
  try {
    check_product_identity(doubled, target, T.precision());
    FAIL("accepted a repeated root");
  } catch (const error& e) {
    CHECK(e.kind() == errc::identity_failed);
  }
}

TEST_CASE("reduction identity") {
  auto S0 = spec(2, 2, 0, {{0, {1, 1}}, {1, {1, 1}}});
  auto r0 = verify_reduction_identity(S0, 1);
  CHECK(r0.pass);
  for (std::size_t i = 0; i < r0.epsilon.size(); ++i)
    CHECK(approx_equal(r0.epsilon[i], LaurentSeries::constant(S0.scalars, i == 0 ? 1 : 0)));

  auto S2 = spec(2, 2, 1, {{1, {1, 1}}});
  auto r2 = verify_reduction_identity(S2, 1);
  CHECK(r2.pass);
  CHECK(r2.epsilon0.to_string() == "t");

  auto S3 = spec(3, 2, 1, {{1, {1, 1}}});
  auto r3 = verify_reduction_identity(S3, 1);
  CHECK(r3.pass);
  CHECK(r3.multiset);
  CHECK(r3.epsilon0.to_string() == "t^2");
  CHECK(approx_equal(r3.epsilon0, r3.expected0));
}

TEST_CASE("identification margin") {
  auto S = spec(3, 2, 1, {{1, {1, 1}}});
  auto T = torsion_module(S, 1);
  const auto& r = T.roots()[1];
  const auto near = r + mono(T.ambient(), 1, T.splitting().max_root_gap + 1);
  CHECK_THROWS_AS(T.same(r, near), error);
  const auto far = r + mono(T.ambient(), 1, T.threshold() + 1);
  CHECK(T.same(r, far));
  CHECK_FALSE(T.same(T.roots()[1], T.roots()[2]));
  CHECK_THROWS_AS(T.express(mono(T.ambient(), 1, 0)), error);
}
