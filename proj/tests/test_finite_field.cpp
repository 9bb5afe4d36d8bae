#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "drinfeld/finite_field.hpp"

using namespace drinfeld;

namespace {

// Schoolbook product of digit vectors reduced by the monic defining polynomial.
std::vector<std::uint32_t> naive_mul(const FiniteField& F, std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
  const std::uint32_t p = F.characteristic();
  const int k = F.degree();
  const auto& m = F.defining_polynomial();
  std::vector<std::uint32_t> r(2 * k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  for (int d = 2 * k - 1; d >= k; --d) {
    const auto c = r[d];
    if (!c) continue;
    for (int i = 0; i <= k; ++i) r[d - k + i] = (r[d - k + i] + p * p - c * m[i] % p) % p;
  }
  r.resize(k);
  return r;
}

std::uint64_t mult_order(const FiniteField& F, std::uint32_t x) {
  std::uint64_t n = 1;
  for (auto y = x; y != 1; y = F.mul(y, x)) ++n;
  return n;
}

}  // namespace

TEST_CASE("least irreducible defining polynomials") {
  CHECK(make_field(2, 2)->defining_polynomial() == std::vector<std::uint32_t>{1, 1, 1});
  CHECK(make_field(3, 1)->defining_polynomial() == std::vector<std::uint32_t>{0, 1});
  CHECK(make_field(2, 4)->defining_polynomial() == std::vector<std::uint32_t>{1, 1, 0, 0, 1});
}

TEST_CASE("least quartic over F_2 by exhaustive search") {
  // Brute force: the first monic quartic, ordered by coefficient tuple, with no factor of degree 1 or 2.
  auto F2 = make_field(2, 1);
  std::vector<std::uint32_t> found;
  std::vector<std::vector<std::uint32_t>> candidates;
  for (std::uint32_t c = 0; c < 16; ++c) candidates.push_back({c & 1, c >> 1 & 1, c >> 2 & 1, c >> 3 & 1, 1});
  std::sort(candidates.begin(), candidates.end(), [](auto& a, auto& b) {
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  auto has_small_factor = [&](const std::vector<std::uint32_t>& f) {
    for (std::uint32_t g = 2; g < 8; ++g) {
      ffpoly::poly d{g & 1, g >> 1 & 1, g >> 2 & 1};
      ffpoly::trim(d);
      if (ffpoly::mod(*F2, f, d).empty()) return true;
    }
    return false;
  };
  for (auto& f : candidates)
    if (!has_small_factor(f)) {
      found = f;
      break;
    }
  CHECK(found == make_field(2, 4)->defining_polynomial());
}

TEST_CASE("table arithmetic agrees with schoolbook arithmetic") {
  for (auto [p, k] : std::vector<std::pair<std::uint32_t, int>>{{2, 1}, {2, 3}, {3, 2}, {5, 1}, {2, 4}}) {
    auto F = make_field(p, k);
    for (std::uint32_t a = 0; a < F->size(); ++a)
      for (std::uint32_t b = 0; b < F->size(); ++b) {
        CHECK(F->digits(F->mul(a, b)) == naive_mul(*F, F->digits(a), F->digits(b)));
        auto da = F->digits(a), db = F->digits(b);
        for (int i = 0; i < k; ++i) da[i] = (da[i] + db[i]) % p;
        CHECK(F->digits(F->add(a, b)) == da);
      }
  }
}

TEST_CASE("enumeration, inverses and a cyclic unit group") {
  for (auto [p, k] : std::vector<std::pair<std::uint32_t, int>>{{2, 2}, {3, 2}, {2, 4}, {5, 1}, {3, 3}}) {
    auto F = make_field(p, k);
    std::set<std::string> names;
    for (std::uint32_t a = 0; a < F->size(); ++a) names.insert(F->to_string(a));
    CHECK(names.size() == F->size());
    for (std::uint32_t a = 1; a < F->size(); ++a) CHECK(F->mul(a, F->inv(a)) == 1);
    CHECK(mult_order(*F, F->primitive_element()) == F->size() - 1);
    for (std::uint32_t a = 0; a < F->size(); ++a)
      for (std::uint32_t b = 0; b < F->size(); ++b)
        CHECK(F->frobenius(F->add(a, b)) == F->add(F->frobenius(a), F->frobenius(b)));
  }
  CHECK_THROWS_AS(make_field(4, 1), error);
  CHECK_THROWS_AS(make_field(2, 40), error);
}

TEST_CASE("embedding F_4 into F_16") {
  auto F4 = make_field(2, 2), F16 = make_field(2, 4);
  const auto w = embed(FFElement(F4, F4->generator()), F16);
  // least root of x^2 + x + 1 in F_16 by coefficient tuple
  std::vector<std::uint32_t> roots;
  for (std::uint32_t x = 0; x < 16; ++x)
    if (F16->add(F16->add(F16->mul(x, x), x), 1) == 0) roots.push_back(x);
  REQUIRE(roots.size() == 2);
  auto least = *std::min_element(roots.begin(), roots.end(), [&](auto a, auto b) {
    auto da = F16->digits(a), db = F16->digits(b);
    return std::lexicographical_compare(da.rbegin(), da.rend(), db.rbegin(), db.rend());
  });
  CHECK(w.code() == least);
  CHECK(embed(FFElement(F4, 1), F16).code() == 1);
  const FFElement x(F4, 3);
  CHECK(embed(x, F4) == x);
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = 0; b < 4; ++b) {
      FFElement A(F4, a), B(F4, b);
      CHECK(embed(A * B, F16) == embed(A, F16) * embed(B, F16));
      CHECK(embed(A + B, F16) == embed(A, F16) + embed(B, F16));
    }
}

TEST_CASE("roots by exhaustive evaluation") {
  auto F2 = make_field(2, 1), F4 = make_field(2, 2), F9 = make_field(3, 2);
  auto brute = [](const Field& F, const ffpoly::poly& f) {
    std::vector<std::uint32_t> r;
    for (std::uint32_t x = 0; x < F->size(); ++x)
      if (ffpoly::eval(*F, f, x) == 0) r.push_back(x);
    return r;
  };
  auto roots_of = [](const Field& F, const ffpoly::poly& f) {
    std::vector<std::uint32_t> r;
    for (auto& x : find_roots(F, f)) r.push_back(x.root);
    std::sort(r.begin(), r.end());
    return r;
  };
  CHECK(roots_of(F2, {0, 1, 1}) == std::vector<std::uint32_t>{0, 1});
  CHECK(roots_of(F2, {1, 1, 1}).empty());
  CHECK(roots_of(F4, {1, 0, 0, 1}) == brute(F4, {1, 0, 0, 1}));
  CHECK(roots_of(F4, {1, 0, 0, 1}).size() == 3);
  for (std::uint32_t c = 0; c < 81; ++c) {
    ffpoly::poly f{c % 3, c / 3 % 3, c / 9 % 3, c / 27 % 3, 1};
    CHECK(roots_of(F9, f) == brute(F9, f));
  }
  // multiplicity of 1 in (x + 1)^2 x over F_2
  auto rs = find_roots(F2, {0, 1, 0, 1});
  for (auto& r : rs) CHECK(r.multiplicity == (r.root == 1 ? 2 : 1));
}

TEST_CASE("splitting degree over a finite field") {
  auto F2 = make_field(2, 1);
  CHECK(splitting_degree(F2, {1, 1, 1}) == 2);
  CHECK(splitting_degree(F2, {1, 1, 0, 1}) == 3);
  CHECK(splitting_degree(F2, ffpoly::mul(*F2, {1, 1, 1}, {1, 1, 0, 1})) == 6);
}
