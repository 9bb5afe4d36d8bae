#pragma once

// Degree certificates for the monodromy of the etale torsion: group orders,
// matrix-group closures and the lcm criterion.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "drinfeld/error.hpp"
#include "drinfeld/finite_field.hpp"
#include "drinfeld/formal_module.hpp"
#include "drinfeld/local_tower.hpp"
#include "drinfeld/torsion_level.hpp"

namespace drinfeld {

/// k x k matrix over o/(pi^m), row-major.
class MatrixModM {
 public:
  MatrixModM(Field fq, int k, int m) : f_(std::move(fq)), k_(k), m_(m), e_(static_cast<std::size_t>(k) * k, OPolynomial::zero(f_, m)) {}

  static MatrixModM identity(Field fq, int k, int m) {
    MatrixModM r(std::move(fq), k, m);
    for (int i = 0; i < k; ++i) r.at(i, i) = OPolynomial::one(r.f_, m);
    return r;
  }

  /// Level-1 matrix from integer entries reduced into F_q.
  static MatrixModM from_ints(Field fq, const std::vector<std::vector<long long>>& rows) {
    const int k = static_cast<int>(rows.size());
    MatrixModM r(fq, k, 1);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) r.at(i, j) = OPolynomial(fq, {fq->from_int(rows[i].at(j))});
    return r;
  }

  const Field& field() const noexcept { return f_; }
  int size() const noexcept { return k_; }
  int level() const noexcept { return m_; }
  OPolynomial& at(int i, int j) { return e_[static_cast<std::size_t>(i) * k_ + j]; }
  const OPolynomial& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * k_ + j]; }

  friend bool operator==(const MatrixModM& a, const MatrixModM& b) { return a.e_ == b.e_; }

  friend MatrixModM operator*(const MatrixModM& a, const MatrixModM& b) {
    if (a.k_ != b.k_ || a.m_ != b.m_) throw error(errc::invalid_argument, "matrix shapes differ");
    MatrixModM r(a.f_, a.k_, a.m_);
    for (int i = 0; i < a.k_; ++i)
      for (int l = 0; l < a.k_; ++l) {
        if (a.at(i, l).is_zero()) continue;
        for (int j = 0; j < a.k_; ++j) r.at(i, j) = r.at(i, j) + a.at(i, l) * b.at(l, j);
      }
    return r;
  }

  /// Invertible iff the reduction mod pi is invertible over F_q.
  bool invertible() const {
    const FiniteField& F = *f_;
    std::vector<std::vector<std::uint32_t>> a(k_, std::vector<std::uint32_t>(k_));
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j) a[i][j] = at(i, j)[0];
    for (int c = 0; c < k_; ++c) {
      int piv = -1;
      for (int r = c; r < k_; ++r)
        if (a[r][c]) piv = r;
      if (piv < 0) return false;
      std::swap(a[c], a[piv]);
      const auto inv = F.inv(a[c][c]);
      for (int r = c + 1; r < k_; ++r) {
        const auto f = F.mul(a[r][c], inv);
        for (int j = c; j < k_; ++j) a[r][j] = F.sub(a[r][j], F.mul(f, a[c][j]));
      }
    }
    return true;
  }

  /// Flat code vector; equal matrices have equal keys.
  std::vector<std::uint32_t> key() const {
    std::vector<std::uint32_t> out;
    out.reserve(e_.size() * m_);
    for (auto& x : e_)
      for (auto c : x.coefficients()) out.push_back(c);
    return out;
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < k_; ++i) {
      s += i ? ", [" : "[";
      for (int j = 0; j < k_; ++j) s += (j ? ", " : "") + at(i, j).to_string();
      s += "]";
    }
    return s + "]";
  }

 private:
  Field f_;
  int k_, m_;
  std::vector<OPolynomial> e_;
};

namespace detail {
struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : v) h = (h ^ x) * 1099511628211ULL;
    return h;
  }
};
}  // namespace detail

/// |GL_k(o/(pi^m))| = q^{(m-1)k^2} prod_{i<k} (q^k - q^i).
inline std::uint64_t gl_order(int k, int m, std::uint64_t q) {
  if (k < 1 || m < 1) throw error(errc::invalid_argument, "gl_order needs k >= 1 and m >= 1");
  unsigned __int128 r = checked_pow(q, static_cast<std::uint64_t>(m - 1) * k * k);
  const std::uint64_t qk = checked_pow(q, k);
  for (int i = 0; i < k; ++i) {
    r *= qk - checked_pow(q, i);
    if (r > (static_cast<unsigned __int128>(1) << 63)) throw error(errc::overflow, "group order exceeds 2^63");
  }
  return static_cast<std::uint64_t>(r);
}

/// Order of the group generated by invertible matrices, by breadth-first closure.
inline std::uint64_t closure_order(const std::vector<MatrixModM>& gens, std::uint64_t cap = 1'000'000) {
  if (gens.empty()) return 1;
  for (auto& g : gens) {
    if (g.size() != gens[0].size() || g.level() != gens[0].level() || !same_field(g.field(), gens[0].field()))
      throw error(errc::invalid_argument, "generators of different shapes");
    if (!g.invertible()) throw error(errc::invalid_argument, "generator is not invertible");
  }
  std::unordered_set<std::vector<std::uint32_t>, detail::KeyHash> seen;
  std::deque<MatrixModM> queue;
  auto id = MatrixModM::identity(gens[0].field(), gens[0].size(), gens[0].level());
  seen.insert(id.key());
  queue.push_back(id);
  while (!queue.empty()) {
    auto x = std::move(queue.front());
    queue.pop_front();
    for (auto& g : gens) {
      auto y = x * g;
      if (seen.insert(y.key()).second) {
        if (seen.size() > cap) throw error(errc::closure_cap_exceeded, "closure exceeds " + std::to_string(cap) + " elements");
        queue.push_back(std::move(y));
      }
    }
  }
  return seen.size();
}

/// Every invertible k x k matrix over o/(pi^m), in lexicographic order of entries.
inline std::vector<MatrixModM> enumerate_gl(const Field& fq, int k, int m, std::uint64_t cap = 1'000'000) {
  const auto elems = all_o_elements(fq, m);
  const std::uint64_t cells = static_cast<std::uint64_t>(k) * k;
  const std::uint64_t total = checked_pow(elems.size(), cells);
  if (total > cap) throw error(errc::cap_exceeded, "matrix space too large to enumerate");
  std::vector<MatrixModM> out;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    MatrixModM x(fq, k, m);
    std::uint64_t r = idx;
    for (int c = static_cast<int>(cells) - 1; c >= 0; --c) {
      x.at(c / k, c % k) = elems[r % elems.size()];
      r /= elems.size();
    }
    if (x.invertible()) out.push_back(std::move(x));
  }
  return out;
}

/**
 * True iff some proper subgroup of GL_k(o/(pi^m)) has order divisible by d,
 * searched over subgroups generated by at most three elements.
 */
inline bool subgroup_cover_check(int k, int m, std::uint64_t q, std::uint64_t d, std::uint64_t cap = 10'000) {
  const std::uint64_t G = gl_order(k, m, q);
  if (d == 0) throw error(errc::invalid_argument, "d must be positive");
  if (d == 1) return G > 1;
  if (G % d != 0 || d > G / 2) return false;
  if (G > cap) throw error(errc::cap_exceeded, "group order " + std::to_string(G) + " exceeds the enumeration cap");

  auto [p, r] = prime_power(q);
  const auto fq = make_field(p, r, {});
  const auto elems = enumerate_gl(fq, k, m);
  const std::size_t N = elems.size();
  std::unordered_map<std::vector<std::uint32_t>, std::size_t, detail::KeyHash> index;
  for (std::size_t i = 0; i < N; ++i) index.emplace(elems[i].key(), i);
  auto mul = [&](std::size_t a, std::size_t b) { return index.at((elems[a] * elems[b]).key()); };

  using Bits = std::vector<bool>;
  auto close = [&](const std::vector<std::size_t>& gens) {
    Bits in(N, false);
    std::vector<std::size_t> list;
    const auto id = index.at(MatrixModM::identity(fq, k, m).key());
    in[id] = true;
    list.push_back(id);
    for (std::size_t pos = 0; pos < list.size(); ++pos)
      for (auto g : gens) {
        auto y = mul(list[pos], g);
        if (!in[y]) in[y] = true, list.push_back(y);
      }
    return std::pair{in, list.size()};
  };

  std::set<Bits> visited;
  std::vector<std::pair<std::vector<std::size_t>, std::size_t>> frontier;
  for (std::size_t g = 0; g < N; ++g) {
    auto [bits, order] = close({g});
    if (!visited.insert(bits).second) continue;
    if (order < G && order % d == 0) return true;
    if (order < G) frontier.push_back({{g}, order});
  }
  for (int depth = 2; depth <= 3; ++depth) {
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> next;
    for (auto& [gens, order] : frontier) {
      auto [base_bits, base_order] = close(gens);
      for (std::size_t g = 0; g < N; ++g) {
        if (base_bits[g]) continue;
        auto more = gens;
        more.push_back(g);
        auto [bits, ord] = close(more);
        if (!visited.insert(bits).second) continue;
        if (ord < G && ord % d == 0) return true;
        if (ord < G) next.push_back({more, ord});
      }
    }
    frontier = std::move(next);
  }
  return false;
}

/// Multiplicative order of an invertible matrix.
inline std::uint64_t matrix_order(const MatrixModM& a, std::uint64_t cap = 1'000'000) {
  auto id = MatrixModM::identity(a.field(), a.size(), a.level());
  auto x = a;
  for (std::uint64_t n = 1; n <= cap; ++n) {
    if (x == id) return n;
    x = x * a;
  }
  throw error(errc::closure_cap_exceeded, "matrix order exceeds the cap");
}

/**
 * Action of pi -> zeta pi on the torsion basis when the tower is a single
 * tame radical step over t.  Column j holds the coordinates of sigma(b_j).
 */
inline MatrixModM tame_monodromy_matrix(const TorsionModule& T) {
  const auto& field = T.splitting().field;
  const TowerStep* ram = nullptr;
  for (auto& s : field.steps()) {
    if (s.kind != TowerStep::Kind::ramified) continue;
    if (ram) throw error(errc::not_single_tame_step, "tower has more than one ramified step");
    ram = &s;
  }
  if (!ram) throw error(errc::not_single_tame_step, "tower is unramified");
  if (!ram->tame) throw error(errc::not_single_tame_step, "ramified step is wild");
  const auto& tmap = field.base_uniformizer();
  if (!tmap.is_exact_monomial()) throw error(errc::not_single_tame_step, "uniformizer is not a radical of t");
  const std::int64_t e = ram->degree;
  const auto& amb = T.ambient();
  const FiniteField& F = *amb;
  if ((F.size() - 1) % e != 0) throw error(errc::not_single_tame_step, "residue field lacks e-th roots of unity");
  const auto zeta = F.pow(F.primitive_element(), (F.size() - 1) / e);

  auto sigma = [&](const LaurentSeries& x) {
    if (x.is_zero()) return x;
    std::vector<std::uint32_t> c = x.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::int64_t ex = x.v0() + static_cast<std::int64_t>(i);
      const std::int64_t r = ((ex % e) + e) % e;
      c[i] = F.mul(c[i], F.pow(zeta, static_cast<std::uint64_t>(r)));
    }
    return LaurentSeries::from_coefficients(amb, x.v0(), std::move(c), x.absolute_precision());
  };
  MatrixModM M(T.scalars(), T.rank(), T.level());
  for (int j = 0; j < T.rank(); ++j) {
    auto col = T.express(sigma(T.basis()[j]));
    for (int i = 0; i < T.rank(); ++i) M.at(i, j) = col[i];
  }
  return M;
}

struct SpecializationRecord {
  std::string assignment;
  std::optional<std::int64_t> geometric_degree;
  std::vector<SegmentRecord> tower;
  std::string tower_description;
  std::vector<std::string> roots;  // filled on request
  std::int64_t precision = 0;
  std::string error;
};

struct Certificate {
  std::uint64_t q = 0;
  int n = 0, h = 0, m = 0;
  std::vector<SpecializationRecord> specializations;
  std::uint64_t group_order = 0;
  std::uint64_t lcm = 0;
  std::string verdict;  // surjective | inconclusive | error
  std::int64_t precision = 0;
  std::string note;
};

struct CertifyOptions {
  std::int64_t precision = kDefaultPrecision;
  std::int64_t max_precision = kMaxPrecision;
  std::int64_t margin = 8;
  std::uint64_t cover_cap = 10'000;
  bool emit_roots = false;
};

/// A specialization u_i -> series, with the text it was parsed from.
struct Specialization {
  std::string text;
  std::map<int, LaurentSeries> values;
};

inline std::string describe_assignment(const std::map<int, LaurentSeries>& values) {
  std::string s;
  for (auto& [i, v] : values) s += (s.empty() ? "" : ",") + ("u" + std::to_string(i)) + "=" + v.to_string();
  return s;
}

/**
 * Splits g^{o m} at every specialization, combines the geometric degrees by
 * lcm and compares with |GL_{n-h}(o/(pi^m))|.  Relies on each degree dividing
 * the order of the monodromy image.
 */
inline Certificate certify(std::uint64_t q, int n, int h, int m, const std::vector<Specialization>& specs,
                           const CertifyOptions& opt = {}) {
  if (h < 0 || h >= n) throw error(errc::invalid_argument, "need 0 <= h < n");
  if (m < 1) throw error(errc::invalid_argument, "level must be positive");
  Certificate cert;
  cert.q = q, cert.n = n, cert.h = h, cert.m = m;
  cert.precision = opt.precision;
  cert.group_order = gl_order(n - h, m, q);
  const auto X = build_model(q, n);
  const auto S = reduce_to_stratum(X, h);
  std::uint64_t L = 1;
  bool any = false;
  for (auto& sp : specs) {
    SpecializationRecord rec;
    rec.assignment = sp.text.empty() ? describe_assignment(sp.values) : sp.text;
    try {
      const auto Ss = specialize(S, sp.values);
      const auto P = to_series_poly(Ss.etale_division_polynomial(m));
      auto data = with_precision_retry(
          [&](std::int64_t prec) {
            SplitOptions so;
            so.precision = prec;
            so.margin = opt.margin;
            return splitting_tower(P, LocalField::base(Ss.scalars), so);
          },
          opt.precision, opt.max_precision);
      rec.geometric_degree = data.geometric_degree;
      rec.tower = data.diagnostics;
      rec.tower_description = data.field.describe();
      rec.precision = data.precision;
      if (opt.emit_roots)
        for (auto& r : data.roots) rec.roots.push_back(r.to_string("z"));
      const auto d = static_cast<std::uint64_t>(data.geometric_degree);
      if (cert.group_order % d != 0)
        throw error(errc::internal_soundness, "degree " + std::to_string(d) + " does not divide the group order");
      L = std::lcm(L, d);
      any = true;
    } catch (const error& e) {
      if (e.kind() == errc::internal_soundness) throw;
      rec.error = e.what();
    }
    cert.specializations.push_back(std::move(rec));
  }
  cert.lcm = any ? L : 0;
  if (!any) {
    cert.verdict = "error";
    cert.note = specs.empty() ? "no specializations" : "every specialization failed";
    return cert;
  }
  if (L == cert.group_order) {
    cert.verdict = "surjective";
    return cert;
  }
  try {
    const bool covered = subgroup_cover_check(n - h, m, q, L, opt.cover_cap);
    cert.verdict = covered ? "inconclusive" : "surjective";
    if (covered) cert.note = "lcm " + std::to_string(L) + " is also met by a proper subgroup";
  } catch (const error& e) {
    if (e.kind() != errc::cap_exceeded) throw;
    cert.verdict = "inconclusive";
    cert.note = "subgroup search skipped: group too large";
  }
  return cert;
}

}  // namespace drinfeld
