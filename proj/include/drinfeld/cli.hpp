#pragma once

// Job model behind the command-line driver: specialization grammar, manifest
// validation, report assembly and exit codes.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "drinfeld/error.hpp"
#include "drinfeld/formal_module.hpp"
#include "drinfeld/local_tower.hpp"
#include "drinfeld/monodromy.hpp"
#include "drinfeld/torsion_level.hpp"

namespace drinfeld::cli {

using json = nlohmann::ordered_json;

enum exit_code : int { ok = 0, failure = 1, inconclusive = 2, usage = 64 };

/// Desk-scale caps on job parameters.
constexpr std::uint64_t kMaxQ = 5;
constexpr int kMaxN = 4;
constexpr int kMaxM = 3;
constexpr std::int64_t kMinPrecision = 8;

/**
 * Parses `u<i>=<terms>[,u<j>=<terms>...]` where a term is `c*t^e`, `c*t`,
 * `t^e` or `t` with c an integer and e >= 1, joined by `+` or `-`.
 */
inline Specialization parse_specialization(const std::string& text, const Field& fq, int n) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  auto fail = [&](const std::string& why) -> Specialization {
    throw error(errc::parse_error, "bad specialization '" + text + "': " + why);
  };
  if (s.empty()) return fail("empty");
  Specialization out;
  out.text = text;
  std::size_t pos = 0;
  auto read_int = [&](long long& v) {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) return false;
    if (pos - start > 12) fail("integer too long");
    v = std::stoll(s.substr(start, pos - start));
    return true;
  };
  while (pos < s.size()) {
    if (s[pos] != 'u') return fail("expected u<i> at offset " + std::to_string(pos));
    ++pos;
    long long idx = 0;
    if (!read_int(idx)) return fail("missing parameter index");
    if (idx >= n) return fail("u" + std::to_string(idx) + " exceeds n - 1 = " + std::to_string(n - 1));
    if (pos >= s.size() || s[pos] != '=') return fail("expected '='");
    ++pos;
    const FiniteField& F = *fq;
    std::map<std::int64_t, std::uint32_t> terms;
    bool first = true;
    while (pos < s.size() && s[pos] != ',') {
      int sign = 1;
      if (s[pos] == '+' || s[pos] == '-') {
        sign = s[pos] == '-' ? -1 : 1;
        ++pos;
      } else if (!first) {
        return fail("expected '+' or '-' between terms");
      }
      first = false;
      long long c = 1, e = 1;
      const bool has_c = read_int(c);
      if (has_c) {
        if (pos >= s.size() || s[pos] != '*') return fail("constant terms are not allowed");
        ++pos;
      }
      if (pos >= s.size() || s[pos] != 't') return fail("expected t");
      ++pos;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        if (!read_int(e)) return fail("missing exponent");
        if (e < 1) return fail("exponents must be at least 1");
      }
      const auto code = F.from_int(sign * c);
      auto& slot = terms.try_emplace(e, 0).first->second;
      slot = F.add(slot, code);
    }
    if (first) return fail("u" + std::to_string(idx) + " has no terms");
    if (pos < s.size()) ++pos;  // ','
    std::int64_t v0 = terms.begin()->first;
    std::vector<std::uint32_t> c(static_cast<std::size_t>(terms.rbegin()->first - v0 + 1), 0);
    for (auto& [e, x] : terms) c[static_cast<std::size_t>(e - v0)] = x;
    auto value = LaurentSeries::from_coefficients(fq, v0, std::move(c));
    if (!out.values.emplace(static_cast<int>(idx), value).second) return fail("u" + std::to_string(idx) + " given twice");
  }
  return out;
}

enum class JobKind { certify, identities, orders };

inline std::string to_string(JobKind k) {
  switch (k) {
    case JobKind::certify: return "certify";
    case JobKind::identities: return "identities";
    case JobKind::orders: return "orders";
  }
  return "?";
}

struct Job {
  JobKind kind = JobKind::certify;
  std::uint64_t q = 2;
  int n = 2, h = 0, m = 1;
  std::vector<std::string> specs;
  std::int64_t precision = kDefaultPrecision;
  std::vector<std::string> checks;  // identities only; empty = all applicable
  bool emit_roots = false;
  std::string output;  // report path, empty for none
  std::optional<json> expect;
};

/// Every problem with a job; empty when it can run.
inline std::vector<std::string> validate(const Job& job) {
  std::vector<std::string> errs;
  bool q_ok = false;
  try {
    auto [p, r] = prime_power(job.q);
    (void)p, (void)r;
    q_ok = job.q <= kMaxQ;
    if (!q_ok) errs.push_back("q = " + std::to_string(job.q) + " exceeds " + std::to_string(kMaxQ));
  } catch (const error&) {
    errs.push_back("q = " + std::to_string(job.q) + " is not a prime power");
  }
  if (job.n < 1 || job.n > kMaxN) errs.push_back("n must lie in [1, " + std::to_string(kMaxN) + "]");
  if (job.h < 0 || job.h >= job.n) errs.push_back("h must lie in [0, n - 1]");
  if (job.m < 1 || job.m > kMaxM) errs.push_back("m must lie in [1, " + std::to_string(kMaxM) + "]");
  if (job.precision < kMinPrecision || job.precision > kMaxPrecision)
    errs.push_back("precision must lie in [" + std::to_string(kMinPrecision) + ", " + std::to_string(kMaxPrecision) + "]");
  if (job.kind != JobKind::orders && job.specs.empty()) errs.push_back("at least one --spec is required");
  for (auto& c : job.checks) {
    if (c != "eq31" && c != "eq41" && c != "nonvanishing") errs.push_back("unknown check '" + c + "'");
    if (c == "eq31" && job.h != 0) errs.push_back("eq31 needs h = 0");
    if (c == "eq31" && job.m != 1) errs.push_back("eq31 needs m = 1");
    if (c == "eq41" && job.h == 0) errs.push_back("eq41 needs h >= 1");
  }
  if (job.kind != JobKind::identities && !job.checks.empty()) errs.push_back("--check applies to identities only");
  if (q_ok && job.n >= 1 && job.n <= kMaxN) {
    auto [p, r] = prime_power(job.q);
    auto fq = make_field(p, r, {});
    for (auto& s : job.specs) {
      try {
        auto sp = parse_specialization(s, fq, job.n);
        for (auto& [i, v] : sp.values)
          if (i < job.h && !v.is_exact_zero()) errs.push_back("'" + s + "': u" + std::to_string(i) + " must vanish on the stratum");
        auto it = sp.values.find(job.h);
        if (job.h < job.n && (it == sp.values.end() || it->second.is_exact_zero()))
          errs.push_back("'" + s + "': u" + std::to_string(job.h) + " must be nonzero");
      } catch (const error& e) {
        errs.push_back(e.what());
      }
    }
  }
  return errs;
}

struct JobResult {
  int exit = ok;
  json report;
  std::string text;
};

inline json params_json(const Job& j) {
  return json{{"q", j.q}, {"n", j.n}, {"h", j.h}, {"m", j.m}};
}

inline json certificate_json(const Certificate& c, bool emit_roots) {
  json specs = json::array();
  for (auto& s : c.specializations) {
    json tower = json::array();
    for (auto& seg : s.tower)
      tower.push_back({{"slope", seg.slope.to_string()}, {"length", seg.length}, {"kind", seg.kind}, {"action", seg.action}});
    json rec{{"assignment", s.assignment},
             {"geometric_degree", s.geometric_degree ? json(*s.geometric_degree) : json(nullptr)},
             {"tower", tower}};
    if (!s.tower_description.empty()) rec["field"] = s.tower_description;
    if (s.precision) rec["precision"] = s.precision;
    if (!s.error.empty()) rec["error"] = s.error;
    if (emit_roots) rec["roots"] = s.roots;
    specs.push_back(std::move(rec));
  }
  json out{{"params", {{"q", c.q}, {"n", c.n}, {"h", c.h}, {"m", c.m}}},
           {"specializations", specs},
           {"group_order", c.group_order},
           {"lcm", c.lcm},
           {"verdict", c.verdict},
           {"precision", c.precision},
           {"assumption", "specialization-divisibility"}};
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

inline std::vector<Specialization> parse_all(const Job& job, const Field& fq) {
  std::vector<Specialization> out;
  for (auto& s : job.specs) out.push_back(parse_specialization(s, fq, job.n));
  return out;
}

inline JobResult run_certify(const Job& job) {
  JobResult res;
  auto [p, r] = prime_power(job.q);
  auto fq = make_field(p, r, {});
  CertifyOptions opt;
  opt.precision = job.precision;
  opt.emit_roots = job.emit_roots;
  auto cert = certify(job.q, job.n, job.h, job.m, parse_all(job, fq), opt);
  res.report = certificate_json(cert, job.emit_roots);
  res.exit = cert.verdict == "surjective" ? ok : cert.verdict == "inconclusive" ? inconclusive : failure;
  std::ostringstream os;
  os << "certify q=" << job.q << " n=" << job.n << " h=" << job.h << " m=" << job.m << "\n";
  for (auto& s : cert.specializations) {
    os << "  " << s.assignment << ": ";
    if (s.geometric_degree) os << "degree " << *s.geometric_degree << ", " << s.tower_description << "\n";
    else os << "error: " << s.error << "\n";
  }
  os << "  |GL_" << (job.n - job.h) << "| = " << cert.group_order << ", lcm = " << cert.lcm << "\n";
  os << "verdict: " << cert.verdict;
  if (!cert.note.empty()) os << " (" << cert.note << ")";
  os << "\n";
  res.text = os.str();
  return res;
}

inline JobResult run_identities(const Job& job) {
  JobResult res;
  auto [p, r] = prime_power(job.q);
  auto fq = make_field(p, r, {});
  std::vector<std::string> checks = job.checks;
  if (checks.empty()) {
    if (job.h == 0 && job.m == 1) checks.push_back("eq31");
    if (job.h > 0) checks.push_back("eq41");
    checks.push_back("nonvanishing");
  }
  const auto X = build_model(job.q, job.n);
  const auto S = reduce_to_stratum(X, job.h);
  json results = json::array();
  std::ostringstream os;
  os << "identities q=" << job.q << " n=" << job.n << " h=" << job.h << " m=" << job.m << "\n";
  bool all = true;
  for (auto& sp : parse_all(job, fq)) {
    const auto Ss = specialize(S, sp.values);
    std::optional<TorsionModule> T;
    auto module = [&]() -> const TorsionModule& {
      if (!T) {
        T = with_precision_retry(
            [&](std::int64_t prec) {
              TorsionOptions o;
              o.precision = prec;
              return torsion_module(Ss, job.m, o);
            },
            job.precision, kMaxPrecision);
      }
      return *T;
    };
    for (auto& c : checks) {
      json rec{{"check", c}, {"assignment", sp.text}};
      bool pass = false;
      std::string detail;
      try {
        if (c == "eq31") {
          auto rep = verify_product_identity(module(), job.n);
          pass = rep.pass;
          detail = rep.detail;
          rec["epsilon"] = spoly::to_string(rep.epsilon, "T", "z");
        } else if (c == "eq41") {
          auto rep = with_precision_retry(
              [&](std::int64_t prec) {
                TorsionOptions o;
                o.precision = prec;
                return verify_reduction_identity(Ss, job.m, o);
              },
              job.precision, kMaxPrecision);
          pass = rep.pass;
          detail = rep.detail;
          rec["epsilon0"] = rep.epsilon0.to_string();
          rec["expected0"] = rep.expected0.to_string();
        } else {
          pass = verify_nonvanishing(module());
          detail = pass ? "no nonzero label vanishes" : "a nonzero label vanishes";
          rec["points"] = module().roots().size();
        }
      } catch (const error& e) {
        if (e.kind() != errc::identity_failed) throw;
        detail = e.what();
      }
      rec["pass"] = pass;
      rec["detail"] = detail;
      if (job.emit_roots && T) {
        json roots = json::array();
        for (std::size_t i = 0; i < T->roots().size(); ++i)
          roots.push_back({{"label", to_string(T->root_coordinates()[i])}, {"root", T->roots()[i].to_string("z")}});
        rec["roots"] = roots;
      }
      all = all && pass;
      os << "  " << c << " [" << sp.text << "]: " << (pass ? "pass" : "FAIL") << " (" << detail << ")\n";
      results.push_back(std::move(rec));
    }
  }
  res.report = json{{"params", params_json(job)}, {"checks", results}, {"pass", all}, {"precision", job.precision}};
  res.exit = all ? ok : inconclusive;
  res.text = os.str();
  return res;
}

inline JobResult run_orders(const Job& job) {
  JobResult res;
  const int k = job.n - job.h;
  const auto G = gl_order(k, job.m, job.q);
  json rep{{"params", params_json(job)}, {"group_order", G}};
  std::ostringstream os;
  os << "|GL_" << k << "(o/pi^" << job.m << ")| over q=" << job.q << ": " << G << "\n";
  auto [p, r] = prime_power(job.q);
  auto fq = make_field(p, r, {});
  try {
    auto all = enumerate_gl(fq, k, job.m, 100'000);
    rep["enumerated"] = all.size();
    rep["closure_order"] = closure_order(all);
    os << "  enumerated " << all.size() << "\n";
  } catch (const error& e) {
    if (e.kind() != errc::cap_exceeded) throw;
    rep["enumerated"] = nullptr;
  }
  res.report = std::move(rep);
  res.text = os.str();
  return res;
}

/// Runs a validated job; operational errors become exit 1 with an error report.
inline JobResult run_job(const Job& job) {
  try {
    switch (job.kind) {
      case JobKind::certify: return run_certify(job);
      case JobKind::identities: return run_identities(job);
      case JobKind::orders: return run_orders(job);
    }
  } catch (const error& e) {
    JobResult r;
    r.exit = failure;
    r.report = json{{"params", params_json(job)}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (job.kind == JobKind::certify) r.report["verdict"] = "error";
    r.text = std::string("error: ") + e.what() + "\n";
    return r;
  }
  return {};
}

/// Lines describing where the outcome departs from the expectation.
inline std::vector<std::string> compare_expectation(const json& expect, const JobResult& r) {
  std::vector<std::string> diff;
  auto show = [](const json& j) { return j.dump(); };
  auto get = [&](const std::string& key) -> json {
    if (key == "geometric_degrees") {
      json d = json::array();
      if (r.report.contains("specializations"))
        for (auto& s : r.report["specializations"]) d.push_back(s["geometric_degree"]);
      return d;
    }
    return r.report.contains(key) ? r.report[key] : json(nullptr);
  };
  if (expect.is_string()) {
    const std::string want = expect.get<std::string>();
    const json got = r.report.contains("verdict") ? r.report["verdict"]
                     : r.report.contains("pass") ? json(r.report["pass"].get<bool>() ? "pass" : "fail")
                                                 : json(nullptr);
    if (got != json(want)) diff.push_back("verdict: expected " + show(json(want)) + ", got " + show(got));
    return diff;
  }
  for (auto& [key, want] : expect.items()) {
    const json got = get(key);
    if (got != want) diff.push_back(key + ": expected " + show(want) + ", got " + show(got));
  }
  return diff;
}

namespace detail {
template <class T>
bool read_field(const json& j, const char* key, T& out, std::vector<std::string>& errs, const std::string& where) {
  if (!j.contains(key)) return false;
  try {
    out = j.at(key).get<T>();
    return true;
  } catch (const json::exception&) {
    errs.push_back(where + ": field '" + key + "' has the wrong type");
    return false;
  }
}
}  // namespace detail

/// Parses one manifest entry, appending every problem found to `errs`.
inline Job job_from_json(const json& j, std::vector<std::string>& errs, const std::string& where) {
  Job job;
  if (!j.is_object()) {
    errs.push_back(where + ": job must be an object");
    return job;
  }
  static const std::vector<std::string> known{"kind", "q",          "n",    "h",      "m",     "spec",
                                              "precision", "check", "emit_roots", "json", "expect"};
  for (auto& [key, v] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) errs.push_back(where + ": unknown field '" + key + "'");
  std::string kind = "certify";
  detail::read_field(j, "kind", kind, errs, where);
  if (kind == "certify") job.kind = JobKind::certify;
  else if (kind == "identities") job.kind = JobKind::identities;
  else if (kind == "orders") job.kind = JobKind::orders;
  else errs.push_back(where + ": unknown kind '" + kind + "'");
  detail::read_field(j, "q", job.q, errs, where);
  detail::read_field(j, "n", job.n, errs, where);
  detail::read_field(j, "h", job.h, errs, where);
  detail::read_field(j, "m", job.m, errs, where);
  detail::read_field(j, "precision", job.precision, errs, where);
  detail::read_field(j, "emit_roots", job.emit_roots, errs, where);
  detail::read_field(j, "json", job.output, errs, where);
  if (j.contains("spec")) {
    if (j["spec"].is_string()) job.specs.push_back(j["spec"].get<std::string>());
    else detail::read_field(j, "spec", job.specs, errs, where);
  }
  if (j.contains("check")) {
    if (j["check"].is_string()) job.checks.push_back(j["check"].get<std::string>());
    else detail::read_field(j, "check", job.checks, errs, where);
  }
  if (j.contains("expect")) {
    if (!j["expect"].is_string() && !j["expect"].is_object()) errs.push_back(where + ": 'expect' must be a string or object");
    else job.expect = j["expect"];
  }
  for (auto& e : validate(job)) errs.push_back(where + ": " + e);
  return job;
}

struct SuiteResult {
  int exit = ok;
  json report;
  std::string text;
  std::vector<std::string> validation_errors;
};

inline void write_report(const std::string& path, const json& report) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw error(errc::invalid_argument, "cannot write " + path);
  out << report.dump(2) << "\n";
}

/// Validates the whole manifest first, then runs the jobs in order.
inline SuiteResult run_suite(const json& manifest) {
  SuiteResult res;
  std::vector<Job> jobs;
  if (!manifest.is_object() || !manifest.contains("jobs") || !manifest["jobs"].is_array()) {
    res.validation_errors.push_back("manifest: expected an object with a 'jobs' array");
  } else {
    std::size_t i = 0;
    for (auto& j : manifest["jobs"]) jobs.push_back(job_from_json(j, res.validation_errors, "job " + std::to_string(i++)));
  }
  if (!res.validation_errors.empty()) {
    res.exit = usage;
    res.report = json{{"validation_errors", res.validation_errors}};
    for (auto& e : res.validation_errors) res.text += e + "\n";
    return res;
  }
  json results = json::array();
  bool any_error = false, any_mismatch = false;
  std::ostringstream os;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto r = run_job(jobs[i]);
    write_report(jobs[i].output, r.report);
    json rec{{"job", i}, {"kind", to_string(jobs[i].kind)}, {"exit", r.exit}, {"report", r.report}};
    bool good = r.exit == ok;
    if (jobs[i].expect) {
      auto diff = compare_expectation(*jobs[i].expect, r);
      rec["expect"] = *jobs[i].expect;
      rec["diff"] = diff;
      good = diff.empty() && r.exit != failure;
      if (!diff.empty()) any_mismatch = true;
      for (auto& d : diff) os << "job " << i << " mismatch: " << d << "\n";
    } else if (r.exit == inconclusive) {
      any_mismatch = true;
    }
    if (r.exit == failure) any_error = true;
    rec["ok"] = good;
    os << "job " << i << " (" << to_string(jobs[i].kind) << "): " << (good ? "ok" : "FAILED") << "\n";
    results.push_back(std::move(rec));
  }
  res.exit = any_error ? failure : any_mismatch ? inconclusive : ok;
  res.report = json{{"jobs", results}, {"exit", res.exit}};
  res.text = os.str();
  return res;
}

}  // namespace drinfeld::cli
