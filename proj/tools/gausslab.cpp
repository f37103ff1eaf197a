// gausslab: field construction, Gauss/Kloosterman sums, moment reports and
// verification suites, with JSON or CSV output.
//
// Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or guard error.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gausslab/chars.hpp"
#include "gausslab/equidist.hpp"
#include "gausslab/expsum.hpp"
#include "gausslab/ffield.hpp"
#include "gausslab/gl2gauss.hpp"

namespace {

using namespace gausslab;
using json = nlohmann::ordered_json;
using cd = std::complex<double>;

constexpr const char* kSchema = "gausslab/1";
constexpr const char* kVersion = "1.0.0";

/// Bad flags or a configuration the library rejects; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint32_t p = 0;
  std::uint32_t m = 1;
  std::uint32_t d = 0;  // 0 until resolved: 2 for GL_2 work, else 1
  std::uint64_t q_alias = 0;
  std::uint32_t n_max = 4;
  std::uint32_t n = 2;
  std::string family;
  std::string method;
  std::string target;
  std::string format = "json";
  std::string out;
  double tol = 1e-6;
  std::string cache_dir;
  unsigned threads = 1;
  std::uint32_t psi_twist = 0;
  std::uint64_t max_work = kDefaultWorkGuard;
  std::uint64_t size_guard = kDefaultSizeGuard;
  std::optional<std::uint32_t> a_code;
  std::vector<std::string> suites;
};

struct Report {
  std::string command;
  json rows = json::array();
  json summary = json::object();
  bool failed = false;
};

// ---------------------------------------------------------------- helpers

void resolve_prime_power(RunConfig& cfg) {
  if (cfg.q_alias != 0) {
    const auto pm = split_prime_power(cfg.q_alias);
    if (!pm) throw UsageError("--q " + std::to_string(cfg.q_alias) + " is not a prime power");
    if (cfg.p != 0 && (cfg.p != pm->first || cfg.m != pm->second)) {
      throw UsageError("--q conflicts with --p/--m");
    }
    cfg.p = pm->first;
    cfg.m = pm->second;
  }
  if (cfg.p == 0) throw UsageError("--p (or --q) is required");
  if (!is_prime(cfg.p)) throw UsageError("--p " + std::to_string(cfg.p) + " is not prime");
  if (cfg.m == 0 || cfg.d == 0) throw UsageError("--m and --d must be positive");
  if (!(cfg.tol > 0.0)) throw UsageError("--tol must be positive");
}

SubfieldView make_view(const RunConfig& cfg) {
  BuildOptions opts;
  opts.size_guard = cfg.size_guard;
  if (!cfg.cache_dir.empty()) {
    opts.cache_dir = cfg.cache_dir;
  } else {
    opts.cache_dir = cache_dir_from_env();
  }
  return build_tower(cfg.p, cfg.m, cfg.d, opts);
}

FamilyTag family_of(const RunConfig& cfg, FamilyTag fallback) {
  if (cfg.family.empty()) return fallback;
  const auto tag = parse_family(cfg.family);
  if (!tag) throw UsageError("unknown family " + cfg.family);
  return *tag;
}

std::string poly_of_code(std::uint64_t code, std::uint32_t p, std::uint32_t m) {
  Poly f(m, 0);
  for (std::uint32_t i = 0; i < m; ++i) {
    f[i] = static_cast<std::uint32_t>(code % p);
    code /= p;
  }
  return poly::to_string(poly::trim(f));
}

json field_fingerprint(const SubfieldView& view) {
  const auto& F = view.field();
  json f;
  f["p"] = F.p();
  f["degree"] = F.m();
  f["q"] = view.q();
  f["d"] = view.d();
  f["size"] = F.size();
  f["modulus"] = poly::to_string(F.params().modulus);
  f["modulus_coefficients"] = F.params().modulus;
  f["generator_code"] = F.generator_code();
  f["generator"] = poly_of_code(F.generator_code(), F.p(), F.m());
  f["subfield_stride"] = view.stride();
  return f;
}

json config_echo(const RunConfig& cfg) {
  json c;
  c["p"] = cfg.p;
  c["m"] = cfg.m;
  c["d"] = cfg.d;
  c["n_max"] = cfg.n_max;
  c["n"] = cfg.n;
  c["family"] = cfg.family;
  c["method"] = cfg.method;
  c["target"] = cfg.target;
  c["format"] = cfg.format;
  c["tol"] = cfg.tol;
  c["threads"] = cfg.threads;
  c["psi_twist"] = cfg.psi_twist;
  c["max_work"] = cfg.max_work;
  c["suites"] = cfg.suites;
  if (cfg.a_code) c["a"] = *cfg.a_code;
  return c;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Locale-independent shortest round-trip formatting.
std::string number_text(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return number_text(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  return v.dump();
}

void emit(const RunConfig& cfg, const SubfieldView& view, const Report& report) {
  std::ostringstream os;
  if (cfg.format == "json") {
    json env;
    env["schema"] = kSchema;
    env["version"] = kVersion;
    env["command"] = report.command;
    env["config"] = config_echo(cfg);
    env["field"] = field_fingerprint(view);
    env["timestamp"] = utc_timestamp();
    env["angle_convention"] = "principal value in (-pi, pi], cut at pi";
    env["rows"] = report.rows;
    json summary = report.summary;
    summary["passed"] = !report.failed;
    env["summary"] = summary;
    os << env.dump(2) << "\n";
  } else {
    os << "# schema=" << kSchema << " version=" << kVersion << " command=" << report.command << "\n";
    const json fingerprint = field_fingerprint(view);
    for (const auto& [k, v] : fingerprint.items()) os << "# field." << k << "=" << csv_cell(v) << "\n";
    if (!report.rows.empty()) {
      bool first = true;
      for (const auto& [k, v] : report.rows.front().items()) {
        os << (first ? "" : ",") << k;
        first = false;
      }
      os << "\n";
      for (const auto& row : report.rows) {
        first = true;
        for (const auto& [k, v] : row.items()) {
          os << (first ? "" : ",") << csv_cell(v);
          first = false;
        }
        os << "\n";
      }
    }
    for (const auto& [k, v] : report.summary.items()) os << "# summary." << k << "=" << csv_cell(v) << "\n";
    os << "# summary.passed=" << (report.failed ? "false" : "true") << "\n";
  }
  if (cfg.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(cfg.out, std::ios::trunc);
    if (!f) throw UsageError("cannot open --out " + cfg.out);
    f << os.str();
  }
}

void complex_pair(const char* prefix, cd z, json& row) {
  row[std::string(prefix) + "_re"] = z.real();
  row[std::string(prefix) + "_im"] = z.imag();
}

// ---------------------------------------------------------------- commands

Report cmd_field(const RunConfig&, const SubfieldView& view) {
  Report r{"field"};
  const auto& F = view.field();
  json row;
  row["p"] = F.p();
  row["m"] = view.base_degree();
  row["d"] = view.d();
  row["q"] = view.q();
  row["degree"] = F.m();
  row["size"] = F.size();
  row["group_order"] = F.group_order();
  row["modulus"] = poly::to_string(F.params().modulus);
  row["generator_code"] = F.generator_code();
  row["generator"] = poly_of_code(F.generator_code(), F.p(), F.m());
  row["generator_log"] = F.group_order() == 1 ? 0 : 1;
  row["subfield_stride"] = view.stride();
  r.rows.push_back(row);
  r.summary["trivial_group"] = F.group_order() == 1;
  return r;
}

GaussMethod gauss_method(const std::string& name) {
  if (name.empty() || name == "auto") return GaussMethod::Auto;
  if (name == "direct") return GaussMethod::Direct;
  if (name == "chirp") return GaussMethod::Chirp;
  throw UsageError("unknown Gauss method " + name + " (auto|direct|chirp)");
}

Report cmd_gauss(const RunConfig& cfg, const SubfieldView& view) {
  Report r{"gauss"};
  const FamilyTag tag = family_of(cfg, FamilyTag::AllNontrivial);
  check_family(view, tag);
  const AddChar psi(view.field_ptr(), cfg.psi_twist);
  const auto records = gauss_sums_all(view, psi, gauss_method(cfg.method), cfg.threads);
  for (auto j : enumerate_family(view, tag)) {
    const auto& g = records[j];
    json row;
    row["j"] = j;
    row["primitive"] = g.primitive;
    row["trivial_central"] = g.trivial_central;
    row["square_in_c0"] = g.square_in_c0 ? json(*g.square_in_c0) : json(nullptr);
    complex_pair("value", g.value, row);
    row["abs"] = std::abs(g.value);
    row["angle"] = principal_angle(g.normalized);
    r.rows.push_back(row);
  }
  r.summary["family"] = to_string(tag);
  r.summary["count"] = r.rows.size();
  return r;
}

Report cmd_kloosterman(const RunConfig& cfg, const SubfieldView& view) {
  Report r{"kloosterman"};
  const auto& F = view.field();
  if (cfg.n == 0) throw UsageError("--n must be at least 1");
  const AddChar psi(view.field_ptr(), cfg.psi_twist);
  const std::string method = cfg.method.empty() ? "convolution" : cfg.method;

  std::optional<Element> only;
  if (cfg.a_code) {
    if (*cfg.a_code == 0 || *cfg.a_code >= F.size()) throw UsageError("--a must be a nonzero element code");
    only = F.from_code(*cfg.a_code);
  }
  auto gauss = [&] { return gauss_values(gauss_sums_all(view, psi, GaussMethod::Auto, cfg.threads)); };

  KloostermanTable table;
  if (method == "convolution" || method == "all") {
    table = kloosterman_all(psi, cfg.n);
  } else if (method == "inversion") {
    table = kloosterman_table_via_inversion(gauss(), cfg.n);
  } else if (method == "direct") {
    if (only) {
      table.n = cfg.n;
      table.method = KlMethod::Direct;
      table.values = ComplexVectorXd::Zero(F.group_order());
      table.values[only->log()] = kloosterman_direct(psi, cfg.n, *only, cfg.max_work);
    } else {
      table = kloosterman_table_direct(psi, cfg.n, cfg.max_work);
    }
  } else {
    throw UsageError("unknown Kloosterman method " + method + " (direct|convolution|inversion|all)");
  }

  for (std::uint32_t k = 0; k < F.group_order(); ++k) {
    const Element a = Element::from_log(k);
    if (only && a != *only) continue;
    json row;
    row["log"] = k;
    row["code"] = F.code(a);
    complex_pair("value", table.at(a), row);
    r.rows.push_back(row);
  }
  r.summary["n"] = cfg.n;
  r.summary["method"] = method;

  if (method == "all") {
    const double scale = std::pow(static_cast<double>(F.size()), cfg.n / 2.0);
    const auto inv = kloosterman_table_via_inversion(gauss(), cfg.n);
    const double dev_inv = max_deviation(table.values, inv.values) / scale;
    r.summary["max_deviation_inversion"] = dev_inv;
    bool ok = dev_inv < cfg.tol;
    const double work = std::pow(static_cast<double>(F.group_order()), cfg.n);
    if (work <= static_cast<double>(cfg.max_work)) {
      const auto direct = kloosterman_table_direct(psi, cfg.n, cfg.max_work);
      const double dev_dir = max_deviation(table.values, direct.values) / scale;
      r.summary["max_deviation_direct"] = dev_dir;
      ok = ok && dev_dir < cfg.tol;
    } else {
      r.summary["max_deviation_direct"] = nullptr;
      r.summary["direct_skipped"] = "work guard";
    }
    r.summary["deviation_scale"] = "q^{dn/2}";
    r.failed = !ok;
  }
  return r;
}

TargetMeasure default_target(FamilyTag tag) {
  if (tag == FamilyTag::C0S) return TargetMeasure::Dirac1;
  if (tag == FamilyTag::C0NS) return TargetMeasure::DiracMinus1;
  return TargetMeasure::Haar;
}

Report cmd_moments(const RunConfig& cfg, const SubfieldView& view) {
  Report r{"moments"};
  const FamilyTag tag = family_of(cfg, FamilyTag::Primitive);
  check_family(view, tag);
  TargetMeasure target = default_target(tag);
  if (!cfg.target.empty()) {
    const auto t = parse_target(cfg.target);
    if (!t) throw UsageError("unknown target " + cfg.target);
    target = *t;
  }
  const AddChar psi(view.field_ptr(), cfg.psi_twist);
  const auto records = gauss_sums_all(view, psi, GaussMethod::Auto, cfg.threads);
  const auto reports = moment_report(view, psi, records, tag, cfg.n_max, target);
  for (const auto& m : reports) {
    json row;
    row["n"] = m.n;
    complex_pair("empirical", m.empirical, row);
    complex_pair("target", m.target, row);
    row["exact_re"] = m.exact_prediction ? json(m.exact_prediction->real()) : json(nullptr);
    row["exact_im"] = m.exact_prediction ? json(m.exact_prediction->imag()) : json(nullptr);
    row["deviation"] = m.deviation;
    row["count"] = m.count;
    complex_pair("full_group", m.full_group_empirical, row);
    row["full_group_count"] = m.full_group_count;
    r.rows.push_back(row);
  }
  const auto pop = build_population(view, records, tag);
  r.summary["family"] = to_string(tag);
  r.summary["target"] = to_string(target);
  r.summary["count"] = pop.points.size();
  r.summary["star_discrepancy"] = star_discrepancy(pop);
  r.summary["ks_distance"] = ks_distance(pop, target);
  return r;
}

Report cmd_gl2(const RunConfig& cfg, const SubfieldView& view) {
  Report r{"gl2"};
  if (view.d() != 2) throw UsageError("gl2 requires --d 2");
  const auto classes = conj_classes(view);
  const auto rep = verify_kondo(view, cfg.tol, cfg.threads);
  for (const auto& k : rep.rows) {
    json row;
    row["j"] = k.chi.j;
    complex_pair("matrix_sum", k.matrix_sum, row);
    complex_pair("abelian_sum", k.abelian_sum, row);
    row["residual"] = k.residual;
    row["unsigned_residual"] = k.unsigned_residual;
    row["abs_defect"] = k.abs_defect;
    row["norm_defect"] = k.norm_defect;
    r.rows.push_back(row);
  }
  std::map<std::string, std::size_t> kinds;
  std::uint64_t total = 0;
  for (const auto& c : classes) {
    ++kinds[std::string(to_string(c.kind))];
    total += c.size;
  }
  json counts;
  for (const auto& [k, v] : kinds) counts[k] = v;
  r.summary["classes"] = classes.size();
  r.summary["class_kinds"] = counts;
  r.summary["group_order"] = gl2_order(view.q());
  r.summary["class_sizes_sum"] = total;
  r.summary["primitive_orbits"] = rep.orbits;
  r.summary["identity"] = "g(rho) = -q g(chi)";
  r.failed = !rep.passed() || total != gl2_order(view.q());
  return r;
}

// ---------------------------------------------------------------- verify

struct SuiteRows {
  Report& report;
  std::string suite;
  bool ok = true;

  void add(const std::string& check, double value, double expected, double error, bool pass) {
    json row;
    row["suite"] = suite;
    row["check"] = check;
    row["value"] = value;
    row["expected"] = expected;
    row["error"] = error;
    row["pass"] = pass;
    report.rows.push_back(row);
    ok = ok && pass;
  }
  void add(const IdentityCheck& c, const std::string& check) {
    add(check, std::abs(c.lhs), std::abs(c.rhs), c.error, c.passed());
  }
};

std::uint64_t ipow_u(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// Number of j with chi_j primitive: sum over e | d of mu(d/e) (q^e - 1), plus the d = 1 exclusion of j = 0.
std::uint64_t primitive_count(std::uint64_t q, std::uint32_t d) {
  auto mobius = [](std::uint32_t n) {
    int mu = 1;
    for (std::uint32_t f = 2; f * f <= n; ++f) {
      if (n % f == 0) {
        n /= f;
        if (n % f == 0) return 0;
        mu = -mu;
      }
    }
    return n > 1 ? -mu : mu;
  };
  std::int64_t total = 0;
  for (std::uint32_t e = 1; e <= d; ++e) {
    if (d % e == 0) total += mobius(d / e) * static_cast<std::int64_t>(ipow_u(q, e) - 1);
  }
  if (d == 1) total -= 1;  // the trivial character is never primitive
  return static_cast<std::uint64_t>(total);
}

bool suite_counts(const RunConfig&, const SubfieldView& view, SuiteRows& s) {
  const std::uint64_t q = view.q();
  const std::uint32_t d = view.d();
  const std::uint64_t Q = view.field().size();
  auto count = [&](FamilyTag t) { return static_cast<double>(enumerate_family(view, t).size()); };
  auto exact = [&](const char* name, double got, double want) { s.add(name, got, want, std::abs(got - want), got == want); };
  exact("|C0| = (Q-1)/(q-1)", count(FamilyTag::C0), static_cast<double>((Q - 1) / (q - 1)));
  exact("|PRIMITIVE|", count(FamilyTag::Primitive), static_cast<double>(primitive_count(q, d)));
  if (d == 2) {
    const bool odd = view.field().p() != 2;
    exact("|C0_PRIMITIVE|", count(FamilyTag::C0Primitive), static_cast<double>(odd ? q - 1 : q));
    if (odd) {
      exact("|C0S| = (q+1)/2", count(FamilyTag::C0S), static_cast<double>((q + 1) / 2));
      exact("|C0NS| = (q+1)/2", count(FamilyTag::C0NS), static_cast<double>((q + 1) / 2));
      const auto s_set = enumerate_family(view, FamilyTag::C0S);
      const bool quad_in = std::binary_search(s_set.begin(), s_set.end(), view.field().group_order() / 2);
      const bool want = (q + 1) % 4 == 0;
      s.add("quadratic in C0S iff 4 | q+1", quad_in, want, quad_in == want ? 0.0 : 1.0, quad_in == want);
    }
  }
  return true;
}

bool suite_orthogonality(const RunConfig& cfg, const SubfieldView& view, SuiteRows& s) {
  const auto& F = view.field();
  const std::uint32_t M = F.group_order();
  const std::uint32_t step = std::max<std::uint32_t>(1, M / 64);
  double worst_x = 0.0;
  double worst_j = 0.0;
  for (std::uint32_t k = 0; k < M; k += step) {
    std::vector<cd> by_j(M), by_x(M);
    for (std::uint32_t t = 0; t < M; ++t) {
      by_j[t] = mult_char(F, CharIndex{t}, Element::from_log(k));
      by_x[t] = mult_char(F, CharIndex{k}, Element::from_log(t));
    }
    const double want = k == 0 ? static_cast<double>(M) : 0.0;
    worst_x = std::max(worst_x, std::abs(pairwise_sum(std::span<const cd>(by_j)) - want));
    worst_j = std::max(worst_j, std::abs(pairwise_sum(std::span<const cd>(by_x)) - want));
  }
  const double tol = cfg.tol * M;
  s.add("sum_j chi_j(x) = M [x = 1]", worst_x, 0.0, worst_x, worst_x < tol);
  s.add("sum_x chi_j(x) = M [j = 0]", worst_j, 0.0, worst_j, worst_j < tol);
  if (view.d() == 2) {
    const double q = static_cast<double>(view.q());
    double worst = 0.0;
    const bool odd = F.p() != 2;
    for (std::uint32_t k = 0; k < M; ++k) {
      const Element x = Element::from_log(k);
      if (odd) {
        const double want = view.in_base(F.mul(x, x)) ? (q + 1.0) / 2.0 : 0.0;
        worst = std::max(worst, std::abs(family_character_sum(view, FamilyTag::C0S, x) - want));
      } else {
        const double want = view.in_base(x) ? q + 1.0 : 0.0;
        worst = std::max(worst, std::abs(family_character_sum(view, FamilyTag::C0, x) - want));
      }
    }
    s.add(odd ? "sum_{C0S} chi(x) = (q+1)/2 [x^2 in F_q]" : "sum_{C0} chi(x) = (q+1) [x in F_q]", worst, 0.0, worst,
          worst < tol);
  }
  return true;
}

bool suite_recurrence(const RunConfig& cfg, const SubfieldView& view, SuiteRows& s, bool closed_forms) {
  if (view.d() != 2) return false;
  const AddChar psi(view.field_ptr());
  const auto rep = check_recurrence(view, psi, cfg.n_max, cfg.tol);
  const bool odd = view.field().p() != 2;
  for (const auto& row : rep.rows) {
    const std::string n = "n=" + std::to_string(row.n);
    if (!closed_forms) {
      s.add("I_" + std::to_string(row.n), static_cast<double>(row.I.value), static_cast<double>(row.I.value), row.I.residual,
            row.I.residual < cfg.tol && row.recurrence_ok);
      if (odd) {
        s.add("A_" + std::to_string(row.n), static_cast<double>(row.A.value), static_cast<double>(row.A.value), row.A.residual,
              row.A.residual < cfg.tol && row.recurrence_ok);
      }
    } else {
      const double sum = static_cast<double>(odd ? row.I.value + row.A.value : row.I.value);
      s.add(std::string(odd ? "I+A closed form " : "I closed form ") + n, sum, static_cast<double>(row.closed_form),
            std::abs(sum - static_cast<double>(row.closed_form)), row.sum_ok);
      if (odd) {
        const double diff = static_cast<double>(row.I.value - row.A.value);
        const double want = static_cast<double>(int_pow(-static_cast<std::int64_t>(view.q()), row.n));
        s.add("I-A = (-q)^n " + n, diff, want, std::abs(diff - want), row.difference_ok);
      }
    }
  }
  if (!closed_forms) {
    s.add("base values I_1, A_1", rep.base_values_ok ? 1.0 : 0.0, 1.0, rep.base_values_ok ? 0.0 : 1.0,
          rep.base_values_ok);
  } else {
    // exact moment predictions against empirical family averages
    const auto records = gauss_sums_all(view, psi, GaussMethod::Auto, cfg.threads);
    std::vector<FamilyTag> tags{FamilyTag::C0};
    if (odd) tags = {FamilyTag::C0, FamilyTag::C0S, FamilyTag::C0NS};
    for (auto tag : tags) {
      for (const auto& m : moment_report(view, psi, records, tag, cfg.n_max, TargetMeasure::Haar)) {
        if (!m.exact_prediction) continue;
        const double err = std::abs(*m.exact_prediction - m.empirical);
        s.add(std::string(to_string(tag)) + " moment n=" + std::to_string(m.n), m.empirical.real(),
              m.exact_prediction->real(), err, err < cfg.tol);
      }
    }
  }
  return true;
}

bool suite_deligne(const RunConfig& cfg, const SubfieldView& view, SuiteRows& s) {
  const AddChar psi(view.field_ptr(), cfg.psi_twist);
  for (const auto& row : check_deligne_bound(psi, cfg.n_max)) {
    s.add("max |Kl_" + std::to_string(row.n) + "| <= n Q^{(n-1)/2}", row.max_abs, row.bound, row.max_ratio,
          row.violations == 0);
  }
  return true;
}

bool suite_parseval(const RunConfig& cfg, const SubfieldView& view, SuiteRows& s) {
  const AddChar psi(view.field_ptr(), cfg.psi_twist);
  for (const auto& table : kloosterman_tower(psi, cfg.n_max)) {
    s.add(check_parseval(table, view.field().size(), cfg.tol), "Parseval n=" + std::to_string(table.n));
  }
  return true;
}

bool suite_hasse_davenport(const RunConfig&, const SubfieldView& view, SuiteRows& s) {
  if (view.d() < 2) return false;
  for (std::uint32_t j = 0; j + 1 < view.q(); ++j) {
    s.add(check_hasse_davenport(view, j), "lift of base character j=" + std::to_string(j));
  }
  return true;
}

bool suite_fourier(const RunConfig& cfg, const SubfieldView& view, SuiteRows& s) {
  const AddChar psi(view.field_ptr(), cfg.psi_twist);
  const auto g = gauss_values(gauss_sums_all(view, psi, GaussMethod::Auto, cfg.threads));
  const double Q = static_cast<double>(view.field().size());
  for (const auto& table : kloosterman_tower(psi, cfg.n_max)) {
    const std::string n = " n=" + std::to_string(table.n);
    s.add(check_moment_identity(g, table, view.field().size(), cfg.tol), "sum_{chi != 1} g^n" + n);
    if (view.d() >= 2 && cfg.psi_twist == 0) s.add(check_c0_identity(g, table, view, cfg.tol), "sum_{C0 \\ 1} g^n" + n);
    const auto inv = kloosterman_table_via_inversion(g, table.n);
    const double dev = max_deviation(table.values, inv.values) / std::pow(Q, table.n / 2.0);
    s.add("Kl convolution vs Fourier inversion" + n, dev, 0.0, dev, dev < cfg.tol);
  }
  return true;
}

bool suite_epsilon(const RunConfig&, const SubfieldView& view, SuiteRows& s) {
  if (view.d() != 2 || view.field().p() == 2) return false;
  const auto w = TraceZeroWitness::find(view);
  for (auto j : enumerate_family(view, FamilyTag::C0)) {
    const bool a = is_square_in_C0(view, CharIndex{j});
    const bool b = square_criterion_epsilon(view, w, CharIndex{j});
    s.add("j=" + std::to_string(j), a, b, a == b ? 0.0 : 1.0, a == b);
  }
  return true;
}

bool suite_kondo(const RunConfig& cfg, const SubfieldView& view, SuiteRows& s) {
  if (view.d() != 2) return false;
  const auto rep = verify_kondo(view, cfg.tol, cfg.threads);
  for (const auto& k : rep.rows) {
    s.add("g(rho) = -q g(chi), j=" + std::to_string(k.chi.j), std::abs(k.matrix_sum), static_cast<double>(view.q()) * std::abs(k.abelian_sum),
          k.residual, k.residual < cfg.tol && k.abs_defect < cfg.tol && k.norm_defect < cfg.tol);
  }
  return true;
}

const std::vector<std::string> kSuites{"counts",          "orthogonality",      "recurrence",     "closed-forms", "deligne",
                                       "parseval",        "hasse-davenport",    "fourier-identities", "epsilon-square", "kondo"};

Report cmd_verify(const RunConfig& cfg, const SubfieldView& view) {
  Report r{"verify"};
  const bool explicit_list = !cfg.suites.empty();
  const auto& suites = explicit_list ? cfg.suites : kSuites;
  json results = json::object();
  json skipped = json::array();
  for (const auto& name : suites) {
    SuiteRows s{r, name};
    bool applies = true;
    if (name == "counts") applies = suite_counts(cfg, view, s);
    else if (name == "orthogonality") applies = suite_orthogonality(cfg, view, s);
    else if (name == "recurrence") applies = suite_recurrence(cfg, view, s, false);
    else if (name == "closed-forms") applies = suite_recurrence(cfg, view, s, true);
    else if (name == "deligne") applies = suite_deligne(cfg, view, s);
    else if (name == "parseval") applies = suite_parseval(cfg, view, s);
    else if (name == "hasse-davenport") applies = suite_hasse_davenport(cfg, view, s);
    else if (name == "fourier-identities") applies = suite_fourier(cfg, view, s);
    else if (name == "epsilon-square") applies = suite_epsilon(cfg, view, s);
    else if (name == "kondo") applies = suite_kondo(cfg, view, s);
    else throw UsageError("unknown suite " + name);
    if (!applies) {
      if (explicit_list) throw UsageError("suite " + name + " does not apply to this field (check --d and --p)");
      skipped.push_back(name);
      continue;
    }
    results[name] = s.ok;
    if (!s.ok) r.failed = true;
  }
  r.summary["suites"] = results;
  r.summary["skipped"] = skipped;
  return r;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--p", cfg.p, "characteristic p (prime)");
  sub->add_option("--m", cfg.m, "base field degree, q = p^m")->capture_default_str();
  sub->add_option("--q", cfg.q_alias, "base field size q (alias for --p/--m)");
  sub->add_option("--d", cfg.d, "extension degree of F_{q^d} over F_q (default 1; 2 for gl2 and GL_2 suites)");
  sub->add_option("--n-max", cfg.n_max, "largest moment / Kloosterman order")->capture_default_str();
  sub->add_option("--family", cfg.family, "ALL_NONTRIVIAL|PRIMITIVE|C0|C0_PRIMITIVE|C0S|C0NS");
  sub->add_option("--method", cfg.method, "algorithm selector");
  sub->add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--out", cfg.out, "write output to this path instead of stdout");
  sub->add_option("--tol", cfg.tol, "verification tolerance")->capture_default_str();
  sub->add_option("--cache-dir", cfg.cache_dir, "field table cache directory (default $GAUSSLAB_CACHE)");
  sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  sub->add_option("--psi-twist", cfg.psi_twist, "additive character twist: psi(g^t x)")->capture_default_str();
  sub->add_option("--max-work", cfg.max_work, "work guard for brute-force enumeration")->capture_default_str();
  sub->add_option("--size-guard", cfg.size_guard, "largest field size to build")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss and Kloosterman sums over finite fields"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* field = app.add_subcommand("field", "field parameters, modulus, generator, subfield stride");
  auto* gauss = app.add_subcommand("gauss", "Gauss sums for a character family");
  auto* kl = app.add_subcommand("kloosterman", "Kloosterman sum table");
  auto* moments = app.add_subcommand("moments", "Weyl moments against a limit measure");
  auto* verify = app.add_subcommand("verify", "run verification suites");
  auto* gl2 = app.add_subcommand("gl2", "GL_2 cuspidal matrix Gauss sums");
  for (auto* sub : {field, gauss, kl, moments, verify, gl2}) add_common(sub, cfg);
  kl->add_option("--n", cfg.n, "Kloosterman order n")->capture_default_str();
  std::uint32_t a_code = 0;
  auto* a_opt = kl->add_option("--a", a_code, "only the element with this code");
  moments->add_option("--target", cfg.target, "HAAR|DIRAC_1|DIRAC_MINUS1|HALF_DIRAC_PAIR");
  verify->add_option("--suite", cfg.suites, "suite name (repeatable); default: all that apply");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (a_opt->count() > 0) cfg.a_code = a_code;
  if (cfg.d == 0) {
    const bool gl2_suites = verify->parsed() && !cfg.suites.empty() &&
                            std::all_of(cfg.suites.begin(), cfg.suites.end(), [](const std::string& s) {
                              return s == "kondo" || s == "epsilon-square" || s == "recurrence" || s == "closed-forms";
                            });
    cfg.d = gl2->parsed() || gl2_suites ? 2 : 1;
  }

  try {
    resolve_prime_power(cfg);
    const SubfieldView view = make_view(cfg);
    Report report;
    if (field->parsed()) report = cmd_field(cfg, view);
    else if (gauss->parsed()) report = cmd_gauss(cfg, view);
    else if (kl->parsed()) report = cmd_kloosterman(cfg, view);
    else if (moments->parsed()) report = cmd_moments(cfg, view);
    else if (verify->parsed()) report = cmd_verify(cfg, view);
    else report = cmd_gl2(cfg, view);
    emit(cfg, view, report);
    return report.failed ? 1 : 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
  } catch (const GuardError& e) {
    std::cerr << "guard: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
