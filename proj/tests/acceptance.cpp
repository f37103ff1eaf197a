// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gausslab/chars.hpp"
#include "gausslab/equidist.hpp"
#include "gausslab/expsum.hpp"
#include "gausslab/gl2gauss.hpp"

using namespace gausslab;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> notes;  // extra lines printed under the criterion
};

int failures = 0;

void run(int id, const char* name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %2d %s:%s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.str().c_str(), secs);
  for (const auto& n : out.notes) std::printf("       %s\n", n.c_str());
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

SubfieldView tower(std::uint64_t q, std::uint32_t d) {
  const auto pm = split_prime_power(q);
  if (!pm) throw std::invalid_argument("not a prime power");
  return build_tower(pm->first, pm->second, d);
}

std::vector<std::uint64_t> prime_powers_upto(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q <= limit; ++q)
    if (split_prime_power(q)) out.push_back(q);
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

/// Direct Gauss sums for every j from root tables; independent of the DFT path.
ComplexVectorXd gauss_by_tables(const FieldTable& F) {
  const std::uint32_t M = F.group_order();
  std::vector<cd> rootM(M), rootP(F.p());
  for (std::uint32_t k = 0; k < M; ++k) rootM[k] = unit_root<double>(k, M);
  for (std::uint32_t t = 0; t < F.p(); ++t) rootP[t] = unit_root<double>(t, F.p());
  const auto tr = F.trace_table();
  ComplexVectorXd out(M);
  std::vector<cd> terms(M);
  for (std::uint32_t j = 0; j < M; ++j) {
    std::uint64_t idx = 0;
    for (std::uint32_t k = 0; k < M; ++k) {
      terms[k] = rootM[idx] * rootP[tr[k]];
      idx += j;
      if (idx >= M) idx -= M;
    }
    out[j] = pairwise_sum(std::span<const cd>(terms));
  }
  return out;
}

}  // namespace

int main() {
  run(1, "base values I_1, A_1", [](Outcome& o) {
    double worst = 0.0;
    for (std::uint64_t q : {3u, 5u, 7u, 9u, 11u, 13u, 2u, 4u, 8u}) {
      const auto T = tower(q, 2);
      const auto K = kloosterman_all(AddChar(T.field_ptr()), 1);
      const auto I = round_to_integer(aggregate_I(K, T));
      worst = std::max(worst, I.residual);
      if (T.field().p() == 2) {
        if (I.value != static_cast<std::int64_t>(q) - 1) o.pass = false;
      } else {
        const auto A = round_to_integer(aggregate_A(K, T));
        worst = std::max(worst, A.residual);
        if (I.value != -1 || A.value != static_cast<std::int64_t>(q) - 1) o.pass = false;
      }
    }
    if (worst >= 1e-6) o.pass = false;
    o.detail << " q in {3,5,7,9,11,13,2,4,8}, max rounding residual " << fmt(worst);
  });

  run(2, "recurrences and closed forms, n <= 5", [](Outcome& o) {
    std::size_t displayed_mismatch = 0;
    std::size_t rows = 0;
    for (std::uint64_t q : {3u, 5u, 7u, 9u, 11u, 13u, 2u, 4u, 8u}) {
      const auto T = tower(q, 2);
      const AddChar psi(T.field_ptr());
      const auto rep = check_recurrence(T, psi, 5);
      if (!rep.passed() || !rep.base_values_ok) {
        o.pass = false;
        o.notes.push_back("recurrence failed at q=" + std::to_string(q));
      }
      for (const auto& r : rep.rows) {
        ++rows;
        if (T.field().p() != 2 && !r.displayed_form_matches) ++displayed_mismatch;
      }
      // Brute-force oracle for I_n + A_n where enumeration is affordable.
      for (std::uint32_t n = 1; n <= 5; ++n) {
        const double work = std::pow(static_cast<double>(T.field().group_order()), n);
        if (work > static_cast<double>(kDefaultWorkGuard)) break;
        const auto K = kloosterman_table_direct(psi, n);
        const auto I = round_to_integer(aggregate_I(K, T)).value;
        const auto A = T.field().p() == 2 ? I : round_to_integer(aggregate_A(K, T)).value;
        const auto& r = rep.rows[n - 1];
        const std::int64_t want = T.field().p() == 2 ? I : I + A;
        if (r.closed_form != want || r.I.value != I) {
          o.pass = false;
          o.notes.push_back("brute-force mismatch q=" + std::to_string(q) + " n=" + std::to_string(n));
        }
      }
    }
    o.detail << " " << rows << " rows over q in {3..13 odd, 9, 2, 4, 8}";
    o.notes.push_back("I_n+A_n uses (1-(-q)^{n-1})/(1+q); the (1+(-q)^{n-1}) variant disagrees on " +
                      std::to_string(displayed_mismatch) + " odd-q rows");
  });

  run(3, "Deligne bound, Q <= 729, n <= 4", [](Outcome& o) {
    std::size_t violations = 0;
    double worst = 0.0;
    std::size_t fields = 0;
    for (auto Q : prime_powers_upto(729)) {
      const auto pm = *split_prime_power(Q);
      const AddChar psi(build_field(pm.first, pm.second));
      for (const auto& row : check_deligne_bound(psi, 4)) {
        violations += row.violations;
        worst = std::max(worst, row.max_ratio);
      }
      ++fields;
    }
    o.pass = violations == 0;
    o.detail << " " << fields << " fields, violations " << violations << ", max |Kl|/bound " << fmt(worst);
  });

  run(4, "moment identity, n <= 5", [](Outcome& o) {
    double worst = 0.0;
    for (std::uint64_t Q : {8u, 9u, 25u, 27u, 49u, 121u, 125u, 343u}) {
      const auto T = tower(Q, 1);
      const AddChar psi(T.field_ptr());
      const auto g = gauss_values(gauss_sums_all(T, psi));
      const auto tables = kloosterman_tower(psi, 5);
      for (const auto& K : tables) {
        const auto c = check_moment_identity(g, K, Q, 1e-6);
        worst = std::max(worst, c.error);
        if (!c.passed()) o.pass = false;
      }
    }
    o.detail << " Q in {8,9,25,27,49,121,125,343}, max relative error " << fmt(worst);
  });

  run(5, "C^0 identity and d=3 mean bound", [](Outcome& o) {
    double worst = 0.0;
    double worst_ratio = 0.0;
    const std::pair<std::uint64_t, std::uint32_t> grid[] = {{3, 2}, {5, 2}, {7, 2}, {11, 2},
                                                            {2, 3}, {3, 3}, {5, 3}, {7, 3}};
    for (auto [q, d] : grid) {
      const auto T = tower(q, d);
      const AddChar psi(T.field_ptr());
      const auto records = gauss_sums_all(T, psi);
      const auto g = gauss_values(records);
      const auto tables = kloosterman_tower(psi, 5);
      for (const auto& K : tables) {
        const auto c = check_c0_identity(g, K, T, 1e-6);
        worst = std::max(worst, c.error);
        if (!c.passed()) o.pass = false;
      }
      if (d == 3) {
        const auto c0 = enumerate_family(T, FamilyTag::C0);
        const auto pop = build_population(T, records, FamilyTag::C0);
        const double qd = static_cast<double>(q);
        for (int n = 1; n <= 5; ++n) {
          const double bound = n * (qd - 1.0) / std::pow(qd, 1.5) + 2.0 / static_cast<double>(c0.size());
          const double mean = std::abs(weyl_sum(pop, n));
          worst_ratio = std::max(worst_ratio, mean / bound);
          if (mean > bound) o.pass = false;
        }
      }
    }
    o.detail << " identity max error " << fmt(worst) << ", d=3 max mean/bound " << fmt(worst_ratio);
  });

  run(6, "Kondo/BK g(rho) = q g(chi)", [](Outcome& o) {
    double unsigned_worst = 0.0;
    double signed_worst = 0.0;
    double abs_worst = 0.0;
    bool signed_ok = true;
    for (std::uint64_t q : {2u, 3u, 4u, 5u, 7u, 9u}) {
      const auto rep = verify_kondo(tower(q, 2), 1e-6);
      for (const auto& r : rep.rows) {
        unsigned_worst = std::max(unsigned_worst, r.unsigned_residual);
        signed_worst = std::max(signed_worst, r.residual);
        abs_worst = std::max(abs_worst, std::max(r.abs_defect, r.norm_defect));
      }
      if (!rep.unsigned_passed()) o.pass = false;
      if (!rep.passed()) signed_ok = false;
    }
    o.detail << " q in {2,3,4,5,7,9}, max |g(rho) - q g(chi)|/q^2 = " << fmt(unsigned_worst);
    o.notes.push_back(std::string("signed form g(rho) = -q g(chi): max residual ") + fmt(signed_worst) +
                      (signed_ok ? " PASS" : " FAIL"));
    o.notes.push_back("|g(rho)| = q^2 and <theta,theta> = |G|: max defect " + fmt(abs_worst));
  });

  run(7, "family counts, q <= 49", [](Outcome& o) {
    std::size_t checked = 0;
    for (auto q : prime_powers_upto(49)) {
      const auto T = tower(q, 2);
      const bool odd = T.field().p() != 2;
      const auto c0 = enumerate_family(T, FamilyTag::C0);
      bool ok = c0.size() == (q * q - 1) / (q - 1);
      ok = ok && enumerate_family(T, FamilyTag::C0Primitive).size() == (odd ? q - 1 : q);
      if (odd) {
        const auto s = enumerate_family(T, FamilyTag::C0S);
        ok = ok && s.size() == (q + 1) / 2 && enumerate_family(T, FamilyTag::C0NS).size() == (q + 1) / 2;
        const std::uint32_t quad = T.field().group_order() / 2;
        ok = ok && std::binary_search(s.begin(), s.end(), quad) == ((q + 1) % 4 == 0);
      }
      if (!ok) {
        o.pass = false;
        o.notes.push_back("count mismatch at q=" + std::to_string(q));
      }
      ++checked;
    }
    o.detail << " " << checked << " prime powers";
  });

  run(8, "epsilon-square criterion, odd q <= 49", [](Outcome& o) {
    std::size_t chars = 0;
    for (auto q : prime_powers_upto(49)) {
      if (q % 2 == 0) continue;
      const auto T = tower(q, 2);
      const auto w = TraceZeroWitness::find(T);
      for (auto j : enumerate_family(T, FamilyTag::C0)) {
        const bool exact = square_criterion_epsilon(T, w, CharIndex{j});
        if (is_square_in_C0(T, CharIndex{j}) != exact) o.pass = false;
        // cross-check the exact index arithmetic against the numeric character value
        if ((std::abs(mult_char(T.field(), CharIndex{j}, w.sqrt_delta) - 1.0) < 1e-9) != exact) o.pass = false;
        ++chars;
      }
    }
    o.detail << " " << chars << " characters";
  });

  run(9, "Dirac trend and C^{0,ns} exact moments", [](Outcome& o) {
    std::vector<double> m1, m2;
    double literal_worst = 0.0;
    double corrected_worst = 0.0;
    for (std::uint64_t q : {5u, 13u, 29u, 61u}) {
      const auto T = tower(q, 2);
      const AddChar psi(T.field_ptr());
      const auto g = gauss_sums_all(T, psi);
      const auto s = moment_report(T, psi, g, FamilyTag::C0S, 2, TargetMeasure::Dirac1);
      m1.push_back(s[0].empirical.real());
      m2.push_back(s[1].empirical.real());
      const auto ns = moment_report(T, psi, g, FamilyTag::C0NS, 4, TargetMeasure::DiracMinus1);
      const double qd = static_cast<double>(q);
      for (const auto& r : ns) {
        const double sgn = r.n % 2 == 0 ? 1.0 : -1.0;
        literal_worst = std::max(literal_worst, std::abs(r.empirical - sgn * (qd - 1.0) / (qd + 1.0)));
        corrected_worst = std::max(corrected_worst, std::abs(r.empirical - sgn));
        corrected_worst = std::max(corrected_worst, std::abs(r.empirical - *r.exact_prediction));
      }
      for (const auto& r : s) corrected_worst = std::max(corrected_worst, std::abs(r.empirical - *r.exact_prediction));
    }
    bool trend = true;
    for (std::size_t i = 0; i + 1 < m1.size(); ++i) trend = trend && m1[i] < m1[i + 1] && m2[i] < m2[i + 1];
    for (std::size_t i = 0; i < m1.size(); ++i) trend = trend && m1[i] < 1.0 && m2[i] < 1.0;
    o.pass = trend && literal_worst < 1e-8;
    o.detail << " C0S trend " << (trend ? "increasing" : "NOT increasing") << "; C0NS vs (-1)^n(q-1)/(q+1) max error "
             << fmt(literal_worst);
    std::ostringstream t;
    t << "C0S m1:";
    for (double v : m1) t << " " << fmt(v);
    t << "  m2:";
    for (double v : m2) t << " " << fmt(v);
    o.notes.push_back(t.str());
    o.notes.push_back("C0NS moments vs (-1)^n and closed-form predictions: max error " + fmt(corrected_worst) +
                      (corrected_worst < 1e-8 ? " PASS" : " FAIL"));
  });

  run(10, "Haar trend, PRIMITIVE star discrepancy", [](Outcome& o) {
    std::vector<double> disc;
    for (std::uint64_t q : {5u, 9u, 17u, 25u, 49u}) {
      const auto T = tower(q, 2);
      const auto g = gauss_sums_all(T, AddChar(T.field_ptr()));
      disc.push_back(star_discrepancy(build_population(T, g, FamilyTag::Primitive)));
    }
    for (std::size_t i = 0; i + 1 < disc.size(); ++i)
      if (!(disc[i + 1] < disc[i])) o.pass = false;
    o.detail << " q=5,9,17,25,49:";
    for (double v : disc) o.detail << " " << fmt(v);
  });

  run(11, "cross-method Kloosterman and batch Gauss sums", [](Outcome& o) {
    double kl_worst = 0.0;
    std::size_t instances = 0;
    for (auto Q : prime_powers_upto(729)) {
      const auto pm = *split_prime_power(Q);
      const auto T = build_tower(pm.first, pm.second, 1);
      const AddChar psi(T.field_ptr());
      const auto g = gauss_values(gauss_sums_all(T, psi));
      const auto tower_tables = kloosterman_tower(psi, 4);
      for (std::uint32_t n = 1; n <= 4; ++n) {
        const double work = std::pow(static_cast<double>(T.field().group_order()), n);
        if (work > static_cast<double>(kDefaultWorkGuard)) break;
        const auto direct = kloosterman_table_direct(psi, n);
        const auto inv = kloosterman_table_via_inversion(g, n);
        const double scale = std::pow(static_cast<double>(Q), n / 2.0);
        const double dev = std::max(max_deviation(direct.values, tower_tables[n - 1].values),
                                    max_deviation(direct.values, inv.values)) / scale;
        kl_worst = std::max(kl_worst, dev);
        if (dev >= 1e-7) o.pass = false;
        ++instances;
      }
    }
    double gauss_worst = 0.0;
    std::size_t fields = 0;
    for (auto Q : prime_powers_upto(4096)) {
      const auto pm = *split_prime_power(Q);
      const auto T = build_tower(pm.first, pm.second, 1);
      const auto batch = gauss_values(gauss_sums_all(T, AddChar(T.field_ptr())));
      auto direct = gauss_by_tables(T.field());
      const double dev = max_deviation(batch, direct) / std::sqrt(static_cast<double>(Q));
      gauss_worst = std::max(gauss_worst, dev);
      if (dev >= 1e-7) o.pass = false;
      ++fields;
    }
    o.detail << " Kl: " << instances << " (Q,n) instances, max dev/Q^{n/2} " << fmt(kl_worst) << "; Gauss: " << fields
             << " fields Q <= 4096, max dev/Q^{1/2} " << fmt(gauss_worst);
  });

  run(12, "Hasse-Davenport", [](Outcome& o) {
    double worst = 0.0;
    for (std::uint32_t p : {3u, 5u}) {
      for (std::uint32_t n : {2u, 3u}) {
        const auto T = build_tower(p, 1, n);
        for (std::uint32_t j = 0; j + 1 < p; ++j) {
          const auto c = check_hasse_davenport(T, j, 1e-7);
          worst = std::max(worst, c.error);
          if (!c.passed()) o.pass = false;
        }
      }
    }
    o.detail << " q in {3,5}, n in {2,3}, max error/q^{n/2} " << fmt(worst);
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
