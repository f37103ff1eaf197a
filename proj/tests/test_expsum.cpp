#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gausslab/dft.hpp"
#include "gausslab/expsum.hpp"
#include "oracle.hpp"

using namespace gausslab;
using cd = std::complex<double>;

namespace {

oracle::NaiveField naive_of(const FieldTable& F) {
  oracle::Vec mod(F.params().modulus.begin(), F.params().modulus.end());
  return oracle::NaiveField(static_cast<int>(F.p()), mod);
}

}  // namespace

TEST_CASE("chirp DFT matches the direct DFT for awkward lengths") {
  for (int n : {1, 2, 3, 7, 24, 26, 80, 242, 600, 2186}) {
    ComplexVectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = cd(std::sin(0.3 * i + 1.0), std::cos(1.7 * i * i));
    for (int sign : {1, -1}) {
      const auto a = dft_direct<double>(x, sign);
      const auto b = dft_chirp<double>(x, sign);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9 * std::max(1, n));
    }
  }
}

TEST_CASE("cyclic convolution") {
  for (int n : {5, 127, 128, 300}) {
    ComplexVectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = cd(i % 7, -(i % 3));
      b[i] = cd(1.0 / (i + 1), i % 2);
    }
    const auto fast = cyclic_convolve<double>(a, b);
    const auto slow = cyclic_convolve_direct<double>(a, b);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-9 * n);
  }
}

TEST_CASE("quadratic Gauss sum over F_3 is i sqrt 3") {
  const auto T = build_tower(3, 1, 1);
  const AddChar psi(T.field_ptr());
  const cd g = gauss_sum_direct(psi, CharIndex{1});
  CHECK(std::abs(g - cd(0.0, std::sqrt(3.0))) < 1e-12);
}

TEST_CASE("Gauss sums against the naive oracle") {
  for (auto [p, m] : {std::pair{2u, 4u}, {3u, 2u}, {5u, 2u}, {3u, 3u}, {7u, 1u}}) {
    const auto T = build_tower(p, m, 1);
    const AddChar psi(T.field_ptr());
    const auto N = naive_of(T.field());
    const auto lg = N.logs(N.generator_code());
    const auto all = gauss_sums_all(T, psi, GaussMethod::Direct);
    const auto chirp = gauss_sums_all(T, psi, GaussMethod::Chirp);
    const double Q = static_cast<double>(T.field().size());
    for (std::uint32_t j = 0; j < T.field().group_order(); ++j) {
      const cd want = oracle::gauss(N, lg, j);
      CHECK(std::abs(all[j].value - want) < 1e-9 * Q);
      CHECK(std::abs(chirp[j].value - want) < 1e-9 * Q);
      if (j == 0) {
        CHECK(all[j].value == cd(-1.0, 0.0));
      } else {
        CHECK(std::abs(std::abs(all[j].value) - std::sqrt(Q)) < 1e-9);
        CHECK(std::abs(std::abs(all[j].normalized) - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("Gauss sum symmetries") {
  const auto T = build_tower(3, 1, 4);
  const AddChar psi(T.field_ptr());
  const auto all = gauss_sums_all(T, psi);
  const auto g = gauss_values(all);
  const std::uint32_t M = T.field().group_order();
  // g(chi) g(conj chi) = chi(-1) Q
  const double Q = static_cast<double>(T.field().size());
  for (std::uint32_t j = 1; j < M; ++j) {
    const cd chi_minus_one = (j % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(g[j] * g[(M - j) % M] - chi_minus_one * Q) < 1e-8 * Q);
  }
  CHECK(galois_invariance_defect(g, T) < 1e-9 * std::sqrt(Q));
  // Twisting psi by t multiplies g(chi) by conj(chi(t)).
  const AddChar twisted(T.field_ptr(), 5);
  const auto gt = gauss_values(gauss_sums_all(T, twisted));
  for (std::uint32_t j = 1; j < M; ++j) {
    const cd expected = g[j] * std::conj(mult_char(T.field(), CharIndex{j}, Element::from_log(5)));
    CHECK(std::abs(gt[j] - expected) < 1e-8 * Q);
  }
}

TEST_CASE("Kloosterman sums against the naive oracle") {
  const auto T = build_tower(3, 1, 2);
  const AddChar psi(T.field_ptr());
  const auto N = naive_of(T.field());
  {
    const auto F3 = build_field(3, 1);
    CHECK(std::abs(kloosterman_direct(AddChar(F3), 2, F3->one()) - cd(-1.0, 0.0)) < 1e-12);
  }
  for (std::uint32_t n = 1; n <= 3; ++n) {
    const auto conv = kloosterman_all(psi, n);
    const auto direct = kloosterman_table_direct(psi, n);
    const auto inv = kloosterman_table_via_inversion(gauss_values(gauss_sums_all(T, psi)), n);
    for (std::uint32_t k = 0; k < T.field().group_order(); ++k) {
      const Element a = Element::from_log(k);
      const cd want = oracle::kloosterman(N, static_cast<int>(n), N.decode(static_cast<int>(T.field().code(a))));
      CHECK(std::abs(conv.at(a) - want) < 1e-9);
      CHECK(std::abs(direct.at(a) - want) < 1e-9);
      CHECK(std::abs(inv.at(a) - want) < 1e-9);
    }
  }
}

TEST_CASE("Kloosterman conjugation and Galois invariance") {
  // conj Kl_n(a) = Kl_n((-1)^n a), so even n gives real values.
  const auto T = build_tower(5, 1, 2);
  const AddChar psi(T.field_ptr());
  const auto& F = T.field();
  for (std::uint32_t n : {2u, 3u}) {
    const auto K = kloosterman_all(psi, n);
    for (std::uint32_t k = 0; k < F.group_order(); ++k) {
      const Element a = Element::from_log(k);
      const Element b = n % 2 == 0 ? a : F.neg(a);
      CHECK(std::abs(std::conj(K.at(a)) - K.at(b)) < 1e-9);
      CHECK(std::abs(K.at(a) - K.at(T.frobenius(a, 1))) < 1e-9);
    }
  }
}

TEST_CASE("work guard") {
  const auto T = build_tower(3, 1, 4);
  const AddChar psi(T.field_ptr());
  CHECK_THROWS_AS(kloosterman_direct(psi, 5, T.field().one(), 1000), GuardError);
  CHECK_THROWS_AS(kloosterman_table_direct(psi, 3, 1000), GuardError);
}

TEST_CASE("Parseval examples") {
  // ((Q-2) Q^n + 1)/(Q-1): Q = 9, n = 2 gives 65; Q = 5, n = 3 gives 94.
  {
    const auto T = build_tower(3, 1, 2);
    const auto K = kloosterman_all(AddChar(T.field_ptr()), 2);
    const auto c = check_parseval(K, 9);
    // ((9-2) 81 + 1)/8 = 71; the left side from the naive oracle agrees.
    const auto N = naive_of(T.field());
    double lhs = 0.0;
    for (int code = 1; code < N.size(); ++code) lhs += std::norm(oracle::kloosterman(N, 2, N.decode(code)));
    CHECK(lhs == doctest::Approx(71.0));
    CHECK(c.rhs.real() == doctest::Approx(71.0));
    CHECK(c.passed());
  }
  {
    const auto T = build_tower(5, 1, 1);
    const auto c = check_parseval(kloosterman_all(AddChar(T.field_ptr()), 3), 5);
    CHECK(c.rhs.real() == doctest::Approx(94.0));
    CHECK(c.passed());
  }
}

TEST_CASE("aggregates and recurrence") {
  const auto T3 = build_tower(3, 1, 2);
  const AddChar psi3(T3.field_ptr());
  const auto K2 = kloosterman_all(psi3, 2);
  CHECK(round_to_integer(aggregate_I(K2, T3)).value == 7);
  CHECK(round_to_integer(aggregate_A(K2, T3)).value == -2);
  const auto T4 = build_tower(2, 2, 2);
  CHECK(round_to_integer(aggregate_I(kloosterman_all(AddChar(T4.field_ptr()), 2), T4)).value == 13);
  CHECK_THROWS_AS(aggregate_A(K2, build_tower(3, 1, 3)), std::domain_error);

  const std::int64_t expect_I[] = {-1, 7, -7, 61, -61};
  const std::int64_t expect_A[] = {2, -2, 20, -20, 182};
  const auto rep = check_recurrence(T3, psi3, 5);
  REQUIRE(rep.rows.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(rep.rows[i].I.value == expect_I[i]);
    CHECK(rep.rows[i].A.value == expect_A[i]);
    CHECK(rep.rows[i].sum_ok);
    CHECK(rep.rows[i].closed_form == expect_I[i] + expect_A[i]);
  }
  CHECK(rep.passed());
  CHECK(rep.base_values_ok);

  for (std::uint64_t q : {5u, 7u, 4u, 8u, 9u}) {
    const auto [p, m] = *split_prime_power(q);
    const auto T = build_tower(p, m, 2);
    CHECK(check_recurrence(T, AddChar(T.field_ptr()), 5).passed());
  }
}

TEST_CASE("brute-force aggregates from the oracle") {
  // I_n and A_n summed from naive Kloosterman sums in F_25, independent of the library.
  const auto T = build_tower(5, 1, 2);
  const auto N = naive_of(T.field());
  const auto K = kloosterman_all(AddChar(T.field_ptr()), 2);
  cd I = 0, A = 0;
  for (int c = 1; c < N.size(); ++c) {
    const auto a = N.decode(c);
    const cd kl = oracle::kloosterman(N, 2, a);
    if (N.pow(a, 4) == N.one()) I += kl;                        // a in F_5^*
    if (N.add(a, N.pow(a, 5)) == oracle::Vec(N.m, 0)) A += kl;  // Tr(a) = 0
  }
  CHECK(std::abs(I - cd(21.0, 0.0)) < 1e-9);
  CHECK(std::abs(A - cd(-4.0, 0.0)) < 1e-9);
  CHECK(std::abs(aggregate_I(K, T) - I) < 1e-9);
  CHECK(std::abs(aggregate_A(K, T) - A) < 1e-9);
}

TEST_CASE("Deligne bound, moment and C^0 identities") {
  for (auto [p, m, d] : {std::tuple{2u, 1u, 3u}, {3u, 1u, 2u}, {5u, 1u, 2u}, {3u, 1u, 3u}, {2u, 2u, 3u}}) {
    const auto T = build_tower(p, m, d);
    const AddChar psi(T.field_ptr());
    const auto g = gauss_values(gauss_sums_all(T, psi));
    for (const auto& row : check_deligne_bound(psi, 4)) CHECK(row.violations == 0);
    for (std::uint32_t n = 1; n <= 5; ++n) {
      const auto K = kloosterman_all(psi, n);
      CHECK(check_moment_identity(g, K, T.field().size()).passed());
      CHECK(check_c0_identity(g, K, T).passed());
    }
  }
}

TEST_CASE("Hasse-Davenport lifting") {
  for (std::uint32_t p : {3u, 5u}) {
    for (std::uint32_t n : {2u, 3u}) {
      const auto T = build_tower(p, 1, n);
      for (std::uint32_t j = 0; j + 1 < p; ++j) CHECK(check_hasse_davenport(T, j).passed());
    }
  }
  // base field larger than prime
  const auto T = build_tower(2, 2, 2);
  for (std::uint32_t j = 0; j < 3; ++j) CHECK(check_hasse_davenport(T, j).passed());
}

TEST_CASE("integer helpers") {
  CHECK(int_pow(-3, 3) == -27);
  CHECK(sign_pow(4) == 1);
  CHECK(sign_pow(5) == -1);
  const auto r = round_to_integer(cd(6.9999999, 1e-8));
  CHECK(r.value == 7);
  CHECK(r.residual < 1e-6);
}
