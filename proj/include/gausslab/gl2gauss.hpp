#pragma once

// Cuspidal characters of GL_2(F_q) and their matrix Gauss sums.
//
// Everything lives in the tower F_q subset F_{q^2}. The additive character on
// F_q is psi_q = exp(2 pi i Tr_{F_q/F_p}(.)/p), so psi_q o Tr_{F_{q^2}/F_q} is
// the standard character of F_{q^2}.

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gausslab/chars.hpp"
#include "gausslab/ffield.hpp"

namespace gausslab {

enum class ClassKind { Central, NonSemisimple, Split, Elliptic };

std::string_view to_string(ClassKind kind);

struct ConjClassGL2 {
  ClassKind kind = ClassKind::Central;
  /// Central/NonSemisimple: eigenvalue a. Split: a, b with log(a) < log(b).
  /// Elliptic: eigenvalue x in F_{q^2} \ F_q, the smaller-log member of {x, x^q}.
  Element a;
  Element b;
  std::uint64_t size = 0;
  Element trace;  // matrix trace, an element of F_q
};

/// |GL_2(F_q)| = (q^2 - 1)(q^2 - q).
std::uint64_t gl2_order(std::uint64_t q);

/// Ordered Central, NonSemisimple, Split, Elliptic; by log index within a kind. d = 2.
std::vector<ConjClassGL2> conj_classes(const SubfieldView& view);

struct CuspidalGL2Char {
  CharIndex chi;
  std::uint64_t q = 0;
  std::vector<std::complex<double>> values;  // aligned with conj_classes

  std::uint64_t dimension() const { return q - 1; }
};

/// Throws std::domain_error if chi is not primitive.
CuspidalGL2Char cuspidal_char(const SubfieldView& view, const std::vector<ConjClassGL2>& classes, CharIndex chi);

/// sum_C |C| theta(C) conj(phi(C)).
std::complex<double> class_inner_product(const std::vector<ConjClassGL2>& classes, const CuspidalGL2Char& theta,
                                         const CuspidalGL2Char& phi);

/// Scalar g(rho, psi) = (1/dim) sum_C |C| theta(C) psi_q(trace C).
std::complex<double> matrix_gauss_sum(const SubfieldView& view, const std::vector<ConjClassGL2>& classes,
                                      const CuspidalGL2Char& theta);

struct KondoRow {
  CharIndex chi;
  std::complex<double> matrix_sum;  // g(rho_chi, psi)
  std::complex<double> abelian_sum; // g(chi, psi o Tr)
  double residual = 0.0;            // |matrix_sum - (-1)^{d-1} q * abelian_sum| / q^2, d = 2
  double unsigned_residual = 0.0;   // |matrix_sum - q * abelian_sum| / q^2
  double abs_defect = 0.0;          // ||matrix_sum| - q^2| / q^2
  double norm_defect = 0.0;         // |<theta, theta>/|G| - 1|
};

struct KondoReport {
  std::uint64_t q = 0;
  double tol = 1e-6;
  std::vector<KondoRow> rows;
  std::size_t orbits = 0;
  /// Signed identity g(rho) = -q g(chi), unit modulus and norm checks.
  bool passed() const;
  /// The identity without the (-1)^{d-1} factor; fails for every primitive chi.
  bool unsigned_passed() const;
};

KondoReport verify_kondo(const SubfieldView& view, double tol = 1e-6, unsigned threads = 1);

}  // namespace gausslab
