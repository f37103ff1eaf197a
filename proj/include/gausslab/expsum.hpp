#pragma once

// Gauss and Kloosterman sums over F_{q^d}, and the exact identities relating them.

#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gausslab/chars.hpp"
#include "gausslab/dft.hpp"
#include "gausslab/ffield.hpp"

namespace gausslab {

inline constexpr std::uint64_t kDefaultWorkGuard = std::uint64_t{1} << 26;

struct GaussRecord {
  CharIndex chi;
  std::complex<double> value;
  /// value / q^{d/2}; for the trivial character this is -1/q^{d/2}.
  std::complex<double> normalized;
  bool primitive = false;
  bool trivial_central = false;
  std::optional<bool> square_in_c0;  // d = 2 and chi in C^0 only
};

/// g(chi_j, psi) as a pairwise sum over the M nonzero elements.
std::complex<double> gauss_sum_direct(const AddChar& psi, CharIndex chi);

enum class GaussMethod { Auto, Direct, Chirp };

/// All M Gauss sums as one length-M DFT of k -> psi(g^k).
std::vector<GaussRecord> gauss_sums_all(const SubfieldView& view, const AddChar& psi,
                                        GaussMethod method = GaussMethod::Auto, unsigned threads = 1);

/// Values of gauss_sums_all as an Eigen vector indexed by j.
ComplexVectorXd gauss_values(const std::vector<GaussRecord>& records);

/// g(chi, psi_q) for a character of the base field F_q^*, chi(h^t) = exp(2 pi i j t/(q-1)),
/// h = g^stride, psi_q = exp(2 pi i Tr_{F_q/F_p}(.)/p).
std::complex<double> gauss_sum_base(const SubfieldView& view, std::uint32_t j_base);

enum class KlMethod { Direct, Convolution, Inversion };
std::string_view to_string(KlMethod method);

struct KloostermanTable {
  std::uint32_t n = 1;
  KlMethod method = KlMethod::Convolution;
  ComplexVectorXd values;  // indexed by log(a)

  const std::complex<double>& at(Element a) const { return values[static_cast<Eigen::Index>(a.log())]; }
};

/// Kl_n(a) by enumerating x_1..x_{n-1}; exact integer counts per trace residue.
/// Throws GuardError when M^{n-1} exceeds max_work.
std::complex<double> kloosterman_direct(const AddChar& psi, std::uint32_t n, Element a,
                                        std::uint64_t max_work = kDefaultWorkGuard);

/// Direct enumeration for every a at once; guard applies to M^n.
KloostermanTable kloosterman_table_direct(const AddChar& psi, std::uint32_t n,
                                          std::uint64_t max_work = kDefaultWorkGuard);

/// Kl_n = Kl_{n-1} * Kl_1 as cyclic convolutions over the log index.
KloostermanTable kloosterman_all(const AddChar& psi, std::uint32_t n);

/// Tables for n = 1..n_max by the convolution route; element n-1 holds Kl_n.
std::vector<KloostermanTable> kloosterman_tower(const AddChar& psi, std::uint32_t n_max);

/// (1/M) sum_j g(chi_j)^n conj(chi_j(a)).
std::complex<double> kloosterman_via_inversion(const ComplexVectorXd& gauss, std::uint32_t n, Element a);
KloostermanTable kloosterman_table_via_inversion(const ComplexVectorXd& gauss, std::uint32_t n);

/// sum over a in F_q^* of Kl_n(a, q^d).
std::complex<double> aggregate_I(const KloostermanTable& table, const SubfieldView& view);
/// sum over nonzero a with Tr_{F_{q^2}/F_q}(a) = 0; d = 2 only.
std::complex<double> aggregate_A(const KloostermanTable& table, const SubfieldView& view);

struct IntegerValue {
  std::int64_t value = 0;
  double residual = 0.0;  // max(|imag|, |real - value|)
};
IntegerValue round_to_integer(std::complex<double> z);

/// (-1)^n
constexpr std::int64_t sign_pow(std::uint32_t n) { return n % 2 == 0 ? 1 : -1; }
std::int64_t int_pow(std::int64_t base, std::uint32_t e);

struct RecurrenceRow {
  std::uint32_t n = 0;
  IntegerValue I;
  IntegerValue A;  // equals I when p = 2
  bool recurrence_ok = true;    // n >= 2
  bool difference_ok = true;    // I_n - A_n = (-q)^{n-1}(I_1 - A_1), p odd
  bool sum_ok = true;           // corrected closed form for I_n + A_n (I_n when p = 2)
  std::int64_t closed_form = 0; // value of that corrected closed form
  double displayed_form = 0.0;  // the (1 + (-q)^{n-1}) variant, kept for comparison
  bool displayed_form_matches = false;
};

struct RecurrenceReport {
  std::uint64_t q = 0;
  std::uint32_t p = 0;
  double tol = 1e-6;
  std::vector<RecurrenceRow> rows;
  bool numerical_ok = true;  // every I_n, A_n rounded within tol
  bool identity_ok = true;   // recurrences and corrected closed forms hold
  bool base_values_ok = true;  // I_1 = -1, A_1 = q-1 (p odd) or I_1 = q-1 (p = 2)
  bool passed() const { return numerical_ok && identity_ok; }
};

/// d = 2. Verifies the I/A cross recurrences and their closed forms for 2 <= n <= n_max.
RecurrenceReport check_recurrence(const SubfieldView& view, const AddChar& psi, std::uint32_t n_max,
                                  double tol = 1e-6);

struct DeligneRow {
  std::uint32_t n = 0;
  double max_abs = 0.0;
  double bound = 0.0;
  double max_ratio = 0.0;
  std::size_t violations = 0;
};

/// |Kl_n(a)| <= n Q^{(n-1)/2} over all a, Q the field size.
DeligneRow check_deligne_bound(const KloostermanTable& table, std::uint64_t field_size, double slack = 1e-9);
std::vector<DeligneRow> check_deligne_bound(const AddChar& psi, std::uint32_t n_max, double slack = 1e-9);

struct IdentityCheck {
  std::uint32_t n = 0;
  std::complex<double> lhs;
  std::complex<double> rhs;
  double error = 0.0;      // |lhs - rhs| / scale
  double tolerance = 0.0;
  bool passed() const { return error <= tolerance; }
};

/// sum_a |Kl_n(a)|^2 = ((Q-2) Q^n + 1)/(Q-1).
IdentityCheck check_parseval(const KloostermanTable& table, std::uint64_t field_size, double rel_tol = 1e-6);

/// -g(chi o N, psi o Tr) = (-g(chi, psi))^n in the tower F_q subset F_{q^n}.
IdentityCheck check_hasse_davenport(const SubfieldView& view, std::uint32_t j_base, double tol_factor = 1e-7);

/// sum_{j != 0} g(chi_j)^n = (Q-1) Kl_n(1) - (-1)^n.
IdentityCheck check_moment_identity(const ComplexVectorXd& gauss, const KloostermanTable& table,
                                    std::uint64_t field_size, double rel_tol = 1e-6);

/// sum_{chi in C^0, chi != 1} g(chi)^n = |C^0| I_n - (-1)^n.
IdentityCheck check_c0_identity(const ComplexVectorXd& gauss, const KloostermanTable& table,
                                const SubfieldView& view, double rel_tol = 1e-6);

/// Largest |g(chi^sigma) - g(chi)| over all j, sigma the q-Frobenius.
double galois_invariance_defect(const ComplexVectorXd& gauss, const SubfieldView& view);

/// Entrywise max |a - b|.
double max_deviation(const ComplexVectorXd& a, const ComplexVectorXd& b);

}  // namespace gausslab
