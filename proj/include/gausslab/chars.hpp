#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gausslab/ffield.hpp"

namespace gausslab {

/// A fraction num/den of a full turn, kept reduced mod den.
struct Angle {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  bool is_zero() const { return num % den == 0; }
  std::complex<double> unit() const;
  friend Angle operator+(Angle a, Angle b);
  friend bool operator==(Angle a, Angle b);
};

/// psi(x) = exp(2 pi i Tr(t x) / p) with t = g^twist; twist 0 is the standard character.
class AddChar {
 public:
  explicit AddChar(FieldPtr field, std::uint32_t twist_log = 0);

  const FieldTable& field() const { return *field_; }
  std::uint32_t twist_log() const { return twist_; }

  /// Trace value (in [0, p)) of t * g^k.
  std::uint32_t trace_at_log(std::uint32_t k) const {
    return field_->trace_table()[(static_cast<std::uint64_t>(k) + twist_) % field_->group_order()];
  }
  std::uint32_t trace_of(Element x) const { return x.is_zero() ? 0 : trace_at_log(x.log()); }

  Angle angle(Element x) const { return Angle{trace_of(x), field_->p()}; }
  std::complex<double> operator()(Element x) const { return angle(x).unit(); }

 private:
  FieldPtr field_;
  std::uint32_t twist_;
};

/// Multiplicative character chi_j(g^k) = exp(2 pi i j k / M).
struct CharIndex {
  std::uint32_t j = 0;
  friend auto operator<=>(CharIndex, CharIndex) = default;
};

/// Throws std::domain_error at x = 0.
Angle mult_char_angle(const FieldTable& field, CharIndex chi, Element x);
std::complex<double> mult_char(const FieldTable& field, CharIndex chi, Element x);

inline CharIndex conjugate(const FieldTable& field, CharIndex chi) {
  const auto M = field.group_order();
  return CharIndex{(M - chi.j % M) % M};
}

/// Galois conjugate chi o Frobenius_q^e, index q^e j mod M.
CharIndex galois_conjugate(const SubfieldView& view, CharIndex chi, std::uint32_t e = 1);

/// {j, qj, ..., q^{d-1} j} mod M, without repeats, in generation order.
std::vector<std::uint32_t> galois_orbit(const SubfieldView& view, CharIndex chi);

/// True iff q^e j != j (mod M) for every proper divisor e of d. The trivial
/// character is never primitive.
bool is_primitive(const SubfieldView& view, CharIndex chi);

/// True iff chi_j is trivial on F_q^*, i.e. (q - 1) | j.
bool has_trivial_central(const SubfieldView& view, CharIndex chi);

/// d = 2, chi in C^0. Squares within C^0 (all of C^0 when p = 2).
bool is_square_in_C0(const SubfieldView& view, CharIndex chi);

/// Canonical nonzero element of F_{q^2} with relative trace zero.
struct TraceZeroWitness {
  Element sqrt_delta;

  /// Smallest log index with trace zero; requires d = 2.
  static TraceZeroWitness find(const SubfieldView& view);
};

/// chi(sqrt(delta)) == 1, decided in exact index arithmetic. d = 2, p odd, chi in C^0.
bool square_criterion_epsilon(const SubfieldView& view, const TraceZeroWitness& witness, CharIndex chi);

enum class FamilyTag { AllNontrivial, Primitive, C0, C0Primitive, C0S, C0NS };

std::string_view to_string(FamilyTag tag);
std::optional<FamilyTag> parse_family(std::string_view name);

/// Throws std::domain_error when the family is undefined for the tower.
void check_family(const SubfieldView& view, FamilyTag tag);

bool in_family(const SubfieldView& view, FamilyTag tag, CharIndex chi);

/// Sorted ascending.
std::vector<std::uint32_t> enumerate_family(const SubfieldView& view, FamilyTag tag);

/// sum over chi in the family of chi(x), x nonzero.
std::complex<double> family_character_sum(const SubfieldView& view, FamilyTag tag, Element x);

}  // namespace gausslab
