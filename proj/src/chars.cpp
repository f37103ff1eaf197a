#include "gausslab/chars.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <span>
#include <stdexcept>

#include "gausslab/dft.hpp"

namespace gausslab {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

bool is_odd_char(const SubfieldView& view) { return view.field().p() != 2; }

}  // namespace

std::complex<double> Angle::unit() const { return unit_root<double>(num, den); }

Angle operator+(Angle a, Angle b) {
  const std::uint64_t den = std::lcm(a.den, b.den);
  const std::uint64_t num = (a.num % a.den) * (den / a.den) + (b.num % b.den) * (den / b.den);
  return Angle{num % den, den};
}

bool operator==(Angle a, Angle b) {
  const std::uint64_t den = std::lcm(a.den, b.den);
  return (a.num % a.den) * (den / a.den) == (b.num % b.den) * (den / b.den);
}

AddChar::AddChar(FieldPtr field, std::uint32_t twist_log) : field_(std::move(field)), twist_(0) {
  if (!field_) throw std::invalid_argument("null field");
  twist_ = twist_log % field_->group_order();
}

Angle mult_char_angle(const FieldTable& field, CharIndex chi, Element x) {
  if (x.is_zero()) throw std::domain_error("multiplicative character evaluated at zero");
  const std::uint64_t M = field.group_order();
  return Angle{mul_mod(chi.j % M, x.log(), M), M};
}

std::complex<double> mult_char(const FieldTable& field, CharIndex chi, Element x) {
  return mult_char_angle(field, chi, x).unit();
}

CharIndex galois_conjugate(const SubfieldView& view, CharIndex chi, std::uint32_t e) {
  const std::uint64_t M = view.field().group_order();
  const std::uint64_t factor = pow_mod(view.q(), e, M);
  return CharIndex{static_cast<std::uint32_t>(mul_mod(chi.j % M, factor, M))};
}

std::vector<std::uint32_t> galois_orbit(const SubfieldView& view, CharIndex chi) {
  std::vector<std::uint32_t> orbit;
  CharIndex cur{chi.j % view.field().group_order()};
  for (std::uint32_t i = 0; i < view.d(); ++i) {
    if (std::find(orbit.begin(), orbit.end(), cur.j) != orbit.end()) break;
    orbit.push_back(cur.j);
    cur = galois_conjugate(view, cur);
  }
  return orbit;
}

bool is_primitive(const SubfieldView& view, CharIndex chi) {
  const std::uint64_t M = view.field().group_order();
  const std::uint64_t j = chi.j % M;
  if (j == 0) return false;
  for (std::uint32_t e = 1; e < view.d(); ++e) {
    if (view.d() % e != 0) continue;
    if (galois_conjugate(view, chi, e).j == j) return false;
  }
  return true;
}

bool has_trivial_central(const SubfieldView& view, CharIndex chi) {
  return chi.j % (view.q() - 1) == 0;
}

bool is_square_in_C0(const SubfieldView& view, CharIndex chi) {
  if (view.d() != 2) throw std::domain_error("square classification requires d = 2");
  if (!has_trivial_central(view, chi)) throw std::domain_error("character is not in C^0");
  if (!is_odd_char(view)) return true;
  const std::uint64_t t = (chi.j / (view.q() - 1)) % (view.q() + 1);
  return t % 2 == 0;
}

TraceZeroWitness TraceZeroWitness::find(const SubfieldView& view) {
  if (view.d() != 2) throw std::domain_error("trace-zero witness requires d = 2");
  const auto& field = view.field();
  for (std::uint32_t k = 0; k < field.group_order(); ++k) {
    const Element x = Element::from_log(k);
    if (view.trace_rel(x).is_zero()) return TraceZeroWitness{x};
  }
  throw std::logic_error("no trace-zero element found");
}

bool square_criterion_epsilon(const SubfieldView& view, const TraceZeroWitness& witness, CharIndex chi) {
  if (!is_odd_char(view)) throw std::domain_error("epsilon square criterion requires odd characteristic");
  if (view.d() != 2) throw std::domain_error("epsilon square criterion requires d = 2");
  if (!has_trivial_central(view, chi)) throw std::domain_error("character is not in C^0");
  return mult_char_angle(view.field(), chi, witness.sqrt_delta).is_zero();
}

std::string_view to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::AllNontrivial: return "ALL_NONTRIVIAL";
    case FamilyTag::Primitive: return "PRIMITIVE";
    case FamilyTag::C0: return "C0";
    case FamilyTag::C0Primitive: return "C0_PRIMITIVE";
    case FamilyTag::C0S: return "C0S";
    case FamilyTag::C0NS: return "C0NS";
  }
  return "?";
}

std::optional<FamilyTag> parse_family(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (auto tag : {FamilyTag::AllNontrivial, FamilyTag::Primitive, FamilyTag::C0, FamilyTag::C0Primitive,
                   FamilyTag::C0S, FamilyTag::C0NS}) {
    if (to_string(tag) == upper) return tag;
  }
  if (upper == "ALL") return FamilyTag::AllNontrivial;
  return std::nullopt;
}

void check_family(const SubfieldView& view, FamilyTag tag) {
  if (tag == FamilyTag::C0S || tag == FamilyTag::C0NS) {
    if (view.d() != 2) throw std::domain_error(std::string(to_string(tag)) + " requires d = 2");
    if (tag == FamilyTag::C0NS && !is_odd_char(view)) {
      throw std::domain_error("C0NS is undefined in characteristic 2");
    }
  }
}

bool in_family(const SubfieldView& view, FamilyTag tag, CharIndex chi) {
  switch (tag) {
    case FamilyTag::AllNontrivial: return chi.j % view.field().group_order() != 0;
    case FamilyTag::Primitive: return is_primitive(view, chi);
    case FamilyTag::C0: return has_trivial_central(view, chi);
    case FamilyTag::C0Primitive: return has_trivial_central(view, chi) && is_primitive(view, chi);
    case FamilyTag::C0S: return has_trivial_central(view, chi) && is_square_in_C0(view, chi);
    case FamilyTag::C0NS: return has_trivial_central(view, chi) && !is_square_in_C0(view, chi);
  }
  return false;
}

std::vector<std::uint32_t> enumerate_family(const SubfieldView& view, FamilyTag tag) {
  check_family(view, tag);
  std::vector<std::uint32_t> out;
  const std::uint32_t M = view.field().group_order();
  for (std::uint32_t j = 0; j < M; ++j) {
    if (in_family(view, tag, CharIndex{j})) out.push_back(j);
  }
  return out;
}

std::complex<double> family_character_sum(const SubfieldView& view, FamilyTag tag, Element x) {
  std::vector<std::complex<double>> terms;
  for (auto j : enumerate_family(view, tag)) terms.push_back(mult_char(view.field(), CharIndex{j}, x));
  return pairwise_sum(std::span<const std::complex<double>>(terms));
}

}  // namespace gausslab
