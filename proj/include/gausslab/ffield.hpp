#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gausslab {

/// Raised when a size or work guard would be exceeded.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polynomial over Z/p, coefficients stored low degree first.
using Poly = std::vector<std::uint32_t>;

inline constexpr std::uint64_t kDefaultSizeGuard = std::uint64_t{1} << 22;

bool is_prime(std::uint64_t n);

/// Distinct prime divisors of n in ascending order.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// p^e, throws GuardError when the result would exceed `limit`.
std::uint64_t checked_pow(std::uint64_t p, std::uint64_t e,
                          std::uint64_t limit = kDefaultSizeGuard);

/// Decomposes a prime power q into (p, m); nullopt if q is not one.
std::optional<std::pair<std::uint32_t, std::uint32_t>> split_prime_power(std::uint64_t q);

namespace poly {

Poly trim(Poly a);
Poly mulmod(const Poly& a, const Poly& b, const Poly& modulus, std::uint32_t p);
Poly powmod(const Poly& base, std::uint64_t e, const Poly& modulus, std::uint32_t p);
Poly mod(Poly a, const Poly& modulus, std::uint32_t p);
Poly sub(const Poly& a, const Poly& b, std::uint32_t p);
Poly gcd(Poly a, Poly b, std::uint32_t p);

/// Irreducibility of a monic polynomial of degree m over Z/p:
/// gcd(x^{p^k} - x, f) = 1 for 0 < k < m and x^{p^m} = x mod f.
bool is_irreducible(const Poly& f, std::uint32_t p);

std::string to_string(const Poly& f);

}  // namespace poly

struct FieldParams {
  std::uint32_t p = 2;
  std::uint32_t m = 1;
  std::uint64_t q_power = 2;
  Poly modulus;  // m+1 coefficients, monic
};

/// Lexicographically smallest monic irreducible polynomial of degree m over Z/p,
/// coefficients compared from the constant term upward.
Poly find_irreducible(std::uint32_t p, std::uint32_t m,
                      std::uint64_t size_guard = kDefaultSizeGuard);

/// Field element in discrete-log form; zero is a distinguished sentinel.
class Element {
 public:
  static constexpr std::uint32_t kZeroLog = 0xffffffffu;

  constexpr Element() = default;
  static constexpr Element zero() { return Element{}; }
  static constexpr Element from_log(std::uint32_t k) { return Element{k}; }

  constexpr bool is_zero() const { return log_ == kZeroLog; }
  constexpr std::uint32_t log() const { return log_; }

  friend constexpr bool operator==(Element, Element) = default;

 private:
  constexpr explicit Element(std::uint32_t k) : log_(k) {}
  std::uint32_t log_ = kZeroLog;
};

/// F_{p^m} in polynomial basis, with exp/log/Zech tables and the absolute trace.
///
/// Element codes are base-p integers sum c_i p^i of the coordinates of
/// sum c_i x^i. Immutable after construction.
class FieldTable {
 public:
  const FieldParams& params() const { return params_; }
  std::uint32_t p() const { return params_.p; }
  std::uint32_t m() const { return params_.m; }
  std::uint64_t size() const { return params_.q_power; }
  /// Order of the multiplicative group.
  std::uint32_t group_order() const { return order_; }

  Element generator() const { return Element::from_log(order_ == 1 ? 0 : 1); }
  std::uint32_t generator_code() const { return exp_[order_ == 1 ? 0 : 1]; }

  std::span<const std::uint32_t> exp_table() const { return exp_; }
  std::span<const std::uint32_t> log_table() const { return log_; }
  std::span<const std::uint32_t> trace_table() const { return trace_; }
  std::span<const std::uint32_t> zech_table() const { return zech_; }

  std::uint32_t code(Element x) const { return x.is_zero() ? 0 : exp_[x.log()]; }
  Element from_code(std::uint32_t c) const;
  Element one() const { return Element::from_log(0); }
  /// Image of n in the prime field.
  Element from_int(std::int64_t n) const;

  Element mul(Element a, Element b) const;
  Element div(Element a, Element b) const;
  Element inv(Element a) const;
  Element pow(Element a, std::uint64_t e) const;
  Element add(Element a, Element b) const;
  Element neg(Element a) const;
  Element sub(Element a, Element b) const { return add(a, neg(b)); }

  /// Addition through coordinate vectors; independent of the Zech table.
  Element add_by_coordinates(Element a, Element b) const;

  /// Absolute trace to F_p, as an integer in [0, p).
  std::uint32_t trace(Element x) const { return x.is_zero() ? 0 : trace_[x.log()]; }

  /// x^{p^e}.
  Element frobenius_p(Element x, std::uint32_t e) const;

  static std::shared_ptr<const FieldTable> build(std::uint32_t p, std::uint32_t m,
                                                 std::uint64_t size_guard = kDefaultSizeGuard);

  /// Rebuilds the derived tables from a stored modulus and exp table.
  static std::shared_ptr<const FieldTable> from_tables(FieldParams params,
                                                       std::vector<std::uint32_t> exp,
                                                       std::vector<std::uint32_t> trace);

 private:
  FieldTable() = default;
  void derive_tables();

  FieldParams params_;
  std::uint32_t order_ = 1;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;  // indexed by code; log_[0] unused
  std::vector<std::uint32_t> trace_;
  std::vector<std::uint32_t> zech_;  // zech_[k] = log(1 + g^k) or kZeroLog
  std::uint32_t half_order_log_ = 0;  // log(-1)
};

using FieldPtr = std::shared_ptr<const FieldTable>;

struct BuildOptions {
  std::uint64_t size_guard = kDefaultSizeGuard;
  std::optional<std::filesystem::path> cache_dir;
};

/// Builds F_{p^m}, reading and populating the table cache when one is configured.
FieldPtr build_field(std::uint32_t p, std::uint32_t m, const BuildOptions& options = {});

/// Cache directory from GAUSSLAB_CACHE, if set.
std::optional<std::filesystem::path> cache_dir_from_env();

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint32_t p,
                                 std::uint32_t m);

/// Little-endian layout: "GFTB2", u32 p, u32 m, (m+1) x u32 modulus,
/// M x u32 exp codes, M x u32 absolute traces.
void write_cache(const FieldTable& field, const std::filesystem::path& file);

/// Returns nullptr when the file is missing, truncated or inconsistent.
FieldPtr read_cache(const std::filesystem::path& file, std::uint32_t p, std::uint32_t m);

/// F_q inside F_{q^d}, realized on a single table of F_{p^{m d}}.
class SubfieldView {
 public:
  SubfieldView(FieldPtr parent, std::uint32_t base_degree);

  const FieldTable& field() const { return *parent_; }
  const FieldPtr& field_ptr() const { return parent_; }
  std::uint64_t q() const { return q_; }
  std::uint32_t d() const { return d_; }
  std::uint32_t base_degree() const { return base_degree_; }
  /// (q^d - 1)/(q - 1); F_q^* = { g^{stride * t} }.
  std::uint32_t stride() const { return stride_; }

  bool in_base(Element x) const { return x.is_zero() || x.log() % stride_ == 0; }
  /// h^t with h = g^stride the induced generator of F_q^*.
  Element base_element(std::uint32_t t) const;

  Element frobenius(Element x, std::uint32_t e) const;
  Element trace_rel(Element x) const;
  Element norm_rel(Element x) const;
  /// Tr_{F_q/F_p} for x in the base field, as an integer in [0, p).
  std::uint32_t base_trace(Element x) const;

 private:
  FieldPtr parent_;
  std::uint32_t base_degree_;
  std::uint32_t d_;
  std::uint64_t q_;
  std::uint32_t stride_;
};

/// Builds F_{q^d} with q = p^m and returns the tower view.
SubfieldView build_tower(std::uint32_t p, std::uint32_t m, std::uint32_t d,
                         const BuildOptions& options = {});

}  // namespace gausslab
