#include "gausslab/ffield.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gausslab {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t result = 1;
  base %= m;
  while (e > 0) {
    if (e & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    e >>= 1;
  }
  return result;
}

std::uint32_t inv_mod_prime(std::uint32_t a, std::uint32_t p) {
  return static_cast<std::uint32_t>(powmod_u64(a, p - 2, p));
}

Poly code_to_poly(std::uint32_t code, std::uint32_t p, std::uint32_t m) {
  Poly out(m, 0);
  for (std::uint32_t i = 0; i < m; ++i) {
    out[i] = code % p;
    code /= p;
  }
  return out;
}

std::uint32_t poly_to_code(const Poly& a, std::uint32_t p, std::uint32_t m) {
  std::uint32_t code = 0;
  for (std::uint32_t i = m; i-- > 0;) {
    code = code * p + (i < a.size() ? a[i] : 0);
  }
  return code;
}

std::uint32_t add_codes(std::uint32_t a, std::uint32_t b, std::uint32_t p, std::uint32_t m) {
  if (p == 2) return a ^ b;
  std::uint32_t out = 0;
  std::uint32_t scale = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    out += ((a % p + b % p) % p) * scale;
    a /= p;
    b /= p;
    scale *= p;
  }
  return out;
}

void check_guard(std::uint32_t p, std::uint32_t m, std::uint64_t size_guard) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic " + std::to_string(p) + " is not prime");
  if (m == 0) throw std::invalid_argument("extension degree must be positive");
  (void)checked_pow(p, m, size_guard);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint64_t checked_pow(std::uint64_t p, std::uint64_t e, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > limit / p) {
      throw GuardError(std::to_string(p) + "^" + std::to_string(e) + " exceeds size guard " +
                       std::to_string(limit));
    }
    r *= p;
  }
  if (r > limit) {
    throw GuardError(std::to_string(p) + "^" + std::to_string(e) + " exceeds size guard " +
                     std::to_string(limit));
  }
  return r;
}

std::optional<std::pair<std::uint32_t, std::uint32_t>> split_prime_power(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  auto factors = prime_factors(q);
  if (factors.size() != 1) return std::nullopt;
  std::uint32_t m = 0;
  while (q > 1) {
    q /= factors[0];
    ++m;
  }
  return std::pair{static_cast<std::uint32_t>(factors[0]), m};
}

namespace poly {

Poly trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

Poly mod(Poly a, const Poly& modulus, std::uint32_t p) {
  a = trim(std::move(a));
  const Poly f = trim(modulus);
  if (f.empty()) throw std::invalid_argument("division by zero polynomial");
  const std::size_t df = f.size() - 1;
  const std::uint32_t lead_inv = inv_mod_prime(f.back(), p);
  while (a.size() > df) {
    const std::size_t shift = a.size() - 1 - df;
    const std::uint64_t c = std::uint64_t{a.back()} * lead_inv % p;
    for (std::size_t i = 0; i <= df; ++i) {
      const std::uint64_t sub = c * f[i] % p;
      a[i + shift] = static_cast<std::uint32_t>((a[i + shift] + p - sub) % p);
    }
    a = trim(std::move(a));
  }
  return a;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& modulus, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t{a[i]} * b[j]) % p);
    }
  }
  return mod(std::move(prod), modulus, p);
}

Poly powmod(const Poly& base, std::uint64_t e, const Poly& modulus, std::uint32_t p) {
  Poly result = mod(Poly{1}, modulus, p);
  Poly b = mod(base, modulus, p);
  while (e > 0) {
    if (e & 1) result = mulmod(result, b, modulus, p);
    e >>= 1;
    if (e > 0) b = mulmod(b, b, modulus, p);
  }
  return result;
}

Poly sub(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint32_t x = i < a.size() ? a[i] : 0;
    const std::uint32_t y = i < b.size() ? b[i] : 0;
    out[i] = (x + p - y) % p;
  }
  return trim(std::move(out));
}

Poly gcd(Poly a, Poly b, std::uint32_t p) {
  a = trim(std::move(a));
  b = trim(std::move(b));
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const std::uint32_t inv = inv_mod_prime(a.back(), p);
    for (auto& c : a) c = static_cast<std::uint32_t>(std::uint64_t{c} * inv % p);
  }
  return a;
}

bool is_irreducible(const Poly& f_in, std::uint32_t p) {
  const Poly f = trim(f_in);
  if (f.size() < 2) return false;
  const std::size_t m = f.size() - 1;
  if (m == 1) return true;
  const Poly x{0, 1};
  Poly xp = x;
  for (std::size_t k = 1; k <= m; ++k) {
    xp = powmod(xp, p, f, p);
    if (k < m) {
      if (gcd(sub(xp, x, p), f, p).size() != 1) return false;
    } else if (sub(xp, x, p) != Poly{}) {
      return false;
    }
  }
  return true;
}

std::string to_string(const Poly& f) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = f.size(); i-- > 0;) {
    if (f[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || f[i] != 1) os << f[i];
    if (i >= 1) os << "x";
    if (i >= 2) os << "^" << i;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace poly

Poly find_irreducible(std::uint32_t p, std::uint32_t m, std::uint64_t size_guard) {
  check_guard(p, m, size_guard);
  // Counter over (c0, ..., c_{m-1}) with c0 most significant.
  Poly coeffs(m, 0);
  while (true) {
    Poly f = coeffs;
    f.push_back(1);
    if (poly::is_irreducible(f, p)) return f;
    std::size_t i = m;
    while (i > 0) {
      --i;
      if (++coeffs[i] < p) break;
      coeffs[i] = 0;
      if (i == 0) throw std::logic_error("no irreducible polynomial found");
    }
  }
}

Element FieldTable::from_code(std::uint32_t c) const {
  if (c == 0) return Element::zero();
  if (c >= log_.size()) throw std::out_of_range("element code out of range");
  return Element::from_log(log_[c]);
}

Element FieldTable::from_int(std::int64_t n) const {
  const auto p = static_cast<std::int64_t>(params_.p);
  return from_code(static_cast<std::uint32_t>(((n % p) + p) % p));
}

Element FieldTable::mul(Element a, Element b) const {
  if (a.is_zero() || b.is_zero()) return Element::zero();
  return Element::from_log(static_cast<std::uint32_t>((std::uint64_t{a.log()} + b.log()) % order_));
}

Element FieldTable::inv(Element a) const {
  if (a.is_zero()) throw std::domain_error("inverse of zero");
  return Element::from_log(a.log() == 0 ? 0 : order_ - a.log());
}

Element FieldTable::div(Element a, Element b) const { return mul(a, inv(b)); }

Element FieldTable::pow(Element a, std::uint64_t e) const {
  if (a.is_zero()) return e == 0 ? one() : Element::zero();
  return Element::from_log(static_cast<std::uint32_t>(mulmod_u64(a.log(), e % order_, order_)));
}

Element FieldTable::add(Element a, Element b) const {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::uint32_t diff = (b.log() + order_ - a.log()) % order_;
  const std::uint32_t z = zech_[diff];
  if (z == Element::kZeroLog) return Element::zero();
  return Element::from_log(static_cast<std::uint32_t>((std::uint64_t{a.log()} + z) % order_));
}

Element FieldTable::neg(Element a) const {
  if (a.is_zero()) return a;
  return Element::from_log(static_cast<std::uint32_t>((std::uint64_t{a.log()} + half_order_log_) % order_));
}

Element FieldTable::add_by_coordinates(Element a, Element b) const {
  return from_code(add_codes(code(a), code(b), params_.p, params_.m));
}

Element FieldTable::frobenius_p(Element x, std::uint32_t e) const {
  if (x.is_zero()) return x;
  const std::uint64_t factor = powmod_u64(params_.p, e, order_);
  return Element::from_log(static_cast<std::uint32_t>(mulmod_u64(x.log(), factor, order_)));
}

void FieldTable::derive_tables() {
  const std::uint32_t p = params_.p;
  const auto size = static_cast<std::size_t>(params_.q_power);
  log_.assign(size, Element::kZeroLog);
  for (std::uint32_t k = 0; k < order_; ++k) {
    const std::uint32_t c = exp_[k];
    if (c == 0 || c >= size || log_[c] != Element::kZeroLog) {
      throw std::logic_error("exp table is not a bijection onto the nonzero elements");
    }
    log_[c] = k;
  }
  zech_.resize(order_);
  for (std::uint32_t k = 0; k < order_; ++k) {
    const std::uint32_t c = exp_[k];
    const std::uint32_t c0 = c % p;
    const std::uint32_t shifted = c - c0 + (c0 + 1) % p;
    zech_[k] = shifted == 0 ? Element::kZeroLog : log_[shifted];
  }
  half_order_log_ = p == 2 ? 0 : order_ / 2;
}

FieldPtr FieldTable::build(std::uint32_t p, std::uint32_t m, std::uint64_t size_guard) {
  check_guard(p, m, size_guard);
  FieldParams params;
  params.p = p;
  params.m = m;
  params.q_power = checked_pow(p, m, size_guard);
  params.modulus = find_irreducible(p, m, size_guard);

  const auto order = static_cast<std::uint32_t>(params.q_power - 1);
  const auto factors = prime_factors(order);

  // Smallest code of exact order M.
  Poly generator;
  for (std::uint32_t c = 1; c < params.q_power; ++c) {
    Poly cand = code_to_poly(c, p, m);
    if (poly::powmod(cand, order, params.modulus, p) != Poly{1}) continue;
    bool full = true;
    for (auto r : factors) {
      if (poly::powmod(cand, order / r, params.modulus, p) == Poly{1}) {
        full = false;
        break;
      }
    }
    if (full) {
      generator = poly::trim(std::move(cand));
      break;
    }
  }
  if (generator.empty()) {
    throw std::logic_error("no generator found; modulus is not irreducible");
  }

  std::vector<std::uint32_t> exp(order);
  Poly cur{1};
  for (std::uint32_t k = 0; k < order; ++k) {
    exp[k] = poly_to_code(cur, p, m);
    cur = poly::mulmod(cur, generator, params.modulus, p);
  }

  auto table = std::shared_ptr<FieldTable>(new FieldTable());
  table->params_ = std::move(params);
  table->order_ = order;
  table->exp_ = std::move(exp);
  table->derive_tables();

  // Trace of each basis monomial x^i, then extend F_p-linearly.
  std::vector<std::uint32_t> basis_trace(m, 0);
  for (std::uint32_t i = 0; i < m; ++i) {
    const Element xi = table->from_code(static_cast<std::uint32_t>(checked_pow(p, i, ~std::uint64_t{0})));
    std::uint32_t acc = 0;
    for (std::uint32_t j = 0; j < m; ++j) acc = add_codes(acc, table->code(table->frobenius_p(xi, j)), p, m);
    if (acc >= p) throw std::logic_error("trace left the prime field");
    basis_trace[i] = acc;
  }
  table->trace_.resize(order);
  for (std::uint32_t k = 0; k < order; ++k) {
    std::uint32_t c = table->exp_[k];
    std::uint64_t t = 0;
    for (std::uint32_t i = 0; i < m; ++i) {
      t += std::uint64_t{c % p} * basis_trace[i];
      c /= p;
    }
    table->trace_[k] = static_cast<std::uint32_t>(t % p);
  }
  return table;
}

FieldPtr FieldTable::from_tables(FieldParams params, std::vector<std::uint32_t> exp,
                                 std::vector<std::uint32_t> trace) {
  if (exp.size() + 1 != params.q_power || trace.size() != exp.size()) {
    throw std::invalid_argument("table sizes do not match field size");
  }
  auto table = std::shared_ptr<FieldTable>(new FieldTable());
  table->order_ = static_cast<std::uint32_t>(exp.size());
  table->params_ = std::move(params);
  table->exp_ = std::move(exp);
  table->trace_ = std::move(trace);
  table->derive_tables();
  return table;
}

std::optional<std::filesystem::path> cache_dir_from_env() {
  if (const char* env = std::getenv("GAUSSLAB_CACHE"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint32_t p, std::uint32_t m) {
  return dir / ("f_" + std::to_string(p) + "_" + std::to_string(m) + ".tbl");
}

namespace {

constexpr std::array<char, 5> kMagic{'G', 'F', 'T', 'B', '2'};

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), 4);
}

bool get_u32(std::istream& is, std::uint32_t& v) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) return false;
  v = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
      (std::uint32_t{b[3]} << 24);
  return true;
}

}  // namespace

void write_cache(const FieldTable& field, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open cache file " + file.string());
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, field.p());
  put_u32(os, field.m());
  for (auto c : field.params().modulus) put_u32(os, c);
  for (auto c : field.exp_table()) put_u32(os, c);
  for (auto t : field.trace_table()) put_u32(os, t);
  if (!os) throw std::runtime_error("failed writing cache file " + file.string());
}

FieldPtr read_cache(const std::filesystem::path& file, std::uint32_t p, std::uint32_t m) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return nullptr;
  std::array<char, 5> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) return nullptr;
  std::uint32_t fp = 0;
  std::uint32_t fm = 0;
  if (!get_u32(is, fp) || !get_u32(is, fm) || fp != p || fm != m) return nullptr;

  FieldParams params;
  params.p = p;
  params.m = m;
  try {
    params.q_power = checked_pow(p, m, ~std::uint64_t{0} >> 1);
  } catch (const GuardError&) {
    return nullptr;
  }
  params.modulus.resize(m + 1);
  for (auto& c : params.modulus) {
    if (!get_u32(is, c)) return nullptr;
  }
  if (params.modulus != find_irreducible(p, m, params.q_power)) return nullptr;

  const auto order = static_cast<std::size_t>(params.q_power - 1);
  std::vector<std::uint32_t> exp(order);
  for (auto& c : exp) {
    if (!get_u32(is, c)) return nullptr;
  }
  std::vector<std::uint32_t> trace(order);
  for (auto& t : trace) {
    if (!get_u32(is, t)) return nullptr;
  }
  if (is.peek() != std::char_traits<char>::eof()) return nullptr;

  // Spot-check multiplicative and trace consistency on a deterministic sample.
  if (exp.empty() || exp[0] != 1) return nullptr;
  const Poly g = code_to_poly(exp[order > 1 ? 1 : 0], p, m);
  const std::size_t step = std::max<std::size_t>(1, order / 64);
  for (std::size_t k = 0; k + 1 < order; k += step) {
    const Poly next = poly::mulmod(code_to_poly(exp[k], p, m), g, params.modulus, p);
    if (poly_to_code(next, p, m) != exp[k + 1]) return nullptr;
  }
  for (auto t : trace) {
    if (t >= p) return nullptr;
  }
  try {
    return FieldTable::from_tables(std::move(params), std::move(exp), std::move(trace));
  } catch (const std::exception&) {
    return nullptr;
  }
}

FieldPtr build_field(std::uint32_t p, std::uint32_t m, const BuildOptions& options) {
  check_guard(p, m, options.size_guard);
  if (options.cache_dir) {
    const auto file = cache_path(*options.cache_dir, p, m);
    if (auto cached = read_cache(file, p, m)) return cached;
    auto table = FieldTable::build(p, m, options.size_guard);
    std::error_code ec;
    std::filesystem::create_directories(*options.cache_dir, ec);
    if (!ec) {
      const auto tmp = file.string() + ".tmp";
      try {
        write_cache(*table, tmp);
        std::filesystem::rename(tmp, file, ec);
      } catch (const std::exception&) {
        std::filesystem::remove(tmp, ec);
      }
    }
    return table;
  }
  return FieldTable::build(p, m, options.size_guard);
}

SubfieldView::SubfieldView(FieldPtr parent, std::uint32_t base_degree)
    : parent_(std::move(parent)), base_degree_(base_degree) {
  if (!parent_) throw std::invalid_argument("null field");
  if (base_degree_ == 0 || parent_->m() % base_degree_ != 0) {
    throw std::invalid_argument("base degree must divide the field degree");
  }
  d_ = parent_->m() / base_degree_;
  q_ = checked_pow(parent_->p(), base_degree_, ~std::uint64_t{0});
  stride_ = static_cast<std::uint32_t>(parent_->group_order() / (q_ - 1));
}

Element SubfieldView::base_element(std::uint32_t t) const {
  const std::uint64_t k = std::uint64_t{stride_} * t % parent_->group_order();
  return Element::from_log(static_cast<std::uint32_t>(k));
}

Element SubfieldView::frobenius(Element x, std::uint32_t e) const {
  return parent_->frobenius_p(x, base_degree_ * e);
}

Element SubfieldView::trace_rel(Element x) const {
  Element acc = Element::zero();
  for (std::uint32_t i = 0; i < d_; ++i) acc = parent_->add(acc, frobenius(x, i));
  return acc;
}

Element SubfieldView::norm_rel(Element x) const {
  if (x.is_zero()) return x;
  return parent_->pow(x, stride_);
}

std::uint32_t SubfieldView::base_trace(Element x) const {
  Element acc = Element::zero();
  for (std::uint32_t i = 0; i < base_degree_; ++i) acc = parent_->add(acc, parent_->frobenius_p(x, i));
  const std::uint32_t c = parent_->code(acc);
  if (c >= parent_->p()) throw std::domain_error("element is not in the base field");
  return c;
}

SubfieldView build_tower(std::uint32_t p, std::uint32_t m, std::uint32_t d, const BuildOptions& options) {
  if (d == 0) throw std::invalid_argument("degree d must be positive");
  if (m == 0) throw std::invalid_argument("extension degree must be positive");
  return SubfieldView(build_field(p, m * d, options), m);
}

}  // namespace gausslab
