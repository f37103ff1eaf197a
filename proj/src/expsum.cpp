#include "gausslab/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gausslab/parallel.hpp"

namespace gausslab {

namespace {

using cd = std::complex<double>;

cd ipow(cd z, std::uint32_t n) {
  cd r{1.0, 0.0};
  for (std::uint32_t i = 0; i < n; ++i) r *= z;
  return r;
}

cd sum_of(const std::vector<cd>& terms) { return pairwise_sum(std::span<const cd>(terms)); }

/// sum_r counts[r] * exp(2 pi i r / p)
cd from_residue_counts(std::span<const std::uint64_t> counts, std::uint32_t p) {
  std::vector<cd> terms(p);
  for (std::uint32_t r = 0; r < p; ++r) terms[r] = static_cast<double>(counts[r]) * unit_root<double>(r, p);
  return sum_of(terms);
}

std::uint64_t guarded_power(std::uint64_t base, std::uint32_t e, std::uint64_t max_work) {
  std::uint64_t w = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    if (base != 0 && w > max_work / base) {
      throw GuardError("brute-force work " + std::to_string(base) + "^" + std::to_string(e) +
                       " exceeds work guard " + std::to_string(max_work));
    }
    w *= base;
  }
  return w;
}

void require_nonzero(Element a) {
  if (a.is_zero()) throw std::domain_error("Kloosterman sum requires a != 0");
}

void require_order(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("Kloosterman order must be >= 1");
}

}  // namespace

std::complex<double> gauss_sum_direct(const AddChar& psi, CharIndex chi) {
  const auto& field = psi.field();
  const std::uint32_t M = field.group_order();
  const std::uint32_t p = field.p();
  std::vector<cd> terms(M);
  for (std::uint32_t k = 0; k < M; ++k) {
    const Angle a = mult_char_angle(field, chi, Element::from_log(k)) + Angle{psi.trace_at_log(k), p};
    terms[k] = a.unit();
  }
  return sum_of(terms);
}

std::vector<GaussRecord> gauss_sums_all(const SubfieldView& view, const AddChar& psi, GaussMethod method,
                                        unsigned threads) {
  const auto& field = view.field();
  const std::uint32_t M = field.group_order();
  ComplexVectorXd values(M);
  if (method == GaussMethod::Direct) {
    parallel_for(M, threads, [&](std::size_t j) {
      values[static_cast<Eigen::Index>(j)] = gauss_sum_direct(psi, CharIndex{static_cast<std::uint32_t>(j)});
    });
  } else {
    ComplexVectorXd f(M);
    for (std::uint32_t k = 0; k < M; ++k) f[k] = unit_root<double>(psi.trace_at_log(k), field.p());
    values = method == GaussMethod::Chirp ? dft_chirp(f, 1) : dft(f, 1);
  }
  // sum of a nontrivial additive character over the nonzero elements
  values[0] = cd{-1.0, 0.0};

  const double scale = std::sqrt(static_cast<double>(field.size()));
  std::vector<GaussRecord> records(M);
  for (std::uint32_t j = 0; j < M; ++j) {
    auto& r = records[j];
    r.chi = CharIndex{j};
    r.value = values[j];
    r.normalized = values[j] / scale;
    r.primitive = is_primitive(view, r.chi);
    r.trivial_central = has_trivial_central(view, r.chi);
    if (view.d() == 2 && r.trivial_central) r.square_in_c0 = is_square_in_C0(view, r.chi);
  }
  return records;
}

ComplexVectorXd gauss_values(const std::vector<GaussRecord>& records) {
  ComplexVectorXd out(static_cast<Eigen::Index>(records.size()));
  for (std::size_t j = 0; j < records.size(); ++j) out[static_cast<Eigen::Index>(j)] = records[j].value;
  return out;
}

std::complex<double> gauss_sum_base(const SubfieldView& view, std::uint32_t j_base) {
  const std::uint64_t n = view.q() - 1;
  const std::uint32_t p = view.field().p();
  std::vector<cd> terms(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    const Angle a = Angle{std::uint64_t{j_base} * t % n, n} + Angle{view.base_trace(view.base_element(t)), p};
    terms[t] = a.unit();
  }
  return sum_of(terms);
}

std::string_view to_string(KlMethod method) {
  switch (method) {
    case KlMethod::Direct: return "direct";
    case KlMethod::Convolution: return "convolution";
    case KlMethod::Inversion: return "inversion";
  }
  return "?";
}

std::complex<double> kloosterman_direct(const AddChar& psi, std::uint32_t n, Element a, std::uint64_t max_work) {
  require_order(n);
  require_nonzero(a);
  const auto& field = psi.field();
  const std::uint32_t M = field.group_order();
  const std::uint32_t p = field.p();
  (void)guarded_power(M, n - 1, max_work);

  std::vector<std::uint64_t> counts(p, 0);
  // x_1..x_{n-1} free, x_n = a / (x_1 ... x_{n-1}).
  std::function<void(std::uint32_t, std::uint64_t, std::uint32_t)> walk =
      [&](std::uint32_t depth, std::uint64_t log_sum, std::uint32_t trace_sum) {
        if (depth + 1 == n) {
          const auto last = static_cast<std::uint32_t>((a.log() + M - log_sum % M) % M);
          ++counts[(trace_sum + psi.trace_at_log(last)) % p];
          return;
        }
        for (std::uint32_t k = 0; k < M; ++k) walk(depth + 1, log_sum + k, (trace_sum + psi.trace_at_log(k)) % p);
      };
  walk(0, 0, 0);
  return from_residue_counts(counts, p);
}

KloostermanTable kloosterman_table_direct(const AddChar& psi, std::uint32_t n, std::uint64_t max_work) {
  require_order(n);
  const auto& field = psi.field();
  const std::uint32_t M = field.group_order();
  const std::uint32_t p = field.p();
  (void)guarded_power(M, n, max_work);

  std::vector<std::uint64_t> counts(std::size_t{M} * p, 0);
  std::function<void(std::uint32_t, std::uint64_t, std::uint32_t)> walk =
      [&](std::uint32_t depth, std::uint64_t log_sum, std::uint32_t trace_sum) {
        if (depth + 1 == n) {
          for (std::uint32_t k = 0; k < M; ++k) {
            const std::uint64_t a = (log_sum + k) % M;
            ++counts[a * p + (trace_sum + psi.trace_at_log(k)) % p];
          }
          return;
        }
        for (std::uint32_t k = 0; k < M; ++k) walk(depth + 1, (log_sum + k) % M, (trace_sum + psi.trace_at_log(k)) % p);
      };
  walk(0, 0, 0);

  KloostermanTable table;
  table.n = n;
  table.method = KlMethod::Direct;
  table.values.resize(M);
  for (std::uint32_t a = 0; a < M; ++a) {
    table.values[a] = from_residue_counts(std::span<const std::uint64_t>(counts).subspan(std::size_t{a} * p, p), p);
  }
  return table;
}

std::vector<KloostermanTable> kloosterman_tower(const AddChar& psi, std::uint32_t n_max) {
  require_order(n_max);
  const auto& field = psi.field();
  const std::uint32_t M = field.group_order();
  ComplexVectorXd kl1(M);
  for (std::uint32_t k = 0; k < M; ++k) kl1[k] = unit_root<double>(psi.trace_at_log(k), field.p());

  std::vector<KloostermanTable> out;
  out.reserve(n_max);
  out.push_back(KloostermanTable{1, KlMethod::Convolution, kl1});
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    out.push_back(KloostermanTable{n, KlMethod::Convolution, cyclic_convolve(out.back().values, kl1)});
  }
  return out;
}

KloostermanTable kloosterman_all(const AddChar& psi, std::uint32_t n) {
  auto tower = kloosterman_tower(psi, n);
  return std::move(tower.back());
}

std::complex<double> kloosterman_via_inversion(const ComplexVectorXd& gauss, std::uint32_t n, Element a) {
  require_order(n);
  require_nonzero(a);
  const auto M = static_cast<std::uint64_t>(gauss.size());
  std::vector<cd> terms(M);
  for (std::uint64_t j = 0; j < M; ++j) {
    const std::uint64_t e = j * a.log() % M;
    terms[j] = ipow(gauss[static_cast<Eigen::Index>(j)], n) * unit_root<double>(e == 0 ? 0 : M - e, M);
  }
  return sum_of(terms) / static_cast<double>(M);
}

KloostermanTable kloosterman_table_via_inversion(const ComplexVectorXd& gauss, std::uint32_t n) {
  require_order(n);
  ComplexVectorXd powers(gauss.size());
  for (Eigen::Index j = 0; j < gauss.size(); ++j) powers[j] = ipow(gauss[j], n);
  KloostermanTable table;
  table.n = n;
  table.method = KlMethod::Inversion;
  table.values = dft(powers, -1) / static_cast<double>(gauss.size());
  return table;
}

std::complex<double> aggregate_I(const KloostermanTable& table, const SubfieldView& view) {
  std::vector<cd> terms;
  terms.reserve(view.q() - 1);
  for (std::uint32_t t = 0; t + 1 < view.q(); ++t) terms.push_back(table.at(view.base_element(t)));
  return sum_of(terms);
}

std::complex<double> aggregate_A(const KloostermanTable& table, const SubfieldView& view) {
  if (view.d() != 2) throw std::domain_error("A_n is defined for d = 2 only");
  std::vector<cd> terms;
  for (std::uint32_t k = 0; k < view.field().group_order(); ++k) {
    const Element a = Element::from_log(k);
    if (view.trace_rel(a).is_zero()) terms.push_back(table.at(a));
  }
  return sum_of(terms);
}

IntegerValue round_to_integer(std::complex<double> z) {
  IntegerValue v;
  v.value = std::llround(z.real());
  v.residual = std::max(std::abs(z.imag()), std::abs(z.real() - static_cast<double>(v.value)));
  return v;
}

std::int64_t int_pow(std::int64_t base, std::uint32_t e) {
  std::int64_t r = 1;
  for (std::uint32_t i = 0; i < e; ++i) r *= base;
  return r;
}

RecurrenceReport check_recurrence(const SubfieldView& view, const AddChar& psi, std::uint32_t n_max, double tol) {
  if (view.d() != 2) throw std::domain_error("the I/A recurrence is stated for d = 2");
  RecurrenceReport report;
  report.q = view.q();
  report.p = view.field().p();
  report.tol = tol;
  const bool odd = report.p != 2;
  const auto q = static_cast<std::int64_t>(view.q());

  const auto tables = kloosterman_tower(psi, n_max);
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    RecurrenceRow row;
    row.n = n;
    row.I = round_to_integer(aggregate_I(tables[n - 1], view));
    row.A = round_to_integer(aggregate_A(tables[n - 1], view));
    if (row.I.residual >= tol || row.A.residual >= tol) report.numerical_ok = false;
    report.rows.push_back(row);
  }

  const auto& first = report.rows.front();
  const std::int64_t I1 = first.I.value;
  const std::int64_t A1 = first.A.value;
  report.base_values_ok = odd ? (I1 == -1 && A1 == q - 1) : (I1 == q - 1);

  for (auto& row : report.rows) {
    const std::uint32_t n = row.n;
    const std::int64_t sgn = sign_pow(n);
    const std::int64_t alt = int_pow(-q, n - 1);  // (-q)^{n-1}
    if (n >= 2) {
      const auto& prev = report.rows[n - 2];
      if (odd) {
        row.recurrence_ok = row.I.value == q * prev.A.value + sgn && row.A.value == q * prev.I.value + sgn;
      } else {
        row.recurrence_ok = row.I.value == q * prev.I.value + sgn;
      }
    }
    // (1 - (-q)^{n-1}) is divisible by (1 + q) since -q = 1 mod (1 + q).
    const std::int64_t geometric = (1 - alt) / (1 + q);
    const double displayed_geometric = static_cast<double>(1 + alt) / static_cast<double>(1 + q);
    if (odd) {
      row.difference_ok = row.I.value - row.A.value == alt * (I1 - A1);
      row.closed_form = int_pow(q, n - 1) * (I1 + A1) + 2 * sgn * geometric;
      row.sum_ok = row.I.value + row.A.value == row.closed_form;
      row.displayed_form = static_cast<double>((q - 2) * int_pow(q, n - 1)) + 2.0 * sgn * displayed_geometric;
      row.displayed_form_matches =
          std::abs(row.displayed_form - static_cast<double>(row.I.value + row.A.value)) < 1e-9;
    } else {
      row.closed_form = int_pow(q, n - 1) * I1 + sgn * geometric;
      row.sum_ok = row.I.value == row.closed_form;
      row.displayed_form = static_cast<double>((q - 1) * int_pow(q, n - 1)) + sgn * displayed_geometric;
      row.displayed_form_matches = std::abs(row.displayed_form - static_cast<double>(row.I.value)) < 1e-9;
    }
    if (!row.recurrence_ok || !row.difference_ok || !row.sum_ok) report.identity_ok = false;
  }
  return report;
}

DeligneRow check_deligne_bound(const KloostermanTable& table, std::uint64_t field_size, double slack) {
  DeligneRow row;
  row.n = table.n;
  row.bound = table.n * std::pow(static_cast<double>(field_size), (table.n - 1) / 2.0);
  for (Eigen::Index i = 0; i < table.values.size(); ++i) {
    const double v = std::abs(table.values[i]);
    row.max_abs = std::max(row.max_abs, v);
    if (v / row.bound > 1.0 + slack) ++row.violations;
  }
  row.max_ratio = row.max_abs / row.bound;
  return row;
}

std::vector<DeligneRow> check_deligne_bound(const AddChar& psi, std::uint32_t n_max, double slack) {
  std::vector<DeligneRow> rows;
  for (const auto& table : kloosterman_tower(psi, n_max)) {
    rows.push_back(check_deligne_bound(table, psi.field().size(), slack));
  }
  return rows;
}

IdentityCheck check_parseval(const KloostermanTable& table, std::uint64_t field_size, double rel_tol) {
  IdentityCheck c;
  c.n = table.n;
  std::vector<double> sq(static_cast<std::size_t>(table.values.size()));
  for (Eigen::Index i = 0; i < table.values.size(); ++i) sq[static_cast<std::size_t>(i)] = std::norm(table.values[i]);
  c.lhs = pairwise_sum(std::span<const double>(sq));
  const double Q = static_cast<double>(field_size);
  c.rhs = ((Q - 2.0) * std::pow(Q, table.n) + 1.0) / (Q - 1.0);
  c.error = std::abs(c.lhs - c.rhs) / std::abs(c.rhs);
  c.tolerance = rel_tol;
  return c;
}

IdentityCheck check_hasse_davenport(const SubfieldView& view, std::uint32_t j_base, double tol_factor) {
  const AddChar psi(view.field_ptr());
  IdentityCheck c;
  c.n = view.d();
  const std::uint64_t M = view.field().group_order();
  const auto lifted = static_cast<std::uint32_t>(std::uint64_t{j_base} % (view.q() - 1) * view.stride() % M);
  c.lhs = -gauss_sum_direct(psi, CharIndex{lifted});
  c.rhs = ipow(-gauss_sum_base(view, j_base), view.d());
  c.error = std::abs(c.lhs - c.rhs) / std::pow(static_cast<double>(view.q()), view.d() / 2.0);
  c.tolerance = tol_factor;
  return c;
}

IdentityCheck check_moment_identity(const ComplexVectorXd& gauss, const KloostermanTable& table,
                                    std::uint64_t field_size, double rel_tol) {
  IdentityCheck c;
  c.n = table.n;
  std::vector<cd> terms;
  for (Eigen::Index j = 1; j < gauss.size(); ++j) terms.push_back(ipow(gauss[j], table.n));
  c.lhs = sum_of(terms);
  c.rhs = static_cast<double>(field_size - 1) * table.values[0] - static_cast<double>(sign_pow(table.n));
  const double scale = std::max(std::abs(c.rhs), std::pow(static_cast<double>(field_size), table.n / 2.0));
  c.error = std::abs(c.lhs - c.rhs) / scale;
  c.tolerance = rel_tol;
  return c;
}

IdentityCheck check_c0_identity(const ComplexVectorXd& gauss, const KloostermanTable& table,
                                const SubfieldView& view, double rel_tol) {
  IdentityCheck c;
  c.n = table.n;
  std::vector<cd> terms;
  const std::uint64_t step = view.q() - 1;
  for (std::uint64_t j = step; j < static_cast<std::uint64_t>(gauss.size()); j += step) {
    terms.push_back(ipow(gauss[static_cast<Eigen::Index>(j)], table.n));
  }
  c.lhs = sum_of(terms);
  c.rhs = static_cast<double>(view.stride()) * aggregate_I(table, view) - static_cast<double>(sign_pow(table.n));
  const double scale =
      std::max(std::abs(c.rhs), std::pow(static_cast<double>(view.field().size()), table.n / 2.0));
  c.error = std::abs(c.lhs - c.rhs) / scale;
  c.tolerance = rel_tol;
  return c;
}

double galois_invariance_defect(const ComplexVectorXd& gauss, const SubfieldView& view) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < gauss.size(); ++j) {
    const auto conj_j = galois_conjugate(view, CharIndex{static_cast<std::uint32_t>(j)}).j;
    worst = std::max(worst, std::abs(gauss[j] - gauss[conj_j]));
  }
  return worst;
}

double max_deviation(const ComplexVectorXd& a, const ComplexVectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace gausslab
