#include "gausslab/gl2gauss.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "gausslab/dft.hpp"
#include "gausslab/expsum.hpp"
#include "gausslab/parallel.hpp"

namespace gausslab {

namespace {

using cd = std::complex<double>;

void require_gl2(const SubfieldView& view) {
  if (view.d() != 2) throw std::domain_error("GL_2 data requires the tower F_q subset F_{q^2}");
}

cd psi_base(const SubfieldView& view, Element t) {
  return unit_root<double>(t.is_zero() ? 0 : view.base_trace(t), view.field().p());
}

}  // namespace

std::string_view to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::Central: return "central";
    case ClassKind::NonSemisimple: return "nonsemisimple";
    case ClassKind::Split: return "split";
    case ClassKind::Elliptic: return "elliptic";
  }
  return "?";
}

std::uint64_t gl2_order(std::uint64_t q) { return (q * q - 1) * (q * q - q); }

std::vector<ConjClassGL2> conj_classes(const SubfieldView& view) {
  require_gl2(view);
  const auto& field = view.field();
  const std::uint64_t q = view.q();
  const std::uint32_t M = field.group_order();
  std::vector<ConjClassGL2> out;

  for (auto kind : {ClassKind::Central, ClassKind::NonSemisimple}) {
    for (std::uint32_t t = 0; t + 1 < q; ++t) {
      const Element a = view.base_element(t);
      ConjClassGL2 c;
      c.kind = kind;
      c.a = a;
      c.b = a;
      c.size = kind == ClassKind::Central ? 1 : q * q - 1;
      c.trace = field.add(a, a);
      out.push_back(c);
    }
  }
  for (std::uint32_t s = 0; s + 1 < q; ++s) {
    for (std::uint32_t t = s + 1; t + 1 < q; ++t) {
      ConjClassGL2 c;
      c.kind = ClassKind::Split;
      c.a = view.base_element(s);
      c.b = view.base_element(t);
      c.size = q * q + q;
      c.trace = field.add(c.a, c.b);
      out.push_back(c);
    }
  }
  for (std::uint32_t k = 0; k < M; ++k) {
    const Element x = Element::from_log(k);
    if (view.in_base(x)) continue;
    const Element xq = view.frobenius(x, 1);
    if (xq.log() < k) continue;
    ConjClassGL2 c;
    c.kind = ClassKind::Elliptic;
    c.a = x;
    c.b = xq;
    c.size = q * q - q;
    c.trace = view.trace_rel(x);
    out.push_back(c);
  }
  return out;
}

CuspidalGL2Char cuspidal_char(const SubfieldView& view, const std::vector<ConjClassGL2>& classes, CharIndex chi) {
  require_gl2(view);
  if (!is_primitive(view, chi)) {
    throw std::domain_error("character " + std::to_string(chi.j) + " is not primitive; no cuspidal representation");
  }
  const auto& field = view.field();
  const double q = static_cast<double>(view.q());
  CuspidalGL2Char theta;
  theta.chi = chi;
  theta.q = view.q();
  theta.values.reserve(classes.size());
  for (const auto& c : classes) {
    switch (c.kind) {
      case ClassKind::Central: theta.values.push_back((q - 1.0) * mult_char(field, chi, c.a)); break;
      case ClassKind::NonSemisimple: theta.values.push_back(-mult_char(field, chi, c.a)); break;
      case ClassKind::Split: theta.values.push_back(0.0); break;
      case ClassKind::Elliptic:
        theta.values.push_back(-(mult_char(field, chi, c.a) + mult_char(field, chi, c.b)));
        break;
    }
  }
  return theta;
}

std::complex<double> class_inner_product(const std::vector<ConjClassGL2>& classes, const CuspidalGL2Char& theta,
                                         const CuspidalGL2Char& phi) {
  std::vector<cd> terms(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    terms[i] = static_cast<double>(classes[i].size) * theta.values[i] * std::conj(phi.values[i]);
  }
  return pairwise_sum(std::span<const cd>(terms));
}

std::complex<double> matrix_gauss_sum(const SubfieldView& view, const std::vector<ConjClassGL2>& classes,
                                      const CuspidalGL2Char& theta) {
  std::vector<cd> terms(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    terms[i] = static_cast<double>(classes[i].size) * theta.values[i] * psi_base(view, classes[i].trace);
  }
  return pairwise_sum(std::span<const cd>(terms)) / static_cast<double>(theta.dimension());
}

bool KondoReport::passed() const {
  for (const auto& r : rows) {
    if (r.residual >= tol || r.abs_defect >= tol || r.norm_defect >= tol) return false;
  }
  return !rows.empty();
}

bool KondoReport::unsigned_passed() const {
  for (const auto& r : rows) {
    if (r.unsigned_residual >= tol) return false;
  }
  return !rows.empty();
}

KondoReport verify_kondo(const SubfieldView& view, double tol, unsigned threads) {
  require_gl2(view);
  const auto classes = conj_classes(view);
  const AddChar psi(view.field_ptr());
  const auto primitive = enumerate_family(view, FamilyTag::Primitive);
  const double q = static_cast<double>(view.q());
  const double group = static_cast<double>(gl2_order(view.q()));

  KondoReport report;
  report.q = view.q();
  report.tol = tol;
  report.rows.resize(primitive.size());
  parallel_for(primitive.size(), threads, [&](std::size_t i) {
    const CharIndex chi{primitive[i]};
    const auto theta = cuspidal_char(view, classes, chi);
    KondoRow row;
    row.chi = chi;
    row.matrix_sum = matrix_gauss_sum(view, classes, theta);
    row.abelian_sum = gauss_sum_direct(psi, chi);
    row.residual = std::abs(row.matrix_sum + q * row.abelian_sum) / (q * q);
    row.unsigned_residual = std::abs(row.matrix_sum - q * row.abelian_sum) / (q * q);
    row.abs_defect = std::abs(std::abs(row.matrix_sum) - q * q) / (q * q);
    row.norm_defect = std::abs(class_inner_product(classes, theta, theta).real() / group - 1.0);
    report.rows[i] = row;
  });
  std::size_t orbit_members = 0;
  for (auto j : primitive) {
    const auto orbit = galois_orbit(view, CharIndex{j});
    if (*std::min_element(orbit.begin(), orbit.end()) == j) ++orbit_members;
  }
  report.orbits = orbit_members;
  return report;
}

}  // namespace gausslab
