#include "gausslab/equidist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace gausslab {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kSnap = 1e-9;

cd ipow(cd z, std::uint32_t n) {
  cd r{1.0, 0.0};
  for (std::uint32_t i = 0; i < n; ++i) r *= z;
  return r;
}

std::vector<std::uint32_t> full_group_indices(const SubfieldView& view, FamilyTag family) {
  std::vector<std::uint32_t> out;
  const std::uint32_t M = view.field().group_order();
  const bool c0 = family != FamilyTag::AllNontrivial && family != FamilyTag::Primitive;
  for (std::uint32_t j = 0; j < M; ++j) {
    if (!c0 || has_trivial_central(view, CharIndex{j})) out.push_back(j);
  }
  return out;
}

}  // namespace

std::string_view to_string(TargetMeasure target) {
  switch (target) {
    case TargetMeasure::Haar: return "HAAR";
    case TargetMeasure::Dirac1: return "DIRAC_1";
    case TargetMeasure::DiracMinus1: return "DIRAC_MINUS1";
    case TargetMeasure::HalfDiracPair: return "HALF_DIRAC_PAIR";
  }
  return "?";
}

std::optional<TargetMeasure> parse_target(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (auto t : {TargetMeasure::Haar, TargetMeasure::Dirac1, TargetMeasure::DiracMinus1, TargetMeasure::HalfDiracPair}) {
    if (to_string(t) == upper) return t;
  }
  return std::nullopt;
}

std::complex<double> target_moment(TargetMeasure target, int n) {
  const double sgn = n % 2 == 0 ? 1.0 : -1.0;
  switch (target) {
    case TargetMeasure::Haar: return n == 0 ? 1.0 : 0.0;
    case TargetMeasure::Dirac1: return 1.0;
    case TargetMeasure::DiracMinus1: return sgn;
    case TargetMeasure::HalfDiracPair: return (1.0 + sgn) / 2.0;
  }
  return 0.0;
}

double target_cdf(TargetMeasure target, double angle, bool left) {
  const auto step = [&](double atom) { return left ? (angle > atom ? 1.0 : 0.0) : (angle >= atom ? 1.0 : 0.0); };
  switch (target) {
    case TargetMeasure::Haar: return std::clamp((angle + kPi) / (2.0 * kPi), 0.0, 1.0);
    case TargetMeasure::Dirac1: return step(0.0);
    case TargetMeasure::DiracMinus1: return step(kPi);
    case TargetMeasure::HalfDiracPair: return 0.5 * step(0.0) + 0.5 * step(kPi);
  }
  return 0.0;
}

double principal_angle(std::complex<double> z) {
  double a = std::arg(z);
  if (a <= -kPi + kSnap || a >= kPi - kSnap) return kPi;
  if (std::abs(a) < kSnap) return 0.0;
  return a;
}

AnglePopulation build_population(const SubfieldView& view, const std::vector<GaussRecord>& gauss, FamilyTag family,
                                 std::vector<std::uint32_t> indices) {
  if (indices.empty()) throw std::domain_error("empty character family");
  AnglePopulation pop;
  pop.family = family;
  pop.q = view.q();
  pop.d = view.d();
  pop.points.reserve(indices.size());
  for (auto j : indices) pop.points.push_back(gauss.at(j).normalized);
  pop.indices = std::move(indices);
  return pop;
}

AnglePopulation build_population(const SubfieldView& view, const std::vector<GaussRecord>& gauss, FamilyTag family) {
  return build_population(view, gauss, family, enumerate_family(view, family));
}

std::complex<double> weyl_sum(const AnglePopulation& pop, int n) {
  if (pop.points.empty()) throw std::domain_error("empty population");
  if (n == 0) return 1.0;
  const auto order = static_cast<std::uint32_t>(std::abs(n));
  std::vector<cd> terms(pop.points.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = ipow(n > 0 ? pop.points[i] : std::conj(pop.points[i]), order);
  }
  return pairwise_sum(std::span<const cd>(terms)) / static_cast<double>(terms.size());
}

void check_target(const SubfieldView& view, TargetMeasure target) {
  if (target != TargetMeasure::Haar && view.d() >= 3) {
    throw std::domain_error(std::string(to_string(target)) + " is not a limit measure for d >= 3 families");
  }
}

std::optional<std::complex<double>> exact_moment(const SubfieldView& view, FamilyTag family, std::uint32_t n,
                                                 const KloostermanTable& table) {
  const double Q = static_cast<double>(view.field().size());
  const double norm = std::pow(Q, n / 2.0);
  const auto q = static_cast<std::int64_t>(view.q());
  const std::int64_t sgn = sign_pow(n);
  const bool odd = view.field().p() != 2;

  if (view.d() == 2 && table.n == n && (family == FamilyTag::C0 || family == FamilyTag::C0S ||
                                        family == FamilyTag::C0NS)) {
    // Closed forms from I_1 = -1, A_1 = q - 1 (p odd) or I_1 = q - 1 (p = 2).
    const std::int64_t alt = int_pow(-q, n - 1);
    const std::int64_t geometric = (1 - alt) / (1 + q);
    const double qn = static_cast<double>(int_pow(q, n));
    if (!odd) {
      const std::int64_t I = (q - 1) * int_pow(q, n - 1) + sgn * geometric;
      return static_cast<double>(I) / qn;
    }
    const std::int64_t sum = (q - 2) * int_pow(q, n - 1) + 2 * sgn * geometric;
    const std::int64_t diff = int_pow(-q, n);
    if (family == FamilyTag::C0S) return static_cast<double>(sum) / qn;
    if (family == FamilyTag::C0NS) return static_cast<double>(diff) / qn;
    return static_cast<double>((sum + diff) / 2) / qn;
  }
  if (table.n != n) return std::nullopt;
  const bool all_nontrivial =
      family == FamilyTag::AllNontrivial || (family == FamilyTag::Primitive && view.d() == 1);
  if (all_nontrivial) {
    // Q - 2 nontrivial characters
    if (Q <= 2.0) return std::nullopt;
    return ((Q - 1.0) * table.values[0] - static_cast<double>(sgn)) / ((Q - 2.0) * norm);
  }
  if (family == FamilyTag::C0) return aggregate_I(table, view) / norm;
  return std::nullopt;
}

std::vector<MomentReport> moment_report(const SubfieldView& view, const AddChar& psi,
                                        const std::vector<GaussRecord>& gauss, FamilyTag family,
                                        std::uint32_t n_max, TargetMeasure target) {
  check_target(view, target);
  const AnglePopulation pop = build_population(view, gauss, family);
  const AnglePopulation full = build_population(view, gauss, family, full_group_indices(view, family));
  const auto tables = n_max > 0 ? kloosterman_tower(psi, n_max) : std::vector<KloostermanTable>{};
  const bool standard_psi = psi.twist_log() == 0;

  std::vector<MomentReport> out;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    MomentReport r;
    r.family = family;
    r.n = static_cast<int>(n);
    r.empirical = weyl_sum(pop, r.n);
    r.target = target_moment(target, r.n);
    r.deviation = std::abs(r.empirical - r.target);
    r.count = pop.points.size();
    r.full_group_empirical = weyl_sum(full, r.n);
    r.full_group_count = full.points.size();
    if (standard_psi || view.d() != 2) r.exact_prediction = exact_moment(view, family, n, tables[n - 1]);
    out.push_back(r);
  }
  return out;
}

double star_discrepancy(const AnglePopulation& pop) {
  if (pop.points.empty()) throw std::domain_error("empty population");
  std::vector<double> u;
  u.reserve(pop.points.size());
  for (const auto& z : pop.points) u.push_back((principal_angle(z) + kPi) / (2.0 * kPi));
  std::sort(u.begin(), u.end());
  const double N = static_cast<double>(u.size());
  double above = 0.0;
  double below = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    above = std::max(above, static_cast<double>(i + 1) / N - u[i]);
    below = std::max(below, u[i] - static_cast<double>(i) / N);
  }
  return std::min(1.0, above + below);
}

double ks_distance(const AnglePopulation& pop, TargetMeasure target) {
  if (pop.points.empty()) throw std::domain_error("empty population");
  std::vector<double> angles;
  angles.reserve(pop.points.size());
  for (const auto& z : pop.points) angles.push_back(principal_angle(z));
  std::sort(angles.begin(), angles.end());

  std::vector<double> breaks = angles;
  breaks.push_back(0.0);
  breaks.push_back(kPi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double N = static_cast<double>(angles.size());
  double worst = 0.0;
  for (double b : breaks) {
    const auto below = std::lower_bound(angles.begin(), angles.end(), b) - angles.begin();
    const auto upto = std::upper_bound(angles.begin(), angles.end(), b) - angles.begin();
    worst = std::max(worst, std::abs(static_cast<double>(upto) / N - target_cdf(target, b, false)));
    worst = std::max(worst, std::abs(static_cast<double>(below) / N - target_cdf(target, b, true)));
  }
  return worst;
}

}  // namespace gausslab
