#pragma once

// Angle statistics of normalized Gauss sums: Weyl sums, moments against
// limit measures, arc discrepancy and Kolmogorov-Smirnov distance.
//
// Angles are principal values in (-pi, pi]; the cut sits at pi.

#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gausslab/chars.hpp"
#include "gausslab/expsum.hpp"

namespace gausslab {

enum class TargetMeasure { Haar, Dirac1, DiracMinus1, HalfDiracPair };

std::string_view to_string(TargetMeasure target);
std::optional<TargetMeasure> parse_target(std::string_view name);

/// n-th moment of the target measure.
std::complex<double> target_moment(TargetMeasure target, int n);

/// Target CDF on (-pi, pi]; `left` gives the limit from below.
double target_cdf(TargetMeasure target, double angle, bool left = false);

struct AnglePopulation {
  FamilyTag family = FamilyTag::AllNontrivial;
  std::uint64_t q = 0;
  std::uint32_t d = 0;
  std::vector<std::uint32_t> indices;
  std::vector<std::complex<double>> points;  // g(chi)/q^{d/2}, ascending j
};

AnglePopulation build_population(const SubfieldView& view, const std::vector<GaussRecord>& gauss, FamilyTag family);

/// Population over an explicit index list (used for the full-group variants).
AnglePopulation build_population(const SubfieldView& view, const std::vector<GaussRecord>& gauss,
                                 FamilyTag family, std::vector<std::uint32_t> indices);

/// (1/N) sum z^n; negative n uses conj(z)^{|n|}, which is z^n on the circle.
std::complex<double> weyl_sum(const AnglePopulation& pop, int n);

/// Angle in (-pi, pi], with values within 1e-9 of 0 or of the cut snapped onto them.
double principal_angle(std::complex<double> z);

struct MomentReport {
  FamilyTag family = FamilyTag::AllNontrivial;
  int n = 0;
  std::complex<double> empirical;
  std::complex<double> target;
  std::optional<std::complex<double>> exact_prediction;
  double deviation = 0.0;  // |empirical - target|
  std::size_t count = 0;
  std::complex<double> full_group_empirical;
  std::size_t full_group_count = 0;
};

/// Throws std::domain_error if the target does not apply to the family's d.
void check_target(const SubfieldView& view, TargetMeasure target);

/// Finite-q closed form of the n-th moment of the family, where one exists.
std::optional<std::complex<double>> exact_moment(const SubfieldView& view, FamilyTag family, std::uint32_t n,
                                                 const KloostermanTable& table);

std::vector<MomentReport> moment_report(const SubfieldView& view, const AddChar& psi,
                                        const std::vector<GaussRecord>& gauss, FamilyTag family,
                                        std::uint32_t n_max, TargetMeasure target);

/// Sup over circular arcs of |empirical mass - normalized arc length|.
double star_discrepancy(const AnglePopulation& pop);

/// Sup distance between the empirical and target CDFs on (-pi, pi].
double ks_distance(const AnglePopulation& pop, TargetMeasure target);

}  // namespace gausslab
