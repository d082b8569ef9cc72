#pragma once

#include <vector>

#include "khl/coefficients.hpp"

namespace khl {

/// One atom of the nonnegative half of a symmetric distribution. For
/// value > 0 the weight is one-sided (the atom at -value carries the same
/// weight); an atom at value 0 carries its full weight.
struct Atom {
  double value;
  double weight;
};

enum class MomentMode { kStandard, kLogSpace };

struct MomentQuery {
  double p;
  MomentMode mode = MomentMode::kStandard;

  MomentQuery(double p_, MomentMode mode_ = MomentMode::kStandard);
};

/// Finite symmetric distribution stored as its nonnegative half, values
/// strictly increasing. Total mass of the symmetric closure is 1.
class SymmetricAtomicDistribution {
 public:
  static SymmetricAtomicDistribution point_mass_zero();

  /// Builds from merged (value, one-sided weight) pairs; validates invariants.
  static SymmetricAtomicDistribution from_atoms(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  double zero_weight() const;
  double max_value() const { return atoms_.back().value; }
  /// Mass of the symmetric closure (should be 1 up to rounding).
  double total_mass() const;

 private:
  explicit SymmetricAtomicDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  std::vector<Atom> atoms_;
};

/// Law of sum_i a_i eps_i for i.i.d. signs. Throws DimensionTooLarge for
/// n > 30.
SymmetricAtomicDistribution build_distribution(const CoefficientVector& a);

/// Same, for a raw (not necessarily unit-norm) list of nonnegative
/// coefficients; an empty list gives the point mass at 0.
SymmetricAtomicDistribution distribution_of_signs(const std::vector<double>& coeffs);

/// Law of S + c*eps with eps an independent sign.
SymmetricAtomicDistribution add_rademacher(const SymmetricAtomicDistribution& d, double coeff);

/// E|S|^p over the symmetric closure. For p = 0 an atom at 0 is counted as 0,
/// so the result is P(S != 0).
double absolute_moment(const SymmetricAtomicDistribution& d, const MomentQuery& q);
double absolute_moment(const SymmetricAtomicDistribution& d, double p);

/// E|S_n|^p for the diagonal sum S_n = n^{-1/2} sum_{i<=n} eps_i, via the
/// binomial formula; exact binomials up to n = 50, log-space beyond.
double diagonal_moment(long n, double p);

/// E|G|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi) for standard Gaussian G.
double gaussian_abs_moment(double p);

struct MixedMomentOptions {
  double rel_tol = 1e-10;
};

/// E|S + b*G|^p with G standard Gaussian independent of S. b = 0 reduces
/// exactly to absolute_moment.
double mixed_abs_moment(const SymmetricAtomicDistribution& d, double b, double p,
                        const MixedMomentOptions& opts = {});

/// P(|S| <= level); atoms at exactly |value| = level are included.
double interval_probability(const SymmetricAtomicDistribution& d, double level);

/// P(|S + b*G| <= level), exact per atom through the Gaussian CDF.
double gaussian_interval_probability(const SymmetricAtomicDistribution& d, double b,
                                     double level);

}  // namespace khl
