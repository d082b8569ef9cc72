#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "khl/coefficients.hpp"
#include "khl/schur.hpp"

namespace khl {

enum class SampleStrategy { kSimplex, kNearDiagonal, kSpiky, kGrid };

struct SearchConfig {
  double p;
  int n_min = 1;
  int n_max = 10;
  long samples = 10000;
  std::uint64_t seed = 0;
  SampleStrategy strategy = SampleStrategy::kSimplex;
  double grid_step = 0.0;  // grid strategy only
  int jobs = 0;            // 0: hardware concurrency
};

struct PerNStat {
  int n = 0;
  double inf_ratio = 0.0;
  double min_margin = 0.0;
  long counted = 0;
};

struct SearchOutcome {
  double best_constant_estimate = 0.0;
  std::optional<CoefficientVector> worst_vector;
  double worst_margin = 0.0;
  long samples_run = 0;
  long violations = 0;
  std::vector<PerNStat> per_n;
};

/// Deterministic function of (strategy, n, seed, index). Simplex draws are
/// exchangeable across coordinates before sorting; near-diagonal perturbs
/// 1/n at a random scale; spiky fixes the top square from {0.49, 0.51, 0.9}.
CoefficientVector sample_vector(SampleStrategy strategy, int n, std::uint64_t seed,
                                long index);

/// Rotation used by the verification sweeps: simplex samples with
/// near-diagonal and spiky families interleaved.
CoefficientVector sample_mixed(int n, std::uint64_t seed, long index);

/// All squared-coefficient vectors on the n-simplex with entries k/m,
/// m = subdivisions.
std::vector<SquaresVector> simplex_grid(int n, int subdivisions);

/// Per-sample sink for CSV streaming (index, n, margin, ratio); forcing a
/// sink runs the search sequentially.
using SampleSink = std::function<void(long, int, double, double)>;

/// Probes E|S|^p <= E|G|^p - (E|G|^p - 1) sum a_i^4. best_constant_estimate
/// is the empirical infimum of (E|G|^p - E|S|^p)/sum a_i^4; a violation is
/// counted only after it survives recomputation in log space at a 100x
/// tighter tolerance, and worst_vector then reproduces it.
SearchOutcome search_conjecture_gauss(const SearchConfig& cfg,
                                      const SampleSink& sink = nullptr);

/// Probes the p = 3 diagonal-deficit conjecture: reports the empirical
/// infimum of (E|S_n|^3 - E|S|^3)/sum (a_i^2 - 1/n)^2, per n and overall.
/// Samples with deficit below 1e-9 are excluded from the ratio (the quotient
/// is rounding noise there; see per-n `counted`).
SearchOutcome search_conjecture_crit(const SearchConfig& cfg,
                                     const SampleSink& sink = nullptr);

}  // namespace khl
