#include "khl/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "khl/detail/splitmix.hpp"
#include "khl/errors.hpp"
#include "khl/explore.hpp"

namespace khl {

namespace {

constexpr std::uint64_t kResalt = 0x100000000ULL;

int cycle_n(int n_min, int n_max, long index) {
  // Claim-specific caps can invert a user-supplied range; collapse it then.
  if (n_max < n_min) n_min = n_max = std::min(n_min, n_max);
  const int span = n_max - n_min + 1;
  return n_min + static_cast<int>(index % span);
}

// Draws until the predicate admits the vector. Re-draws switch to the plain
// simplex family (the spiky family is fixed per index and may never satisfy a
// hypothesis); the salt keeps every attempt deterministic.
template <class Pred>
CoefficientVector admissible_sample(int n, std::uint64_t seed, long index, Pred admits) {
  CoefficientVector first = sample_mixed(n, seed, index);
  if (admits(first)) return first;
  for (int attempt = 1; attempt < 200; ++attempt) {
    CoefficientVector a = sample_vector(
        SampleStrategy::kSimplex, n, seed + static_cast<std::uint64_t>(attempt) * kResalt,
        index);
    if (admits(a)) return a;
  }
  throw Error("sweep could not draw an admissible vector");
}

SweepRow make_row(long index, int n, double p, DeficitReport report) {
  return SweepRow{index, n, p, std::move(report)};
}

}  // namespace

VerifyClaim claim_from_string(const std::string& name) {
  if (name == "gauss") return VerifyClaim::kGauss;
  if (name == "diag") return VerifyClaim::kDiag;
  if (name == "crit") return VerifyClaim::kCrit;
  if (name == "schur") return VerifyClaim::kSchur;
  if (name == "exchange") return VerifyClaim::kExchange;
  if (name == "tstep") return VerifyClaim::kTStep;
  if (name == "compose") return VerifyClaim::kCompose;
  if (name == "doubling") return VerifyClaim::kDoubling;
  if (name == "binom") return VerifyClaim::kBinom;
  if (name == "conc") return VerifyClaim::kConc;
  if (name == "n2") return VerifyClaim::kN2;
  throw DomainError("unknown claim: " + name);
}

const char* claim_name(VerifyClaim claim) {
  switch (claim) {
    case VerifyClaim::kGauss: return "gauss";
    case VerifyClaim::kDiag: return "diag";
    case VerifyClaim::kCrit: return "crit";
    case VerifyClaim::kSchur: return "schur";
    case VerifyClaim::kExchange: return "exchange";
    case VerifyClaim::kTStep: return "tstep";
    case VerifyClaim::kCompose: return "compose";
    case VerifyClaim::kDoubling: return "doubling";
    case VerifyClaim::kBinom: return "binom";
    case VerifyClaim::kConc: return "conc";
    case VerifyClaim::kN2: return "n2";
  }
  return "?";
}

std::vector<SweepRow> run_sweep(VerifyClaim claim, long count, std::uint64_t seed,
                                int n_min, int n_max, double p, const VerifyOptions& opts) {
  if (count < 1) throw DomainError("sweep needs count >= 1");
  if (n_min < 1 || n_min > n_max) throw DomainError("sweep needs 1 <= n_min <= n_max");

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<size_t>(count));

  for (long index = 0; index < count; ++index) {
    switch (claim) {
      case VerifyClaim::kGauss: {
        const int n = cycle_n(n_min, std::min(n_max, 30), index);
        const CoefficientVector a = sample_mixed(n, seed, index);
        rows.push_back(make_row(index, n, p, verify_gauss_stability(a, p, opts)));
        break;
      }
      case VerifyClaim::kDiag: {
        const int n = cycle_n(n_min, std::min(n_max, 30), index);
        const CoefficientVector a = sample_mixed(n, seed, index);
        rows.push_back(make_row(index, n, p, verify_diag_stability(a, p, opts)));
        break;
      }
      case VerifyClaim::kCrit: {
        const int n = cycle_n(n_min, std::min(n_max, 30), index);
        const CoefficientVector a = sample_mixed(n, seed, index);
        rows.push_back(make_row(index, n, 3.0, verify_crit_stability(a, opts)));
        break;
      }
      case VerifyClaim::kSchur: {
        const int n = cycle_n(std::max(n_min, 2), std::min(n_max, 20), index);
        const CoefficientVector a = sample_mixed(n, seed, index);
        SquaresVector upper = SquaresVector::from_coefficients(a);
        detail::SplitMix rng = detail::stream_rng(seed, 0x5C'0000ULL + n, index);
        SquaresVector lower = upper;
        const int moves = 1 + static_cast<int>(rng.next() % 3);
        for (int m = 0; m < moves; ++m) {
          const int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
          int k = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1));
          if (k >= j) ++k;
          lower = t_transform(lower, j, k, rng.uniform());
        }
        rows.push_back(make_row(index, n, p, verify_schur_monotonicity(lower, upper, p, opts)));
        break;
      }
      case VerifyClaim::kExchange: {
        const int n = cycle_n(std::max(n_min, 2), std::min(n_max, 10), index);
        const CoefficientVector a = sample_mixed(n, seed, index);
        detail::SplitMix rng = detail::stream_rng(seed, 0xE0'0000ULL + n, index);
        std::vector<int> admissible;
        for (int i = 0; i < n; ++i) {
          if (a[i] * a[i] <= 0.5) admissible.push_back(i);
        }
        if (admissible.empty()) {
          rows.push_back(make_row(index, n, p,
                                  verify_exchange_step(ExchangeSplit::at(a, n - 1), p, opts)));
          break;
        }
        const int i = admissible[rng.next() % admissible.size()];
        rows.push_back(
            make_row(index, n, p, verify_exchange_step(ExchangeSplit::at(a, i), p, opts)));
        break;
      }
      case VerifyClaim::kTStep: {
        const int n = cycle_n(std::max(n_min, 3), std::max(std::min(n_max, 30), 3), index);
        const CoefficientVector a = admissible_sample(n, seed, index, [&](const auto& v) {
          return p <= 4.0 || v.largest() * v.largest() <= 0.9 - 1.0 / n;
        });
        rows.push_back(make_row(index, n, p, verify_t_step(a, p, opts)));
        break;
      }
      case VerifyClaim::kCompose: {
        const int n = cycle_n(std::max(n_min, 3), std::max(std::min(n_max, 30), 3), index);
        const CoefficientVector a = admissible_sample(n, seed, index, [&](const auto& v) {
          return p <= 4.0 || v.largest() * v.largest() <= 0.9 - 1.0 / n;
        });
        rows.push_back(make_row(index, n, p, verify_procedure_composition(a, p, opts)));
        break;
      }
      case VerifyClaim::kDoubling: {
        const long n = 1L << (index % 13);
        rows.push_back(make_row(index, static_cast<int>(std::min(n, 4096L)), p,
                                verify_doubling(n, p, opts)));
        break;
      }
      case VerifyClaim::kBinom: {
        const long n = 1L << (index % 13);
        rows.push_back(make_row(index, static_cast<int>(std::min(n, 4096L)), p,
                                verify_binomial_moment(n, p, opts)));
        break;
      }
      case VerifyClaim::kConc: {
        const int n = cycle_n(n_min, std::min(n_max, 20), index);
        const CoefficientVector a = sample_mixed(n, seed, index);
        static constexpr double kMasses[] = {0.0, 0.3, 0.7};
        const double b = kMasses[static_cast<std::uint64_t>(index) % 3];
        rows.push_back(make_row(index, n, p, verify_concentration(a, b, opts)));
        break;
      }
      case VerifyClaim::kN2: {
        const double x = 0.5 * static_cast<double>(index + 1) / static_cast<double>(count);
        rows.push_back(make_row(index, 2, p, verify_n2_closed_form(x, p, opts)));
        break;
      }
    }
  }
  return rows;
}

}  // namespace khl
