#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "khl/verify.hpp"

namespace khl {

enum class VerifyClaim {
  kGauss,
  kDiag,
  kCrit,
  kSchur,
  kExchange,
  kTStep,
  kCompose,
  kDoubling,
  kBinom,
  kConc,
  kN2,
};

VerifyClaim claim_from_string(const std::string& name);
const char* claim_name(VerifyClaim claim);

struct SweepRow {
  long index;
  int n;
  double p;
  DeficitReport report;
};

/// Runs `count` seeded instances of one claim. Vector claims draw from the
/// mixed sampler (simplex plus near-diagonal and spiky families) over
/// n_min..n_max; instances that miss a claim's hypothesis are deterministically
/// re-drawn. Doubling and binomial claims walk n over powers of two instead.
std::vector<SweepRow> run_sweep(VerifyClaim claim, long count, std::uint64_t seed,
                                int n_min, int n_max, double p,
                                const VerifyOptions& opts = {});

}  // namespace khl
