#include "khl/explore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "khl/detail/splitmix.hpp"
#include "khl/distribution.hpp"
#include "khl/errors.hpp"

namespace khl {

namespace {

constexpr double kRatioExclusion = 1e-9;
constexpr double kViolationTol = 1e-10;
constexpr double kRecheckTol = 1e-12;

detail::SplitMix make_rng(std::uint64_t seed, SampleStrategy strategy, int n, long index) {
  const std::uint64_t salt = static_cast<std::uint64_t>(n) +
                             (static_cast<std::uint64_t>(strategy) << 32);
  return detail::stream_rng(seed, salt, index);
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  if (const char* env = std::getenv("KHL_JOBS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void validate(const SearchConfig& cfg) {
  if (cfg.n_min < 1 || cfg.n_max > 20 || cfg.n_min > cfg.n_max) {
    throw DomainError("search needs 1 <= n_min <= n_max <= 20");
  }
  if (cfg.samples < 1 || cfg.samples > 10000000L) {
    throw DomainError("search needs 1 <= samples <= 1e7");
  }
  if (cfg.strategy == SampleStrategy::kGrid && !(cfg.grid_step > 0.0 && cfg.grid_step <= 1.0)) {
    throw DomainError("grid strategy needs 0 < grid_step <= 1");
  }
}

// Lexicographically next weak composition of m into the elements of `parts`.
bool next_composition(std::vector<long>& parts) {
  const size_t n = parts.size();
  if (n <= 1) return false;
  // Move one unit from the rightmost movable position toward the back.
  for (size_t i = n - 1; i-- > 0;) {
    if (parts[i] > 0) {
      const long rest = parts[n - 1];
      parts[i] -= 1;
      parts[n - 1] = 0;
      parts[i + 1] = rest + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

CoefficientVector sample_vector(SampleStrategy strategy, int n, std::uint64_t seed,
                                long index) {
  if (n < 1) throw DomainError("sample_vector needs n >= 1");
  detail::SplitMix rng = make_rng(seed, strategy, n, index);
  switch (strategy) {
    case SampleStrategy::kSimplex: {
      std::vector<double> squares(static_cast<size_t>(n));
      for (double& s : squares) s = rng.exponential();
      return CoefficientVector::from_squares(squares);
    }
    case SampleStrategy::kNearDiagonal: {
      static constexpr double kScales[] = {1e-6, 1e-3, 0.3};
      const double scale = kScales[rng.next() % 3];
      const double inv_n = 1.0 / n;
      std::vector<double> squares(static_cast<size_t>(n));
      for (double& s : squares) {
        s = std::max(inv_n * (1.0 + scale * (2.0 * rng.uniform() - 1.0)), 0.0);
      }
      return CoefficientVector::from_squares(squares);
    }
    case SampleStrategy::kSpiky: {
      if (n == 1) return CoefficientVector::diagonal(1);
      static constexpr double kTops[] = {0.49, 0.51, 0.9};
      const double top = kTops[static_cast<std::uint64_t>(index) % 3];
      std::vector<double> squares(static_cast<size_t>(n), (1.0 - top) / (n - 1));
      squares.front() = top;
      return CoefficientVector::from_squares(squares);
    }
    case SampleStrategy::kGrid:
      throw DomainError("grid points are enumerated by the search driver");
  }
  throw DomainError("unknown sampling strategy");
}

CoefficientVector sample_mixed(int n, std::uint64_t seed, long index) {
  switch (index % 5) {
    case 3:
      return sample_vector(SampleStrategy::kNearDiagonal, n, seed, index);
    case 4:
      return sample_vector(SampleStrategy::kSpiky, n, seed, index);
    default:
      return sample_vector(SampleStrategy::kSimplex, n, seed, index);
  }
}

std::vector<SquaresVector> simplex_grid(int n, int subdivisions) {
  if (n < 1 || subdivisions < 1) throw DomainError("simplex grid needs n, m >= 1");
  std::vector<SquaresVector> out;
  std::vector<long> parts(static_cast<size_t>(n), 0);
  parts.front() = subdivisions;
  const double inv = 1.0 / subdivisions;
  do {
    std::vector<double> squares;
    squares.reserve(parts.size());
    for (long k : parts) squares.push_back(static_cast<double>(k) * inv);
    out.push_back(SquaresVector::from_values(squares));
  } while (next_composition(parts));
  return out;
}

namespace {

struct SampleEval {
  double margin = 0.0;
  double ratio = std::numeric_limits<double>::infinity();
  bool ratio_counted = false;
};

struct SearchProblem {
  // margin and constant-ratio for one sampled vector; `tight` recomputes the
  // margin with the strict settings of the violation recheck.
  std::function<SampleEval(const CoefficientVector&, bool tight)> eval;
};

struct WorkerState {
  std::vector<PerNStat> per_n;
  double min_margin = std::numeric_limits<double>::infinity();
  long min_margin_index = -1;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::vector<long> candidates;
};

SearchOutcome run_search(const SearchConfig& cfg, const SearchProblem& problem,
                         const SampleSink& sink) {
  validate(cfg);
  const int n_count = cfg.n_max - cfg.n_min + 1;

  // Grid strategy: enumerate lattice points up-front (bounded by `samples`).
  std::vector<std::vector<CoefficientVector>> grid(static_cast<size_t>(n_count));
  std::vector<long> per_n_items(static_cast<size_t>(n_count), cfg.samples);
  if (cfg.strategy == SampleStrategy::kGrid) {
    const int m = std::max(1, static_cast<int>(std::lround(1.0 / cfg.grid_step)));
    for (int ni = 0; ni < n_count; ++ni) {
      for (const SquaresVector& sq : simplex_grid(cfg.n_min + ni, m)) {
        auto& bucket = grid[static_cast<size_t>(ni)];
        if (static_cast<long>(bucket.size()) >= cfg.samples) break;
        bucket.push_back(sq.to_coefficients());
      }
      per_n_items[static_cast<size_t>(ni)] = static_cast<long>(grid[static_cast<size_t>(ni)].size());
    }
  }

  std::vector<long> offsets(static_cast<size_t>(n_count) + 1, 0);
  for (int ni = 0; ni < n_count; ++ni) {
    offsets[static_cast<size_t>(ni) + 1] = offsets[static_cast<size_t>(ni)] +
                                           per_n_items[static_cast<size_t>(ni)];
  }
  const long total = offsets.back();

  auto vector_at = [&](long item) -> CoefficientVector {
    const int ni = static_cast<int>(
        std::upper_bound(offsets.begin(), offsets.end(), item) - offsets.begin() - 1);
    const long idx = item - offsets[static_cast<size_t>(ni)];
    const int n = cfg.n_min + ni;
    if (cfg.strategy == SampleStrategy::kGrid) {
      return grid[static_cast<size_t>(ni)][static_cast<size_t>(idx)];
    }
    return sample_vector(cfg.strategy, n, cfg.seed, idx);
  };
  auto n_of = [&](long item) {
    const int ni = static_cast<int>(
        std::upper_bound(offsets.begin(), offsets.end(), item) - offsets.begin() - 1);
    return cfg.n_min + ni;
  };

  const int jobs = sink ? 1 : std::min<long>(resolve_jobs(cfg.jobs), std::max<long>(total, 1));
  std::vector<WorkerState> states(static_cast<size_t>(jobs));
  for (WorkerState& st : states) {
    st.per_n.resize(static_cast<size_t>(n_count));
    for (int ni = 0; ni < n_count; ++ni) {
      st.per_n[static_cast<size_t>(ni)] = {cfg.n_min + ni,
                                           std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity(), 0};
    }
  }

  const long chunk = (total + jobs - 1) / std::max(jobs, 1);
  auto work = [&](int w) {
    WorkerState& st = states[static_cast<size_t>(w)];
    const long lo = w * chunk;
    const long hi = std::min(total, lo + chunk);
    for (long item = lo; item < hi; ++item) {
      const CoefficientVector a = vector_at(item);
      const SampleEval ev = problem.eval(a, false);
      const int ni = n_of(item) - cfg.n_min;
      PerNStat& pn = st.per_n[static_cast<size_t>(ni)];
      pn.min_margin = std::min(pn.min_margin, ev.margin);
      if (ev.ratio_counted) {
        pn.inf_ratio = std::min(pn.inf_ratio, ev.ratio);
        pn.counted += 1;
        st.min_ratio = std::min(st.min_ratio, ev.ratio);
      }
      if (ev.margin < st.min_margin) {
        st.min_margin = ev.margin;
        st.min_margin_index = item;
      }
      if (ev.margin < -kViolationTol) st.candidates.push_back(item);
      if (sink) sink(item, n_of(item), ev.margin, ev.ratio_counted ? ev.ratio : std::nan(""));
    }
  };

  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (std::thread& t : threads) t.join();
  }

  SearchOutcome out;
  out.samples_run = total;
  out.per_n.resize(static_cast<size_t>(n_count));
  for (int ni = 0; ni < n_count; ++ni) {
    PerNStat merged{cfg.n_min + ni, std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(), 0};
    for (const WorkerState& st : states) {
      const PerNStat& pn = st.per_n[static_cast<size_t>(ni)];
      merged.inf_ratio = std::min(merged.inf_ratio, pn.inf_ratio);
      merged.min_margin = std::min(merged.min_margin, pn.min_margin);
      merged.counted += pn.counted;
    }
    out.per_n[static_cast<size_t>(ni)] = merged;
  }

  double min_margin = std::numeric_limits<double>::infinity();
  long min_index = -1;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::vector<long> candidates;
  for (const WorkerState& st : states) {
    if (st.min_margin < min_margin ||
        (st.min_margin == min_margin && st.min_margin_index < min_index)) {
      min_margin = st.min_margin;
      min_index = st.min_margin_index;
    }
    min_ratio = std::min(min_ratio, st.min_ratio);
    candidates.insert(candidates.end(), st.candidates.begin(), st.candidates.end());
  }
  std::sort(candidates.begin(), candidates.end());

  // Violation candidates must survive the strict recomputation.
  double worst_violation = 0.0;
  long worst_violation_index = -1;
  for (long item : candidates) {
    const CoefficientVector a = vector_at(item);
    const SampleEval strict = problem.eval(a, true);
    if (strict.margin < -kRecheckTol) {
      out.violations += 1;
      if (strict.margin < worst_violation) {
        worst_violation = strict.margin;
        worst_violation_index = item;
      }
    }
  }

  out.best_constant_estimate = min_ratio;
  if (out.violations > 0) {
    out.worst_margin = worst_violation;
    out.worst_vector = vector_at(worst_violation_index);
  } else {
    out.worst_margin = total > 0 ? min_margin : 0.0;
    if (min_index >= 0) out.worst_vector = vector_at(min_index);
  }
  return out;
}

}  // namespace

SearchOutcome search_conjecture_gauss(const SearchConfig& cfg, const SampleSink& sink) {
  if (!(cfg.p >= 3.0)) throw DomainError("conjecture probe needs p >= 3");
  const double gauss = gaussian_abs_moment(cfg.p);
  SearchProblem problem;
  problem.eval = [p = cfg.p, gauss](const CoefficientVector& a, bool tight) {
    const auto d = build_distribution(a);
    const double m = tight ? absolute_moment(d, MomentQuery(p, MomentMode::kLogSpace))
                           : absolute_moment(d, p);
    const double s4 = a.sum_fourth();
    SampleEval ev;
    ev.margin = gauss - (gauss - 1.0) * s4 - m;
    ev.ratio = (gauss - m) / s4;
    ev.ratio_counted = true;
    return ev;
  };
  return run_search(cfg, problem, sink);
}

SearchOutcome search_conjecture_crit(const SearchConfig& cfg, const SampleSink& sink) {
  if (cfg.p != 3.0) throw DomainError("the critical conjecture probe runs at p = 3");
  SearchProblem problem;
  problem.eval = [](const CoefficientVector& a, bool tight) {
    const auto d = build_distribution(a);
    const double m = tight ? absolute_moment(d, MomentQuery(3.0, MomentMode::kLogSpace))
                           : absolute_moment(d, 3.0);
    const double gap = diagonal_moment(a.size(), 3.0) - m;
    const double deficit = a.diagonal_deficit();
    SampleEval ev;
    ev.margin = gap;
    if (deficit >= kRatioExclusion) {
      ev.ratio = gap / deficit;
      ev.ratio_counted = true;
    }
    return ev;
  };
  return run_search(cfg, problem, sink);
}

}  // namespace khl
