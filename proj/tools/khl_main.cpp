// khl: exact moments, majorization tools, and stability certificates for
// Rademacher sums.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "io_util.hpp"
#include "json.hpp"
#include "khl/constants.hpp"
#include "khl/distribution.hpp"
#include "khl/errors.hpp"
#include "khl/explore.hpp"
#include "khl/psi.hpp"
#include "khl/schur.hpp"
#include "khl/sweep.hpp"
#include "khl/verify.hpp"
#include "khl/version.hpp"

namespace {

using khl_cli::csv_quote;
using khl_cli::format_double;
using khl_cli::read_number_array;
using nlohmann::ordered_json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("KHL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

int default_jobs() {
  if (const char* env = std::getenv("KHL_JOBS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ordered_json manifest_for(const CLI::App& sub, std::uint64_t seed) {
  ordered_json flags = ordered_json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name().empty()) continue;
    std::string joined;
    for (const std::string& r : opt->results()) {
      if (!joined.empty()) joined += ",";
      joined += r;
    }
    flags[opt->get_name()] = joined.empty() ? "true" : joined;
  }
  ordered_json m;
  m["subcommand"] = sub.get_name();
  m["flags"] = flags;
  m["seed"] = seed;
  m["tool_version"] = khl::kVersion;
  m["timestamp"] = khl_cli::timestamp_utc();
  return m;
}

void emit(const ordered_json& payload, const std::string& out_path) {
  const std::string text = payload.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    khl_cli::write_file_atomic(out_path, text);
  }
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    khl_cli::write_file_atomic(out_path, text);
  }
}

khl::CoefficientVector parse_vector(const std::string& raw, const std::string& squares) {
  if (!raw.empty() && !squares.empty()) {
    throw khl::DomainError("give either --a or --a2, not both");
  }
  if (!raw.empty()) return khl::CoefficientVector::from_coefficients(read_number_array(raw));
  if (!squares.empty()) return khl::CoefficientVector::from_squares(read_number_array(squares));
  throw khl::DomainError("a coefficient vector is required (--a or --a2)");
}

ordered_json distribution_to_json(const khl::SymmetricAtomicDistribution& d) {
  ordered_json arr = ordered_json::array();
  for (const khl::Atom& a : d.atoms()) arr.push_back({a.value, a.weight});
  return arr;
}

ordered_json report_to_json(const khl::DeficitReport& r) {
  ordered_json j;
  j["claim_id"] = r.claim_id;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["deficit_term"] = r.deficit_term;
  j["margin"] = r.margin;
  j["constant_used"] = r.constant_used;
  j["passed"] = r.passed;
  j["detail"] = r.detail;
  return j;
}

ordered_json squares_to_json(const khl::SquaresVector& v) {
  return ordered_json(v.values());
}

ordered_json steps_to_json(const std::vector<khl::TTransformStep>& steps) {
  ordered_json arr = ordered_json::array();
  for (const khl::TTransformStep& s : steps) {
    ordered_json j;
    j["before"] = squares_to_json(s.before);
    j["after"] = squares_to_json(s.after);
    j["j"] = s.j;
    j["k"] = s.k;
    j["lambda"] = s.lambda;
    j["deficit_bound"] = s.deficit_bound;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string sweep_to_csv(const std::vector<khl::SweepRow>& rows) {
  std::ostringstream out;
  out << "claim_id,n,p,lhs,rhs,margin,passed\n";
  for (const khl::SweepRow& row : rows) {
    out << csv_quote(row.report.claim_id) << ',' << row.n << ',' << format_double(row.p)
        << ',' << format_double(row.report.lhs) << ',' << format_double(row.report.rhs)
        << ',' << format_double(row.report.margin) << ','
        << (row.report.passed ? "true" : "false") << '\n';
  }
  return out.str();
}

struct MomentArgs {
  std::string a, a2, out;
  double p = 2.0;
  double b = 0.0;
  std::string mode = "standard";
  double interval = -1.0;
  bool dump_dist = false;
};

struct PsiArgs {
  std::string op = "value", out;
  double s = 0.0, t = 1.0, p = 3.0, x = 1.0;
};

struct SchurArgs {
  std::vector<std::string> majorizes_args;
  std::string diagonalize_arg, cap_arg, out;
  double cap_value = 0.5;
};

struct ConstantsArgs {
  double p = 4.0;
  bool table = false;
  double p_min = 3.0, p_max = 8.0, step = 0.5;
  std::string out;
};

struct VerifyArgs {
  std::string claim, a, a2, y2, out;
  double p = 4.0, x = 0.0, b = 0.0, probe = -1.0;
  long n = 1, sweep = 0;
  int i = 0, n_min = 1, n_max = 12;
  std::uint64_t seed = 0;
  double tol = 1e-10;
};

struct SearchArgs {
  std::string conjecture, strategy = "simplex", csv, out;
  double p = 4.0, grid_step = 0.0;
  int n_min = 1, n_max = 10, jobs = 0;
  long samples = 10000;
  std::uint64_t seed = 0;
};

int run_moment(const CLI::App& sub, const MomentArgs& args) {
  const khl::CoefficientVector a = parse_vector(args.a, args.a2);
  const auto dist = khl::build_distribution(a);
  const khl::MomentMode mode =
      args.mode == "log" ? khl::MomentMode::kLogSpace : khl::MomentMode::kStandard;

  double value;
  if (args.b > 0.0) {
    value = khl::mixed_abs_moment(dist, args.b, args.p);
  } else {
    value = khl::absolute_moment(dist, khl::MomentQuery(args.p, mode));
  }

  ordered_json j;
  j["manifest"] = manifest_for(sub, default_seed());
  j["n"] = a.size();
  j["p"] = args.p;
  if (args.b > 0.0) j["gaussian_mass"] = args.b;
  j["value"] = value;
  if (args.interval >= 0.0) {
    j["interval_probability"] = args.b > 0.0
                                    ? khl::gaussian_interval_probability(dist, args.b, args.interval)
                                    : khl::interval_probability(dist, args.interval);
    j["interval_level"] = args.interval;
  }
  if (args.dump_dist) j["distribution"] = distribution_to_json(dist);
  emit(j, args.out);
  return 0;
}

int run_psi(const CLI::App& sub, const PsiArgs& args) {
  double value;
  if (args.op == "value") {
    value = khl::psi(args.s, args.t, args.p);
  } else if (args.op == "second") {
    value = khl::psi_second(args.s, args.t, args.p);
  } else if (args.op == "second-integral") {
    value = khl::psi_second_integral(args.s, args.t, args.p);
  } else if (args.op == "lower-bound") {
    value = khl::psi_second_lower_bound(args.s, args.t, args.p);
  } else if (args.op == "pair") {
    value = khl::psi_pair(args.s, args.x, args.t, args.p);
  } else {
    throw khl::DomainError("unknown psi op: " + args.op);
  }

  ordered_json input;
  input["op"] = args.op;
  input["s"] = args.s;
  input["t"] = args.t;
  input["p"] = args.p;
  if (args.op == "pair") input["x"] = args.x;

  ordered_json j;
  j["manifest"] = manifest_for(sub, default_seed());
  j["input"] = input;
  j["value"] = value;
  j["regime"] = khl::psi_regime_name(khl::psi_regime(args.p));
  emit(j, args.out);
  return 0;
}

int run_schur(const CLI::App& sub, const SchurArgs& args) {
  ordered_json j;
  j["manifest"] = manifest_for(sub, default_seed());
  if (!args.majorizes_args.empty()) {
    if (args.majorizes_args.size() != 2) {
      throw khl::DomainError("--majorizes needs two vectors");
    }
    const auto x = khl::SquaresVector::from_values(read_number_array(args.majorizes_args[0]));
    const auto y = khl::SquaresVector::from_values(read_number_array(args.majorizes_args[1]));
    j["x"] = squares_to_json(x);
    j["y"] = squares_to_json(y);
    j["majorizes"] = khl::majorizes(x, y);
  } else if (!args.diagonalize_arg.empty()) {
    const auto x = khl::SquaresVector::from_values(read_number_array(args.diagonalize_arg));
    const auto steps = khl::diagonalize(x);
    j["steps"] = steps_to_json(steps);
    j["final"] = squares_to_json(steps.empty() ? x : steps.back().after);
  } else if (!args.cap_arg.empty()) {
    const auto x = khl::SquaresVector::from_values(read_number_array(args.cap_arg));
    const auto steps = khl::cap_largest(x, args.cap_value);
    j["cap"] = args.cap_value;
    j["steps"] = steps_to_json(steps);
    j["final"] = squares_to_json(steps.empty() ? x : steps.back().after);
  } else {
    throw khl::DomainError("choose one of --majorizes, --diagonalize, --cap");
  }
  emit(j, args.out);
  return 0;
}

ordered_json bundle_to_json(const khl::ConstantBundle& b) {
  ordered_json j;
  j["p"] = b.p;
  j["branch"] = khl::psi_regime_name(b.branch);
  j["gauss_C"] = b.gauss_C;
  if (std::isfinite(b.diag_C)) j["diag_C"] = b.diag_C;
  if (std::isfinite(b.crit_C)) j["crit_C"] = b.crit_C;
  j["doubling_C"] = b.doubling_C;
  j["components"] = b.components;
  return j;
}

int run_constants(const CLI::App& sub, const ConstantsArgs& args) {
  if (!args.table) {
    ordered_json j;
    j["manifest"] = manifest_for(sub, default_seed());
    j.update(bundle_to_json(khl::constant_bundle(args.p)));
    emit(j, args.out);
    return 0;
  }
  if (!(args.step > 0.0) || args.p_min > args.p_max) {
    throw khl::DomainError("--table needs p_min <= p_max and step > 0");
  }
  std::ostringstream csv;
  csv << "p,branch,gauss_C,diag_C,crit_C,doubling_C\n";
  for (double p = args.p_min; p <= args.p_max + 1e-12; p += args.step) {
    const khl::ConstantBundle b = khl::constant_bundle(p);
    csv << format_double(p) << ',' << khl::psi_regime_name(b.branch) << ','
        << format_double(b.gauss_C) << ','
        << (std::isfinite(b.diag_C) ? format_double(b.diag_C) : "") << ','
        << (std::isfinite(b.crit_C) ? format_double(b.crit_C) : "") << ','
        << format_double(b.doubling_C) << '\n';
  }
  emit_text(csv.str(), args.out);
  return 0;
}

int run_verify(const CLI::App& sub, const VerifyArgs& args) {
  const khl::VerifyClaim claim = khl::claim_from_string(args.claim);
  khl::VerifyOptions opts;
  opts.tol = args.tol;

  if (args.sweep > 0) {
    const auto rows =
        khl::run_sweep(claim, args.sweep, args.seed, args.n_min, args.n_max, args.p, opts);
    emit_text(sweep_to_csv(rows), args.out);
    for (const khl::SweepRow& row : rows) {
      if (!row.report.passed) return 1;
    }
    return 0;
  }

  khl::DeficitReport report;
  switch (claim) {
    case khl::VerifyClaim::kGauss:
      report = khl::verify_gauss_stability(parse_vector(args.a, args.a2), args.p, opts);
      break;
    case khl::VerifyClaim::kDiag:
      report = khl::verify_diag_stability(parse_vector(args.a, args.a2), args.p, opts);
      break;
    case khl::VerifyClaim::kCrit:
      report = khl::verify_crit_stability(parse_vector(args.a, args.a2), opts);
      break;
    case khl::VerifyClaim::kSchur: {
      if (args.y2.empty()) throw khl::DomainError("schur claim needs --y2");
      const auto x = khl::SquaresVector::from_coefficients(parse_vector(args.a, args.a2));
      const auto y = khl::SquaresVector::from_values(read_number_array(args.y2));
      report = khl::verify_schur_monotonicity(x, y, args.p, opts);
      break;
    }
    case khl::VerifyClaim::kExchange:
      report = khl::verify_exchange_step(
          khl::ExchangeSplit::at(parse_vector(args.a, args.a2), args.i), args.p, opts);
      break;
    case khl::VerifyClaim::kTStep:
      report = khl::verify_t_step(parse_vector(args.a, args.a2), args.p, opts);
      break;
    case khl::VerifyClaim::kCompose:
      report = khl::verify_procedure_composition(parse_vector(args.a, args.a2), args.p, opts);
      break;
    case khl::VerifyClaim::kDoubling:
      report = khl::verify_doubling(args.n, args.p, opts);
      break;
    case khl::VerifyClaim::kBinom:
      report = khl::verify_binomial_moment(args.n, args.p, opts);
      break;
    case khl::VerifyClaim::kConc:
      report = khl::verify_concentration(
          parse_vector(args.a, args.a2), args.b, opts,
          args.probe >= 0.0 ? std::optional<double>(args.probe) : std::nullopt);
      break;
    case khl::VerifyClaim::kN2:
      report = khl::verify_n2_closed_form(args.x, args.p, opts);
      break;
  }

  ordered_json j;
  j["manifest"] = manifest_for(sub, args.seed);
  j["manifest"]["flags"]["--tol"] = format_double(args.tol);  // effective value
  j.update(report_to_json(report));
  emit(j, args.out);
  return report.passed ? 0 : 1;
}

int run_search(const CLI::App& sub, const SearchArgs& args) {
  khl::SearchConfig cfg;
  cfg.p = args.p;
  cfg.n_min = args.n_min;
  cfg.n_max = args.n_max;
  cfg.samples = args.samples;
  cfg.seed = args.seed;
  cfg.jobs = args.jobs;
  cfg.grid_step = args.grid_step;
  if (args.strategy == "simplex") {
    cfg.strategy = khl::SampleStrategy::kSimplex;
  } else if (args.strategy == "near_diagonal") {
    cfg.strategy = khl::SampleStrategy::kNearDiagonal;
  } else if (args.strategy == "spiky") {
    cfg.strategy = khl::SampleStrategy::kSpiky;
  } else if (args.strategy == "grid") {
    cfg.strategy = khl::SampleStrategy::kGrid;
  } else {
    throw khl::DomainError("unknown strategy: " + args.strategy);
  }

  std::ostringstream csv;
  khl::SampleSink sink;
  if (!args.csv.empty()) {
    csv << "index,n,margin,ratio\n";
    sink = [&csv](long index, int n, double margin, double ratio) {
      csv << index << ',' << n << ',' << format_double(margin) << ','
          << format_double(ratio) << '\n';
    };
  }

  khl::SearchOutcome outcome;
  if (args.conjecture == "gauss") {
    outcome = khl::search_conjecture_gauss(cfg, sink);
  } else if (args.conjecture == "crit") {
    outcome = khl::search_conjecture_crit(cfg, sink);
  } else {
    throw khl::DomainError("unknown conjecture: " + args.conjecture);
  }
  if (!args.csv.empty()) khl_cli::write_file_atomic(args.csv, csv.str());

  ordered_json j;
  j["manifest"] = manifest_for(sub, args.seed);
  j["conjecture"] = args.conjecture;
  j["best_constant_estimate"] = outcome.best_constant_estimate;
  j["worst_margin"] = outcome.worst_margin;
  if (outcome.worst_vector) j["worst_vector"] = outcome.worst_vector->coeffs();
  j["samples_run"] = outcome.samples_run;
  j["violations"] = outcome.violations;
  ordered_json per_n = ordered_json::array();
  for (const khl::PerNStat& s : outcome.per_n) {
    per_n.push_back({{"n", s.n},
                     {"inf_ratio", s.inf_ratio},
                     {"min_margin", s.min_margin},
                     {"counted", s.counted}});
  }
  j["per_n"] = per_n;
  emit(j, args.out);
  return outcome.violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact moments and stability certificates for Rademacher sums"};
  app.require_subcommand(1);

  MomentArgs moment;
  CLI::App* moment_cmd = app.add_subcommand("moment", "E|S|^p or E|S + bG|^p");
  moment_cmd->add_option("--a", moment.a, "coefficients as a JSON array");
  moment_cmd->add_option("--a2", moment.a2, "squared coefficients as a JSON array");
  moment_cmd->add_option("--p", moment.p, "moment exponent")->required();
  moment_cmd->add_option("--b", moment.b, "independent Gaussian mass");
  moment_cmd->add_option("--mode", moment.mode, "standard|log")
      ->check(CLI::IsMember({"standard", "log"}));
  moment_cmd->add_option("--interval", moment.interval, "also report P(|S| <= level)");
  moment_cmd->add_flag("--dump-dist", moment.dump_dist, "include the atom list");
  moment_cmd->add_option("--out", moment.out, "write JSON to a file (atomic)");

  PsiArgs psi;
  CLI::App* psi_cmd = app.add_subcommand("psi", "kernel evaluations");
  psi_cmd->add_option("--op", psi.op, "value|second|second-integral|lower-bound|pair")
      ->check(CLI::IsMember({"value", "second", "second-integral", "lower-bound", "pair"}));
  psi_cmd->add_option("--s", psi.s, "shift parameter")->required();
  psi_cmd->add_option("--t", psi.t, "squared argument")->required();
  psi_cmd->add_option("--p", psi.p, "exponent")->required();
  psi_cmd->add_option("--x", psi.x, "pair scale (pair op only)");
  psi_cmd->add_option("--out", psi.out, "write JSON to a file (atomic)");

  SchurArgs schur;
  CLI::App* schur_cmd = app.add_subcommand("schur", "majorization tools");
  schur_cmd->add_option("--majorizes", schur.majorizes_args,
                        "two squares vectors (files or inline JSON): is x majorized by y?")
      ->expected(2)
      ->allow_extra_args(false);  // keep bracketed JSON arguments intact
  schur_cmd->add_option("--diagonalize", schur.diagonalize_arg,
                        "squares vector to walk to (1/n, ..., 1/n)");
  schur_cmd->add_option("--cap", schur.cap_arg, "squares vector whose top entry to cap");
  schur_cmd->add_option("--cap-value", schur.cap_value, "cap for the largest square");
  schur_cmd->add_option("--out", schur.out, "write JSON to a file (atomic)");

  ConstantsArgs constants;
  CLI::App* constants_cmd = app.add_subcommand("constants", "explicit deficit constants");
  constants_cmd->add_option("--p", constants.p, "exponent");
  constants_cmd->add_flag("--table", constants.table, "emit a CSV table over p");
  constants_cmd->add_option("--p-min", constants.p_min, "table start");
  constants_cmd->add_option("--p-max", constants.p_max, "table end");
  constants_cmd->add_option("--step", constants.step, "table step");
  constants_cmd->add_option("--out", constants.out, "write to a file (atomic)");

  VerifyArgs verify;
  verify.seed = default_seed();
  CLI::App* verify_cmd = app.add_subcommand("verify", "check one claim or sweep it");
  verify_cmd
      ->add_option("--claim", verify.claim,
                   "gauss|diag|crit|schur|exchange|tstep|compose|doubling|binom|conc|n2")
      ->required();
  verify_cmd->add_option("--a", verify.a, "coefficients as a JSON array");
  verify_cmd->add_option("--a2", verify.a2, "squared coefficients as a JSON array");
  verify_cmd->add_option("--y2", verify.y2, "second squares vector (schur claim)");
  verify_cmd->add_option("--p", verify.p, "moment exponent");
  verify_cmd->add_option("--n", verify.n, "number of terms (doubling, binom)");
  verify_cmd->add_option("--i", verify.i, "exchanged index (exchange claim)");
  verify_cmd->add_option("--x", verify.x, "offset in [0, 1/2] (n2 claim)");
  verify_cmd->add_option("--b", verify.b, "Gaussian mass (conc claim)");
  verify_cmd->add_option("--probe", verify.probe, "probe level (conc claim)");
  verify_cmd->add_option("--sweep", verify.sweep, "run this many seeded instances");
  verify_cmd->add_option("--seed", verify.seed, "sweep seed (default KHL_SEED)");
  verify_cmd->add_option("--n-min", verify.n_min, "smallest n in sweeps");
  verify_cmd->add_option("--n-max", verify.n_max, "largest n in sweeps");
  verify_cmd->add_option("--tol", verify.tol, "pass tolerance (recorded in manifest)");
  verify_cmd->add_option("--out", verify.out, "write output to a file (atomic)");

  SearchArgs search;
  search.seed = default_seed();
  search.jobs = default_jobs();
  CLI::App* search_cmd = app.add_subcommand("search", "randomized conjecture probes");
  search_cmd->add_option("--conjecture", search.conjecture, "gauss|crit")->required();
  search_cmd->add_option("--p", search.p, "exponent (gauss conjecture)");
  search_cmd->add_option("--n-min", search.n_min, "smallest n");
  search_cmd->add_option("--n-max", search.n_max, "largest n");
  search_cmd->add_option("--samples", search.samples, "samples per n");
  search_cmd->add_option("--seed", search.seed, "seed (default KHL_SEED)");
  search_cmd->add_option("--strategy", search.strategy, "simplex|near_diagonal|spiky|grid");
  search_cmd->add_option("--grid-step", search.grid_step, "lattice step (grid strategy)");
  search_cmd->add_option("--jobs", search.jobs, "worker threads (default KHL_JOBS)");
  search_cmd->add_option("--csv", search.csv, "stream per-sample rows to a CSV file");
  search_cmd->add_option("--out", search.out, "write JSON to a file (atomic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (moment_cmd->parsed()) return run_moment(*moment_cmd, moment);
    if (psi_cmd->parsed()) return run_psi(*psi_cmd, psi);
    if (schur_cmd->parsed()) return run_schur(*schur_cmd, schur);
    if (constants_cmd->parsed()) return run_constants(*constants_cmd, constants);
    if (verify_cmd->parsed()) return run_verify(*verify_cmd, verify);
    if (search_cmd->parsed()) return run_search(*search_cmd, search);
  } catch (const khl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
