// qntk: estimate the tangent kernel of Clifford+Pauli-rotation circuits by
// discrete-angle sampling, run kernel regression for the trained mean, and
// cross-check everything against a dense brute-force oracle.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "qntk/bench.hpp"
#include "qntk/errors.hpp"
#include "qntk/estimator.hpp"
#include "qntk/io.hpp"
#include "qntk/oracle.hpp"
#include "qntk/regression.hpp"
#include "qntk/verify.hpp"

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitSingular = 4;

struct CommonOptions {
  std::string circuit_path;
  std::string data_path;
  std::vector<std::string> queries;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::uint64_t seed = 1;
  std::optional<std::int64_t> samples;
  int workers = 0;
  std::string out_path;
  std::int64_t uniform_over_x = 0;  // >0: feature-space size for the uniform bound
  bool pilot = false;
  std::int64_t pilot_samples = 2000;
  double ridge = 0.0;
  bool enumerate = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_data) {
  cmd->add_option("--circuit", opt.circuit_path, "circuit template JSON file")
      ->required();
  if (with_data) {
    cmd->add_option("--data", opt.data_path, "training set CSV (bitstring,label)");
  }
  cmd->add_option("--query", opt.queries, "query input bitstring (repeatable)");
  cmd->add_option("--epsilon", opt.epsilon, "target precision");
  cmd->add_option("--delta", opt.delta, "failure probability");
  cmd->add_option("--seed", opt.seed, "random seed (all randomness flows from it)");
  cmd->add_option("--samples", opt.samples, "explicit sample count N (overrides the calculator)");
  cmd->add_option("--workers", opt.workers, "worker threads (0 = all cores, 1 = serial)");
  cmd->add_option("--out", opt.out_path, "output JSON path (default: stdout)");
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void validate_epsilon_delta(const CommonOptions& opt) {
  if (opt.epsilon && !(*opt.epsilon > 0.0)) {
    throw qntk::PreconditionError("--epsilon must be positive");
  }
  if (opt.delta && !(*opt.delta > 0.0 && *opt.delta < 1.0)) {
    throw qntk::PreconditionError("--delta must lie in (0, 1)");
  }
  if (opt.samples && *opt.samples < 1) {
    throw qntk::PreconditionError("--samples must be >= 1");
  }
}

void emit(const CommonOptions& opt, const json& j) {
  const std::string text = qntk::io::dump_json_17(j);
  if (opt.out_path.empty()) {
    std::cout << text;
  } else {
    qntk::io::write_text_file(opt.out_path, text);
  }
}

json gram_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<qntk::InputPoint> parse_queries(const CommonOptions& opt, std::size_t want_min,
                                            std::size_t want_max) {
  if (opt.queries.size() < want_min ||
      (want_max > 0 && opt.queries.size() > want_max)) {
    throw qntk::PreconditionError(
        "expected " + std::to_string(want_min) +
        (want_max == want_min ? "" : ".." + std::to_string(want_max)) +
        " --query arguments, got " + std::to_string(opt.queries.size()));
  }
  std::vector<qntk::InputPoint> out;
  out.reserve(opt.queries.size());
  for (const auto& q : opt.queries) {
    try {
      out.emplace_back(q);
    } catch (const std::invalid_argument& e) {
      throw qntk::PreconditionError(e.what());
    }
  }
  return out;
}

// the zero-mean hypothesis behind the sample-size constants is not enforced
// by the ansatz; surface an audit instead
void warn_nonzero_mean(const qntk::CircuitTemplate& tmpl, const qntk::InputPoint& x,
                       const qntk::SampleSet& samples, int workers, json& warnings) {
  const auto mean = qntk::estimate_mean_f(tmpl, x, samples, workers);
  if (std::abs(mean.value) > 5.0 * std::max(mean.std_error, 1e-12)) {
    const std::string msg =
        "estimated E_theta f(\"" + x.bits() + "\") = " + std::to_string(mean.value) +
        " is significantly nonzero; the sample-size guarantees assume a zero-mean model";
    warnings.push_back(msg);
    std::cerr << "warning: " << msg << "\n";
  }
}

int cmd_estimate_ntk(const CommonOptions& opt) {
  const auto start = Clock::now();
  validate_epsilon_delta(opt);
  const auto tmpl = qntk::io::load_circuit_file(opt.circuit_path);
  const auto queries = parse_queries(opt, 2, 2);
  const std::int64_t L = std::int64_t(tmpl.num_parameters());
  const std::int64_t m = std::int64_t(tmpl.observable->term_count());

  std::int64_t n_samples;
  if (opt.samples) {
    n_samples = *opt.samples;
  } else {
    if (!opt.epsilon || !opt.delta) {
      throw qntk::PreconditionError("need --epsilon and --delta (or an explicit --samples)");
    }
    n_samples = qntk::sample_size_ntk(*opt.epsilon, *opt.delta, L, m);
  }

  json result;
  json warnings = json::array();
  if (opt.enumerate) {
    result["value"] = qntk::enumerate_ntk(tmpl, queries[0], queries[1]);
    result["N"] = std::int64_t(1) << (2 * L);
    result["std_error"] = 0.0;
    result["enumeration"] = true;
  } else {
    const auto samples = qntk::sample_parameters(std::size_t(L), n_samples, opt.seed);
    const auto est = qntk::estimate_ntk(tmpl, queries[0], queries[1], samples, opt.workers);
    result["value"] = est.value;
    result["N"] = est.sample_count;
    result["std_error"] = est.std_error;
    result["variance"] = est.variance;
    warn_nonzero_mean(tmpl, queries[0], samples, opt.workers, warnings);
    if (!(queries[0] == queries[1])) {
      warn_nonzero_mean(tmpl, queries[1], samples, opt.workers, warnings);
    }
  }
  result["seed"] = opt.seed;
  if (opt.epsilon) {
    result["epsilon"] = *opt.epsilon;
  }
  if (opt.delta) {
    result["delta"] = *opt.delta;
  }
  result["L"] = L;
  result["m"] = m;
  result["sum_abs_coeff"] = tmpl.observable->sum_abs_coeff();
  result["warnings"] = warnings;
  result["elapsed_ms"] = elapsed_ms(start);
  emit(opt, result);
  return kExitOk;
}

int cmd_estimate_gram(const CommonOptions& opt) {
  const auto start = Clock::now();
  validate_epsilon_delta(opt);
  const auto tmpl = qntk::io::load_circuit_file(opt.circuit_path);
  std::vector<qntk::InputPoint> inputs;
  if (!opt.data_path.empty()) {
    const auto training = qntk::io::load_training_csv(opt.data_path);
    inputs = training.inputs;
  }
  for (const auto& q : parse_queries(opt, inputs.empty() ? 1 : 0, 0)) {
    inputs.push_back(q);
  }
  const std::int64_t L = std::int64_t(tmpl.num_parameters());
  const std::int64_t m = std::int64_t(tmpl.observable->term_count());
  std::int64_t n_samples;
  if (opt.samples) {
    n_samples = *opt.samples;
  } else if (opt.epsilon && opt.delta) {
    n_samples = qntk::sample_size_ntk(*opt.epsilon, *opt.delta, L, m);
  } else {
    throw qntk::PreconditionError("need --epsilon/--delta or --samples");
  }

  json result;
  if (opt.enumerate) {
    result["matrix"] = gram_to_json(qntk::enumerate_gram(tmpl, inputs));
    result["N"] = std::int64_t(1) << (2 * L);
    result["max_std_error"] = 0.0;
    result["enumeration"] = true;
  } else {
    const auto samples = qntk::sample_parameters(std::size_t(L), n_samples, opt.seed);
    const auto est = qntk::estimate_gram(tmpl, inputs, samples, opt.workers);
    result["matrix"] = gram_to_json(est.matrix);
    result["N"] = est.sample_count;
    result["max_std_error"] = est.max_std_error;
  }
  json input_names = json::array();
  for (const auto& x : inputs) {
    input_names.push_back(x.bits());
  }
  result["inputs"] = input_names;
  result["seed"] = opt.seed;
  result["elapsed_ms"] = elapsed_ms(start);
  emit(opt, result);
  return kExitOk;
}

int cmd_estimate_mu(const CommonOptions& opt) {
  const auto start = Clock::now();
  validate_epsilon_delta(opt);
  const auto tmpl = qntk::io::load_circuit_file(opt.circuit_path);
  if (opt.data_path.empty()) {
    throw qntk::PreconditionError("estimate-mu needs --data with the training set");
  }
  const auto training = qntk::io::load_training_csv(opt.data_path);
  const auto queries = parse_queries(opt, 1, 0);
  const std::int64_t L = std::int64_t(tmpl.num_parameters());
  const std::int64_t m = std::int64_t(tmpl.observable->term_count());

  json result;
  json warnings = json::array();
  qntk::MuEstimate est;
  if (opt.enumerate) {
    est = qntk::enumerate_mu_infinity(tmpl, queries, training, opt.ridge);
    result["enumeration"] = true;
  } else {
    std::int64_t n_samples;
    json pilot_info;
    if (opt.samples) {
      n_samples = *opt.samples;
    } else {
      if (!opt.epsilon || !opt.delta) {
        throw qntk::PreconditionError("need --epsilon and --delta (or an explicit --samples)");
      }
      if (!opt.pilot) {
        throw qntk::PreconditionError(
            "the sample-size bound needs ||K_train^{-1}||_op and ||K_train^{-1}Y||_2; "
            "pass --pilot to estimate them from a pilot run, or give --samples");
      }
      const auto pilot_samples =
          qntk::sample_parameters(std::size_t(L), opt.pilot_samples, opt.seed + 1);
      const auto pilot_gram =
          qntk::estimate_gram(tmpl, training.inputs, pilot_samples, opt.workers);
      const auto pilot_inv = qntk::invert_gram(pilot_gram.matrix, opt.ridge);
      const double norm_kinv = 1.0 / pilot_inv.lambda_min;
      const double norm_kinvy = (pilot_inv.inverse * training.labels).norm();
      n_samples = qntk::sample_size_mu(*opt.epsilon, *opt.delta, L, m, training.size(),
                                       norm_kinv, training.labels.norm(), norm_kinvy,
                                       std::max<std::int64_t>(opt.uniform_over_x, 1));
      pilot_info["N"] = opt.pilot_samples;
      pilot_info["norm_kinv_op"] = norm_kinv;
      pilot_info["norm_kinv_y"] = norm_kinvy;
      pilot_info["condition_number"] = pilot_inv.condition_number;
      result["pilot"] = pilot_info;
    }
    const auto samples = qntk::sample_parameters(std::size_t(L), n_samples, opt.seed);
    est = qntk::estimate_mu_infinity(tmpl, queries, training, samples, opt.workers,
                                     opt.ridge);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto& mean = est.query_mean_f[i];
      if (std::abs(mean.value) > 5.0 * std::max(mean.std_error, 1e-12)) {
        const std::string msg = "estimated E_theta f(\"" + queries[i].bits() +
                                "\") = " + std::to_string(mean.value) +
                                " is significantly nonzero; the sample-size guarantees "
                                "assume a zero-mean model";
        warnings.push_back(msg);
        std::cerr << "warning: " << msg << "\n";
      }
    }
  }

  json mu = json::object();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    mu[queries[i].bits()] = est.mu[i];
  }
  result["mu"] = mu;
  result["gram"] = gram_to_json(est.gram);
  result["query_rows"] = gram_to_json(est.query_rows);
  result["condition_number"] = est.inversion.condition_number;
  result["inverse_residual"] = est.inversion.residual;
  result["lambda_min"] = est.inversion.lambda_min;
  result["lambda_max"] = est.inversion.lambda_max;
  result["N"] = est.sample_count;
  result["seed"] = opt.seed;
  result["d_train"] = training.size();
  if (opt.ridge != 0.0) {
    result["regularized"] = true;
    result["ridge"] = opt.ridge;
    warnings.push_back(
        "ridge regularization is enabled; the output is not the plain "
        "kernel-regression estimator");
  }
  if (est.inversion.condition_warning) {
    warnings.push_back("estimated Gram condition number " +
                       std::to_string(est.inversion.condition_number) +
                       " is above the warning threshold; the trained-mean "
                       "sample-size bound degrades as ||K^{-1}||^4");
  }
  if (opt.uniform_over_x > 0) {
    result["uniform_over_X"] = opt.uniform_over_x;
  }
  result["warnings"] = warnings;
  result["elapsed_ms"] = elapsed_ms(start);
  emit(opt, result);
  return kExitOk;
}

struct SampleSizeOptions {
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t L = 0;
  std::int64_t m = 0;
  std::string circuit_path;
  // mu-specific
  std::int64_t d_train = 0;
  std::optional<double> norm_kinv;
  std::optional<double> norm_y;
  std::optional<double> norm_kinvy;
  std::int64_t uniform_over_x = 1;
  bool pilot = false;
  std::string data_path;
  std::int64_t pilot_samples = 2000;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out_path;
};

void resolve_lm(SampleSizeOptions& opt) {
  if (!opt.circuit_path.empty()) {
    const auto tmpl = qntk::io::load_circuit_file(opt.circuit_path);
    opt.L = std::int64_t(tmpl.num_parameters());
    opt.m = std::int64_t(tmpl.observable->term_count());
  }
  if (opt.L < 1 || opt.m < 1) {
    throw qntk::PreconditionError("need --L and --m (or --circuit to read them from)");
  }
}

int cmd_sample_size_ntk(SampleSizeOptions& opt) {
  resolve_lm(opt);
  const std::int64_t n = qntk::sample_size_ntk(opt.epsilon, opt.delta, opt.L, opt.m);
  json result{{"N", n},      {"epsilon", opt.epsilon}, {"delta", opt.delta},
              {"L", opt.L},  {"m", opt.m},             {"target", "ntk"}};
  CommonOptions common;
  common.out_path = opt.out_path;
  emit(common, result);
  return kExitOk;
}

int cmd_sample_size_mu(SampleSizeOptions& opt) {
  resolve_lm(opt);
  json result{{"epsilon", opt.epsilon}, {"delta", opt.delta}, {"L", opt.L},
              {"m", opt.m},             {"target", "mu"}};
  double norm_kinv, norm_y, norm_kinvy;
  if (opt.pilot) {
    if (opt.circuit_path.empty() || opt.data_path.empty()) {
      throw qntk::PreconditionError("--pilot needs --circuit and --data");
    }
    const auto tmpl = qntk::io::load_circuit_file(opt.circuit_path);
    const auto training = qntk::io::load_training_csv(opt.data_path);
    opt.d_train = training.size();
    const auto samples = qntk::sample_parameters(std::size_t(opt.L), opt.pilot_samples,
                                                 opt.seed + 1);
    const auto gram = qntk::estimate_gram(tmpl, training.inputs, samples, opt.workers);
    const auto inv = qntk::invert_gram(gram.matrix);
    norm_kinv = 1.0 / inv.lambda_min;
    norm_y = training.labels.norm();
    norm_kinvy = (inv.inverse * training.labels).norm();
    result["pilot"] = json{{"N", opt.pilot_samples},
                           {"norm_kinv_op", norm_kinv},
                           {"norm_y", norm_y},
                           {"norm_kinv_y", norm_kinvy},
                           {"condition_number", inv.condition_number}};
  } else {
    if (!opt.norm_kinv || !opt.norm_y || !opt.norm_kinvy) {
      throw qntk::PreconditionError(
          "need --norm-kinv, --norm-y and --norm-kinvy (or --pilot with --circuit/--data)");
    }
    norm_kinv = *opt.norm_kinv;
    norm_y = *opt.norm_y;
    norm_kinvy = *opt.norm_kinvy;
  }
  if (opt.d_train < 1) {
    throw qntk::PreconditionError("need --d-train >= 1 (or --pilot with --data)");
  }
  const std::int64_t n =
      qntk::sample_size_mu(opt.epsilon, opt.delta, opt.L, opt.m, opt.d_train, norm_kinv,
                           norm_y, norm_kinvy, opt.uniform_over_x);
  result["N"] = n;
  result["d_train"] = opt.d_train;
  result["uniform_over_X"] = opt.uniform_over_x;
  CommonOptions common;
  common.out_path = opt.out_path;
  emit(common, result);
  return kExitOk;
}

int cmd_verify(std::uint64_t seed, bool inject_bug) {
  qntk::verify::VerifyOptions opts;
  opts.seed = seed;
  opts.inject_phase_bug = inject_bug;
  if (!inject_bug && std::getenv("QNTK_INJECT_PHASE_BUG")) {
    opts.inject_phase_bug = true;
  }
  const auto results = qntk::verify::run_verification(opts);
  std::printf("%-38s %8s %12s %12s %s\n", "check", "cases", "worst", "tolerance",
              "status");
  for (const auto& r : results) {
    std::printf("%-38s %8lld %12.3e %12.3e %s\n", r.name.c_str(),
                static_cast<long long>(r.cases), r.worst, r.tolerance,
                r.passed ? "ok" : "FAILED");
    if (!r.passed) {
      std::printf("    %s\n", r.detail.c_str());
    }
  }
  return qntk::verify::all_passed(results) ? kExitOk : kExitVerifyFailed;
}

int cmd_bench(std::uint64_t seed, const std::string& out_path) {
  const auto report = qntk::bench::run_bench(seed);
  const std::string csv = qntk::bench::to_csv(report);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    qntk::io::write_text_file(out_path, csv);
    std::printf("exponents: n=%.3f L=%.3f m=%.3f N=%.3f\n", report.exponent_n,
                report.exponent_l, report.exponent_m, report.exponent_samples);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tangent-kernel estimation for Clifford+Pauli-rotation circuits"};
  app.require_subcommand(1);

  CommonOptions ntk_opt, gram_opt, mu_opt;
  SampleSizeOptions ss_opt;
  std::uint64_t verify_seed = 20240901;
  bool verify_inject = false;
  std::uint64_t bench_seed = 1;
  std::string bench_out;

  auto* ntk = app.add_subcommand("estimate-ntk", "estimate K(x, x') for two queries");
  add_common_flags(ntk, ntk_opt, false);
  ntk->add_flag("--enumerate", ntk_opt.enumerate,
                "average over the full discrete parameter grid instead of sampling");

  auto* gram = app.add_subcommand("estimate-gram", "estimate the kernel Gram matrix");
  add_common_flags(gram, gram_opt, true);
  gram->add_flag("--enumerate", gram_opt.enumerate, "exact discrete-grid average");

  auto* mu = app.add_subcommand("estimate-mu", "estimate the trained mean at the queries");
  add_common_flags(mu, mu_opt, true);
  mu->add_option("--uniform-over-X", mu_opt.uniform_over_x,
                 "feature-space size for the uniform-error sample bound");
  mu->add_flag("--pilot", mu_opt.pilot, "derive the sample size from a pilot Gram run");
  mu->add_option("--pilot-samples", mu_opt.pilot_samples, "pilot run sample count");
  mu->add_option("--ridge", mu_opt.ridge,
                 "add an explicit ridge term before inversion (marks output regularized)");
  mu->add_flag("--enumerate", mu_opt.enumerate, "exact discrete-grid kernels");

  auto* ss = app.add_subcommand("sample-size", "evaluate the sample-size calculators");
  ss->require_subcommand(1);
  auto* ss_ntk = ss->add_subcommand("ntk", "samples for the kernel estimate");
  auto* ss_mu = ss->add_subcommand("mu", "samples for the trained-mean estimate");
  for (auto* sub : {ss_ntk, ss_mu}) {
    sub->add_option("--epsilon", ss_opt.epsilon, "target precision")->required();
    sub->add_option("--delta", ss_opt.delta, "failure probability")->required();
    sub->add_option("--L", ss_opt.L, "parameter count");
    sub->add_option("--m", ss_opt.m, "observable term count");
    sub->add_option("--circuit", ss_opt.circuit_path, "read L and m from a circuit file");
    sub->add_option("--out", ss_opt.out_path, "output JSON path");
  }
  ss_mu->add_option("--d-train", ss_opt.d_train, "training-set size");
  ss_mu->add_option("--norm-kinv", ss_opt.norm_kinv, "||K_train^{-1}||_op");
  ss_mu->add_option("--norm-y", ss_opt.norm_y, "||Y||_2");
  ss_mu->add_option("--norm-kinvy", ss_opt.norm_kinvy, "||K_train^{-1} Y||_2");
  ss_mu->add_option("--uniform-over-X", ss_opt.uniform_over_x,
                    "feature-space size (uniform-error variant)");
  ss_mu->add_flag("--pilot", ss_opt.pilot, "estimate the norms from a pilot Gram run");
  ss_mu->add_option("--data", ss_opt.data_path, "training CSV for the pilot run");
  ss_mu->add_option("--pilot-samples", ss_opt.pilot_samples, "pilot sample count");
  ss_mu->add_option("--seed", ss_opt.seed, "pilot seed");
  ss_mu->add_option("--workers", ss_opt.workers, "pilot worker threads");

  auto* verify = app.add_subcommand("verify", "run the oracle cross-check suite");
  verify->add_option("--seed", verify_seed, "randomization seed");
  verify->add_flag("--inject-phase-bug", verify_inject)->group("");  // test hook

  auto* bench = app.add_subcommand("bench", "scaling sweeps with log-log exponent fits");
  bench->add_option("--seed", bench_seed, "instance seed");
  bench->add_option("--out", bench_out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitParse;
  }

  try {
    if (ntk->parsed()) {
      return cmd_estimate_ntk(ntk_opt);
    }
    if (gram->parsed()) {
      return cmd_estimate_gram(gram_opt);
    }
    if (mu->parsed()) {
      return cmd_estimate_mu(mu_opt);
    }
    if (ss->parsed()) {
      return ss_ntk->parsed() ? cmd_sample_size_ntk(ss_opt) : cmd_sample_size_mu(ss_opt);
    }
    if (verify->parsed()) {
      return cmd_verify(verify_seed, verify_inject);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_seed, bench_out);
    }
  } catch (const qntk::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const qntk::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const qntk::SingularGramError& e) {
    std::cerr << "singular kernel: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitOk;
}
