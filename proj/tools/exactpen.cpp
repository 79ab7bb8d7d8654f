#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "exactpen/bench.hpp"
#include "exactpen/errors.hpp"
#include "exactpen/penalty.hpp"
#include "exactpen/serialization.hpp"
#include "exactpen/theory.hpp"

namespace {

constexpr int kFailure = 2;

std::vector<exactpen::Method> parse_methods(const std::string& text) {
  std::vector<exactpen::Method> methods;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) methods.push_back(exactpen::parse_method(item));
  }
  if (methods.empty()) throw exactpen::InvalidArgument("no methods given");
  return methods;
}

struct BenchArgs {
  int rows = 120;
  int cols = 512;
  int sparsity = 20;
  std::vector<double> deltas{1e-2};
  int seeds = 10;
  std::uint64_t first_seed = 0;
  std::string methods = "exact,inexact,l1";
  std::string out = "results.csv";
  std::string json_out;
  int jobs = 1;
  int scale_index = 0;
  std::string reg = "bridge:0.5";
  bool no_polish = false;
};

int run_bench(const BenchArgs& args) {
  exactpen::BenchOptions options;
  options.methods = parse_methods(args.methods);
  options.reg = exactpen::parse_regularizer(args.reg);
  options.jobs = args.jobs;
  options.schedule.final_polish = !args.no_polish;

  std::vector<exactpen::InstanceSpec> specs;
  for (double delta : args.deltas) {
    for (int s = 0; s < args.seeds; ++s) {
      const std::uint64_t seed = args.first_seed + static_cast<std::uint64_t>(s);
      exactpen::InstanceSpec spec =
          args.scale_index > 0 ? exactpen::InstanceSpec::at_scale(args.scale_index, delta, seed)
                               : exactpen::InstanceSpec{args.rows, args.cols, args.sparsity, delta, seed};
      spec.validate();
      specs.push_back(spec);
    }
  }

  const auto records = exactpen::run_benchmark(specs, options, args.out);

  if (!args.json_out.empty()) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : records) doc.push_back(exactpen::record_to_json(r));
    std::ofstream out(args.json_out);
    if (!out) throw exactpen::InvalidArgument("cannot write " + args.json_out);
    out << doc.dump(2) << '\n';
  }

  int failures = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failures;
      std::cerr << "run K=" << r.K << " N=" << r.N << " delta=" << r.delta << " seed=" << r.seed
                << " method=" << exactpen::to_string(r.method) << ": " << r.status << '\n';
    }
  }
  for (double delta : args.deltas) {
    std::vector<exactpen::BenchRecord> subset;
    for (const auto& r : records) {
      if (r.delta == delta) subset.push_back(r);
    }
    std::cout << "delta = " << delta << "\n\n" << exactpen::render_table(subset) << '\n';
  }
  std::cout << records.size() << " runs, " << failures << " failed; records in " << args.out << '\n';
  return failures == 0 ? 0 : kFailure;
}

struct SolveArgs {
  std::string instance;
  std::string method = "exact";
  std::string report;
  std::string reg = "bridge:0.5";
  double x0 = 1.0;
  std::string trace;
  bool no_polish = false;
};

int run_solve(const SolveArgs& args) {
  const exactpen::ProblemInstance inst = exactpen::load_instance(args.instance);
  const exactpen::Method method = exactpen::parse_method(args.method);
  const exactpen::Regularizer reg = exactpen::parse_regularizer(args.reg);
  exactpen::NpgConfig npg;
  std::ofstream trace;
  if (!args.trace.empty()) {
    trace.open(args.trace);
    if (!trace) throw exactpen::InvalidArgument("cannot write " + args.trace);
    npg.trace = &trace;
  }
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(inst.cols(), args.x0);
  exactpen::PenaltySchedule schedule;
  schedule.final_polish = !args.no_polish;

  exactpen::SolveReport report;
  int code = 0;
  try {
    report = exactpen::solve_with_method(method, inst, reg, schedule, npg, x0);
  } catch (const exactpen::MaxOuterExceeded& e) {
    std::cerr << e.what() << '\n';
    report = e.report();
    code = kFailure;
  }

  const nlohmann::json doc = exactpen::report_to_json(report);
  if (args.report.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream out(args.report);
    if (!out) throw exactpen::InvalidArgument("cannot write " + args.report);
    out << doc.dump(2) << '\n';
    std::cout << "method " << exactpen::to_string(method) << ", outer iterations " << report.outer_iterations
              << ", converged " << (report.converged ? "yes" : "no") << ", nnz "
              << exactpen::count_nonzeros(report.x_final) << '\n';
  }
  return code;
}

int run_check(const std::string& suite) {
  if (suite != "theory") throw exactpen::InvalidArgument("unknown suite '" + suite + "'");
  int failures = 0;
  for (const auto& r : exactpen::run_theory_suite()) {
    std::printf("%-4s %-24s samples=%ld violations=%ld worst_excess=%.3g %s\n", r.passed() ? "ok" : "FAIL",
                r.name.c_str(), r.samples, r.violations, r.worst_excess, r.detail.c_str());
    if (!r.passed()) ++failures;
  }
  return failures == 0 ? 0 : kFailure;
}

struct GenerateArgs {
  int rows = 120;
  int cols = 512;
  int sparsity = 20;
  double delta = 1e-2;
  std::uint64_t seed = 0;
  std::string out;
  std::string planted;
};

int run_generate(const GenerateArgs& args) {
  exactpen::InstanceSpec spec{args.rows, args.cols, args.sparsity, args.delta, args.seed};
  const auto generated = exactpen::generate_instance(spec);
  exactpen::save_instance(generated.instance, args.out);
  if (!args.planted.empty()) {
    std::ofstream out(args.planted);
    if (!out) throw exactpen::InvalidArgument("cannot write " + args.planted);
    nlohmann::json doc = nlohmann::json::array();
    for (Eigen::Index i = 0; i < generated.x_hat.size(); ++i) doc.push_back(generated.x_hat[i]);
    out << doc.dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact penalty solver for sparse recovery with bridge-type regularizers"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the random sparse-recovery benchmark");
  bench_cmd->add_option("--rows", bench.rows, "K, rows of A")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--cols", bench.cols, "N, columns of A")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--sparsity", bench.sparsity, "T, nonzeros of the planted signal")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--delta", bench.deltas, "Noise level(s)")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "Number of seeds per delta")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--first-seed", bench.first_seed, "First seed");
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated subset of exact,inexact,l1");
  bench_cmd->add_option("--out", bench.out, "CSV output path; the aggregate table goes next to it (.md)");
  bench_cmd->add_option("--json", bench.json_out, "Also write every record as JSON");
  bench_cmd->add_option("--jobs", bench.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--scale-index", bench.scale_index, "Use (120i, 512i, 20i)")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--reg", bench.reg, "Regularizer: bridge:p, l1, fraction:a or logistic:a");
  bench_cmd->add_flag("--no-polish", bench.no_polish, "Skip the final solve at the eps floor");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance stored as JSON");
  solve_cmd->add_option("--instance", solve.instance, "Instance JSON")->required();
  solve_cmd->add_option("--method", solve.method, "exact, inexact or l1");
  solve_cmd->add_option("--report", solve.report, "Report JSON (stdout when omitted)");
  solve_cmd->add_option("--reg", solve.reg, "Regularizer: bridge:p, l1, fraction:a or logistic:a");
  solve_cmd->add_option("--x0", solve.x0, "Value of every coordinate of the starting point");
  solve_cmd->add_option("--trace", solve.trace, "Write per-iteration JSON lines here");
  solve_cmd->add_flag("--no-polish", solve.no_polish, "Skip the final solve at the eps floor");

  std::string suite = "theory";
  auto* check_cmd = app.add_subcommand("check", "Run numerical property suites");
  check_cmd->add_option("--suite", suite, "Suite name")->check(CLI::IsMember({"theory"}));

  GenerateArgs generate;
  auto* generate_cmd = app.add_subcommand("generate", "Write one random instance as JSON");
  generate_cmd->add_option("--rows", generate.rows)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--cols", generate.cols)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--sparsity", generate.sparsity)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--delta", generate.delta);
  generate_cmd->add_option("--seed", generate.seed);
  generate_cmd->add_option("--out", generate.out, "Instance JSON")->required();
  generate_cmd->add_option("--planted", generate.planted, "Write the planted signal here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench_cmd) return run_bench(bench);
    if (*solve_cmd) return run_solve(solve);
    if (*check_cmd) return run_check(suite);
    if (*generate_cmd) return run_generate(generate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
