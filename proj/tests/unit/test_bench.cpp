#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "exactpen/bench.hpp"
#include "exactpen/errors.hpp"

using Eigen::VectorXd;
using exactpen::BenchRecord;
using exactpen::InstanceSpec;
using exactpen::Method;

namespace {

std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

BenchRecord record(Method method, std::uint64_t seed, int nnz, double err, double fval, double cpu) {
  BenchRecord r;
  r.K = 120;
  r.N = 512;
  r.T = 20;
  r.delta = 1e-2;
  r.seed = seed;
  r.method = method;
  r.status = "ok";
  r.nnz = nnz;
  r.err = err;
  r.fval = fval;
  r.cpu_s = cpu;
  return r;
}

const InstanceSpec kSmall{10, 30, 2, 1e-2, 3};

}  // namespace

TEST(InstanceSpec, ValidateAndScale) {
  EXPECT_NO_THROW(InstanceSpec{}.validate());
  EXPECT_THROW((InstanceSpec{10, 30, 10, 1e-2, 0}.validate()), exactpen::InvalidArgument);
  EXPECT_THROW((InstanceSpec{30, 30, 2, 1e-2, 0}.validate()), exactpen::InvalidArgument);
  EXPECT_THROW((InstanceSpec{10, 30, 2, -1.0, 0}.validate()), exactpen::InvalidArgument);
  const auto s = InstanceSpec::at_scale(3, 5e-3, 9);
  EXPECT_EQ(s.K, 360);
  EXPECT_EQ(s.N, 1536);
  EXPECT_EQ(s.T, 60);
  EXPECT_EQ(s.delta, 5e-3);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_THROW(InstanceSpec::at_scale(0, 1e-2, 0), exactpen::InvalidArgument);
}

TEST(GenerateInstance, Identities) {
  const auto g = exactpen::generate_instance({40, 100, 7, 1e-2, 11});
  const auto& inst = g.instance;
  EXPECT_EQ(inst.rows(), 40);
  EXPECT_EQ(inst.cols(), 100);
  const Eigen::MatrixXd gram = inst.A() * inst.A().transpose();
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE(inst.rows_orthonormal());
  EXPECT_EQ(exactpen::count_nonzeros(g.x_hat), 7);
  EXPECT_NEAR(inst.residual(g.x_hat).norm(), inst.sigma(), 1e-12);
  EXPECT_GT(inst.b().norm(), inst.sigma());
  EXPECT_LE(inst.residual(inst.feasible_point()).norm(), inst.sigma());
}

TEST(GenerateInstance, NoiselessLimit) {
  const auto g = exactpen::generate_instance({20, 50, 3, 0.0, 4});
  EXPECT_EQ(g.instance.sigma(), 0.0);
  EXPECT_EQ(g.instance.b(), g.instance.A() * g.x_hat);
  EXPECT_EQ(exactpen::constraint_violation(g.instance, g.x_hat), 0.0);
}

TEST(GenerateInstance, Deterministic) {
  const auto a = exactpen::generate_instance({20, 50, 3, 1e-2, 8});
  const auto b = exactpen::generate_instance({20, 50, 3, 1e-2, 8});
  const auto c = exactpen::generate_instance({20, 50, 3, 1e-2, 9});
  EXPECT_EQ(a.instance.A(), b.instance.A());
  EXPECT_EQ(a.instance.b(), b.instance.b());
  EXPECT_EQ(a.x_hat, b.x_hat);
  EXPECT_NE(a.instance.A(), c.instance.A());
}

TEST(CountNonzeros, ExactZerosOnly) {
  VectorXd x(5);
  x << 0.0, -0.0, 1e-300, 2.0, 0.0;
  EXPECT_EQ(exactpen::count_nonzeros(x), 2);
}

TEST(RunSingle, StatusesAndFields) {
  exactpen::BenchOptions options;
  const auto ok = exactpen::run_single(kSmall, Method::ExactPenalty, options);
  EXPECT_EQ(ok.status, "ok");
  EXPECT_LE(ok.feas_viol, 1e-6);
  EXPECT_FALSE(std::isnan(ok.kkt_res));
  EXPECT_GT(ok.outer_iters, 0);
  EXPECT_GE(ok.inner_iters_total, ok.outer_iters);

  const auto l1 = exactpen::run_single(kSmall, Method::L1Baseline, options);
  EXPECT_EQ(l1.status, "ok");
  EXPECT_TRUE(std::isnan(l1.kkt_res));

  options.schedule.max_outer = 1;
  EXPECT_EQ(exactpen::run_single(kSmall, Method::ExactPenalty, options).status, "max_outer");

  options.schedule = {};
  options.schedule.rho = 0.5;
  const auto bad = exactpen::run_single(kSmall, Method::ExactPenalty, options);
  EXPECT_FALSE(bad.ok());
  EXPECT_EQ(bad.status.rfind("error: ", 0), 0u);
}

TEST(RunBenchmark, CsvAndAggregateFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "exactpen_unit_bench";
  std::filesystem::create_directories(dir);
  const auto csv_path = (dir / "one.csv").string();
  exactpen::BenchOptions options;
  options.methods = {Method::ExactPenalty};
  const auto records = exactpen::run_benchmark({kSmall}, options, csv_path);
  ASSERT_EQ(records.size(), 1u);

  std::ifstream csv(csv_path);
  std::stringstream csv_text;
  csv_text << csv.rdbuf();
  const auto lines = read_lines(csv_text.str());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], exactpen::kCsvHeader);
  EXPECT_EQ(lines[1].rfind("10,30,2,0.01,3,exact,ok,", 0), 0u);

  std::ifstream md(dir / "one.md");
  std::stringstream md_text;
  md_text << md.rdbuf();
  const auto md_lines = read_lines(md_text.str());
  int data_rows = 0;
  for (const auto& line : md_lines) {
    if (line.rfind("| 10 | 30 | 2 |", 0) == 0) ++data_rows;
  }
  EXPECT_EQ(data_rows, 2);  // one mean row and one median row
  EXPECT_NE(md_text.str().find("## delta = 0.01"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(RunBenchmark, DeterministicAndOrderedAcrossJobs) {
  exactpen::BenchOptions options;
  std::vector<InstanceSpec> specs{{10, 30, 2, 1e-2, 5}, {10, 30, 2, 1e-2, 1}};
  const auto serial = exactpen::run_benchmark(specs, options, "");
  options.jobs = 2;
  const auto parallel = exactpen::run_benchmark(specs, options, "");
  ASSERT_EQ(serial.size(), 6u);
  ASSERT_EQ(parallel.size(), 6u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].method, parallel[i].method);
    EXPECT_EQ(serial[i].seed, parallel[i].seed);
    EXPECT_EQ(serial[i].nnz, parallel[i].nnz);
    EXPECT_EQ(serial[i].err, parallel[i].err);
    EXPECT_EQ(serial[i].fval, parallel[i].fval);
    EXPECT_EQ(serial[i].outer_iters, parallel[i].outer_iters);
  }
  EXPECT_EQ(serial[0].method, Method::ExactPenalty);
  EXPECT_EQ(serial[0].seed, 1u);
  EXPECT_EQ(serial[1].seed, 5u);
  EXPECT_EQ(serial[2].method, Method::InexactPenalty);
  EXPECT_EQ(serial[4].method, Method::L1Baseline);
}

TEST(WriteCsv, NanAndSanitizedStatus) {
  BenchRecord r = record(Method::L1Baseline, 2, 5, 0.5, 1.0, 0.25);
  r.kkt_res = std::nan("");
  r.status = "error: a, b\nc";
  std::ostringstream os;
  exactpen::write_csv(os, {r});
  const auto lines = read_lines(os.str());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[1].find(",l1,error: a; b c,"), std::string::npos);
  EXPECT_NE(lines[1].find(",nan,"), std::string::npos);
  EXPECT_EQ(std::count(lines[1].begin(), lines[1].end(), ','), std::count(lines[0].begin(), lines[0].end(), ','));
}

TEST(Aggregate, MeanMedianAndFailedRunsExcluded) {
  std::vector<BenchRecord> records;
  for (int s = 0; s < 10; ++s) records.push_back(record(Method::ExactPenalty, s, 10 + s, 0.1 * s, 1.0, 2.0));
  records.push_back(record(Method::ExactPenalty, 99, 1000, 100.0, 100.0, 100.0));
  records.back().status = "max_outer";
  const auto mean = exactpen::aggregate_mean(records);
  ASSERT_EQ(mean.size(), 1u);
  EXPECT_EQ(mean[0].runs, 10);
  EXPECT_DOUBLE_EQ(mean[0].nnz, 14.5);
  EXPECT_NEAR(mean[0].err, 0.45, 1e-15);
  const auto median = exactpen::aggregate_median(records);
  EXPECT_DOUBLE_EQ(median[0].nnz, 14.5);
  records.pop_back();
  records.pop_back();
  EXPECT_DOUBLE_EQ(exactpen::aggregate_median(records)[0].nnz, 14.0);
}

TEST(RenderTable, Layout) {
  const std::string header =
      "| K | N | T | baseline nnz | baseline err | baseline CPU | inexact fval | inexact nnz | inexact err | "
      "inexact CPU | exact fval | exact nnz | exact err | exact CPU |";
  const auto empty = read_lines(exactpen::render_table({}));
  ASSERT_EQ(empty.size(), 2u);
  EXPECT_EQ(empty[0], header);

  std::vector<BenchRecord> records{record(Method::ExactPenalty, 0, 219, 0.51, 194.0, 12.5),
                                   record(Method::L1Baseline, 0, 700, 1.2, 300.0, 3.0)};
  const auto lines = read_lines(exactpen::render_table(records));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2], "| 120 | 512 | 20 | 700 | 1.2e+00 | 3.00 | - | - | - | - | 1.94e+02 | 219 | 5.1e-01 | 12.50 |");

  std::vector<BenchRecord> ten;
  for (int s = 0; s < 10; ++s) ten.push_back(record(Method::ExactPenalty, s, 20 + (s % 2), 0.1, 10.0 + s, 1.0));
  const auto ten_lines = read_lines(exactpen::render_table(ten));
  EXPECT_NE(ten_lines[2].find("| 1.45e+01 | 21 |"), std::string::npos);

  records.push_back(record(Method::InexactPenalty, 0, 20, 0.1, 1.0, 1.0));
  records.back().delta = 5e-3;
  EXPECT_THROW(exactpen::render_table(records), exactpen::InvalidArgument);
}
