#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "exactpen/npg.hpp"
#include "exactpen/penalty.hpp"
#include "exactpen/problem.hpp"
#include "exactpen/regularizer.hpp"

namespace exactpen {

/// Random sparse-recovery instance: K x N sensing matrix with orthonormal rows,
/// a planted T-sparse signal and noise of scale delta.
struct InstanceSpec {
  int K = 120;
  int N = 512;
  int T = 20;
  double delta = 1e-2;
  std::uint64_t seed = 0;

  void validate() const;
  /// (120 i, 512 i, 20 i).
  static InstanceSpec at_scale(int i, double delta, std::uint64_t seed);
};

struct GeneratedInstance {
  ProblemInstance instance;
  Eigen::VectorXd x_hat;
};

/// Deterministic in the seed. b = A x_hat + delta xi, sigma = delta ||xi||,
/// feasible point A^T b. Throws RankDeficient when five matrix draws fail.
GeneratedInstance generate_instance(const InstanceSpec& spec);

/// Count of exactly nonzero entries.
int count_nonzeros(const Eigen::VectorXd& x);

struct BenchRecord {
  int K = 0;
  int N = 0;
  int T = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  Method method = Method::ExactPenalty;
  std::string status;  // "ok", "max_outer" or "error: <message>"
  int nnz = 0;
  double err = 0.0;   // ||x - x_hat||
  double fval = 0.0;  // Phi(x) for the bridge regularizer
  double cpu_s = 0.0;
  double feas_viol = 0.0;
  double kkt_res = 0.0;  // NaN when not checked (l1 baseline)
  double cq_value = 0.0;
  double multiplier = 0.0;
  int outer_iters = 0;
  int inner_iters_total = 0;

  bool ok() const { return status == "ok"; }
};

struct BenchOptions {
  std::vector<Method> methods{Method::ExactPenalty, Method::InexactPenalty, Method::L1Baseline};
  Regularizer reg = Regularizer::bridge(0.5);
  PenaltySchedule schedule;
  NpgConfig npg;
  int jobs = 1;
  /// Starting point value; every coordinate of x0 is set to it.
  double x0_value = 1.0;
};

/// Generate, solve, diagnose and time one (spec, method) pair. Never throws for
/// solver failures; they are reported in the status field.
BenchRecord run_single(const InstanceSpec& spec, Method method, const BenchOptions& options);

/// All spec x method runs, sorted by (K, N, T, delta, method, seed). When
/// output_path is non-empty, writes the CSV there and the aggregate markdown
/// next to it (same stem, .md extension).
std::vector<BenchRecord> run_benchmark(const std::vector<InstanceSpec>& specs, const BenchOptions& options,
                                       const std::string& output_path);

inline constexpr const char* kCsvHeader =
    "K,N,T,delta,seed,method,status,nnz,err,fval,cpu_s,feas_viol,kkt_res,outer_iters,inner_iters_total";

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);

/// Per-(K,N,T,delta,method) means over successful runs.
struct AggregateRow {
  int K = 0;
  int N = 0;
  int T = 0;
  double delta = 0.0;
  Method method = Method::ExactPenalty;
  int runs = 0;
  double nnz = 0.0;
  double err = 0.0;
  double fval = 0.0;
  double cpu_s = 0.0;
};

std::vector<AggregateRow> aggregate_mean(const std::vector<BenchRecord>& records);
std::vector<AggregateRow> aggregate_median(const std::vector<BenchRecord>& records);

/// Markdown table with one row per (K, N, T): baseline (nnz, err, CPU),
/// inexact (fval, nnz, err, CPU), exact (fval, nnz, err, CPU), means over seeds.
/// All records must share one delta.
std::string render_table(const std::vector<BenchRecord>& records);
/// Same layout using medians.
std::string render_median_table(const std::vector<BenchRecord>& records);

}  // namespace exactpen
