#include "exactpen/bench.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "exactpen/diagnostics.hpp"
#include "exactpen/errors.hpp"
#include "exactpen/rng.hpp"

namespace exactpen {

namespace {

constexpr int kMaxDraws = 5;
// Stream ids for the independent parts of one instance.
constexpr std::uint64_t kMatrixStream = 0;
constexpr std::uint64_t kSignalStream = 100;
constexpr std::uint64_t kNoiseStream = 200;

std::string format(const char* fmt, double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, value);
  return buffer;
}

using GroupKey = std::tuple<int, int, int, double, int>;

GroupKey group_key(const BenchRecord& r) { return {r.K, r.N, r.T, r.delta, static_cast<int>(r.method)}; }

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

template <class Reduce>
std::vector<AggregateRow> aggregate(const std::vector<BenchRecord>& records, Reduce reduce) {
  std::map<GroupKey, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) {
    if (r.ok()) groups[group_key(r)].push_back(&r);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : groups) {
    AggregateRow row;
    row.K = std::get<0>(key);
    row.N = std::get<1>(key);
    row.T = std::get<2>(key);
    row.delta = std::get<3>(key);
    row.method = static_cast<Method>(std::get<4>(key));
    row.runs = static_cast<int>(members.size());
    const auto collect = [&](auto field) {
      std::vector<double> values;
      for (const auto* m : members) values.push_back(field(*m));
      return reduce(values);
    };
    row.nnz = collect([](const BenchRecord& r) { return static_cast<double>(r.nnz); });
    row.err = collect([](const BenchRecord& r) { return r.err; });
    row.fval = collect([](const BenchRecord& r) { return r.fval; });
    row.cpu_s = collect([](const BenchRecord& r) { return r.cpu_s; });
    rows.push_back(row);
  }
  return rows;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::string render(const std::vector<BenchRecord>& records, const std::vector<AggregateRow>& rows) {
  for (const auto& r : records) {
    if (r.delta != records.front().delta) throw InvalidArgument("render_table needs records sharing one delta");
  }
  std::ostringstream os;
  os << "| K | N | T | baseline nnz | baseline err | baseline CPU | inexact fval | inexact nnz | inexact err | "
        "inexact CPU | exact fval | exact nnz | exact err | exact CPU |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";

  std::map<std::tuple<int, int, int>, std::map<Method, AggregateRow>> table;
  for (const auto& row : rows) table[{row.K, row.N, row.T}][row.method] = row;
  for (const auto& [dims, by_method] : table) {
    os << "| " << std::get<0>(dims) << " | " << std::get<1>(dims) << " | " << std::get<2>(dims) << " |";
    const auto cells = [&](Method method, bool with_fval) {
      const auto it = by_method.find(method);
      if (it == by_method.end()) {
        os << (with_fval ? " - | - | - | - |" : " - | - | - |");
        return;
      }
      const AggregateRow& row = it->second;
      if (with_fval) os << ' ' << format("%.2e", row.fval) << " |";
      os << ' ' << std::llround(row.nnz) << " | " << format("%.1e", row.err) << " | " << format("%.2f", row.cpu_s)
         << " |";
    };
    cells(Method::L1Baseline, false);
    cells(Method::InexactPenalty, true);
    cells(Method::ExactPenalty, true);
    os << '\n';
  }
  return os.str();
}

}  // namespace

void InstanceSpec::validate() const {
  if (!(T > 0 && T < K && K < N)) throw InvalidArgument("instance spec needs 0 < T < K < N");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be finite and nonnegative");
}

InstanceSpec InstanceSpec::at_scale(int i, double delta, std::uint64_t seed) {
  if (i <= 0) throw InvalidArgument("scale index must be positive");
  return {120 * i, 512 * i, 20 * i, delta, seed};
}

GeneratedInstance generate_instance(const InstanceSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);
  const double rank_tol = 1e-10 * std::sqrt(static_cast<double>(spec.N));

  Eigen::MatrixXd A;
  for (int draw = 0; draw < kMaxDraws && A.size() == 0; ++draw) {
    Rng rng = root.split(kMatrixStream + draw);
    Eigen::MatrixXd gaussian(spec.N, spec.K);  // drawn transposed: rows of A are its columns
    for (Eigen::Index j = 0; j < gaussian.cols(); ++j) {
      for (Eigen::Index i = 0; i < gaussian.rows(); ++i) gaussian(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    const Eigen::MatrixXd& packed = qr.matrixQR();
    bool full_rank = true;
    for (Eigen::Index i = 0; i < spec.K; ++i) {
      if (std::abs(packed(i, i)) < rank_tol) full_rank = false;
    }
    if (!full_rank) continue;
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(spec.N, spec.K);
    A = Q.transpose();
  }
  if (A.size() == 0) throw RankDeficient("sensing matrix rank deficient after 5 draws");

  Rng signal = root.split(kSignalStream);
  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(spec.N);
  std::vector<int> indices(spec.N);
  std::iota(indices.begin(), indices.end(), 0);
  // Partial Fisher-Yates: the first T entries form a uniform T-subset.
  for (int i = 0; i < spec.T; ++i) {
    const auto j = i + static_cast<int>(signal.below(static_cast<std::uint64_t>(spec.N - i)));
    std::swap(indices[i], indices[j]);
  }
  for (int i = 0; i < spec.T; ++i) x_hat[indices[i]] = signal.normal();

  const Eigen::VectorXd clean = A * x_hat;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Rng noise = root.split(kNoiseStream + draw);
    Eigen::VectorXd xi(spec.K);
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = noise.normal();
    Eigen::VectorXd b = clean + spec.delta * xi;
    const double sigma = spec.delta * xi.norm();
    if (!(b.norm() > sigma)) continue;
    ProblemInstance::Data data;
    data.feasible_point = A.transpose() * b;
    data.A = std::move(A);
    data.b = std::move(b);
    data.sigma = sigma;
    return {ProblemInstance(std::move(data)), std::move(x_hat)};
  }
  throw InvalidArgument("could not draw noise with ||b|| > sigma");
}

int count_nonzeros(const Eigen::VectorXd& x) { return static_cast<int>((x.array() != 0.0).count()); }

BenchRecord run_single(const InstanceSpec& spec, Method method, const BenchOptions& options) {
  BenchRecord record;
  record.K = spec.K;
  record.N = spec.N;
  record.T = spec.T;
  record.delta = spec.delta;
  record.seed = spec.seed;
  record.method = method;
  record.kkt_res = record.cq_value = record.multiplier = std::numeric_limits<double>::quiet_NaN();

  try {
    const GeneratedInstance generated = generate_instance(spec);
    const ProblemInstance& inst = generated.instance;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(spec.N, options.x0_value);
    SolveReport report;
    try {
      report = solve_with_method(method, inst, options.reg, options.schedule, options.npg, x0);
      record.status = "ok";
    } catch (const MaxOuterExceeded& e) {
      report = e.report();
      record.status = "max_outer";
    }
    const Eigen::VectorXd& x = report.x_final;
    record.nnz = count_nonzeros(x);
    record.err = (x - generated.x_hat).norm();
    record.fval = phi_value(options.reg, x);
    record.cpu_s = report.wall_time_seconds;
    record.feas_viol = constraint_violation(inst, x);
    record.outer_iters = report.outer_iterations;
    for (const auto& outer : report.per_outer) record.inner_iters_total += outer.inner_iterations;
    if (report.polish) record.inner_iters_total += report.polish->inner_iterations;
    if (method != Method::L1Baseline && options.reg.is_bridge()) {
      const KktReport kkt = kkt_residual_constrained(inst, options.reg, x, kBoundaryRelTol * inst.sigma());
      record.kkt_res = kkt.residual_norm;
      record.cq_value = kkt.cq_value;
      record.multiplier = kkt.multiplier;
    }
  } catch (const std::exception& e) {
    record.status = std::string("error: ") + e.what();
  }
  return record;
}

std::vector<BenchRecord> run_benchmark(const std::vector<InstanceSpec>& specs, const BenchOptions& options,
                                       const std::string& output_path) {
  struct Task {
    const InstanceSpec* spec;
    Method method;
  };
  std::vector<Task> tasks;
  for (const auto& spec : specs) {
    spec.validate();
    for (Method method : options.methods) tasks.push_back({&spec, method});
  }

  std::vector<BenchRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      records[i] = run_single(*tasks[i].spec, tasks[i].method, options);
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::make_tuple(a.K, a.N, a.T, a.delta, static_cast<int>(a.method), a.seed) <
           std::make_tuple(b.K, b.N, b.T, b.delta, static_cast<int>(b.method), b.seed);
  });

  if (!output_path.empty()) {
    std::ofstream csv(output_path);
    if (!csv) throw InvalidArgument("cannot write " + output_path);
    write_csv(csv, records);

    std::filesystem::path md_path(output_path);
    md_path.replace_extension(".md");
    std::ofstream md(md_path);
    if (!md) throw InvalidArgument("cannot write " + md_path.string());
    std::map<double, std::vector<BenchRecord>> by_delta;
    for (const auto& r : records) by_delta[r.delta].push_back(r);
    for (const auto& [delta, group] : by_delta) {
      md << "## delta = " << format("%g", delta) << "\n\nMeans over seeds:\n\n" << render_table(group);
      md << "\nMedians over seeds (extension):\n\n" << render_median_table(group) << '\n';
    }
  }
  return records;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.K << ',' << r.N << ',' << r.T << ',' << format("%.17g", r.delta) << ',' << r.seed << ','
       << to_string(r.method) << ',' << status << ',' << r.nnz << ',' << format("%.17g", r.err) << ','
       << format("%.17g", r.fval) << ',' << format("%.6f", r.cpu_s) << ',' << format("%.17g", r.feas_viol) << ','
       << format("%.17g", r.kkt_res) << ',' << r.outer_iters << ',' << r.inner_iters_total << '\n';
  }
}

std::vector<AggregateRow> aggregate_mean(const std::vector<BenchRecord>& records) { return aggregate(records, mean); }

std::vector<AggregateRow> aggregate_median(const std::vector<BenchRecord>& records) {
  return aggregate(records, median);
}

std::string render_table(const std::vector<BenchRecord>& records) { return render(records, aggregate_mean(records)); }

std::string render_median_table(const std::vector<BenchRecord>& records) {
  return render(records, aggregate_median(records));
}

}  // namespace exactpen
