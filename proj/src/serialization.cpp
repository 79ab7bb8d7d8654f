#include "exactpen/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "exactpen/errors.hpp"

namespace exactpen {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      out.push_back(v[i]);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out.push_back(M(i, j));
  }
  return out;
}

Eigen::VectorXd vector_from_json(const json& doc, const char* name, Eigen::Index expected, double null_value) {
  if (!doc.is_array()) throw InvalidArgument(std::string(name) + " must be an array");
  if (static_cast<Eigen::Index>(doc.size()) != expected) {
    throw InvalidArgument(std::string(name) + " has length " + std::to_string(doc.size()) + ", expected " +
                          std::to_string(expected));
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    const json& entry = doc[static_cast<std::size_t>(i)];
    if (entry.is_null()) {
      if (std::isnan(null_value)) throw InvalidArgument(std::string(name) + " may not contain null");
      v[i] = null_value;
    } else {
      v[i] = entry.get<double>();
    }
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& doc, const char* name, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::VectorXd flat = vector_from_json(doc, name, rows * cols, std::numeric_limits<double>::quiet_NaN());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = flat[i * cols + j];
  }
  return M;
}

json finite_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

}  // namespace

json instance_to_json(const ProblemInstance& inst) {
  json doc;
  doc["m"] = inst.rows();
  doc["n"] = inst.cols();
  doc["sigma"] = inst.sigma();
  doc["A"] = matrix_to_json(inst.A());
  doc["b"] = vector_to_json(inst.b());
  if (inst.has_inequalities()) {
    doc["B"] = matrix_to_json(inst.B());
    doc["h"] = vector_to_json(inst.h());
  }
  if (!inst.box_is_infinite()) {
    doc["lower"] = vector_to_json(inst.lower());
    doc["upper"] = vector_to_json(inst.upper());
  }
  doc["feasible_point"] = vector_to_json(inst.feasible_point());
  return doc;
}

ProblemInstance instance_from_json(const json& doc) {
  try {
    const auto m = doc.at("m").get<Eigen::Index>();
    const auto n = doc.at("n").get<Eigen::Index>();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    ProblemInstance::Data data;
    data.A = matrix_from_json(doc.at("A"), "A", m, n);
    data.b = vector_from_json(doc.at("b"), "b", m, nan);
    data.sigma = doc.at("sigma").get<double>();
    if (doc.contains("B") || doc.contains("h")) {
      const json& h = doc.at("h");
      const auto l = static_cast<Eigen::Index>(h.size());
      data.B = matrix_from_json(doc.at("B"), "B", l, n);
      data.h = vector_from_json(h, "h", l, nan);
    }
    if (doc.contains("lower")) data.lower = vector_from_json(doc.at("lower"), "lower", n, -inf);
    if (doc.contains("upper")) data.upper = vector_from_json(doc.at("upper"), "upper", n, inf);
    data.feasible_point = vector_from_json(doc.at("feasible_point"), "feasible_point", n, nan);
    return ProblemInstance(std::move(data));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed instance document: ") + e.what());
  }
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << instance_to_json(inst).dump() << '\n';
}

json report_to_json(const SolveReport& report) {
  json doc;
  doc["method"] = to_string(report.method);
  doc["converged"] = report.converged;
  doc["outer_iterations"] = report.outer_iterations;
  doc["wall_time_seconds"] = report.wall_time_seconds;
  doc["x_final"] = vector_to_json(report.x_final);
  const auto outer_to_json = [](const OuterIterate& o) {
    return json{{"lambda", o.lambda},
                {"mu", o.mu},
                {"eps", o.eps},
                {"inner_iterations", o.inner_iterations},
                {"inner_converged", o.inner_converged},
                {"stationarity_residual", finite_or_null(o.stationarity_residual)},
                {"feasibility_violation", o.feasibility_violation},
                {"F_value", o.F_value},
                {"Phi_value", o.Phi_value},
                {"start_F", o.start_F},
                {"feasible_F", o.feasible_F},
                {"restarted_from_feasible", o.restarted_from_feasible}};
  };
  json outer = json::array();
  for (const auto& o : report.per_outer) outer.push_back(outer_to_json(o));
  if (report.polish) {
    doc["polish"] = outer_to_json(*report.polish);
    doc["polish_accepted"] = report.polish_accepted;
  }
  doc["per_outer"] = std::move(outer);
  return doc;
}

json record_to_json(const BenchRecord& r) {
  const auto number = finite_or_null;
  return {{"K", r.K},
          {"N", r.N},
          {"T", r.T},
          {"delta", r.delta},
          {"seed", r.seed},
          {"method", to_string(r.method)},
          {"status", r.status},
          {"nnz", r.nnz},
          {"err", number(r.err)},
          {"fval", number(r.fval)},
          {"cpu_s", r.cpu_s},
          {"feas_viol", number(r.feas_viol)},
          {"kkt_res", number(r.kkt_res)},
          {"cq_value", number(r.cq_value)},
          {"multiplier", number(r.multiplier)},
          {"outer_iters", r.outer_iters},
          {"inner_iters_total", r.inner_iters_total}};
}

}  // namespace exactpen
