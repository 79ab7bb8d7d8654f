#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "exactpen/bench.hpp"
#include "exactpen/penalty.hpp"
#include "exactpen/problem.hpp"

namespace exactpen {

/// Instance document:
///   {m, n, sigma, A (row-major, m*n), b, B? (row-major, l*n), h?, lower?, upper?, feasible_point}
/// Infinite bounds are written as null entries.
nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& doc);

ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

nlohmann::json report_to_json(const SolveReport& report);
nlohmann::json record_to_json(const BenchRecord& record);

}  // namespace exactpen
