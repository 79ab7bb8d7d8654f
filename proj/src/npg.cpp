#include "exactpen/npg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "exactpen/errors.hpp"

namespace exactpen {

void NpgConfig::validate() const {
  if (!(L_min > 0.0)) throw InvalidArgument("L_min must be positive");
  if (!(L_max >= L_min)) throw InvalidArgument("L_max must be >= L_min");
  if (!(tau > 1.0)) throw InvalidArgument("tau must exceed 1");
  if (!(c > 0.0)) throw InvalidArgument("c must be positive");
  if (M < 0) throw InvalidArgument("M must be nonnegative");
  if (max_outer_iterations <= 0) throw InvalidArgument("max_outer_iterations must be positive");
  if (max_backtracks_per_iteration <= 0) throw InvalidArgument("max_backtracks_per_iteration must be positive");
}

double bb_spectral_init(const Eigen::VectorXd& x_cur, const Eigen::VectorXd& x_prev,
                        const Eigen::VectorXd& g_cur, const Eigen::VectorXd& g_prev, double L_min,
                        double L_max) {
  const Eigen::VectorXd dx = x_cur - x_prev;
  const double denom = dx.squaredNorm();
  if (denom == 0.0) return L_min;
  const double quotient = dx.dot(g_cur - g_prev) / denom;
  if (std::isnan(quotient)) return L_min;
  return std::min(std::max(quotient, L_min), L_max);
}

NpgResult npg_solve(const CompositeProblem& problem, const Eigen::VectorXd& x0, const NpgConfig& config,
                    const NpgStopRule& stop, const BbInit& bb_init) {
  config.validate();
  NpgResult result;
  result.L_max = config.L_max;
  result.c = config.c;
  result.M = config.M;

  Eigen::VectorXd x = x0;
  const double P0 = problem.nonsmooth_value(x);
  if (!std::isfinite(P0)) throw NonFiniteObjective("initial point has non-finite nonsmooth value");
  const bool fused = static_cast<bool>(problem.smooth_value_and_gradient);
  Eigen::VectorXd g(x.size());
  double F = (fused ? problem.smooth_value_and_gradient(x, g) : problem.smooth_value(x)) + P0;
  if (!std::isfinite(F)) throw NonFiniteObjective("initial objective is not finite");
  if (!fused) g = problem.smooth_gradient(x);
  Eigen::VectorXd g_u(x.size());
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd g_prev = g;
  result.objective_trace.push_back(F);

  const auto initial_weight = [&](int k) {
    if (k == 0) return std::clamp(config.initial_L, config.L_min, config.L_max);
    if (bb_init) return std::clamp(bb_init(x - x_prev, g - g_prev), config.L_min, config.L_max);
    return bb_spectral_init(x, x_prev, g, g_prev, config.L_min, config.L_max);
  };

  for (int k = 0; k < config.max_outer_iterations; ++k) {
    const auto window = std::min<std::size_t>(config.M + 1, result.objective_trace.size());
    const double reference =
        *std::max_element(result.objective_trace.end() - static_cast<std::ptrdiff_t>(window),
                          result.objective_trace.end());

    double L = initial_weight(k);
    int backtracks = 0;
    Eigen::VectorXd u;
    double F_u = 0.0;
    double step_sq = 0.0;
    while (true) {
      u = problem.prox(x - g / L, L);
      F_u = (fused ? problem.smooth_value_and_gradient(u, g_u) : problem.smooth_value(u)) +
            problem.nonsmooth_value(u);
      if (!std::isfinite(F_u)) {
        throw NonFiniteObjective("objective became non-finite at iteration " + std::to_string(k));
      }
      step_sq = (u - x).squaredNorm();
      if (F_u <= reference - 0.5 * config.c * step_sq) break;
      L *= config.tau;
      if (++backtracks > config.max_backtracks_per_iteration) {
        throw LineSearchStall("backtracking exceeded " + std::to_string(config.max_backtracks_per_iteration) +
                              " steps at iteration " + std::to_string(k) + " (L=" + std::to_string(L) + ")");
      }
    }

    x_prev.swap(x);
    g_prev.swap(g);
    x = std::move(u);
    const double F_prev = F;
    F = F_u;
    if (fused) {
      g.swap(g_u);
    } else {
      g = problem.smooth_gradient(x);
    }

    const double step = std::sqrt(step_sq);
    result.objective_trace.push_back(F);
    result.L_trace.push_back(L);
    result.step_norms.push_back(step);
    result.backtracks.push_back(backtracks);
    result.iterations = k + 1;

    if (config.trace) {
      nlohmann::json line = {{"iteration", k + 1}, {"F", F}, {"L", L}, {"step_norm", step}, {"backtracks", backtracks}};
      *config.trace << line.dump() << '\n';
    }

    if (stop && stop(NpgState{k + 1, x, x_prev, g, F, F_prev, L})) {
      result.termination_reason = NpgTermination::StoppingRuleMet;
      break;
    }
  }
  result.x_final = std::move(x);
  return result;
}

bool monitor_L_bounded(const NpgResult& result) {
  if (result.L_trace.empty()) return true;
  return *std::max_element(result.L_trace.begin(), result.L_trace.end()) < result.L_max;
}

int backtrack_bound(const NpgConfig& config) {
  return static_cast<int>(std::floor((std::log(config.L_max) - std::log(config.L_min)) / std::log(config.tau))) + 1;
}

int count_descent_violations(const NpgResult& result, double slack) {
  int violations = 0;
  const auto& F = result.objective_trace;
  for (std::size_t k = 0; k + 1 < F.size(); ++k) {
    const std::size_t first = k >= static_cast<std::size_t>(result.M) ? k - result.M : 0;
    const double reference = *std::max_element(F.begin() + static_cast<std::ptrdiff_t>(first),
                                               F.begin() + static_cast<std::ptrdiff_t>(k + 1));
    const double step = result.step_norms[k];
    if (F[k + 1] > reference - 0.5 * result.c * step * step + slack) ++violations;
  }
  return violations;
}

}  // namespace exactpen
