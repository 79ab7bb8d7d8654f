#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <vector>

namespace exactpen {

/// Constants of the nonmonotone proximal gradient method.
struct NpgConfig {
  double L_min = 1.0;
  double L_max = 1e8;
  double tau = 2.0;  // backtracking factor
  double c = 1e-4;   // sufficient-descent constant
  int M = 4;         // nonmonotone window: compare against the last M+1 objectives
  double initial_L = 1.0;
  int max_outer_iterations = 50000;
  int max_backtracks_per_iteration = 100;
  /// When set, one JSON object per accepted iteration is written here.
  std::ostream* trace = nullptr;

  void validate() const;
};

/// Snapshot handed to the stopping rule after each accepted step.
struct NpgState {
  int iteration;  // number of accepted steps so far (>= 1)
  const Eigen::VectorXd& x;
  const Eigen::VectorXd& x_prev;
  const Eigen::VectorXd& gradient;  // smooth gradient at x
  double objective;
  double previous_objective;
  double L;
};

enum class NpgTermination { StoppingRuleMet, MaxIterations };

struct NpgResult {
  Eigen::VectorXd x_final;
  int iterations = 0;
  std::vector<double> objective_trace;  // F(x^0), F(x^1), ...
  std::vector<double> L_trace;          // accepted L per step
  std::vector<double> step_norms;       // ||x^{k+1} - x^k||
  std::vector<int> backtracks;          // rejections before acceptance, per step
  NpgTermination termination_reason = NpgTermination::MaxIterations;
  double L_max = 1e8;
  double c = 1e-4;
  int M = 4;
};

/// Smooth part f, nonsmooth part P (including any box indicator) and the prox
/// of P: prox(anchor, L) = argmin_x (L/2)||x - anchor||^2 + P(x).
struct CompositeProblem {
  std::function<double(const Eigen::VectorXd&)> smooth_value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> smooth_gradient;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox;
  std::function<double(const Eigen::VectorXd&)> nonsmooth_value;
  /// Optional fused f and grad f; when set it replaces the two calls above.
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)> smooth_value_and_gradient;
};

using NpgStopRule = std::function<bool(const NpgState&)>;
/// Initial L from the previous step and gradient difference.
using BbInit = std::function<double(const Eigen::VectorXd& dx, const Eigen::VectorXd& dg)>;

/// Nonmonotone proximal gradient: at iterate k start from L = bb_init (or
/// initial_L at k = 0), clamp to [L_min, L_max], and multiply by tau until
///   F(u) <= max_{[k-M]_+ <= i <= k} F(x^i) - (c/2) ||u - x^k||^2.
/// Throws LineSearchStall or NonFiniteObjective.
NpgResult npg_solve(const CompositeProblem& problem, const Eigen::VectorXd& x0, const NpgConfig& config,
                    const NpgStopRule& stop, const BbInit& bb_init = {});

/// clamp(<dx, dg> / ||dx||^2, L_min, L_max); L_min when dx = 0.
double bb_spectral_init(const Eigen::VectorXd& x_cur, const Eigen::VectorXd& x_prev,
                        const Eigen::VectorXd& g_cur, const Eigen::VectorXd& g_prev, double L_min,
                        double L_max);

/// Whether every accepted L stayed strictly below L_max.
bool monitor_L_bounded(const NpgResult& result);

/// floor((log L_max - log L_min) / log tau) + 1.
int backtrack_bound(const NpgConfig& config);

/// Number of accepted steps whose nonmonotone descent inequality fails when
/// re-evaluated from the stored traces (slack is an absolute allowance).
int count_descent_violations(const NpgResult& result, double slack = 0.0);

}  // namespace exactpen
