#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exactpen/npg.hpp"
#include "exactpen/problem.hpp"
#include "exactpen/regularizer.hpp"

namespace exactpen {

/// Continuation schedule of the penalty drivers:
///   lambda_{k+1} = rho lambda_k,  mu_{k+1} = theta mu_k,
///   eps_{k+1} = max(theta eps_k, eps_floor).
/// The inner solve at outer step k stops once
///   stationarity <= eps_k^stationarity_exponent  and
///   |F(x^l) - F(x^{l-1})| / max(1, |F(x^l)|) <= min(eps_k^fchange_exponent, fchange_cap),
/// and the driver stops once max(violation(x^k), outer_eps_weight eps_k) <= outer_tolerance.
/// With final_polish set, one more inner solve at the last (lambda, mu) uses
/// eps_floor in place of eps_k; its result is kept when it still meets the
/// outer tolerance.
struct PenaltySchedule {
  double lambda0 = 1.0;
  double mu0 = 1.0;
  double eps0 = 1.0;
  double rho = 2.0;
  double theta = 0.5;
  double eps_floor = 1e-6;
  double outer_tolerance = 1e-6;
  int max_outer = 60;

  double stationarity_exponent = 0.5;
  double fchange_exponent = 2.0;
  double fchange_cap = 1e-4;
  double outer_eps_weight = 0.01;
  bool final_polish = true;

  void validate() const;
};

enum class Method { ExactPenalty, InexactPenalty, L1Baseline };

std::string to_string(Method method);
Method parse_method(const std::string& text);

struct OuterIterate {
  double lambda = 0.0;
  double mu = 0.0;
  double eps = 0.0;
  int inner_iterations = 0;
  bool inner_converged = false;
  double stationarity_residual = 0.0;
  double feasibility_violation = 0.0;
  double F_value = 0.0;
  double Phi_value = 0.0;
  /// Penalized objective of the warm start after the safeguard, and of x_feas.
  double start_F = 0.0;
  double feasible_F = 0.0;
  bool restarted_from_feasible = false;
};

struct SolveReport {
  Eigen::VectorXd x_final;
  int outer_iterations = 0;
  std::vector<OuterIterate> per_outer;
  /// The polishing solve, when one ran; accepted says whether x_final came from it.
  std::optional<OuterIterate> polish;
  bool polish_accepted = false;
  double wall_time_seconds = 0.0;
  Method method = Method::ExactPenalty;
  bool converged = false;
};

/// Raised when the schedule runs out before the outer rule is met. Carries the
/// full report.
class MaxOuterExceeded : public std::runtime_error {
 public:
  explicit MaxOuterExceeded(SolveReport report);
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Inner stationarity measure evaluated at an iterate x with smooth gradient g.
using StationarityMeasure = std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& g)>;

/// ||Diag(x) g + p |x|^p||_inf for the bridge regularizer.
double bridge_scaled_stationarity(const Regularizer& reg, const Eigen::VectorXd& x, const Eigen::VectorXd& g);

/// ||minimal-norm element of g + d(Phi + box indicator)(x)||_inf for regularizers with
/// bounded subdifferential at zero (l1, fraction, logistic).
double subdifferential_distance(const Regularizer& reg, const ProblemInstance& inst, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& g);

/// Exact penalty method on F_{lambda,mu} = f_{lambda,mu} + Phi + indicator of the box.
/// The default stationarity measure is the bridge Diag form for BridgeP and the
/// subdifferential distance for the other families.
SolveReport exact_penalty_solve(const ProblemInstance& inst, const Regularizer& reg, const PenaltySchedule& schedule,
                                const NpgConfig& npg_config, const Eigen::VectorXd& x0,
                                const StationarityMeasure& measure = {});

/// Quadratic-penalty variant with smooth part lambda ||Ax - b||^2. Requires B absent.
SolveReport inexact_penalty_solve(const ProblemInstance& inst, const Regularizer& reg,
                                  const PenaltySchedule& schedule, const NpgConfig& npg_config,
                                  const Eigen::VectorXd& x0, const StationarityMeasure& measure = {});

/// Exact penalty method with Phi = ||.||_1, used as the l1 reference method. Requires B absent.
SolveReport l1_baseline_solve(const ProblemInstance& inst, const PenaltySchedule& schedule,
                              const NpgConfig& npg_config, const Eigen::VectorXd& x0);

/// Dispatch on method; the regularizer is ignored for L1Baseline.
SolveReport solve_with_method(Method method, const ProblemInstance& inst, const Regularizer& reg,
                              const PenaltySchedule& schedule, const NpgConfig& npg_config,
                              const Eigen::VectorXd& x0);

}  // namespace exactpen
