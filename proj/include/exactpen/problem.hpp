#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

namespace exactpen {

/// Absolute tolerance used for all feasibility comparisons.
inline constexpr double kFeasibilityTol = 1e-12;

/// Data of
///
///   min Phi(x)  s.t.  ||Ax - b|| <= sigma,  Bx <= h,  lower <= x <= upper
///
/// together with a known feasible point. Immutable after construction; the
/// constructor validates dimensions, m <= n, sigma >= 0, lower <= upper and the
/// feasibility of the supplied point.
class ProblemInstance {
 public:
  struct Data {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    double sigma = 0.0;
    std::optional<Eigen::MatrixXd> B;
    std::optional<Eigen::VectorXd> h;
    std::optional<Eigen::VectorXd> lower;  // defaults to -inf
    std::optional<Eigen::VectorXd> upper;  // defaults to +inf
    Eigen::VectorXd feasible_point;
  };

  explicit ProblemInstance(Data data);

  Eigen::Index rows() const { return A_.rows(); }
  Eigen::Index cols() const { return A_.cols(); }
  /// Number of rows of B (0 when absent).
  Eigen::Index inequality_rows() const { return B_ ? B_->rows() : 0; }

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  double sigma() const { return sigma_; }
  bool has_inequalities() const { return B_.has_value(); }
  const Eigen::MatrixXd& B() const;
  const Eigen::VectorXd& h() const;
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Eigen::VectorXd& feasible_point() const { return feasible_point_; }

  /// True when every bound is infinite.
  bool box_is_infinite() const { return box_infinite_; }
  /// True when A A^T = I to 1e-10 per entry.
  bool rows_orthonormal() const { return rows_orthonormal_; }
  bool in_box(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Eigen::VectorXd residual(const Eigen::Ref<const Eigen::VectorXd>& x) const { return A_ * x - b_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double sigma_;
  std::optional<Eigen::MatrixXd> B_;
  std::optional<Eigen::VectorXd> h_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd feasible_point_;
  bool box_infinite_ = true;
  bool rows_orthonormal_ = false;
};

/// (||Ax-b||^2 - sigma^2)_+ + ||(Bx-h)_+||_1; zero exactly on S2.
double constraint_violation(const ProblemInstance& inst, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Residual-only part (||Ax-b||^2 - sigma^2)_+.
double residual_violation(const ProblemInstance& inst, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Euclidean projection onto {z : ||Az - b|| <= sigma}. Requires orthonormal
/// rows, no inequalities and an infinite box.
Eigen::VectorXd project_onto_residual_set(const ProblemInstance& inst,
                                          const Eigen::Ref<const Eigen::VectorXd>& x);

struct DistanceBound {
  double dist;
  double bound;
};

/// Distance to the residual set and the explicit upper bound
/// (||A^+|| / sigma) (||Ax-b||^2 - sigma^2)_+.
DistanceBound distance_bound_check(const ProblemInstance& inst,
                                   const Eigen::Ref<const Eigen::VectorXd>& x);

/// Spectral norm of A (exactly 1 for orthonormal rows, else power iteration).
double spectral_norm_A(const ProblemInstance& inst);
/// Spectral norm of the pseudo-inverse A^T (A A^T)^{-1}.
double pseudo_inverse_norm(const ProblemInstance& inst);

/// Largest singular value by power iteration on M^T M.
double power_iteration_norm(const Eigen::MatrixXd& M, int max_iterations = 50, double tol = 1e-10);

}  // namespace exactpen
