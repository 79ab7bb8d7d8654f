#include "exactpen/problem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "exactpen/errors.hpp"

namespace exactpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_projection_setting(const ProblemInstance& inst) {
  if (inst.has_inequalities()) {
    throw InvalidArgument("closed-form projection requires the inequality block to be absent");
  }
  if (!inst.box_is_infinite()) {
    throw InvalidArgument("closed-form projection requires an infinite box");
  }
  if (!inst.rows_orthonormal()) {
    throw InvalidArgument("closed-form projection requires A to have orthonormal rows");
  }
}

}  // namespace

ProblemInstance::ProblemInstance(Data data)
    : A_(std::move(data.A)),
      b_(std::move(data.b)),
      sigma_(data.sigma),
      B_(std::move(data.B)),
      h_(std::move(data.h)),
      feasible_point_(std::move(data.feasible_point)) {
  const Eigen::Index m = A_.rows();
  const Eigen::Index n = A_.cols();
  if (m == 0 || n == 0) throw InvalidArgument("A must be non-empty");
  if (m > n) throw InvalidArgument("A must have m <= n (got m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  if (b_.size() != m) throw InvalidArgument("b has wrong length");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw InvalidArgument("sigma must be finite and nonnegative");
  if (B_.has_value() != h_.has_value()) throw InvalidArgument("B and h must be given together");
  if (B_) {
    if (B_->cols() != n) throw InvalidArgument("B has wrong column count");
    if (h_->size() != B_->rows()) throw InvalidArgument("h has wrong length");
  }
  lower_ = data.lower ? std::move(*data.lower) : Eigen::VectorXd::Constant(n, -kInf);
  upper_ = data.upper ? std::move(*data.upper) : Eigen::VectorXd::Constant(n, kInf);
  if (lower_.size() != n || upper_.size() != n) throw InvalidArgument("box bounds have wrong length");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i]) {
      throw InvalidArgument("box bounds must satisfy lower <= upper");
    }
    if (std::isfinite(lower_[i]) || std::isfinite(upper_[i])) box_infinite_ = false;
  }
  if (feasible_point_.size() != n) throw InvalidArgument("feasible_point has wrong length");
  if (!feasible_point_.allFinite()) throw InvalidArgument("feasible_point must be finite");

  const Eigen::MatrixXd gram = A_ * A_.transpose();
  rows_orthonormal_ = (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10;

  if (residual(feasible_point_).norm() > sigma_ + kFeasibilityTol) {
    throw InvalidArgument("feasible_point violates ||Ax - b|| <= sigma");
  }
  if (B_ && (*B_ * feasible_point_ - *h_).maxCoeff() > kFeasibilityTol) {
    throw InvalidArgument("feasible_point violates Bx <= h");
  }
  if (!in_box(feasible_point_)) throw InvalidArgument("feasible_point lies outside the box");
}

const Eigen::MatrixXd& ProblemInstance::B() const {
  if (!B_) throw InvalidArgument("instance has no inequality block");
  return *B_;
}

const Eigen::VectorXd& ProblemInstance::h() const {
  if (!h_) throw InvalidArgument("instance has no inequality block");
  return *h_;
}

bool ProblemInstance::in_box(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

double residual_violation(const ProblemInstance& inst, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double s = inst.residual(x).squaredNorm() - inst.sigma() * inst.sigma();
  return s > 0.0 ? s : 0.0;
}

double constraint_violation(const ProblemInstance& inst, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double total = residual_violation(inst, x);
  if (inst.has_inequalities()) {
    total += (inst.B() * x - inst.h()).cwiseMax(0.0).sum();
  }
  return total;
}

Eigen::VectorXd project_onto_residual_set(const ProblemInstance& inst,
                                          const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_projection_setting(inst);
  const Eigen::VectorXd r = inst.residual(x);
  const double rn = r.norm();
  if (rn <= inst.sigma()) return x;
  // A^+ = A^T; move the residual radially onto the sphere of radius sigma.
  return x - inst.A().transpose() * (r * (1.0 - inst.sigma() / rn));
}

DistanceBound distance_bound_check(const ProblemInstance& inst,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_projection_setting(inst);
  if (!(inst.sigma() > 0.0)) throw InvalidArgument("distance bound requires sigma > 0");
  const Eigen::VectorXd projected = project_onto_residual_set(inst, x);
  const double dist = (x - projected).norm();
  const double bound = pseudo_inverse_norm(inst) / inst.sigma() * residual_violation(inst, x);
  return {dist, bound};
}

double power_iteration_norm(const Eigen::MatrixXd& M, int max_iterations, double tol) {
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(M.cols(), 1.0, 2.0);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd w = M.transpose() * (M * v);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double next = std::sqrt(wn);
    v = w / wn;
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

double spectral_norm_A(const ProblemInstance& inst) {
  if (inst.rows_orthonormal()) return 1.0;
  return power_iteration_norm(inst.A());
}

double pseudo_inverse_norm(const ProblemInstance& inst) {
  if (inst.rows_orthonormal()) return 1.0;
  // ||A^T (A A^T)^{-1}|| = 1 / sqrt(lambda_min(A A^T)); the m x m eigenproblem is small.
  const Eigen::MatrixXd gram = inst.A() * inst.A().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(smallest > 0.0)) throw InvalidArgument("A does not have full row rank");
  return 1.0 / std::sqrt(smallest);
}

}  // namespace exactpen
