#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <cmath>

#include "exactpen/problem.hpp"
#include "exactpen/rng.hpp"

namespace fixtures {

inline Eigen::VectorXd normals(exactpen::Rng& rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

inline Eigen::MatrixXd normal_matrix(exactpen::Rng& rng, Eigen::Index m, Eigen::Index n, double scale = 1.0) {
  Eigen::MatrixXd M(m, n);
  for (Eigen::Index j = 0; j < n; ++j) M.col(j) = normals(rng, m, scale);
  return M;
}

inline Eigen::MatrixXd orthonormal_rows(exactpen::Rng& rng, Eigen::Index m, Eigen::Index n) {
  const Eigen::MatrixXd G = normal_matrix(rng, n, m);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ() * Eigen::MatrixXd::Identity(n, m);
  return Q.transpose();
}

/// Orthonormal-row instance with b = A x_true + noise and sigma = ratio * ||noise||.
inline exactpen::ProblemInstance plain_instance(exactpen::Rng& rng, Eigen::Index m, Eigen::Index n,
                                                double ratio = 0.5) {
  exactpen::ProblemInstance::Data data;
  data.A = orthonormal_rows(rng, m, n);
  const Eigen::VectorXd noise = normals(rng, m, 0.1);
  data.b = data.A * normals(rng, n) + noise;
  data.sigma = ratio * noise.norm();
  data.feasible_point = data.A.transpose() * data.b;
  return exactpen::ProblemInstance(std::move(data));
}

/// A = (1 0), b = b0, sigma.
inline exactpen::ProblemInstance strip_instance(double b0, double sigma, Eigen::Vector2d feasible) {
  exactpen::ProblemInstance::Data data;
  data.A = Eigen::MatrixXd(1, 2);
  data.A << 1.0, 0.0;
  data.b = Eigen::VectorXd::Constant(1, b0);
  data.sigma = sigma;
  data.feasible_point = feasible;
  return exactpen::ProblemInstance(std::move(data));
}

}  // namespace fixtures
