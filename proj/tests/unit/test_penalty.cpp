#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "exactpen/bench.hpp"
#include "exactpen/errors.hpp"
#include "exactpen/penalty.hpp"
#include "exactpen/smoothing.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using Eigen::VectorXd;
using exactpen::Regularizer;

namespace {

void expect_schedule_laws(const exactpen::SolveReport& report, const exactpen::PenaltySchedule& s) {
  ASSERT_FALSE(report.per_outer.empty());
  for (std::size_t k = 0; k < report.per_outer.size(); ++k) {
    const auto& it = report.per_outer[k];
    const double kk = static_cast<double>(k);
    EXPECT_DOUBLE_EQ(it.lambda, s.lambda0 * std::pow(s.rho, kk));
    EXPECT_DOUBLE_EQ(it.mu, s.mu0 * std::pow(s.theta, kk));
    EXPECT_DOUBLE_EQ(it.eps, std::max(s.eps0 * std::pow(s.theta, kk), s.eps_floor));
    EXPECT_LE(it.start_F, it.feasible_F);
    if (it.inner_converged) EXPECT_LE(it.stationarity_residual, std::sqrt(it.eps) * (1.0 + 1e-12));
  }
}

}  // namespace

TEST(ExactPenalty, TinyInstanceReachesFeasibility) {
  exactpen::Rng rng(41);
  const auto inst = fixtures::plain_instance(rng, 5, 10);
  const exactpen::PenaltySchedule schedule;
  const auto reg = Regularizer::bridge(0.5);
  const auto report = exactpen::exact_penalty_solve(inst, reg, schedule, {}, VectorXd::Ones(10));
  EXPECT_TRUE(report.converged);
  EXPECT_EQ(report.method, exactpen::Method::ExactPenalty);
  EXPECT_EQ(report.outer_iterations, static_cast<int>(report.per_outer.size()));
  EXPECT_LE(exactpen::constraint_violation(inst, report.x_final), 1e-6);
  expect_schedule_laws(report, schedule);

  // The penalized value never exceeds that of the feasible point, and the
  // sandwich bound then caps the violation at each outer step.
  const double phi_feas = exactpen::phi_value(reg, inst.feasible_point());
  for (const auto& it : report.per_outer) {
    EXPECT_NEAR(it.feasible_F, phi_feas, 1e-12 * std::max(1.0, phi_feas));
    EXPECT_LE(it.F_value, it.feasible_F * (1.0 + 1e-12));
    EXPECT_LE(it.feasibility_violation, phi_feas / it.lambda + it.mu / 2.0 + 1e-12);
  }
}

TEST(ExactPenalty, WarmStartSafeguardRestartsFromFeasiblePoint) {
  exactpen::Rng rng(42);
  const auto inst = fixtures::plain_instance(rng, 5, 10);
  const VectorXd far = VectorXd::Constant(10, 100.0);
  const auto report = exactpen::exact_penalty_solve(inst, Regularizer::bridge(0.5), {}, {}, far);
  ASSERT_FALSE(report.per_outer.empty());
  EXPECT_TRUE(report.per_outer.front().restarted_from_feasible);
  EXPECT_DOUBLE_EQ(report.per_outer.front().start_F, report.per_outer.front().feasible_F);
}

TEST(ExactPenalty, ZeroStartTerminates) {
  exactpen::Rng rng(43);
  const auto inst = fixtures::plain_instance(rng, 8, 20);
  const auto report = exactpen::exact_penalty_solve(inst, Regularizer::bridge(0.5), {}, {}, VectorXd::Zero(20));
  EXPECT_LE(exactpen::constraint_violation(inst, report.x_final), 1e-6);
}

TEST(ExactPenalty, ScheduleExhaustionCarriesReport) {
  exactpen::Rng rng(44);
  const auto inst = fixtures::plain_instance(rng, 5, 10);
  exactpen::PenaltySchedule schedule;
  schedule.max_outer = 1;
  try {
    exactpen::exact_penalty_solve(inst, Regularizer::bridge(0.5), schedule, {}, VectorXd::Ones(10));
    FAIL() << "expected MaxOuterExceeded";
  } catch (const exactpen::MaxOuterExceeded& e) {
    EXPECT_EQ(e.report().outer_iterations, 1);
    EXPECT_FALSE(e.report().converged);
    EXPECT_EQ(e.report().x_final.size(), 10);
  }
}

TEST(ExactPenalty, OtherFamiliesAndConstraints) {
  exactpen::Rng rng(45);
  const Eigen::Index m = 6, n = 14;
  exactpen::ProblemInstance::Data data;
  data.A = fixtures::orthonormal_rows(rng, m, n);
  VectorXd x_true(n);
  for (Eigen::Index i = 0; i < n; ++i) x_true[i] = rng.uniform(-1.0, 1.0);
  const VectorXd noise = fixtures::normals(rng, m, 0.1);
  data.b = data.A * x_true + noise;
  data.sigma = 1.5 * noise.norm();
  data.B = fixtures::normal_matrix(rng, 3, n);
  data.h = VectorXd(*data.B * x_true + VectorXd::Constant(3, 0.1));
  data.lower = VectorXd::Constant(n, -2.0);
  data.upper = VectorXd::Constant(n, 2.0);
  data.feasible_point = x_true;
  const exactpen::ProblemInstance inst(std::move(data));

  for (const auto& reg : {Regularizer::bridge(0.5), Regularizer::fraction(2.0), Regularizer::logistic(1.0)}) {
    const auto report = exactpen::exact_penalty_solve(inst, reg, {}, {}, VectorXd::Zero(n));
    EXPECT_LE(exactpen::constraint_violation(inst, report.x_final), 1e-6) << reg.name();
    EXPECT_TRUE(inst.in_box(report.x_final)) << reg.name();
    EXPECT_LE(exactpen::phi_value(reg, report.x_final), exactpen::phi_value(reg, x_true) + 1e-3) << reg.name();
  }
  EXPECT_THROW(exactpen::inexact_penalty_solve(inst, Regularizer::bridge(0.5), {}, {}, VectorXd::Zero(n)),
               exactpen::InvalidArgument);
  EXPECT_THROW(exactpen::l1_baseline_solve(inst, {}, {}, VectorXd::Zero(n)), exactpen::InvalidArgument);
}

TEST(InexactPenalty, TinyInstance) {
  exactpen::Rng rng(46);
  const auto inst = fixtures::plain_instance(rng, 5, 10);
  const exactpen::PenaltySchedule schedule;
  const auto report = exactpen::inexact_penalty_solve(inst, Regularizer::bridge(0.5), schedule, {}, VectorXd::Ones(10));
  EXPECT_EQ(report.method, exactpen::Method::InexactPenalty);
  EXPECT_LE(exactpen::constraint_violation(inst, report.x_final), 1e-6);
  expect_schedule_laws(report, schedule);
}

TEST(L1Baseline, NoiselessRecoveryMatchesLinearProgram) {
  const auto generated = exactpen::generate_instance({40, 80, 4, 0.0, 5});
  const auto& inst = generated.instance;
  const auto lp = oracle::l1_minimizer_lp(inst.A(), inst.b());
  ASSERT_TRUE(lp.has_value());
  EXPECT_LE((*lp - generated.x_hat).norm(), 1e-6);

  // With the default outer tolerance ||Ax - b|| can still be about 7e-4, which
  // bounds the attainable accuracy.
  const auto report = exactpen::l1_baseline_solve(inst, {}, {}, VectorXd::Ones(80));
  EXPECT_EQ(report.method, exactpen::Method::L1Baseline);
  EXPECT_LE((report.x_final - generated.x_hat).norm(), 2e-3);
  for (Eigen::Index i = 0; i < 80; ++i) {
    if (generated.x_hat[i] != 0.0) EXPECT_NE(report.x_final[i], 0.0);
  }

  exactpen::PenaltySchedule tight;
  tight.outer_tolerance = 1e-8;
  const auto refined = exactpen::l1_baseline_solve(inst, tight, {}, VectorXd::Ones(80));
  EXPECT_LE((refined.x_final - generated.x_hat).norm(), 1e-3);
  EXPECT_NEAR(refined.x_final.lpNorm<1>(), lp->lpNorm<1>(), 1e-3);
}

TEST(SolveWithMethod, DispatchesAndParses) {
  exactpen::Rng rng(47);
  const auto inst = fixtures::plain_instance(rng, 4, 8);
  for (const auto* name : {"exact", "inexact", "l1"}) {
    const auto method = exactpen::parse_method(name);
    EXPECT_EQ(exactpen::to_string(method), name);
    const auto report = exactpen::solve_with_method(method, inst, Regularizer::bridge(0.5), {}, {}, VectorXd::Ones(8));
    EXPECT_EQ(report.method, method);
  }
  EXPECT_THROW(exactpen::parse_method("newton"), exactpen::InvalidArgument);
}

TEST(PenaltySchedule, Validation) {
  exactpen::PenaltySchedule s;
  s.rho = 1.0;
  EXPECT_THROW(s.validate(), exactpen::InvalidArgument);
  s = {};
  s.theta = 1.0;
  EXPECT_THROW(s.validate(), exactpen::InvalidArgument);
  s = {};
  s.max_outer = 0;
  EXPECT_THROW(s.validate(), exactpen::InvalidArgument);
  exactpen::Rng rng(48);
  const auto inst = fixtures::plain_instance(rng, 4, 8);
  EXPECT_THROW(exactpen::exact_penalty_solve(inst, Regularizer::bridge(0.5), {}, {}, VectorXd::Ones(7)),
               exactpen::InvalidArgument);
}

TEST(StationarityMeasures, HandExamples) {
  const auto reg = Regularizer::bridge(0.5);
  VectorXd x(3), g(3);
  x << 4.0, 0.0, -1.0;
  g << -0.25, 7.0, 0.5;
  // 4 (-0.25) + 0.5 * 2 = 0; zero coordinate ignored; -1 (0.5) + 0.5 = 0.
  EXPECT_DOUBLE_EQ(exactpen::bridge_scaled_stationarity(reg, x, g), 0.0);
  g[0] = 0.0;
  EXPECT_DOUBLE_EQ(exactpen::bridge_scaled_stationarity(reg, x, g), 1.0);

  exactpen::Rng rng(49);
  const auto inst = fixtures::plain_instance(rng, 2, 3);
  // l1 at zero: |g| <= 1 is stationary, |g| = 3 is at distance 2.
  EXPECT_DOUBLE_EQ(exactpen::subdifferential_distance(Regularizer::l1(), inst, VectorXd::Zero(3), VectorXd::Constant(3, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(exactpen::subdifferential_distance(Regularizer::l1(), inst, VectorXd::Zero(3), VectorXd::Constant(3, -3.0)), 2.0);
  EXPECT_DOUBLE_EQ(exactpen::subdifferential_distance(Regularizer::l1(), inst, VectorXd::Constant(3, 1.0), VectorXd::Constant(3, -1.0)), 0.0);
  EXPECT_THROW(exactpen::subdifferential_distance(reg, inst, x, g), exactpen::InvalidArgument);
}

TEST(ExactPenalty, DeskScaleSparsityAndAccuracy) {
  std::vector<double> nnz, err_exact, err_l1;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto generated = exactpen::generate_instance({120, 512, 20, 1e-2, seed});
    const VectorXd x0 = VectorXd::Ones(512);
    const auto exact = exactpen::exact_penalty_solve(generated.instance, Regularizer::bridge(0.5), {}, {}, x0);
    const auto l1 = exactpen::l1_baseline_solve(generated.instance, {}, {}, x0);
    nnz.push_back(exactpen::count_nonzeros(exact.x_final));
    err_exact.push_back((exact.x_final - generated.x_hat).norm());
    err_l1.push_back((l1.x_final - generated.x_hat).norm());
  }
  std::sort(nnz.begin(), nnz.end());
  EXPECT_GE(nnz[1], 12.0);
  EXPECT_LE(nnz[1], 28.0);
  for (std::size_t i = 0; i < err_exact.size(); ++i) EXPECT_LT(err_exact[i], err_l1[i]);
}

TEST(ExactPenalty, FinalPolishTightensStationarity) {
  const auto generated = exactpen::generate_instance({120, 512, 20, 1e-2, 0});
  const auto& inst = generated.instance;
  exactpen::PenaltySchedule plain;
  plain.final_polish = false;
  const auto unpolished = exactpen::exact_penalty_solve(inst, Regularizer::bridge(0.5), plain, {}, VectorXd::Ones(512));
  EXPECT_FALSE(unpolished.polish.has_value());

  const exactpen::PenaltySchedule schedule;
  const auto report = exactpen::exact_penalty_solve(inst, Regularizer::bridge(0.5), schedule, {}, VectorXd::Ones(512));
  ASSERT_TRUE(report.polish.has_value());
  EXPECT_TRUE(report.polish_accepted);
  EXPECT_EQ(report.polish->lambda, report.per_outer.back().lambda);
  EXPECT_EQ(report.polish->mu, report.per_outer.back().mu);
  EXPECT_EQ(report.polish->eps, schedule.eps_floor);
  EXPECT_LE(report.polish->stationarity_residual, std::sqrt(schedule.eps_floor));
  EXPECT_GT(unpolished.per_outer.back().stationarity_residual, std::sqrt(schedule.eps_floor));
  EXPECT_LE(exactpen::constraint_violation(inst, report.x_final), schedule.outer_tolerance);
  EXPECT_EQ(report.per_outer.size(), unpolished.per_outer.size());
}
