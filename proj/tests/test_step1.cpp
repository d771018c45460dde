#include "hjmcal/step1.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hjmcal/errors.hpp"
#include "hjmcal/philox.hpp"
#include "hjmcal/quadrature.hpp"

using namespace hjmcal;

namespace {

double a_fn(StateVar X, double tau, double t) {
  switch (X) {
    case StateVar::L: return 1.0;
    case StateVar::S:
    case StateVar::C1: return std::exp(t / tau);
    case StateVar::C2: return -(t / tau) * std::exp(t / tau);
  }
  return 0.0;
}

double b_fn(StateVar X, double tau, double T) {
  switch (X) {
    case StateVar::L: return 1.0;
    case StateVar::S: return std::exp(-T / tau);
    case StateVar::C1: return (T / tau) * std::exp(-T / tau);
    case StateVar::C2: return std::exp(-T / tau);
  }
  return 0.0;
}

double beta_quad(StateVar X, double tau, double ts, double te) {
  return adaptive_integrate([&](double T) { return b_fn(X, tau, T); }, ts, te, 1e-13) /
         (te - ts);
}

// Ground-truth level/slope model used across the recovery tests.
LscModel make_model_1l1s() {
  LscModel m;
  m.sigma_l = 0.3;
  m.sigma_s = {1.1};
  m.tau_s = {0.25};
  m.R = Eigen::MatrixXd(2, 2);
  m.R << 1.0, -0.4, -0.4, 1.0;
  m.validate();
  return m;
}

LscModel make_model_1l1s1c() {
  LscModel m;
  m.sigma_l = 0.35;
  m.sigma_s = {1.0};
  m.tau_s = {0.2};
  m.sigma_c = {0.8};
  m.tau_c = {0.45};
  m.R = Eigen::MatrixXd(3, 3);
  m.R << 1.0, -0.3, 0.2, -0.3, 1.0, -0.1, 0.2, -0.1, 1.0;
  m.validate();
  return m;
}

std::vector<RollingSpec> default_rolling() {
  return {{0.02, 0.1}, {0.1, 0.35}, {0.35, 0.6}, {0.6, 1.1}};
}

std::vector<VsTarget> default_vs_windows() {
  return {{{0.3, 0.4}, 0.25, 0.0}, {{0.55, 0.8}, 0.5, 0.0}, {{1.05, 1.3}, 1.0, 0.0}};
}

// Exact targets generated from the closed-form model quantities.
Step1Problem problem_from_model(const LscModel& m, double lambda = 0.5) {
  Step1Problem prob;
  prob.rolling = default_rolling();
  const int P = static_cast<int>(prob.rolling.size());
  prob.C_mkt.resize(P, P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      prob.C_mkt(i, j) = model_covariance(m, prob.rolling[static_cast<size_t>(i)],
                                          prob.rolling[static_cast<size_t>(j)], prob.tau_d);
  prob.Gamma = Eigen::MatrixXd::Ones(P, P);
  prob.vs = default_vs_windows();
  for (auto& t : prob.vs) t.sigma_vs_sq = model_vs_variance(m, t.window, t.T);
  prob.lambda = lambda;
  prob.n_s = m.n_s();
  prob.n_c = m.n_c();
  prob.sigma_l_upper = 10.0;
  return prob;
}

}  // namespace

// ---------------------------------------------------------------------------
// build_weights

TEST(Step1, CovWeightsMatchQuadratureOracle) {
  Step1Problem prob;
  prob.rolling = {{0.05, 0.3}, {0.4, 0.9}};
  prob.C_mkt = Eigen::MatrixXd::Zero(2, 2);
  prob.Gamma = Eigen::MatrixXd::Ones(2, 2);
  prob.n_s = 1;
  prob.n_c = 1;
  const std::vector<double> tau = {0.18, 0.6};
  const Step1Weights w = build_weights(tau, prob);

  const StateVar kinds[] = {StateVar::L, StateVar::S, StateVar::C1, StateVar::C2};
  const double taus[] = {1.0, 0.18, 0.6, 0.6};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto& wi = prob.rolling[static_cast<size_t>(i)];
      const auto& wj = prob.rolling[static_cast<size_t>(j)];
      for (int p = 0; p < 4; ++p) {
        for (int k = 0; k < 4; ++k) {
          const double bi =
              beta_quad(kinds[p], taus[p], prob.tau_d + wi.ts, prob.tau_d + wi.te);
          const double bj =
              beta_quad(kinds[k], taus[k], prob.tau_d + wj.ts, prob.tau_d + wj.te);
          const double aa = adaptive_integrate(
                                [&](double u) {
                                  return a_fn(kinds[p], taus[p], u) * a_fn(kinds[k], taus[k], u);
                                },
                                0.0, prob.tau_d, 1e-14) /
                            prob.tau_d;
          const double expect = bi * bj * aa;
          EXPECT_NEAR(w.cov[static_cast<size_t>(i * 2 + j)](p, k), expect,
                      1e-10 * std::max(1.0, std::abs(expect)))
              << i << j << p << k;
        }
      }
    }
  }
}

TEST(Step1, VsWeightsMatchQuadratureOracle) {
  Step1Problem prob;
  prob.rolling = {{0.05, 0.3}};
  prob.C_mkt = Eigen::MatrixXd::Zero(1, 1);
  prob.Gamma = Eigen::MatrixXd::Ones(1, 1);
  prob.n_s = 1;
  prob.n_c = 1;
  prob.vs = {{{0.9, 1.15}, 0.85, 0.0}};
  const std::vector<double> tau = {0.3, 0.75};
  const Step1Weights w = build_weights(tau, prob);

  const StateVar kinds[] = {StateVar::L, StateVar::S, StateVar::C1, StateVar::C2};
  const double taus[] = {1.0, 0.3, 0.75, 0.75};
  const auto& tgt = prob.vs[0];
  for (int p = 0; p < 4; ++p) {
    for (int k = 0; k < 4; ++k) {
      const double bp = beta_quad(kinds[p], taus[p], tgt.window.ts, tgt.window.te);
      const double bk = beta_quad(kinds[k], taus[k], tgt.window.ts, tgt.window.te);
      const double aa = adaptive_integrate(
                            [&](double u) {
                              return a_fn(kinds[p], taus[p], u) * a_fn(kinds[k], taus[k], u);
                            },
                            0.0, tgt.T, 1e-10) /
                        tgt.T;
      const double expect = bp * bk * aa;
      EXPECT_NEAR(w.vs[0](p, k), expect, 1e-9 * std::max(1.0, std::abs(expect))) << p << k;
    }
  }
}

TEST(Step1, LevelWeightIsAlwaysOne) {
  Step1Problem prob;
  prob.rolling = {{0.1, 0.2}, {1.0, 2.0}};
  prob.C_mkt = Eigen::MatrixXd::Zero(2, 2);
  prob.Gamma = Eigen::MatrixXd::Ones(2, 2);
  prob.n_s = 1;
  prob.vs = {{{0.5, 0.6}, 0.4, 0.0}};
  const Step1Weights w = build_weights({0.3}, prob);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(w.cov[static_cast<size_t>(i)](0, 0), 1.0, 1e-12);
  EXPECT_NEAR(w.vs[0](0, 0), 1.0, 1e-12);
}

TEST(Step1, WeightsContractWithStateCovToModelQuantities) {
  const LscModel m = make_model_1l1s1c();
  const Step1Problem prob = problem_from_model(m);
  std::vector<double> tau = {m.tau_s[0], m.tau_c[0]};
  const Step1Weights w = build_weights(tau, prob);
  const Eigen::MatrixXd x = m.state_cov();
  const int P = static_cast<int>(prob.rolling.size());
  for (int i = 0; i < P; ++i) {
    for (int j = 0; j < P; ++j) {
      const double via_weights = (w.cov[static_cast<size_t>(i * P + j)].array() * x.array()).sum();
      EXPECT_NEAR(via_weights, prob.C_mkt(i, j), 1e-10 * std::max(1.0, prob.C_mkt(i, j)))
          << i << " " << j;
    }
  }
  for (size_t l = 0; l < prob.vs.size(); ++l) {
    const double via_weights = (w.vs[l].array() * x.array()).sum();
    EXPECT_NEAR(via_weights, prob.vs[l].sigma_vs_sq,
                1e-10 * std::max(1.0, prob.vs[l].sigma_vs_sq));
  }
  // loss at the generating x is numerically zero.
  double j1 = 0.0, j2 = 0.0;
  const double loss = loss_from_x(x, w, prob, &j1, &j2);
  EXPECT_LT(loss, 1e-18);
  EXPECT_NEAR(loss, prob.lambda * j1 + (1.0 - prob.lambda) * j2, 1e-18);
}

TEST(Step1, BuildWeightsRejectsBadTau) {
  Step1Problem prob;
  prob.rolling = {{0.1, 0.2}};
  prob.C_mkt = Eigen::MatrixXd::Zero(1, 1);
  prob.Gamma = Eigen::MatrixXd::Ones(1, 1);
  prob.n_s = 1;
  EXPECT_THROW(build_weights({}, prob), BadConfig);
  EXPECT_THROW(build_weights({-0.1}, prob), BadConfig);
}

// ---------------------------------------------------------------------------
// solve_inner

TEST(Step1, InnerRecoversKnownStateCovariance) {
  const LscModel m = make_model_1l1s();
  const Step1Problem prob = problem_from_model(m);
  const InnerSolution sol = solve_inner({m.tau_s[0]}, prob);
  EXPECT_LT(sol.loss, 1e-10);
  const Eigen::MatrixXd x_true = m.state_cov();
  EXPECT_LT((sol.x - x_true).cwiseAbs().maxCoeff(), 1e-6);
  // Certificate: the solver is never beaten by the generating point.
  const Step1Weights w = build_weights({m.tau_s[0]}, prob);
  EXPECT_LE(sol.loss, loss_from_x(x_true, w, prob) + 1e-12);
}

TEST(Step1, InnerOneFactorMatchesClosedForm) {
  // L-only: every weight is 1, so the optimum is the weighted mean of all
  // targets, clipped to [0, sigma_upper^2].
  Step1Problem prob;
  prob.rolling = {{0.1, 0.35}, {0.5, 1.0}};
  prob.C_mkt.resize(2, 2);
  prob.C_mkt << 0.09, 0.08, 0.08, 0.11;
  prob.Gamma.resize(2, 2);
  prob.Gamma << 2.0, 0.5, 0.5, 1.0;
  prob.vs = {{{0.5, 0.75}, 0.4, 0.12}};
  prob.lambda = 0.7;
  prob.n_s = 0;
  prob.n_c = 0;
  prob.sigma_l_upper = 10.0;

  double num = 0.0, den = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      num += prob.lambda * prob.Gamma(i, j) * prob.C_mkt(i, j);
      den += prob.lambda * prob.Gamma(i, j);
    }
  }
  num += (1.0 - prob.lambda) * prob.vs[0].sigma_vs_sq;
  den += 1.0 - prob.lambda;
  const double x_star = num / den;

  const InnerSolution sol = solve_inner({}, prob);
  ASSERT_EQ(sol.x.rows(), 1);
  EXPECT_NEAR(sol.x(0, 0), x_star, 1e-7);

  // Binding upper bound.
  Step1Problem capped = prob;
  capped.sigma_l_upper = 0.2;  // 0.04 < x_star
  const InnerSolution solc = solve_inner({}, capped);
  EXPECT_NEAR(solc.x(0, 0), 0.04, 1e-6);
}

TEST(Step1, InnerZeroTargetsGiveZero) {
  Step1Problem prob = problem_from_model(make_model_1l1s(), 1.0);
  prob.C_mkt.setZero();
  const InnerSolution sol = solve_inner({0.25}, prob);
  EXPECT_LT(sol.x.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Step1, InnerEqualityConstraintsHoldAtSolution) {
  const LscModel m = make_model_1l1s1c();
  const Step1Problem prob = problem_from_model(m);
  const InnerSolution sol = solve_inner({m.tau_s[0], m.tau_c[0]}, prob);
  // States ordered (L, S, C1, C2); the C pair shares sigma_C and its Brownian.
  const int q1 = 2, q2 = 3;
  EXPECT_NEAR(sol.x(q1, q1), sol.x(q2, q2), 1e-8);
  EXPECT_NEAR(sol.x(q1, q1), sol.x(q1, q2), 1e-8);
  for (int p = 0; p < 2; ++p) EXPECT_NEAR(sol.x(p, q1), sol.x(p, q2), 1e-8);
  // And the instance is solved essentially exactly.
  EXPECT_LT(sol.loss, 1e-10);
  EXPECT_LT((sol.x - m.state_cov()).cwiseAbs().maxCoeff(), 2e-5);
}

namespace {

// Brute-force loss over the (sigma_L, sigma_S, rho) parametrization of a
// 2-factor state covariance.
double grid_loss(double s0, double s1, double rho, const Step1Weights& w,
                 const Step1Problem& prob) {
  Eigen::MatrixXd x(2, 2);
  x << s0 * s0, rho * s0 * s1, rho * s0 * s1, s1 * s1;
  return loss_from_x(x, w, prob);
}

}  // namespace

TEST(Step1, InnerMatchesGridAndPolishedOracleOnTwoFactorInstance) {
  // Conflicting targets so the optimum interpolates between data sources.
  const LscModel m = make_model_1l1s();
  Step1Problem prob = problem_from_model(m, 0.5);
  for (auto& t : prob.vs) t.sigma_vs_sq *= 1.35;
  prob.C_mkt *= 0.9;

  const std::vector<double> tau = {0.25};
  const Step1Weights w = build_weights(tau, prob);
  const InnerSolution sol = solve_inner(tau, prob);

  double best = 1e300;
  double bs0 = 0.0, bs1 = 0.0, brho = 0.0;
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= 40; ++b) {
      for (int r = -10; r <= 10; ++r) {
        const double s0 = 0.6 * a / 40.0;
        const double s1 = 2.0 * b / 40.0;
        const double rho = r / 10.0;
        const double l = grid_loss(s0, s1, rho, w, prob);
        if (l < best) {
          best = l;
          bs0 = s0;
          bs1 = s1;
          brho = rho;
        }
      }
    }
  }
  // Feasible grid points can never beat the inner optimum.
  EXPECT_LE(sol.loss, best + 1e-12);

  // Nelder-Mead polish of the best grid point gives an independent optimum.
  const auto obj = [&](const Eigen::VectorXd& p) {
    return grid_loss(std::abs(p(0)), std::abs(p(1)), std::tanh(p(2)), w, prob);
  };
  Eigen::VectorXd p0(3);
  p0 << bs0, bs1, std::atanh(std::min(0.99, std::max(-0.99, brho)));
  NelderMeadOptions nmo;
  nmo.max_iter = 4000;
  nmo.tol_diameter = 1e-10;
  nmo.initial_step = 0.05;
  const auto res = nelder_mead(obj, p0, nmo);
  EXPECT_NEAR(sol.loss, res.f, 1e-4 * std::max(1.0, std::abs(res.f)));
}

TEST(Step1, LambdaMonotonicityOfHistoricalResidual) {
  const LscModel m = make_model_1l1s();
  Step1Problem prob = problem_from_model(m, 0.5);
  for (auto& t : prob.vs) t.sigma_vs_sq *= 1.5;  // conflict with C_mkt
  double prev_j1 = 1e300;
  for (const double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    prob.lambda = lambda;
    const InnerSolution sol = solve_inner({0.25}, prob);
    EXPECT_LE(sol.j1, prev_j1 + 1e-9) << "lambda " << lambda;
    prev_j1 = sol.j1;
  }
}

// ---------------------------------------------------------------------------
// tau map and initialization

TEST(Step1, TauMapPositiveAndIncreasingPerFamily) {
  RngStream rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(5);
    for (int i = 0; i < 5; ++i) a(i) = rng.normal() * 2.0;
    const auto tau = tau_from_a(a, 3);
    ASSERT_EQ(tau.size(), 5u);
    EXPECT_GT(tau[0], 0.0);
    EXPECT_GT(tau[1], tau[0]);
    EXPECT_GT(tau[2], tau[1]);
    EXPECT_GT(tau[3], 0.0);      // C family restarts its cumulative sum
    EXPECT_GT(tau[4], tau[3]);
    EXPECT_NEAR(tau[3], std::exp(a(3)), 1e-12 * std::exp(a(3)));
  }
}

TEST(Step1, InitTauUsesWindowMidpoints) {
  Step1Problem prob;
  prob.rolling = {{0.5, 1.0}};
  prob.C_mkt = Eigen::MatrixXd::Zero(1, 1);
  prob.Gamma = Eigen::MatrixXd::Ones(1, 1);
  prob.n_s = 1;
  RngStream rng(1);
  const Eigen::VectorXd a = init_tau(prob, rng, false);
  ASSERT_EQ(a.size(), 1);
  EXPECT_NEAR(std::exp(a(0)), 0.75, 1e-12);

  // Seeded noise is reproducible.
  RngStream r1(7, 3), r2(7, 3);
  const Eigen::VectorXd n1 = init_tau(prob, r1, true);
  const Eigen::VectorXd n2 = init_tau(prob, r2, true);
  EXPECT_EQ(n1(0), n2(0));
  // Multi-factor starts are strictly increasing in tau space.
  prob.rolling = default_rolling();
  prob.n_s = 3;
  prob.n_c = 2;
  RngStream r3(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tau = tau_from_a(init_tau(prob, r3, true), prob.n_s);
    for (int i = 1; i < 3; ++i) EXPECT_GT(tau[static_cast<size_t>(i)], tau[static_cast<size_t>(i - 1)]);
    EXPECT_GT(tau[4], tau[3]);
  }
}

// ---------------------------------------------------------------------------
// calibrate_step1

TEST(Step1, CalibrationRoundTripRecoversGroundTruth) {
  const LscModel truth = make_model_1l1s();
  const Step1Problem prob = problem_from_model(truth);
  Step1Options opt;
  opt.restarts = 4;
  opt.n_workers = 2;
  Step1Report report;
  const LscModel fit = calibrate_step1(prob, opt, &report);

  EXPECT_NEAR(fit.sigma_l, truth.sigma_l, 0.02 * truth.sigma_l);
  EXPECT_NEAR(fit.sigma_s[0], truth.sigma_s[0], 0.02 * truth.sigma_s[0]);
  EXPECT_NEAR(fit.tau_s[0], truth.tau_s[0], 0.05 * truth.tau_s[0]);
  EXPECT_NEAR(fit.R(0, 1), truth.R(0, 1), 0.02);
  EXPECT_LT(report.loss, 1e-9);
  EXPECT_NEAR(report.loss, prob.lambda * report.j1 + (1.0 - prob.lambda) * report.j2, 1e-12);
  EXPECT_FALSE(report.underparametrized);
  EXPECT_GE(report.best_restart, 0);
  ASSERT_EQ(report.restart_losses.size(), 4u);
  // Extracted correlation is a valid correlation matrix.
  fit.validate();
}

TEST(Step1, CalibrationIsDeterministicAcrossWorkerCounts) {
  const Step1Problem prob = problem_from_model(make_model_1l1s());
  Step1Options opt;
  opt.restarts = 3;
  opt.nm.max_iter = 120;
  Step1Report rep1, rep8;
  opt.n_workers = 1;
  const LscModel m1 = calibrate_step1(prob, opt, &rep1);
  opt.n_workers = 8;
  const LscModel m8 = calibrate_step1(prob, opt, &rep8);
  EXPECT_EQ(m1.sigma_l, m8.sigma_l);
  EXPECT_EQ(m1.sigma_s[0], m8.sigma_s[0]);
  EXPECT_EQ(m1.tau_s[0], m8.tau_s[0]);
  EXPECT_EQ(m1.R(0, 1), m8.R(0, 1));
  EXPECT_EQ(rep1.best_restart, rep8.best_restart);
  ASSERT_EQ(rep1.restart_losses.size(), rep8.restart_losses.size());
  for (size_t i = 0; i < rep1.restart_losses.size(); ++i)
    EXPECT_EQ(rep1.restart_losses[i], rep8.restart_losses[i]);
}

TEST(Step1, DegenerateFactorIsReportedNotEmitted) {
  // Targets generated from a pure level model leave nothing for the S factor.
  LscModel level_only;
  level_only.sigma_l = 0.4;
  level_only.R = Eigen::MatrixXd::Ones(1, 1);
  Step1Problem prob;
  prob.rolling = default_rolling();
  const int P = static_cast<int>(prob.rolling.size());
  prob.C_mkt = Eigen::MatrixXd::Constant(P, P, 0.16);
  prob.Gamma = Eigen::MatrixXd::Ones(P, P);
  prob.vs = default_vs_windows();
  for (auto& t : prob.vs) t.sigma_vs_sq = 0.16;
  prob.n_s = 1;
  prob.sigma_l_upper = 5.0;
  Step1Options opt;
  opt.restarts = 2;
  try {
    calibrate_step1(prob, opt);
    FAIL() << "expected ExtractionDegenerate";
  } catch (const ExtractionDegenerate& e) {
    EXPECT_NE(std::string(e.what()).find("factor"), std::string::npos);
  }
}

TEST(Step1, UnderparametrizationRule) {
  Step1Problem prob;
  prob.rolling = {{0.1, 0.2}, {0.3, 0.5}};  // P = 2 -> 3 covariance targets
  prob.C_mkt = Eigen::MatrixXd::Identity(2, 2);
  prob.Gamma = Eigen::MatrixXd::Ones(2, 2);
  prob.vs = {{{0.5, 0.6}, 0.4, 0.1}};  // 1 smile
  prob.n_s = 3;
  prob.n_c = 1;  // N = 5 -> needs 19 targets, have 4
  EXPECT_FALSE(prob.underparametrization_ok());
  prob.n_s = 1;
  prob.n_c = 0;  // N = 2 -> needs 4, have 4
  EXPECT_TRUE(prob.underparametrization_ok());
}

TEST(Step1, ValidateRejectsBadInstances) {
  Step1Problem prob = problem_from_model(make_model_1l1s());
  prob.lambda = 1.5;
  EXPECT_THROW(prob.validate(), BadConfig);
  prob = problem_from_model(make_model_1l1s());
  prob.vs[0].T = prob.vs[0].window.ts + 0.5;  // maturity after delivery start
  EXPECT_THROW(prob.validate(), BadConfig);
  prob = problem_from_model(make_model_1l1s());
  prob.Gamma = Eigen::MatrixXd::Ones(1, 1);
  EXPECT_THROW(prob.validate(), BadConfig);
}
