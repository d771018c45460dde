#include "hjmcal/lsc.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hjmcal/errors.hpp"
#include "hjmcal/philox.hpp"
#include "hjmcal/quadrature.hpp"

using namespace hjmcal;

namespace {

LscModel make_model_1l2s1c() {
  LscModel m;
  m.sigma_l = 0.25;
  m.sigma_s = {1.2, 0.6};
  m.tau_s = {0.08, 0.5};
  m.sigma_c = {0.9};
  m.tau_c = {0.3};
  m.R = Eigen::MatrixXd(4, 4);
  m.R << 1.0, 0.3, -0.2, 0.1,
         0.3, 1.0, 0.4, -0.3,
        -0.2, 0.4, 1.0, 0.2,
         0.1, -0.3, 0.2, 1.0;
  m.validate();
  return m;
}

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

const StateVar kAllStates[] = {StateVar::L, StateVar::S, StateVar::C1, StateVar::C2};

}  // namespace

TEST(Lsc, ShapeEval) {
  LscModel m = make_model_1l2s1c();
  EXPECT_DOUBLE_EQ(shape_eval(m, 0, 0.3, 2.0), 0.25);
  EXPECT_DOUBLE_EQ(shape_eval(m, 1, 0.7, 0.7), 1.2);  // S at t = T
  // C peaks at T - t = tau_C with value sigma_C / e.
  EXPECT_NEAR(shape_eval(m, 3, 0.0, 0.3), 0.9 / std::exp(1.0), 1e-15);
  EXPECT_LT(shape_eval(m, 3, 0.0, 0.31), 0.9 / std::exp(1.0));
  EXPECT_LT(shape_eval(m, 3, 0.0, 0.29), 0.9 / std::exp(1.0));
}

TEST(Lsc, BetaWeightClosedForms) {
  EXPECT_DOUBLE_EQ(beta_weight(StateVar::L, 0.0, 0.2, 1.0), 1.0);
  // Continuity: beta_S -> 1 as Ts -> 0 and duration -> 0.
  EXPECT_NEAR(beta_weight(StateVar::S, 0.25, 1e-9, 1e-6), 1.0, 1e-5);
  RngStream rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const StateVar X = kAllStates[trial % 4];
    const double tau = rng.uniform(0.02, 3.0);
    const double Ts = rng.uniform(0.0, 2.0);
    const double Te = Ts + rng.uniform(0.01, 1.0);
    const double quad = adaptive_integrate([&](double T) { return b_fn(X, tau, T); }, Ts, Te,
                                           1e-13) /
                        (Te - Ts);
    EXPECT_NEAR(beta_weight(X, tau, Ts, Te), quad, 1e-10) << "trial " << trial;
  }
}

TEST(Lsc, CrossTermClosedForms) {
  EXPECT_DOUBLE_EQ(cross_term(StateVar::L, StateVar::L, 0.0, 0.0, 0.2, 0.9), 0.7);
  for (StateVar p : kAllStates)
    for (StateVar k : kAllStates)
      EXPECT_EQ(cross_term(p, k, 0.4, 0.7, 0.5, 0.5), 0.0);
  RngStream rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const StateVar p = kAllStates[trial % 4];
    const StateVar k = kAllStates[(trial / 4) % 4];
    const double tau_p = rng.uniform(0.3, 2.5);
    const double tau_k = rng.uniform(0.3, 2.5);
    const double t1 = rng.uniform(0.0, 0.8);
    const double t2 = t1 + rng.uniform(0.0, 0.7);
    const double closed = cross_term(p, k, tau_p, tau_k, t1, t2);
    const double quad = adaptive_integrate(
        [&](double t) { return a_fn(p, tau_p, t) * a_fn(k, tau_k, t); }, t1, t2, 1e-13);
    EXPECT_NEAR(closed, quad, 1e-10 * std::max(1.0, std::abs(closed))) << "trial " << trial;
  }
}

TEST(Lsc, StateTermMatchesBetaTimesA) {
  RngStream rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const StateVar X = kAllStates[trial % 4];
    const double tau = rng.uniform(0.05, 2.0);
    const double ts = rng.uniform(0.05, 1.5);
    const Window win{ts, ts + rng.uniform(0.02, 0.6)};
    const ExpTerm term = state_term(X, tau, win);
    for (double u : {0.0, 0.3 * win.ts, win.ts}) {
      const double expected = beta_weight(X, tau, win.ts, win.te) * a_fn(X, tau, u);
      EXPECT_NEAR(eval(term, u), expected, 1e-12 * std::max(1.0, std::abs(expected)))
          << "trial " << trial << " u=" << u;
    }
  }
}

TEST(Lsc, AnchoredProductIntegralsExtremeTau) {
  // The anchored forms stay finite where naive beta * a products overflow.
  RngStream rng(5);
  for (double tau : {5e-4, 2e-3, 0.05, 0.8}) {
    for (int trial = 0; trial < 8; ++trial) {
      const StateVar p = kAllStates[1 + trial % 3];
      const StateVar k = kAllStates[(trial / 2) % 4];
      const double tau_k = rng.uniform(0.05, 1.5);
      Window wp{rng.uniform(0.1, 1.0), 0.0};
      wp.te = wp.ts + rng.uniform(0.05, 0.3);
      Window wk{rng.uniform(0.1, 1.0), 0.0};
      wk.te = wk.ts + rng.uniform(0.05, 0.3);
      const double t2 = std::min(wp.ts, wk.ts);
      const ExpTerm tp = state_term(p, tau, wp);
      const ExpTerm tk = state_term(k, tau_k, wk);
      const double closed = integrate_product(tp, tk, 0.0, t2);
      EXPECT_TRUE(std::isfinite(closed));
      const double quad = adaptive_integrate(
          [&](double u) { return eval(tp, u) * eval(tk, u); }, 0.0, t2, 1e-14);
      EXPECT_NEAR(closed, quad, 1e-11 * std::max(1.0, std::abs(closed)))
          << "tau=" << tau << " trial=" << trial;
    }
  }
}

TEST(Lsc, FactorProfileMatchesQuadrature) {
  LscModel m = make_model_1l2s1c();
  const Window w{0.4, 0.65};
  for (int n = 0; n < m.n_factors(); ++n) {
    const ExpSum f = factor_profile(m, n, w);
    for (double t : {0.0, 0.1, 0.39}) {
      const double quad = adaptive_integrate(
          [&](double T) { return shape_eval(m, n, t, T); }, w.ts, w.te, 1e-13) / w.duration();
      EXPECT_NEAR(eval(f, t), quad, 1e-11) << "factor " << n << " t=" << t;
    }
  }
}

TEST(Lsc, KvVolatilityLinearInG) {
  LscModel m = make_model_1l2s1c();
  const Window w{0.5, 0.75};
  PiecewiseConstant g2(2.0);
  const Eigen::VectorXd v1 = kv_volatility(m, 0.2, w);
  const Eigen::VectorXd v2 = kv_volatility(m, 0.2, w, &g2);
  EXPECT_LT((v2 - 2.0 * v1).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Lsc, KvVolatilityStationarity) {
  LscModel m = make_model_1l2s1c();
  for (double u : {0.0, 0.13, 0.4}) {
    const Eigen::VectorXd a = kv_volatility(m, 0.1 + u, {0.5 + u, 0.8 + u});
    const Eigen::VectorXd b = kv_volatility(m, 0.1, {0.5, 0.8});
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12) << "u=" << u;
  }
}

TEST(Lsc, PiecewiseGDecomposition) {
  // Quarter [0.5, 0.75) split into nested months with per-month g values: the
  // quarter volatility decomposes into duration-weighted month volatilities.
  LscModel m = make_model_1l2s1c();
  const Window q{0.5, 0.75};
  const Window m1{0.5, 0.5 + 1.0 / 12};
  const Window m2{0.5 + 1.0 / 12, 0.5 + 2.0 / 12};
  const Window m3{0.5 + 2.0 / 12, 0.75};
  PiecewiseConstant g({m2.ts, m3.ts}, {1.3, 0.8, 1.1});
  const double t = 0.25;
  Eigen::VectorXd lhs = kv_volatility(m, t, q, &g);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.n_factors());
  for (const Window* mw : {&m1, &m2, &m3}) {
    const double omega = mw->duration() / q.duration();
    const double gv = g(0.5 * (mw->ts + mw->te));
    rhs += omega * gv * kv_volatility(m, t, *mw);
  }
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lsc, ModelCovarianceLevelOnly) {
  LscModel m;
  m.sigma_l = 0.4;
  m.R = Eigen::MatrixXd::Ones(1, 1);
  m.validate();
  const RollingSpec a{30.0 / 365.25, 60.0 / 365.25};
  const RollingSpec b{91.0 / 365.25, 182.0 / 365.25};
  EXPECT_NEAR(model_covariance(m, a, b, 1.0 / 252), 0.16, 1e-14);
  EXPECT_NEAR(model_covariance(m, a, a, 1.0 / 252), 0.16, 1e-14);
}

TEST(Lsc, ModelCovarianceObservationDateInvariance) {
  // Brute-force quadrature at several observation dates reproduces the
  // stationary closed form.
  LscModel m = make_model_1l2s1c();
  const RollingSpec si{0.1, 0.25};
  const RollingSpec sj{0.3, 0.55};
  const double tau_d = 1.0 / 252;
  const double closed = model_covariance(m, si, sj, tau_d);
  for (double th : {tau_d, 0.2, 1.1}) {
    auto integrand = [&](double t) {
      const Eigen::VectorXd vi = kv_volatility(m, t, {th + si.ts, th + si.te});
      const Eigen::VectorXd vj = kv_volatility(m, t, {th + sj.ts, th + sj.te});
      return static_cast<double>(vi.transpose() * m.R * vj);
    };
    const double quad =
        adaptive_integrate(integrand, th - tau_d, th, 1e-14) / tau_d;
    EXPECT_NEAR(closed, quad, 1e-10 * std::max(1.0, std::abs(closed))) << "th=" << th;
  }
}

TEST(Lsc, ModelCovariancePsdAcrossSpecs) {
  LscModel m = make_model_1l2s1c();
  std::vector<RollingSpec> specs;
  for (double ts : {0.05, 0.12, 0.3, 0.6, 1.0})
    specs.push_back({ts, ts + 0.2});
  const int P = static_cast<int>(specs.size());
  Eigen::MatrixXd C(P, P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) C(i, j) = model_covariance(m, specs[i], specs[j], 1.0 / 252);
  EXPECT_LT((C - C.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Lsc, ModelVsVarianceQuadratureOracle) {
  LscModel m = make_model_1l2s1c();
  const Window w{0.6, 0.85};
  for (double T : {0.1, 0.35, 0.6}) {
    auto integrand = [&](double t) {
      const Eigen::VectorXd v = kv_volatility(m, t, w);
      return static_cast<double>(v.transpose() * m.R * v);
    };
    const double quad = adaptive_integrate(integrand, 0.0, T, 1e-13) / T;
    EXPECT_NEAR(model_vs_variance(m, w, T), quad, 1e-10) << "T=" << T;
  }
}

TEST(Lsc, ModelVsVarianceLevelOnlyAndMonotone) {
  LscModel m;
  m.sigma_l = 0.33;
  m.R = Eigen::MatrixXd::Ones(1, 1);
  m.validate();
  EXPECT_NEAR(model_vs_variance(m, {1.0, 1.3}, 0.7), 0.33 * 0.33, 1e-14);

  LscModel full = make_model_1l2s1c();
  double prev = 0.0;
  for (double T = 0.05; T <= 0.6; T += 0.05) {
    const double tv = T * model_vs_variance(full, {0.6, 0.85}, T);
    EXPECT_GE(tv, prev - 1e-14);
    prev = tv;
  }
}

TEST(Lsc, InstantaneousCorrelation) {
  LscModel m = make_model_1l2s1c();
  const Window wi{0.5, 0.6}, wj{0.9, 1.1};
  EXPECT_NEAR(instantaneous_correlation(m, 0.2, wi, wi), 1.0, 1e-12);

  LscModel single;
  single.sigma_l = 0.5;
  single.R = Eigen::MatrixXd::Ones(1, 1);
  single.validate();
  EXPECT_NEAR(instantaneous_correlation(single, 0.2, wi, wj), 1.0, 1e-12);

  // Scale invariance: constant g per delivery leaves correlations unchanged.
  PiecewiseConstant g({0.8}, {1.7, 0.6});
  const double with_g = instantaneous_correlation(m, 0.2, wi, wj, &g);
  const double without = instantaneous_correlation(m, 0.2, wi, wj);
  EXPECT_NEAR(with_g, without, 1e-12);
  const double c = instantaneous_correlation(m, 0.2, wi, wj);
  EXPECT_LE(std::abs(c), 1.0 + 1e-12);
}

TEST(Lsc, TwoOpposedSlopesApproximateCurvature) {
  // sigma_C = 1, tau_C = 0.2 vs 8.18 (exp(-x/0.212) - exp(-x/0.188)).
  double max_rel = 0.0;
  for (double x = 0.01; x <= 2.0; x += 0.005) {
    const double c_shape = (x / 0.2) * std::exp(-x / 0.2);
    const double combo = 8.18 * (std::exp(-x / 0.212) - std::exp(-x / 0.188));
    max_rel = std::max(max_rel, std::abs(combo - c_shape) / c_shape);
  }
  EXPECT_LT(max_rel, 0.05);
}

TEST(Lsc, StateTablesAndValidation) {
  LscModel m = make_model_1l2s1c();
  const auto st = m.states();
  ASSERT_EQ(st.size(), 5u);  // L, S, S, C1, C2
  EXPECT_EQ(st[3].factor, 3);
  EXPECT_EQ(st[4].factor, 3);
  const Eigen::MatrixXd x = m.state_cov();
  EXPECT_NEAR(x(0, 0), 0.25 * 0.25, 1e-15);
  EXPECT_NEAR(x(3, 4), 0.9 * 0.9, 1e-15);           // C1-C2 share factor, R=1
  EXPECT_NEAR(x(0, 1), 0.25 * 1.2 * 0.3, 1e-15);

  const Eigen::MatrixXd L = m.chol_lower();
  EXPECT_LT((L * L.transpose() - m.R).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(L(0, 1), 0.0, 0.0);  // lower triangular

  LscModel bad = m;
  bad.tau_s = {0.5, 0.08};
  EXPECT_THROW(bad.validate(), BadConfig);
  bad = m;
  bad.R(0, 1) = 0.9;
  EXPECT_THROW(bad.validate(), BadConfig);  // asymmetric
}
