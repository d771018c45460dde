#include "hjmcal/lsc.hpp"

#include <cmath>

#include "hjmcal/errors.hpp"
#include "hjmcal/quadrature.hpp"

namespace hjmcal {
namespace {

// Ik(x) = integral of v^k e^-v over [0, x]. Series branches avoid the
// cancellation of the closed forms for small x.
double kernel_i0(double x) { return -std::expm1(-x); }

double kernel_i1(double x) {
  if (x < 1.0) {
    double sum = 0.0, pow = x;  // x^k / k! carried incrementally
    for (int k = 2; k <= 22; ++k) {
      pow *= -x / k;
      sum += -(k - 1) * pow;  // (-1)^k (k-1) x^k / k!
    }
    return sum;
  }
  return 1.0 - (1.0 + x) * std::exp(-x);
}

double kernel_i2(double x) {
  if (x < 1.0) {
    double sum = 0.0, pow = x;  // pow tracks (-1)^(k-1) x^k / k!
    for (int k = 2; k <= 24; ++k) {
      pow *= -x / k;
      if (k >= 3) sum += (k - 1) * (k - 2) * pow;
    }
    return sum;
  }
  return 2.0 - (2.0 + 2.0 * x + x * x) * std::exp(-x);
}

double pow_int(double t, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= t;
  return r;
}

}  // namespace

double eval(const ExpTerm& t, double u) {
  return t.coef * pow_int(u, t.deg) * std::exp(t.rate * u - t.offset);
}

double eval(const ExpSum& f, double u) {
  double s = 0.0;
  for (const auto& t : f) s += eval(t, u);
  return s;
}

double integrate_product(const ExpTerm& p, const ExpTerm& k, double t1, double t2) {
  const double c = p.coef * k.coef;
  if (c == 0.0 || t1 == t2) return 0.0;
  const int d = p.deg + k.deg;
  const double a = p.rate + k.rate;
  const double b = p.offset + k.offset;
  if (a == 0.0) {
    return c * std::exp(-b) * (pow_int(t2, d + 1) - pow_int(t1, d + 1)) / (d + 1);
  }
  const double x = a * (t2 - t1);
  const double e2 = std::exp(a * t2 - b);  // <= 1 for anchored terms
  const double i0 = kernel_i0(x);
  switch (d) {
    case 0:
      return c * e2 * i0 / a;
    case 1:
      return c * e2 * (t2 * i0 - kernel_i1(x) / a) / a;
    default:
      return c * e2 * (t2 * t2 * i0 - 2.0 * t2 * kernel_i1(x) / a + kernel_i2(x) / (a * a)) / a;
  }
}

double integrate_product(const ExpSum& f, const ExpSum& g, double t1, double t2) {
  double s = 0.0;
  for (const auto& p : f)
    for (const auto& k : g) s += integrate_product(p, k, t1, t2);
  return s;
}

std::vector<LscModel::State> LscModel::states() const {
  std::vector<State> out;
  out.push_back({StateVar::L, 0.0, 0});
  for (int i = 0; i < n_s(); ++i) out.push_back({StateVar::S, tau_s[i], 1 + i});
  for (int j = 0; j < n_c(); ++j) {
    out.push_back({StateVar::C1, tau_c[j], 1 + n_s() + j});
    out.push_back({StateVar::C2, tau_c[j], 1 + n_s() + j});
  }
  return out;
}

Eigen::VectorXd LscModel::state_sigmas() const {
  Eigen::VectorXd s(n_states());
  int p = 0;
  s[p++] = sigma_l;
  for (int i = 0; i < n_s(); ++i) s[p++] = sigma_s[i];
  for (int j = 0; j < n_c(); ++j) {
    s[p++] = sigma_c[j];
    s[p++] = sigma_c[j];
  }
  return s;
}

Eigen::MatrixXd LscModel::state_cov() const {
  const auto st = states();
  const Eigen::VectorXd s = state_sigmas();
  const int K = n_states();
  Eigen::MatrixXd x(K, K);
  for (int p = 0; p < K; ++p)
    for (int k = 0; k < K; ++k) x(p, k) = s[p] * s[k] * R(st[p].factor, st[k].factor);
  return x;
}

Eigen::MatrixXd LscModel::chol_lower() const {
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Semidefinite R: retry with a diagonal jitter small enough to be invisible
  // at validation tolerance.
  Eigen::MatrixXd rj = R;
  for (double jitter = 1e-14; jitter <= 1e-8; jitter *= 10.0) {
    rj.diagonal().array() = R.diagonal().array() + jitter;
    Eigen::LLT<Eigen::MatrixXd> retry(rj);
    if (retry.info() == Eigen::Success) return retry.matrixL();
  }
  throw BadConfig("correlation matrix is not positive semidefinite");
}

void LscModel::validate() const {
  if (!(sigma_l > 0.0)) throw BadConfig("sigma_L must be positive");
  if (sigma_s.size() != tau_s.size() || sigma_c.size() != tau_c.size())
    throw BadConfig("sigma/tau family sizes differ");
  for (double v : sigma_s)
    if (!(v > 0.0)) throw BadConfig("sigma_S must be positive");
  for (double v : sigma_c)
    if (!(v > 0.0)) throw BadConfig("sigma_C must be positive");
  for (std::size_t i = 0; i < tau_s.size(); ++i)
    if (!(tau_s[i] > 0.0) || (i > 0 && !(tau_s[i] > tau_s[i - 1])))
      throw BadConfig("tau_S must be positive and strictly increasing");
  for (std::size_t j = 0; j < tau_c.size(); ++j)
    if (!(tau_c[j] > 0.0) || (j > 0 && !(tau_c[j] > tau_c[j - 1])))
      throw BadConfig("tau_C must be positive and strictly increasing");
  const int N = n_factors();
  if (R.rows() != N || R.cols() != N) throw BadConfig("R dimension mismatch");
  if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw BadConfig("R not symmetric");
  for (int i = 0; i < N; ++i)
    if (std::abs(R(i, i) - 1.0) > 1e-12) throw BadConfig("R diagonal must be 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw BadConfig("R has eigenvalue below -1e-10");
}

double shape_eval(const LscModel& m, int factor, double t, double T) {
  if (factor == 0) return m.sigma_l;
  if (factor <= m.n_s()) {
    const int i = factor - 1;
    return m.sigma_s[i] * std::exp(-(T - t) / m.tau_s[i]);
  }
  const int j = factor - 1 - m.n_s();
  const double z = (T - t) / m.tau_c[j];
  return m.sigma_c[j] * z * std::exp(-z);
}

double beta_weight(StateVar X, double tau, double Ts, double Te) {
  const double D = Te - Ts;
  switch (X) {
    case StateVar::L:
      return 1.0;
    case StateVar::S:
    case StateVar::C2: {
      const double x = D / tau;
      return (tau / D) * std::exp(-Ts / tau) * (-std::expm1(-x));
    }
    case StateVar::C1: {
      const double x = D / tau;
      return std::exp(-Ts / tau) * (-Ts * std::expm1(-x) + tau * kernel_i1(x)) / D;
    }
  }
  return 0.0;
}

double cross_term(StateVar Xp, StateVar Xk, double tau_p, double tau_k, double t1, double t2) {
  auto raw = [](StateVar X, double tau) -> ExpTerm {
    switch (X) {
      case StateVar::L:
        return {1.0, 0, 0.0, 0.0};
      case StateVar::S:
      case StateVar::C1:
        return {1.0, 0, 1.0 / tau, 0.0};
      case StateVar::C2:
        return {-1.0 / tau, 1, 1.0 / tau, 0.0};
    }
    return {};
  };
  return integrate_product(raw(Xp, tau_p), raw(Xk, tau_k), t1, t2);
}

ExpTerm state_term(StateVar X, double tau, const Window& w) {
  const double D = w.duration();
  switch (X) {
    case StateVar::L:
      return {1.0, 0, 0.0, 0.0};
    case StateVar::S: {
      const double x = D / tau;
      return {(tau / D) * (-std::expm1(-x)), 0, 1.0 / tau, w.ts / tau};
    }
    case StateVar::C1: {
      const double x = D / tau;
      return {(-w.ts * std::expm1(-x) + tau * kernel_i1(x)) / D, 0, 1.0 / tau, w.ts / tau};
    }
    case StateVar::C2: {
      const double x = D / tau;
      return {std::expm1(-x) / D, 1, 1.0 / tau, w.ts / tau};
    }
  }
  return {};
}

namespace {

// Split a delivery window at the breakpoints of g; returns (sub-window, g value).
std::vector<std::pair<Window, double>> split_window(const Window& w,
                                                    const PiecewiseConstant* g) {
  std::vector<std::pair<Window, double>> out;
  if (!g || g->is_constant()) {
    out.push_back({w, g ? g->values()[0] : 1.0});
    return out;
  }
  double lo = w.ts;
  for (double b : g->breakpoints()) {
    if (b <= w.ts || b >= w.te) continue;
    out.push_back({{lo, b}, 0.0});
    lo = b;
  }
  out.push_back({{lo, w.te}, 0.0});
  for (auto& piece : out) piece.second = (*g)(0.5 * (piece.first.ts + piece.first.te));
  return out;
}

}  // namespace

ExpSum factor_profile(const LscModel& m, int factor, const Window& w,
                      const PiecewiseConstant* g) {
  const auto pieces = split_window(w, g);
  const double D = w.duration();
  ExpSum out;
  auto add = [&](StateVar X, double tau, double sigma) {
    for (const auto& [pw, gv] : pieces) {
      ExpTerm t = state_term(X, tau, pw);
      t.coef *= sigma * gv * pw.duration() / D;
      out.push_back(t);
    }
  };
  if (factor == 0) {
    add(StateVar::L, 0.0, m.sigma_l);
  } else if (factor <= m.n_s()) {
    const int i = factor - 1;
    add(StateVar::S, m.tau_s[i], m.sigma_s[i]);
  } else {
    const int j = factor - 1 - m.n_s();
    add(StateVar::C1, m.tau_c[j], m.sigma_c[j]);
    add(StateVar::C2, m.tau_c[j], m.sigma_c[j]);
  }
  return out;
}

Eigen::VectorXd kv_volatility(const LscModel& m, double t, const Window& w,
                              const PiecewiseConstant* g) {
  Eigen::VectorXd v(m.n_factors());
  for (int n = 0; n < m.n_factors(); ++n) v[n] = eval(factor_profile(m, n, w, g), t);
  return v;
}

Eigen::VectorXd kv_volatility(const LscModel& m, double t, const Window& w,
                              const std::function<double(double)>& g) {
  Eigen::VectorXd v(m.n_factors());
  const double D = w.duration();
  for (int n = 0; n < m.n_factors(); ++n) {
    v[n] = adaptive_integrate([&](double T) { return g(T) * shape_eval(m, n, t, T); }, w.ts,
                              w.te, 1e-13 * std::max(1.0, D)) /
           D;
  }
  return v;
}

double model_covariance(const LscModel& m, const RollingSpec& si, const RollingSpec& sj,
                        double tau_d) {
  // Lemma form: windows shifted by the return horizon, integration over [0, tau_d].
  const Window wi{tau_d + si.ts, tau_d + si.te};
  const Window wj{tau_d + sj.ts, tau_d + sj.te};
  const int N = m.n_factors();
  std::vector<ExpSum> fi(N), fj(N);
  for (int n = 0; n < N; ++n) {
    fi[n] = factor_profile(m, n, wi);
    fj[n] = factor_profile(m, n, wj);
  }
  double cov = 0.0;
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < N; ++k)
      if (m.R(n, k) != 0.0) cov += m.R(n, k) * integrate_product(fi[n], fj[k], 0.0, tau_d);
  return cov / tau_d;
}

double model_vs_variance(const LscModel& m, const Window& w, double T) {
  if (!(T > 0.0) || T > w.ts + 1e-12)
    throw BadConfig("VS maturity must satisfy 0 < T <= delivery start");
  const int N = m.n_factors();
  std::vector<ExpSum> f(N);
  for (int n = 0; n < N; ++n) f[n] = factor_profile(m, n, w);
  double var = 0.0;
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < N; ++k)
      if (m.R(n, k) != 0.0) var += m.R(n, k) * integrate_product(f[n], f[k], 0.0, T);
  return var / T;
}

double instantaneous_correlation(const LscModel& m, double t, const Window& wi,
                                 const Window& wj, const PiecewiseConstant* g) {
  const Eigen::VectorXd vi = kv_volatility(m, t, wi, g);
  const Eigen::VectorXd vj = kv_volatility(m, t, wj, g);
  const double num = vi.transpose() * m.R * vj;
  const double ni = vi.transpose() * m.R * vi;
  const double nj = vj.transpose() * m.R * vj;
  return num / std::sqrt(ni * nj);
}

}  // namespace hjmcal
