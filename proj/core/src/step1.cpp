#include "hjmcal/step1.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "hjmcal/errors.hpp"

namespace hjmcal {

namespace {

struct StateSpec {
  StateVar kind;
  double tau;
};

std::vector<StateSpec> make_states(const std::vector<double>& tau, int n_s, int n_c) {
  std::vector<StateSpec> st;
  st.push_back({StateVar::L, 0.0});
  for (int i = 0; i < n_s; ++i) st.push_back({StateVar::S, tau[static_cast<size_t>(i)]});
  for (int j = 0; j < n_c; ++j) {
    const double tc = tau[static_cast<size_t>(n_s + j)];
    st.push_back({StateVar::C1, tc});
    st.push_back({StateVar::C2, tc});
  }
  return st;
}

// Indices of the {L, S, C1} states within the full state ordering.
std::vector<int> lsc1_indices(int n_s, int n_c) {
  std::vector<int> idx;
  for (int i = 0; i <= n_s; ++i) idx.push_back(i);
  for (int j = 0; j < n_c; ++j) idx.push_back(1 + n_s + 2 * j);
  return idx;
}

// Lower-triangle column-major position of (p, k), p >= k, in an n x n matrix.
int tri_index(int p, int k, int n) {
  if (p < k) std::swap(p, k);
  return k * n - k * (k - 1) / 2 + (p - k);
}

}  // namespace

void Step1Problem::validate() const {
  const int P = static_cast<int>(rolling.size());
  if (P < 1) throw EmptyInput("no rolling contracts");
  if (C_mkt.rows() != P || C_mkt.cols() != P || Gamma.rows() != P || Gamma.cols() != P)
    throw BadConfig("covariance/weight dimensions disagree with rolling specs");
  if (!(tau_d > 0.0)) throw BadConfig("return lag must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw BadConfig("lambda must lie in [0,1]");
  if (n_s < 0 || n_c < 0) throw BadConfig("factor counts must be nonnegative");
  if (!vs_weights.empty() && vs_weights.size() != vs.size())
    throw BadConfig("vs weight count disagrees with targets");
  for (const auto& t : vs) {
    if (!(t.T > 0.0) || t.T > t.window.ts + 1e-12)
      throw BadConfig("VS maturity must satisfy 0 < T <= Ts");
    if (!(t.window.duration() > 0.0)) throw BadConfig("empty VS delivery window");
  }
  for (const auto& r : rolling)
    if (!(r.te > r.ts) || !(r.ts >= 0.0)) throw BadConfig("invalid rolling window");
}

bool Step1Problem::underparametrization_ok() const {
  const int N = n_factors();
  const int P = static_cast<int>(rolling.size());
  const int Ps = static_cast<int>(vs.size());
  return N * (N + 3) / 2 - 1 <= Ps + P * (P + 1) / 2;
}

Step1Weights build_weights(const std::vector<double>& tau, const Step1Problem& prob) {
  if (static_cast<int>(tau.size()) != prob.n_s + prob.n_c)
    throw BadConfig("tau size disagrees with factor counts");
  for (double t : tau)
    if (!(t > 0.0)) throw BadConfig("tau must be strictly positive");

  const auto states = make_states(tau, prob.n_s, prob.n_c);
  const int ns = static_cast<int>(states.size());
  const int P = static_cast<int>(prob.rolling.size());

  Step1Weights w;
  w.p_hist = P;

  // Per-contract anchored state terms for the tau_d-shifted windows.
  std::vector<std::vector<ExpTerm>> hist_terms(static_cast<size_t>(P));
  for (int i = 0; i < P; ++i) {
    const Window shifted{prob.tau_d + prob.rolling[static_cast<size_t>(i)].ts,
                         prob.tau_d + prob.rolling[static_cast<size_t>(i)].te};
    for (const auto& st : states)
      hist_terms[static_cast<size_t>(i)].push_back(state_term(st.kind, st.tau, shifted));
  }
  w.cov.resize(static_cast<size_t>(P * P));
  for (int i = 0; i < P; ++i) {
    for (int j = 0; j < P; ++j) {
      Eigen::MatrixXd m(ns, ns);
      for (int p = 0; p < ns; ++p)
        for (int k = 0; k < ns; ++k)
          m(p, k) = integrate_product(hist_terms[static_cast<size_t>(i)][static_cast<size_t>(p)],
                                      hist_terms[static_cast<size_t>(j)][static_cast<size_t>(k)],
                                      0.0, prob.tau_d) /
                    prob.tau_d;
      w.cov[static_cast<size_t>(i * P + j)] = m;
    }
  }

  w.vs.resize(prob.vs.size());
  for (size_t l = 0; l < prob.vs.size(); ++l) {
    const auto& tgt = prob.vs[l];
    std::vector<ExpTerm> terms;
    for (const auto& st : states) terms.push_back(state_term(st.kind, st.tau, tgt.window));
    Eigen::MatrixXd m(ns, ns);
    for (int p = 0; p < ns; ++p)
      for (int k = 0; k < ns; ++k)
        m(p, k) = integrate_product(terms[static_cast<size_t>(p)], terms[static_cast<size_t>(k)],
                                    0.0, tgt.T) /
                  tgt.T;
    w.vs[l] = m;
  }
  return w;
}

double loss_from_x(const Eigen::MatrixXd& x, const Step1Weights& w, const Step1Problem& prob,
                   double* j1_out, double* j2_out) {
  const int P = w.p_hist;
  double j1 = 0.0;
  for (int i = 0; i < P; ++i) {
    for (int j = 0; j < P; ++j) {
      const double model = (w.cov[static_cast<size_t>(i * P + j)].array() * x.array()).sum();
      const double r = prob.C_mkt(i, j) - model;
      j1 += prob.Gamma(i, j) * r * r;
    }
  }
  double j2 = 0.0;
  for (size_t l = 0; l < prob.vs.size(); ++l) {
    const double model = (w.vs[l].array() * x.array()).sum();
    const double r = prob.vs[l].sigma_vs_sq - model;
    const double wl = prob.vs_weights.empty() ? 1.0 : prob.vs_weights[l];
    j2 += wl * r * r;
  }
  if (j1_out) *j1_out = j1;
  if (j2_out) *j2_out = j2;
  return prob.lambda * j1 + (1.0 - prob.lambda) * j2;
}

namespace {

ConeProgram assemble_cone(const Step1Weights& w, const Step1Problem& prob) {
  const int ns = 1 + prob.n_s + 2 * prob.n_c;  // state count
  const int N = prob.n_factors();
  const int M = ns * (ns + 1) / 2;
  const int nvar = 1 + M;
  const int P = w.p_hist;

  // Targets and square-root weights; upper-triangle pairs double off-diagonals.
  const int n_cov = P * (P + 1) / 2;
  const int n_t = n_cov + static_cast<int>(prob.vs.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n_t, M);
  Eigen::VectorXd t(n_t), d2(n_t);
  int row = 0;
  for (int i = 0; i < P; ++i) {
    for (int j = i; j < P; ++j) {
      const Eigen::MatrixXd& m = w.cov[static_cast<size_t>(i * P + j)];
      for (int p = 0; p < ns; ++p) {
        for (int k = 0; k <= p; ++k) {
          double coef = (p == k) ? m(p, p) : m(p, k) + m(k, p);
          W(row, tri_index(p, k, ns)) += coef;
        }
      }
      t(row) = prob.C_mkt(i, j);
      d2(row) = prob.lambda * prob.Gamma(i, j) * (i == j ? 1.0 : 2.0);
      ++row;
    }
  }
  for (size_t l = 0; l < prob.vs.size(); ++l) {
    const Eigen::MatrixXd& m = w.vs[l];
    for (int p = 0; p < ns; ++p)
      for (int k = 0; k <= p; ++k)
        W(row, tri_index(p, k, ns)) += (p == k) ? m(p, p) : m(p, k) + m(k, p);
    t(row) = prob.vs[l].sigma_vs_sq;
    d2(row) = (1.0 - prob.lambda) * (prob.vs_weights.empty() ? 1.0 : prob.vs_weights[l]);
    ++row;
  }

  // J(x) = || Pw^{1/2} xvec - v ||^2 + const.
  const Eigen::MatrixXd Pw = W.transpose() * d2.asDiagonal() * W;
  const Eigen::VectorXd q = W.transpose() * (d2.asDiagonal() * t);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Pw);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  // Hard-clip the numerically null directions of the least-squares Hessian:
  // keeping sqrt(eps)-size rows would leave the splitting iteration free to
  // wander along them without progress.
  const double cut = 1e-12 * std::max(lam.maxCoeff(), 1e-300);
  Eigen::VectorXd sq(M), isq(M);
  for (int i = 0; i < M; ++i) {
    sq(i) = lam(i) > cut ? std::sqrt(lam(i)) : 0.0;
    isq(i) = lam(i) > cut ? 1.0 / sq(i) : 0.0;
  }
  const Eigen::MatrixXd sqrtP =
      eig.eigenvectors() * sq.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd v =
      eig.eigenvectors() * (isq.asDiagonal() * (eig.eigenvectors().transpose() * q));

  const auto I = lsc1_indices(prob.n_s, prob.n_c);

  ConeProgram cp;
  cp.dim_orthant = N;
  cp.dim_soc = 1 + M;
  cp.psd_order = N;
  const int mrows = cp.cone_rows();
  cp.c = Eigen::VectorXd::Zero(nvar);
  cp.c(0) = 1.0;
  cp.G = Eigen::MatrixXd::Zero(mrows, nvar);
  cp.h = Eigen::VectorXd::Zero(mrows);

  // C0: normalized upper bounds x_ii / bound^2 <= 1 on the factor states.
  double sigma_l_upper = prob.sigma_l_upper;
  if (!(sigma_l_upper > 0.0)) {
    int longest = 0;
    for (int i = 1; i < P; ++i) {
      const auto& r = prob.rolling[static_cast<size_t>(i)];
      const auto& rl = prob.rolling[static_cast<size_t>(longest)];
      if (r.te - r.ts > rl.te - rl.ts) longest = i;
    }
    const double var = std::max(prob.C_mkt(longest, longest), 0.0);
    sigma_l_upper = var > 0.0 ? 3.0 * std::sqrt(var) : 1e4;
  }
  for (int i = 0; i < N; ++i) {
    const double bound = (i == 0) ? sigma_l_upper : 1e4;
    cp.G(i, 1 + tri_index(I[static_cast<size_t>(i)], I[static_cast<size_t>(i)], ns)) =
        1.0 / (bound * bound);
    cp.h(i) = 1.0;
  }

  // C1: x0 >= || sqrtP xvec - v ||.
  int off = N;
  cp.G(off, 0) = -1.0;
  cp.G.block(off + 1, 1, M, M) = -sqrtP;
  cp.h.segment(off + 1, M) = -v;

  // C2: PSD of the {L,S,C1} restriction.
  off += 1 + M;
  for (int c = 0; c < N; ++c)
    for (int r = 0; r < N; ++r)
      cp.G(off + c * N + r,
           1 + tri_index(I[static_cast<size_t>(r)], I[static_cast<size_t>(c)], ns)) = -1.0;

  // Equalities: each C factor's two states share sigma and Brownian, so x has
  // duplicated rows/columns across the pair.
  std::set<std::pair<int, int>> rows;  // (plus_index, minus_index) on xvec
  for (int j = 0; j < prob.n_c; ++j) {
    const int q1 = 1 + prob.n_s + 2 * j;
    const int q2 = q1 + 1;
    rows.insert({tri_index(q1, q1, ns), tri_index(q1, q2, ns)});
    rows.insert({tri_index(q1, q1, ns), tri_index(q2, q2, ns)});
    for (int p = 0; p < ns; ++p) {
      if (p == q1 || p == q2) continue;
      rows.insert({tri_index(p, q1, ns), tri_index(p, q2, ns)});
    }
  }
  cp.A = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), nvar);
  cp.b = Eigen::VectorXd::Zero(static_cast<int>(rows.size()));
  int ar = 0;
  for (const auto& [plus, minus] : rows) {
    cp.A(ar, 1 + plus) = 1.0;
    cp.A(ar, 1 + minus) = -1.0;
    ++ar;
  }
  return cp;
}

// The inner program minimizes the epigraph variable of a least-squares
// residual, so the equality-constrained unconstrained minimizer yields a
// global lower bound on the objective. Whenever that minimizer already
// satisfies the bound and PSD cones it is certified optimal and the
// splitting solver can be skipped; the splitting route remains the solver
// whenever a cone actually binds.
bool try_least_squares_shortcut(const ConeProgram& cp, ConeSolution* out) {
  const int N = cp.dim_orthant;
  const int M = cp.dim_soc - 1;
  const Eigen::MatrixXd sqrtP = -cp.G.block(N + 1, 1, M, M);
  const Eigen::VectorXd v = -cp.h.segment(N + 1, M);

  Eigen::VectorXd y(M);
  if (cp.A.rows() > 0) {
    const Eigen::MatrixXd Ax = cp.A.rightCols(M);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ax.transpose());
    const int r = static_cast<int>(qr.rank());
    if (r >= M) return false;
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Z = Q.rightCols(M - r);
    const Eigen::VectorXd y_part = Ax.completeOrthogonalDecomposition().solve(cp.b);
    const Eigen::VectorXd w =
        (sqrtP * Z).completeOrthogonalDecomposition().solve(v - sqrtP * y_part);
    y = y_part + Z * w;
  } else {
    y = sqrtP.completeOrthogonalDecomposition().solve(v);
  }

  Eigen::VectorXd xbar(1 + M);
  xbar(0) = (sqrtP * y - v).norm();
  xbar.tail(M) = y;

  const Eigen::VectorXd slack = cp.h - cp.G * xbar;
  for (int i = 0; i < N; ++i)
    if (slack(i) < -1e-10) return false;
  if (cp.psd_order > 0) {
    const int off = N + cp.dim_soc;
    Eigen::MatrixXd S =
        Eigen::Map<const Eigen::MatrixXd>(slack.data() + off, cp.psd_order, cp.psd_order);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    const double floor = -1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < floor) return false;
  }

  out->x = xbar;
  out->s = slack.cwiseMax(0.0);
  out->y = Eigen::VectorXd::Zero(slack.size());
  out->objective = xbar(0);
  out->primal_residual = 0.0;
  out->dual_residual = 0.0;
  out->iterations = 0;
  out->converged = true;
  return true;
}

Eigen::MatrixXd xvec_to_matrix(const Eigen::VectorXd& xvec, int ns) {
  Eigen::MatrixXd x(ns, ns);
  for (int k = 0; k < ns; ++k)
    for (int p = k; p < ns; ++p) {
      const double val = xvec(tri_index(p, k, ns));
      x(p, k) = val;
      x(k, p) = val;
    }
  return x;
}

}  // namespace

InnerSolution solve_inner(const std::vector<double>& tau, const Step1Problem& prob,
                          const ConeSolverOptions& copt, ConeWarmStart* warm) {
  prob.validate();
  const Step1Weights w = build_weights(tau, prob);
  const ConeProgram cp = assemble_cone(w, prob);
  ConeSolution cs;
  if (!try_least_squares_shortcut(cp, &cs)) cs = solve_cone(cp, copt, warm);

  InnerSolution sol;
  sol.cone = cs;
  const int ns = prob.n_states();
  sol.x = xvec_to_matrix(cs.x.tail(cs.x.size() - 1), ns);
  sol.loss = loss_from_x(sol.x, w, prob, &sol.j1, &sol.j2);
  return sol;
}

std::vector<double> tau_from_a(const Eigen::VectorXd& a, int n_s) {
  std::vector<double> tau(static_cast<size_t>(a.size()));
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (i == n_s) acc = 0.0;  // C family restarts its own cumulative sum
    acc += std::exp(a(i));
    tau[static_cast<size_t>(i)] = acc;
  }
  return tau;
}

Eigen::VectorXd init_tau(const Step1Problem& prob, RngStream& rng, bool noise) {
  std::vector<double> mids;
  mids.reserve(prob.rolling.size());
  for (const auto& r : prob.rolling) mids.push_back(0.5 * (r.ts + r.te));
  std::sort(mids.begin(), mids.end());
  const int K = static_cast<int>(mids.size());

  const auto reduce = [&](int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
      const double pos = (n == 1) ? 0.5 * (K - 1) : (i + 0.5) / n * (K - 1);
      const int lo = std::min(static_cast<int>(pos), K - 1);
      const int hi = std::min(lo + 1, K - 1);
      const double frac = pos - lo;
      double m = (1.0 - frac) * mids[static_cast<size_t>(lo)] +
                 frac * mids[static_cast<size_t>(hi)];
      if (noise) m *= std::exp(0.3 * rng.normal());
      out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    for (size_t i = 1; i < out.size(); ++i)
      if (out[i] <= out[i - 1]) out[i] = out[i - 1] * (1.0 + 1e-6) + 1e-12;
    return out;
  };

  const auto tau_s = reduce(prob.n_s);
  const auto tau_c = reduce(prob.n_c);
  Eigen::VectorXd a(prob.n_s + prob.n_c);
  for (int i = 0; i < prob.n_s; ++i)
    a(i) = std::log(i == 0 ? tau_s[0] : tau_s[static_cast<size_t>(i)] -
                                            tau_s[static_cast<size_t>(i - 1)]);
  for (int j = 0; j < prob.n_c; ++j)
    a(prob.n_s + j) = std::log(j == 0 ? tau_c[0] : tau_c[static_cast<size_t>(j)] -
                                                       tau_c[static_cast<size_t>(j - 1)]);
  return a;
}

namespace {

struct RestartResult {
  double loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd a;
  bool ok = false;
};

double condition_number(const Eigen::MatrixXd& R) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

LscModel calibrate_step1(const Step1Problem& prob, const Step1Options& opt,
                         Step1Report* report) {
  prob.validate();
  if (opt.restarts < 1) throw BadConfig("need at least one restart");

  std::vector<RestartResult> results(static_cast<size_t>(opt.restarts));
  std::atomic<int> next{0};
  const auto run_restart = [&](int r) {
    RngStream rng(opt.seed, static_cast<std::uint64_t>(r));
    const Eigen::VectorXd a0 = init_tau(prob, rng, opt.restarts > 1);
    ConeWarmStart warm;
    ConeSolverOptions copt = opt.cone;
    copt.max_iter = opt.search_max_iter;
    copt.throw_on_stall = false;
    const auto objective = [&](const Eigen::VectorXd& a) {
      if (a.size() > 0 && a.cwiseAbs().maxCoeff() > 50.0) return 1e30;
      try {
        const double l = solve_inner(tau_from_a(a, prob.n_s), prob, copt, &warm).loss;
        return std::isfinite(l) ? l : 1e30;
      } catch (const Error&) {
        return 1e30;
      }
    };
    if (a0.size() == 0) {
      const double l = objective(a0);
      results[static_cast<size_t>(r)] = {l, a0, l < 1e29};
      return;
    }
    const auto res = nelder_mead(objective, a0, opt.nm);
    results[static_cast<size_t>(r)] = {res.f, res.x, res.f < 1e29};
  };

  int workers = opt.n_workers > 0
                    ? opt.n_workers
                    : std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, opt.restarts);
  if (workers <= 1) {
    for (int r = 0; r < opt.restarts; ++r) run_restart(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int wk = 0; wk < workers; ++wk)
      pool.emplace_back([&]() {
        for (int r = next.fetch_add(1); r < opt.restarts; r = next.fetch_add(1)) run_restart(r);
      });
    for (auto& th : pool) th.join();
  }

  // Deterministic selection: lowest loss, ties by condition number of R.
  int best = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  double best_cond = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, InnerSolution>> final_solutions;
  for (int r = 0; r < opt.restarts; ++r) {
    if (!results[static_cast<size_t>(r)].ok) continue;
    if (results[static_cast<size_t>(r)].loss < best_loss - 1e-12) {
      best = r;
      best_loss = results[static_cast<size_t>(r)].loss;
      best_cond = std::numeric_limits<double>::infinity();  // resolved below if tied again
    } else if (std::abs(results[static_cast<size_t>(r)].loss - best_loss) <= 1e-12) {
      // Tie: compare extracted-correlation conditioning.
      const auto solve_at = [&](int idx) {
        return solve_inner(tau_from_a(results[static_cast<size_t>(idx)].a, prob.n_s), prob,
                           opt.cone);
      };
      const auto I = lsc1_indices(prob.n_s, prob.n_c);
      const auto cond_of = [&](const InnerSolution& s) {
        const int N = prob.n_factors();
        Eigen::MatrixXd xi(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            xi(i, j) = s.x(I[static_cast<size_t>(i)], I[static_cast<size_t>(j)]);
        Eigen::VectorXd sig = xi.diagonal().cwiseMax(1e-300).cwiseSqrt();
        return condition_number(sig.cwiseInverse().asDiagonal() * xi *
                                sig.cwiseInverse().asDiagonal());
      };
      if (!std::isfinite(best_cond)) best_cond = cond_of(solve_at(best));
      const double cand_cond = cond_of(solve_at(r));
      if (cand_cond < best_cond) {
        best = r;
        best_cond = cand_cond;
      }
    }
  }
  if (best < 0) throw SolverStall("all calibration restarts failed");

  const std::vector<double> tau = tau_from_a(results[static_cast<size_t>(best)].a, prob.n_s);
  const InnerSolution fin = solve_inner(tau, prob, opt.cone);

  // Extraction.
  const int N = prob.n_factors();
  const auto I = lsc1_indices(prob.n_s, prob.n_c);
  Eigen::MatrixXd xi(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      xi(i, j) = fin.x(I[static_cast<size_t>(i)], I[static_cast<size_t>(j)]);
  const double scale = std::max(xi.diagonal().maxCoeff(), 1e-300);
  for (int i = 0; i < N; ++i)
    if (xi(i, i) <= 1e-8 * scale)
      throw ExtractionDegenerate(
          "state covariance diagonal " + std::to_string(i) +
          " vanishes at the optimum; remove this factor (or lower the factor "
          "count) and recalibrate");
  const Eigen::VectorXd sig = xi.diagonal().cwiseSqrt();
  Eigen::MatrixXd R = sig.cwiseInverse().asDiagonal() * xi * sig.cwiseInverse().asDiagonal();
  R = 0.5 * (R + R.transpose()).eval();
  for (int i = 0; i < N; ++i) R(i, i) = 1.0;

  LscModel model;
  model.sigma_l = sig(0);
  for (int i = 0; i < prob.n_s; ++i) {
    model.sigma_s.push_back(sig(1 + i));
    model.tau_s.push_back(tau[static_cast<size_t>(i)]);
  }
  for (int j = 0; j < prob.n_c; ++j) {
    model.sigma_c.push_back(sig(1 + prob.n_s + j));
    model.tau_c.push_back(tau[static_cast<size_t>(prob.n_s + j)]);
  }
  model.R = R;

  if (report) {
    report->loss = fin.loss;
    report->j1 = fin.j1;
    report->j2 = fin.j2;
    report->tau = tau;
    report->x = fin.x;
    report->best_restart = best;
    report->underparametrized = !prob.underparametrization_ok();
    report->restart_losses.clear();
    for (const auto& rr : results) report->restart_losses.push_back(rr.loss);
  }
  return model;
}

}  // namespace hjmcal
