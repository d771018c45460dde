#include "hjmcal/cone.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hjmcal/errors.hpp"

namespace hjmcal {

void ConeProgram::validate() const {
  const int n = static_cast<int>(c.size());
  const int m = cone_rows();
  if (m <= 0) throw BadConfig("cone program without cone constraints");
  if (G.rows() != m || G.cols() != n) throw BadConfig("G dimensions inconsistent with cones");
  if (h.size() != m) throw BadConfig("h dimension inconsistent with cones");
  if (A.size() > 0 && (A.cols() != n || A.rows() != b.size()))
    throw BadConfig("equality block dimensions inconsistent");
  if (dim_orthant < 0 || psd_order < 0 || (dim_soc != 0 && dim_soc < 2))
    throw BadConfig("invalid cone dimensions");
}

Eigen::VectorXd project_cone(const Eigen::VectorXd& point, ConeKind kind) {
  switch (kind) {
    case ConeKind::Orthant:
      return point.cwiseMax(0.0);
    case ConeKind::Soc: {
      if (point.size() < 2) throw BadConfig("second-order cone needs dimension >= 2");
      const double t = point(0);
      const Eigen::VectorXd u = point.tail(point.size() - 1);
      const double nu = u.norm();
      if (nu <= t) return point;
      Eigen::VectorXd out = Eigen::VectorXd::Zero(point.size());
      if (nu <= -t) return out;
      const double scale = 0.5 * (1.0 + t / nu);
      out(0) = scale * nu;
      out.tail(point.size() - 1) = scale * u;
      return out;
    }
    case ConeKind::Psd: {
      const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(point.size()))));
      if (n * n != point.size()) throw BadConfig("PSD block is not a square vectorization");
      Eigen::MatrixXd M = Eigen::Map<const Eigen::MatrixXd>(point.data(), n, n);
      M = 0.5 * (M + M.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
      const Eigen::MatrixXd out = eig.eigenvectors() *
                                  eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                                  eig.eigenvectors().transpose();
      return Eigen::Map<const Eigen::VectorXd>(out.data(), n * n);
    }
  }
  throw BadConfig("unknown cone kind");
}

namespace {

Eigen::VectorXd project_composite(const ConeProgram& p, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  int off = 0;
  if (p.dim_orthant > 0) {
    out.segment(off, p.dim_orthant) =
        project_cone(v.segment(off, p.dim_orthant), ConeKind::Orthant);
    off += p.dim_orthant;
  }
  if (p.dim_soc > 0) {
    out.segment(off, p.dim_soc) = project_cone(v.segment(off, p.dim_soc), ConeKind::Soc);
    off += p.dim_soc;
  }
  if (p.psd_order > 0) {
    const int sz = p.psd_order * p.psd_order;
    out.segment(off, sz) = project_cone(v.segment(off, sz), ConeKind::Psd);
    off += sz;
  }
  return out;
}

}  // namespace

ConeSolution solve_cone(const ConeProgram& p, const ConeSolverOptions& opt, ConeWarmStart* warm) {
  p.validate();
  const int n = static_cast<int>(p.c.size());
  const int m = p.cone_rows();

  // Equality block: check consistency, then eliminate it exactly by writing
  // x = x_part + Z w with Z an orthonormal basis of null(A). The splitting
  // iteration then runs on an equality-free program in w, which avoids the
  // tug-of-war between the cone blocks and near-flat objective directions
  // that violate the equalities.
  Eigen::VectorXd x_part = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
  if (p.A.rows() > 0) {
    x_part = p.A.completeOrthogonalDecomposition().solve(p.b);
    const Eigen::VectorXd resid = p.A * x_part - p.b;
    if (resid.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, p.b.cwiseAbs().maxCoeff()))
      throw Infeasible("equality constraints are inconsistent (max residual " +
                       std::to_string(resid.cwiseAbs().maxCoeff()) + ")");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(p.A.transpose());
    const int r = static_cast<int>(qr.rank());
    if (r >= n) throw BadConfig("equality constraints leave no degrees of freedom");
    const Eigen::MatrixXd Q = qr.householderQ();
    Z = Q.rightCols(n - r);
  }
  const int nw = static_cast<int>(Z.cols());

  // Reduced data, then Ruiz equilibration. Column scales are free; row scales
  // must be uniform inside the SOC and PSD blocks so the scaled slack lives
  // in the same cone.
  Eigen::MatrixXd Gs = p.G * Z;
  Eigen::VectorXd hs_raw = p.h - p.G * x_part;
  Eigen::VectorXd col_sc = Eigen::VectorXd::Ones(nw);
  Eigen::VectorXd row_sc = Eigen::VectorXd::Ones(m);
  const auto scale_rows = [&](int off, int len, bool per_row) {
    if (len <= 0) return;
    if (per_row) {
      for (int i = off; i < off + len; ++i) {
        const double rmax = Gs.row(i).cwiseAbs().maxCoeff();
        if (rmax > 0.0) {
          const double sc = 1.0 / std::sqrt(rmax);
          Gs.row(i) *= sc;
          row_sc(i) *= sc;
        }
      }
    } else {
      const double rmax = Gs.middleRows(off, len).cwiseAbs().maxCoeff();
      if (rmax > 0.0) {
        const double sc = 1.0 / std::sqrt(rmax);
        Gs.middleRows(off, len) *= sc;
        row_sc.segment(off, len) *= sc;
      }
    }
  };
  for (int pass = 0; pass < 10; ++pass) {
    for (int j = 0; j < nw; ++j) {
      const double cmax = Gs.col(j).cwiseAbs().maxCoeff();
      if (cmax > 0.0) {
        const double sc = 1.0 / std::sqrt(cmax);
        Gs.col(j) *= sc;
        col_sc(j) *= sc;
      }
    }
    scale_rows(0, p.dim_orthant, true);
    scale_rows(p.dim_orthant, p.dim_soc, false);
    scale_rows(p.dim_orthant + p.dim_soc, p.psd_order * p.psd_order, false);
  }
  const Eigen::VectorXd hs = row_sc.asDiagonal() * hs_raw;
  const Eigen::VectorXd cs = col_sc.asDiagonal() * (Z.transpose() * p.c);

  Eigen::FullPivLU<Eigen::MatrixXd> kkt(Gs.transpose() * Gs);
  if (!kkt.isInvertible())
    throw SolverStall("cone solver normal matrix is singular (rank-deficient constraint map)");
  double rho = (warm && warm->rho > 0.0) ? warm->rho : opt.rho;

  Eigen::VectorXd s, u;
  if (warm && warm->s.size() == m && warm->u.size() == m) {
    s = warm->s;
    u = warm->u;
  } else {
    s = project_composite(p, hs);
    u = Eigen::VectorXd::Zero(m);
  }

  ConeSolution sol;
  Eigen::VectorXd x(nw), z(m), s_prev(m);
  const double alpha = opt.over_relaxation;
  for (int it = 0; it < opt.max_iter; ++it) {
    x = kkt.solve(Gs.transpose() * (hs - s - u) - cs / rho);
    z = Gs * x;

    const Eigen::VectorXd z_hat = alpha * z + (1.0 - alpha) * (hs - s);
    s_prev = s;
    s = project_composite(p, hs - z_hat - u);
    u += z_hat + s - hs;

    const double pri = (z + s - hs).norm();
    const double dua = rho * (Gs.transpose() * (s - s_prev)).norm();
    const double eps_pri =
        opt.tol * std::max(1.0, std::max(z.norm(), std::max(s.norm(), hs.norm())));
    const double eps_dua = opt.tol * std::max(1.0, rho * (Gs.transpose() * u).norm());
    if (pri <= eps_pri && dua <= eps_dua) {
      sol.converged = true;
      sol.iterations = it + 1;
      sol.primal_residual = pri;
      sol.dual_residual = dua;
      break;
    }
    if ((it + 1) % 64 == 0) {
      if (pri > 10.0 * dua && rho < 1e6) {
        rho *= 2.0;
        u *= 0.5;
      } else if (dua > 10.0 * pri && rho > 1e-6) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
    sol.iterations = it + 1;
    sol.primal_residual = pri;
    sol.dual_residual = dua;
  }

  if (!sol.converged && opt.throw_on_stall)
    throw SolverStall("cone solver stalled after " + std::to_string(sol.iterations) +
                      " iterations (primal " + std::to_string(sol.primal_residual) + ", dual " +
                      std::to_string(sol.dual_residual) + ")");

  sol.x = x_part + Z * (col_sc.asDiagonal() * x);
  sol.s = s.cwiseQuotient(row_sc);
  sol.y = rho * row_sc.asDiagonal() * u;
  sol.objective = p.c.dot(sol.x);
  if (warm) {
    warm->s = s;
    warm->u = u;
    warm->rho = rho;
  }
  return sol;
}

}  // namespace hjmcal
