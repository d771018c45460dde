#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "hjmcal/normal.hpp"
#include "hjmcal/quadrature.hpp"

namespace oracles {

double lognormal_call_numeric(double F0, double K, double T, double sigma) {
  // F_T = F0 exp(-s^2/2 + s z), s = sigma sqrt(T); payoff positive for z > z_star.
  const double s = sigma * std::sqrt(T);
  const double z_star = (std::log(K / F0) + 0.5 * s * s) / s;
  auto integrand = [&](double z) {
    return (F0 * std::exp(-0.5 * s * s + s * z) - K) * hjmcal::normal_pdf(z);
  };
  return hjmcal::adaptive_integrate(integrand, z_star, z_star + 40.0, 1e-12);
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  return centered.transpose() * centered / (X.rows() - 1.0);
}

Eigen::VectorXd equality_qp_nullspace(const Eigen::MatrixXd& D, const Eigen::MatrixXd& A,
                                      const Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double tol = 1e-11 * svd.singularValues()(0) * std::max(A.rows(), A.cols());
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;

  // Particular solution via pseudo-inverse; consistency check against b.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(A.cols());
  const Eigen::VectorXd ub = svd.matrixU().transpose() * b;
  for (int i = 0; i < rank; ++i)
    x0 += svd.matrixV().col(i) * (ub(i) / svd.singularValues()(i));
  if ((A * x0 - b).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()))
    throw std::runtime_error("inconsistent equality system");

  const int null_dim = static_cast<int>(A.cols()) - rank;
  if (null_dim == 0) return x0;
  const Eigen::MatrixXd N = svd.matrixV().rightCols(null_dim);
  const Eigen::MatrixXd DN = D * N;
  const Eigen::VectorXd z =
      DN.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-D * x0);
  return x0 + N * z;
}

Eigen::VectorXcd rk4(const std::function<Eigen::VectorXcd(double, const Eigen::VectorXcd&)>& f,
                     Eigen::VectorXcd y0, double T, int n_steps) {
  const double h = T / n_steps;
  Eigen::VectorXcd y = std::move(y0);
  for (int i = 0; i < n_steps; ++i) {
    const double t = i * h;
    const Eigen::VectorXcd k1 = f(t, y);
    const Eigen::VectorXcd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::VectorXcd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::VectorXcd k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace oracles
