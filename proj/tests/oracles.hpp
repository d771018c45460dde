#pragma once

// Independent reference implementations used only by tests. Each oracle solves
// the same mathematical problem as the library through a different route
// (quadrature instead of closed forms, SVD instead of KKT, dense RK4 instead of
// the exponential integrator, plain sums instead of streaming estimators).

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

// Call price by numeric integration of the lognormal terminal density.
double lognormal_call_numeric(double F0, double K, double T, double sigma);

// Textbook unbiased equal-weight sample covariance of rows of X (H x P).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& X);

// min ||D x||^2 s.t. A x = b, via SVD null-space parametrization of the
// constraint set. Throws std::runtime_error if A x = b is inconsistent.
Eigen::VectorXd equality_qp_nullspace(const Eigen::MatrixXd& D, const Eigen::MatrixXd& A,
                                      const Eigen::VectorXd& b);

// Classic RK4 for complex vector ODEs y' = f(t, y) on [0, T] with n uniform steps.
Eigen::VectorXcd rk4(const std::function<Eigen::VectorXcd(double, const Eigen::VectorXcd&)>& f,
                     Eigen::VectorXcd y0, double T, int n_steps);

}  // namespace oracles
