#pragma once

#include <Eigen/Dense>

namespace hjmcal {

// Linear cone program
//     min c^T x   s.t.   G x + s = h,  A x = b,  s in C0 x C1 x C2,
// where C0 is the nonnegative orthant (dim_orthant), C1 a single second-order
// cone (dim_soc = 1 + payload), and C2 the vectorized PSD cone of order
// psd_order (stored as a full column-major matrix block of size psd_order^2).
// Any of the three blocks may be empty (size 0).
struct ConeProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int dim_orthant = 0;
  int dim_soc = 0;
  int psd_order = 0;

  int cone_rows() const { return dim_orthant + dim_soc + psd_order * psd_order; }
  void validate() const;
};

enum class ConeKind { Orthant, Soc, Psd };

// Euclidean projection onto one cone block (PSD input/output is the
// column-major vectorization of a square matrix; it is symmetrized first).
Eigen::VectorXd project_cone(const Eigen::VectorXd& point, ConeKind kind);

struct ConeSolverOptions {
  double tol = 1e-9;
  int max_iter = 50000;
  double rho = 1.0;
  double over_relaxation = 1.6;
  // Throw SolverStall when unconverged (otherwise return best iterate flagged).
  bool throw_on_stall = true;
};

struct ConeSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd y;  // dual of the cone constraint
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Warm-start context reusable across solves of the same program shape.
struct ConeWarmStart {
  Eigen::VectorXd s, u;
  double rho = 0.0;
};

// Operator-splitting (ADMM) solver with over-relaxation and adaptive penalty.
// Throws Infeasible when the equality block is inconsistent and SolverStall on
// non-convergence (if throw_on_stall).
ConeSolution solve_cone(const ConeProgram& p, const ConeSolverOptions& opt = {},
                        ConeWarmStart* warm = nullptr);

}  // namespace hjmcal
