#ifndef RUMTEST_NNLS_HPP
#define RUMTEST_NNLS_HPP

#include <Eigen/Dense>

namespace rumtest {

struct NnlsResult {
  Eigen::VectorXd x;         // minimizer, componentwise >= 0
  Eigen::VectorXd residual;  // y - A x
  double objective = 0.0;    // squared residual norm
  long iterations = 0;
  double kkt_violation = 0.0;  // max of dual infeasibility and |x_h g_h|
};

/// min ||A x - y||^2 over x >= 0 by the Lawson-Hanson active-set method.
/// Least-squares subproblems use a complete orthogonal decomposition, so
/// rank-deficient column sets (common here: A's columns are highly
/// collinear 0/1 vectors) get the minimum-norm solution. Ties in the
/// entering index break to the lowest index; a projected-gradient warm
/// start seeds the passive set when A has many columns.
/// tol bounds the dual infeasibility accepted at termination.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                double tol = 1e-10, long max_iter = 0);

}  // namespace rumtest

#endif
