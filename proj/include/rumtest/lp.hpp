#ifndef RUMTEST_LP_HPP
#define RUMTEST_LP_HPP

#include <Eigen/Dense>

namespace rumtest::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  Eigen::VectorXd x;
};

/// Solve  min c'x  s.t.  A x = b,  x >= 0  by two-phase dense simplex
/// with Bland's anti-cycling rule. Intended for the small/medium dense
/// problems that arise here (patch feasibility, cone membership,
/// counterfactual bounds); the 0/1 constraint matrices involved are
/// well conditioned.
Result solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
             const Eigen::VectorXd& c, long max_iter = 0);

/// Feasibility of {x >= 0 : A x = b}: phase-1 only.
bool feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol = 1e-8);

}  // namespace rumtest::lp

#endif
