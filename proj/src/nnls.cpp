#include "rumtest/nnls.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "rumtest/errors.hpp"

namespace rumtest {
namespace {

// Minimum-norm least squares on the passive columns, zero elsewhere.
Eigen::VectorXd passive_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                           const std::vector<int>& passive) {
  const int p = static_cast<int>(passive.size());
  Eigen::MatrixXd sub(A.rows(), p);
  for (int c = 0; c < p; ++c) sub.col(c) = A.col(passive[c]);
  Eigen::VectorXd zsub = sub.completeOrthogonalDecomposition().solve(y);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(A.cols());
  for (int c = 0; c < p; ++c) z(passive[c]) = zsub(c);
  return z;
}

// Spectral norm estimate of A'A by power iteration, for the gradient step.
double gram_norm(const Eigen::MatrixXd& A) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
  double lambda = 1.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd u = A.transpose() * (A * v);
    lambda = u.norm();
    if (lambda <= 0.0) return 1.0;
    v = u / lambda;
  }
  return lambda;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double tol,
                long max_iter) {
  if (A.rows() != y.size()) throw InternalError("nnls: dimension mismatch");
  const int H = static_cast<int>(A.cols());
  if (max_iter <= 0) max_iter = 50L * H + 100;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(H);
  std::vector<char> in_passive(H, 0);
  std::vector<int> passive;
  long iter = 0;

  auto rebuild_passive = [&] {
    passive.clear();
    for (int h = 0; h < H; ++h) {
      if (in_passive[h]) passive.push_back(h);
    }
  };

  // Feasibility loop: pull x toward the unconstrained optimum on the
  // passive set, dropping variables that hit zero on the way.
  auto inner = [&]() {
    while (true) {
      if (++iter > max_iter) return false;
      rebuild_passive();
      if (passive.empty()) {
        x.setZero();
        return true;
      }
      Eigen::VectorXd z = passive_ls(A, y, passive);
      bool all_pos = true;
      for (int h : passive) {
        if (z(h) <= 0.0) {
          all_pos = false;
          break;
        }
      }
      if (all_pos) {
        x = z;
        return true;
      }
      double alpha = 1.0;
      for (int h : passive) {
        if (z(h) <= 0.0) {
          const double denom = x(h) - z(h);
          const double a = denom > 0.0 ? x(h) / denom : 0.0;
          if (a < alpha) alpha = a;
        }
      }
      x += alpha * (z - x);
      for (int h : passive) {
        if (z(h) <= 0.0 && x(h) <= 1e-14) {
          x(h) = 0.0;
          in_passive[h] = 0;
        }
      }
    }
  };

  // Warm start for wide problems: projected gradient seeds the passive set.
  if (H > 512) {
    const double step = 1.0 / gram_norm(A);
    Eigen::VectorXd g(H);
    for (int it = 0; it < 100; ++it) {
      g = A.transpose() * (y - A * x);
      x = (x + step * g).cwiseMax(0.0);
    }
    for (int h = 0; h < H; ++h) in_passive[h] = x(h) > 1e-8 ? 1 : 0;
    for (int h = 0; h < H; ++h) {
      if (!in_passive[h]) x(h) = 0.0;
    }
    if (!inner()) {
      throw SolverError("nnls: iteration cap hit during warm start");
    }
  }

  bool converged = false;
  while (iter <= max_iter) {
    Eigen::VectorXd w = A.transpose() * (y - A * x);
    int enter = -1;
    double best = tol;
    for (int h = 0; h < H; ++h) {
      if (!in_passive[h] && w(h) > best) {
        best = w(h);
        enter = h;
      }
    }
    if (enter < 0) {
      converged = true;
      break;
    }
    in_passive[enter] = 1;
    if (!inner()) break;
  }

  NnlsResult res;
  res.x = x;
  res.residual = y - A * x;
  res.objective = res.residual.squaredNorm();
  res.iterations = iter;
  Eigen::VectorXd w = A.transpose() * res.residual;
  double viol = 0.0;
  for (int h = 0; h < H; ++h) {
    viol = std::max(viol, w(h));           // dual feasibility
    viol = std::max(viol, std::fabs(x(h) * w(h)));  // complementary slackness
  }
  res.kkt_violation = viol;
  if (!converged) {
    std::ostringstream os;
    os << "nnls: no convergence in " << max_iter
       << " iterations (objective " << res.objective << ", KKT residual "
       << res.kkt_violation << ")";
    throw SolverError(os.str());
  }
  return res;
}

}  // namespace rumtest
