#include "rumtest/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rumtest/errors.hpp"

namespace rumtest::lp {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kZeroTol = 1e-9;

// Full tableau with Bland's rule. Rows 0..m-1 are constraints, row m is
// the objective (reduced costs); column n holds the RHS.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
      : m_(static_cast<int>(A.rows())), n_orig_(static_cast<int>(A.cols())) {
    n_ = n_orig_ + m_;  // originals + artificials
    t_ = Eigen::MatrixXd::Zero(m_ + 1, n_ + 1);
    t_.block(0, 0, m_, n_orig_) = A;
    t_.block(0, n_, m_, 1) = b;
    for (int i = 0; i < m_; ++i) {
      if (t_(i, n_) < 0.0) t_.row(i) = -t_.row(i);
      t_(i, n_orig_ + i) = 1.0;
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_orig_ + i;
  }

  // Phase 1: minimize sum of artificials. Returns feasibility.
  bool phase1(long max_iter, long& used) {
    // Objective row: -sum of constraint rows restricted to non-artificials,
    // since artificials are basic with cost 1.
    t_.row(m_).setZero();
    for (int i = 0; i < m_; ++i) t_.row(m_) -= t_.row(i);
    for (int i = 0; i < m_; ++i) t_(m_, n_orig_ + i) = 0.0;
    if (!iterate(n_, max_iter, used)) return false;
    if (-t_(m_, n_) > kZeroTol) return false;  // positive infeasibility
    drive_out_artificials();
    return true;
  }

  // Phase 2 with originals-only costs. Assumes a feasible basis.
  Status phase2(const Eigen::VectorXd& c, long max_iter, long& used) {
    t_.row(m_).setZero();
    t_.block(m_, 0, 1, n_orig_) = c.transpose();
    // Price out basic columns.
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      const double cj = t_(m_, j);
      if (cj != 0.0) t_.row(m_) -= cj * t_.row(i);
    }
    if (!iterate(n_orig_, max_iter, used)) {
      return unbounded_ ? Status::Unbounded : Status::IterationLimit;
    }
    return Status::Optimal;
  }

  double objective() const { return -t_(m_, n_); }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_orig_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_orig_) x(basis_[i]) = t_(i, n_);
    }
    return x;
  }

 private:
  // Bland's rule: entering = lowest-index column with negative reduced
  // cost, leaving = lowest-index basic variable among min-ratio rows.
  bool iterate(int n_cols, long max_iter, long& used) {
    unbounded_ = false;
    for (; used < max_iter; ++used) {
      int enter = -1;
      for (int j = 0; j < n_cols; ++j) {
        if (t_(m_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a > kPivotTol) {
          const double ratio = t_(i, n_) / a;
          if (ratio < best_ratio - kZeroTol ||
              (ratio < best_ratio + kZeroTol &&
               (leave < 0 || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        unbounded_ = true;
        return false;
      }
      pivot(leave, enter);
    }
    return false;
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // After phase 1, replace basic artificials (at zero) by original
  // columns where possible; redundant rows keep their artificial but
  // never re-enter because phase 2 excludes artificial columns.
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_orig_) continue;
      int col = -1;
      for (int j = 0; j < n_orig_; ++j) {
        if (std::fabs(t_(i, j)) > 1e-7) {
          col = j;
          break;
        }
      }
      if (col >= 0) pivot(i, col);
    }
  }

  int m_, n_orig_, n_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  bool unbounded_ = false;
};

}  // namespace

Result solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
             const Eigen::VectorXd& c, long max_iter) {
  if (A.rows() != b.size() || A.cols() != c.size()) {
    throw InternalError("lp::solve: dimension mismatch");
  }
  if (max_iter <= 0) {
    max_iter = 200 + 50 * (A.rows() + A.cols());
  }
  Tableau tab(A, b);
  Result res;
  long used = 0;
  if (!tab.phase1(max_iter, used)) {
    res.status = Status::Infeasible;
    return res;
  }
  res.status = tab.phase2(c, max_iter, used);
  if (res.status == Status::Optimal) {
    res.x = tab.solution();
    res.objective = c.dot(res.x);
  }
  return res;
}

bool feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol) {
  Tableau tab(A, b);
  long used = 0;
  const long max_iter = 200 + 50 * (A.rows() + A.cols());
  if (!tab.phase1(max_iter, used)) return false;
  // phase1 already enforces its own tolerance; re-check against caller's.
  Eigen::VectorXd x = tab.solution();
  return (A * x - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace rumtest::lp
