#include "rumtest/counterfactual.hpp"

#include <algorithm>

#include "rumtest/errors.hpp"
#include "rumtest/lp.hpp"

namespace rumtest {
namespace {

// Min and max of weights' A_target nu over {nu >= 0, A_minus nu = pi_minus}.
BoundResult optimize(const RationalMatrix& a, int target_budget,
                     const Eigen::VectorXd& pi_minus,
                     const Eigen::VectorXd& lower_w,
                     const Eigen::VectorXd& upper_w) {
  const int J = a.num_blocks();
  if (target_budget < 0 || target_budget >= J) {
    throw ValidationError("target budget out of range");
  }
  const int H = a.cols();
  const int it = a.per_block_counts[target_budget];
  const int i_minus = a.rows() - it;
  if (pi_minus.size() != i_minus) {
    throw ValidationError("observed probability vector has wrong length");
  }

  Eigen::MatrixXd a_minus = Eigen::MatrixXd::Zero(i_minus, H);
  Eigen::VectorXd c_lower = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd c_upper = Eigen::VectorXd::Zero(H);
  for (int h = 0; h < H; ++h) {
    int row = 0;
    for (int j = 0; j < J; ++j) {
      const int pick = a.columns[h][j];
      if (j == target_budget) {
        c_lower(h) = lower_w(pick);
        c_upper(h) = upper_w(pick);
      } else {
        a_minus(row + pick, h) = 1.0;
        row += a.per_block_counts[j];
      }
    }
  }

  auto lo = lp::solve(a_minus, pi_minus, c_lower);
  if (lo.status == lp::Status::Infeasible) {
    throw ValidationError(
        "observed probabilities are not rationalizable; project them onto "
        "the cone before bounding");
  }
  auto hi = lp::solve(a_minus, pi_minus, -c_upper);
  if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal) {
    throw SolverError("bound LP did not reach an optimum");
  }
  return {lo.objective, -hi.objective};
}

}  // namespace

BoundResult bound_patch_prob(const RationalMatrix& a, int target_budget,
                             int within_i, const Eigen::VectorXd& pi_minus) {
  const int it = a.per_block_counts[target_budget];
  if (within_i < 0 || within_i >= it) {
    throw ValidationError("patch index outside the target block");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(it);
  w(within_i) = 1.0;
  BoundResult r = optimize(a, target_budget, pi_minus, w, w);
  r.lower = std::clamp(r.lower, 0.0, 1.0);
  r.upper = std::clamp(r.upper, 0.0, 1.0);
  return r;
}

BoundResult bound_expected_demand(
    const RationalMatrix& a, int target_budget, const Eigen::VectorXd& pi_minus,
    const std::vector<std::pair<double, double>>& extrema) {
  const int it = a.per_block_counts[target_budget];
  if (static_cast<int>(extrema.size()) != it) {
    throw ValidationError("one extrema pair per target patch required");
  }
  Eigen::VectorXd lo(it), hi(it);
  for (int i = 0; i < it; ++i) {
    lo(i) = extrema[i].first;
    hi(i) = extrema[i].second;
  }
  return optimize(a, target_budget, pi_minus, lo, hi);
}

BoundResult bound_cdf(const RationalMatrix& a, int target_budget,
                      const Eigen::VectorXd& pi_minus,
                      const std::vector<std::pair<double, double>>& extrema,
                      double z) {
  const int it = a.per_block_counts[target_budget];
  if (static_cast<int>(extrema.size()) != it) {
    throw ValidationError("one extrema pair per target patch required");
  }
  Eigen::VectorXd inner = Eigen::VectorXd::Zero(it);
  Eigen::VectorXd outer = Eigen::VectorXd::Zero(it);
  for (int i = 0; i < it; ++i) {
    if (extrema[i].second <= z) inner(i) = 1.0;  // patch fully at or below z
    if (extrema[i].first <= z) outer(i) = 1.0;   // patch reaches below z
  }
  BoundResult r = optimize(a, target_budget, pi_minus, inner, outer);
  r.lower = std::clamp(r.lower, 0.0, 1.0);
  r.upper = std::clamp(r.upper, 0.0, 1.0);
  return r;
}

}  // namespace rumtest
