#ifndef RUMTEST_COUNTERFACTUAL_HPP
#define RUMTEST_COUNTERFACTUAL_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rumtest/enumerate.hpp"

namespace rumtest {

/// LP bounds on functionals of choice behavior on one unobserved budget.
/// The feasible set is {nu >= 0 : A restricted to the observed budgets
/// maps nu to pi_minus}; pi_minus stacks the observed blocks in order,
/// skipping the target block. Infeasible pi_minus raises a validation
/// error (project an estimate onto the cone first in that case).
struct BoundResult {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on the probability of one target-budget patch (within index i).
BoundResult bound_patch_prob(const RationalMatrix& a, int target_budget,
                             int within_i, const Eigen::VectorXd& pi_minus);

/// Bounds on expected demand for one good on the target budget; extrema
/// holds (min, max) of that good over each target-block patch.
BoundResult bound_expected_demand(
    const RationalMatrix& a, int target_budget, const Eigen::VectorXd& pi_minus,
    const std::vector<std::pair<double, double>>& extrema);

/// Bounds on P(demand for the good <= z) on the target budget. The lower
/// bound sums patches entirely at or below z, the upper bound patches that
/// reach weakly below z (inner and outer measure of the event).
BoundResult bound_cdf(const RationalMatrix& a, int target_budget,
                      const Eigen::VectorXd& pi_minus,
                      const std::vector<std::pair<double, double>>& extrema,
                      double z);

}  // namespace rumtest

#endif
