#ifndef RUMTEST_GEOMETRY_HPP
#define RUMTEST_GEOMETRY_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rumtest/budgets.hpp"

namespace rumtest {

/// Maximal region of one budget plane lying on a fixed side of every
/// other budget. sign[k] in {-1, 0, +1}: strictly below / on / strictly
/// above budget k; sign[budget] == 0.
struct Patch {
  int budget = 0;
  Eigen::VectorXi sign;            // length J
  Eigen::VectorXd representative;  // strictly interior point of the patch
  int within_index = 0;            // position inside its budget block
};

/// The partition of the union of budget planes into sign-classified
/// patches, stacked budget by budget. Within each budget, patches are
/// ordered lexicographically on sign vectors with -1 < 0 < +1.
struct PatchTable {
  std::vector<Patch> patches;
  std::vector<int> per_budget_counts;  // I_1..I_J
  bool drop_intersections = true;
  double tol = 1e-9;

  int total() const { return static_cast<int>(patches.size()); }
  int num_budgets() const { return static_cast<int>(per_budget_counts.size()); }

  /// Offset of budget j's block in the stacked layout.
  int block_offset(int j) const;
  /// Stacked index of patch (j, within).
  int patch_index(int j, int within) const { return block_offset(j) + within; }

  /// I x J matrix of side classifications (0 on, -1 below, +1 above).
  Eigen::MatrixXi sign_matrix() const;
};

/// Enumerate the nonempty patches of every budget. Nonemptiness and the
/// representative come from one margin-maximizing LP per candidate sign
/// vector; a candidate is kept iff the optimal margin exceeds tol.
PatchTable enumerate_patches(const BudgetSystem& b, bool drop_intersections = true,
                             double tol = 1e-9);

/// Map a bundle on budget j to its patch (stacked index). Ties
/// |p_k'y - 1| <= tie_tol go to the below side (-1) when intersection
/// patches were dropped, and to the intersection patch otherwise.
int classify_bundle(const Eigen::VectorXd& y, int j, const BudgetSystem& b,
                    const PatchTable& t, double tie_tol = 1e-8);

/// Min and max of y_k over the closure of a patch, each by LP.
std::pair<double, double> patch_extrema(const BudgetSystem& b, const PatchTable& t,
                                        int patch, int good);

/// Whether budget planes j and k meet inside the nonnegative orthant.
bool budgets_intersect(const BudgetSystem& b, int j, int k, double tol = 1e-9);

}  // namespace rumtest

#endif
