#ifndef RUMTEST_ENUMERATE_HPP
#define RUMTEST_ENUMERATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "rumtest/revpref.hpp"

namespace rumtest {

/// All rationalizable complete choice types, stored sparsely: one
/// within-block pick index per block and column. Blocks are budgets for
/// budget systems and menus for binary menus. Columns are kept in
/// lexicographic order on pick tuples.
struct RationalMatrix {
  std::vector<std::vector<int>> columns;  // H entries, each of length J
  std::vector<int> per_block_counts;      // I_1..I_J
  Axiom axiom = Axiom::Sarp;

  int num_blocks() const { return static_cast<int>(per_block_counts.size()); }
  int rows() const;
  int cols() const { return static_cast<int>(columns.size()); }

  /// Materialize the 0/1 matrix (rows() x cols()).
  Eigen::MatrixXd dense() const;
  /// One column as a stacked 0/1 vector.
  Eigen::VectorXd dense_column(int h) const;
};

/// Exhaustive generation of all pick tuples in odometer order, keeping the
/// rationalizable ones. Refuses when the candidate count exceeds cap.
RationalMatrix brute_force_A(const PatchTable& t, Axiom axiom,
                             std::int64_t cap = 10'000'000);

/// Depth-first search over budgets with subtree pruning at inconsistent
/// partial patterns. Same column set as brute_force_A.
RationalMatrix crawl_A(const PatchTable& t, Axiom axiom);

/// Decomposition: if some budget L has M >= 1 budgets not intersecting it,
/// enumerate the block of budgets intersecting L, then combine all
/// rationalizable extensions to the non-intersecting budgets and to L
/// independently. Falls back to crawl_A when every pair intersects.
RationalMatrix decompose_A(const PatchTable& t, const BudgetSystem& b,
                           Axiom axiom);

/// Choice types over binary menus: columns induced by all linear orders on
/// the items, deduplicated. Each menu contributes a block of two rows, the
/// first for its first listed item. I = 2 * #menus.
RationalMatrix binary_menu_A(int n_items,
                             const std::vector<std::pair<int, int>>& menus,
                             int item_cap = 8);

}  // namespace rumtest

#endif
