#include "rumtest/enumerate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "rumtest/errors.hpp"

namespace rumtest {

int RationalMatrix::rows() const {
  return std::accumulate(per_block_counts.begin(), per_block_counts.end(), 0);
}

Eigen::MatrixXd RationalMatrix::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows(), cols());
  for (int h = 0; h < cols(); ++h) {
    int off = 0;
    for (int j = 0; j < num_blocks(); ++j) {
      a(off + columns[h][j], h) = 1.0;
      off += per_block_counts[j];
    }
  }
  return a;
}

Eigen::VectorXd RationalMatrix::dense_column(int h) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(rows());
  int off = 0;
  for (int j = 0; j < num_blocks(); ++j) {
    a(off + columns[h][j]) = 1.0;
    off += per_block_counts[j];
  }
  return a;
}

RationalMatrix brute_force_A(const PatchTable& t, Axiom axiom, std::int64_t cap) {
  const int J = t.num_budgets();
  std::int64_t candidates = 1;
  for (int j = 0; j < J; ++j) {
    candidates *= t.per_budget_counts[j];
    if (candidates > cap) {
      throw ValidationError(
          "candidate count exceeds the exhaustive-enumeration cap; use the "
          "depth-first crawl instead");
    }
  }
  RationalMatrix a;
  a.per_block_counts = t.per_budget_counts;
  a.axiom = axiom;
  std::vector<int> picks(J, 0);
  std::vector<int> choices(J);
  for (std::int64_t idx = 0; idx < candidates; ++idx) {
    for (int j = 0; j < J; ++j) choices[j] = t.patch_index(j, picks[j]);
    if (rationalizable(choices, t, axiom)) a.columns.push_back(picks);
    // Odometer step, least significant digit last: yields lex order.
    for (int j = J - 1; j >= 0; --j) {
      if (++picks[j] < t.per_budget_counts[j]) break;
      picks[j] = 0;
    }
  }
  return a;
}

namespace {

// Depth-first enumeration over the budgets listed in `order`, extending the
// partial pattern in `choices`. Consistency is rechecked after every
// assignment; failed subtrees are pruned. Appends each completed pick tuple.
void crawl_over(const PatchTable& t, Axiom axiom, const std::vector<int>& order,
                std::vector<int>& choices, std::vector<int>& picks,
                std::size_t depth, std::vector<std::vector<int>>& out) {
  if (depth == order.size()) {
    out.push_back(picks);
    return;
  }
  const int j = order[depth];
  for (int i = 0; i < t.per_budget_counts[j]; ++i) {
    choices[j] = t.patch_index(j, i);
    picks[j] = i;
    if (partial_consistent(choices, t, axiom)) {
      crawl_over(t, axiom, order, choices, picks, depth + 1, out);
    }
  }
  choices[j] = -1;
  picks[j] = -1;
}

}  // namespace

RationalMatrix crawl_A(const PatchTable& t, Axiom axiom) {
  const int J = t.num_budgets();
  RationalMatrix a;
  a.per_block_counts = t.per_budget_counts;
  a.axiom = axiom;
  std::vector<int> order(J);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> choices(J, -1), picks(J, -1);
  crawl_over(t, axiom, order, choices, picks, 0, a.columns);
  return a;
}

RationalMatrix decompose_A(const PatchTable& t, const BudgetSystem& b,
                           Axiom axiom) {
  const int J = t.num_budgets();
  // Pick the pivot budget with the most non-intersecting partners.
  int pivot = -1, best = 0;
  std::vector<std::vector<char>> meets(J, std::vector<char>(J, 1));
  for (int j = 0; j < J; ++j) {
    for (int k = j + 1; k < J; ++k) {
      meets[j][k] = meets[k][j] = budgets_intersect(b, j, k) ? 1 : 0;
    }
  }
  for (int j = 0; j < J; ++j) {
    int apart = 0;
    for (int k = 0; k < J; ++k) {
      if (k != j && !meets[j][k]) ++apart;
    }
    if (apart > best) {
      best = apart;
      pivot = j;
    }
  }
  if (pivot < 0) return crawl_A(t, axiom);

  std::vector<int> outer, mid;  // outer: budgets not meeting the pivot
  for (int j = 0; j < J; ++j) {
    if (j == pivot) continue;
    (meets[pivot][j] ? mid : outer).push_back(j);
  }

  RationalMatrix a;
  a.per_block_counts = t.per_budget_counts;
  a.axiom = axiom;

  // A full pattern is consistent iff its restriction to outer+mid and its
  // restriction to mid+pivot both are: any offending cycle through both an
  // outer budget and the pivot would need an edge between them, and budgets
  // that do not meet leave one side of the other, giving edges in only one
  // direction between the two groups.
  std::vector<int> choices(J, -1), picks(J, -1);
  std::vector<std::vector<int>> mids;
  crawl_over(t, axiom, mid, choices, picks, 0, mids);
  for (const auto& m : mids) {
    for (int j : mid) {
      picks[j] = m[j];
      choices[j] = t.patch_index(j, m[j]);
    }
    std::vector<std::vector<int>> lefts, rights;
    crawl_over(t, axiom, outer, choices, picks, 0, lefts);
    crawl_over(t, axiom, {pivot}, choices, picks, 0, rights);
    for (const auto& l : lefts) {
      for (const auto& r : rights) {
        std::vector<int> full = m;
        for (int j : outer) full[j] = l[j];
        full[pivot] = r[pivot];
        a.columns.push_back(std::move(full));
      }
    }
    for (int j : mid) {
      picks[j] = -1;
      choices[j] = -1;
    }
  }
  std::sort(a.columns.begin(), a.columns.end());
  return a;
}

RationalMatrix binary_menu_A(int n_items,
                             const std::vector<std::pair<int, int>>& menus,
                             int item_cap) {
  if (n_items < 2) throw ValidationError("need at least two items");
  if (n_items > item_cap) {
    throw ValidationError("item count exceeds cap (columns grow factorially)");
  }
  std::set<std::pair<int, int>> seen_menus;
  for (const auto& [u, v] : menus) {
    if (u < 0 || u >= n_items || v < 0 || v >= n_items || u == v) {
      throw ValidationError("menu is not a pair of distinct items");
    }
    if (!seen_menus.insert({std::min(u, v), std::max(u, v)}).second) {
      throw ValidationError("duplicate menu");
    }
  }
  RationalMatrix a;
  a.per_block_counts.assign(menus.size(), 2);
  a.axiom = Axiom::Sarp;
  std::set<std::vector<int>> cols;
  std::vector<int> perm(n_items);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> rank(n_items);
  do {
    // perm lists items from most to least preferred.
    for (int r = 0; r < n_items; ++r) rank[perm[r]] = r;
    std::vector<int> col(menus.size());
    for (std::size_t m = 0; m < menus.size(); ++m) {
      col[m] = rank[menus[m].first] < rank[menus[m].second] ? 0 : 1;
    }
    cols.insert(std::move(col));
  } while (std::next_permutation(perm.begin(), perm.end()));
  a.columns.assign(cols.begin(), cols.end());
  return a;
}

}  // namespace rumtest
