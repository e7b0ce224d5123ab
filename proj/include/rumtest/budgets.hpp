#ifndef RUMTEST_BUDGETS_HPP
#define RUMTEST_BUDGETS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace rumtest {

/// One budget plane {y >= 0 : price'y = 1}, prices normalized by
/// expenditure so the plane passes through the affordable bundles.
struct Budget {
  std::string label;
  Eigen::VectorXd price;  // strictly positive, length K
};

struct BudgetSystem {
  std::vector<Budget> budgets;
  int num_goods = 0;

  int count() const { return static_cast<int>(budgets.size()); }
  const Eigen::VectorXd& price(int j) const { return budgets[j].price; }

  void validate() const;
};

/// Divide raw (unnormalized) prices by exp(log_expenditure) per period so
/// each budget plane becomes {p'y = 1}.
BudgetSystem normalize_budgets(const Eigen::MatrixXd& raw_prices,
                               const Eigen::VectorXd& log_expenditures,
                               const std::vector<std::string>& labels = {});

/// Build a system directly from already-normalized prices (rows).
BudgetSystem make_budget_system(const Eigen::MatrixXd& prices,
                                const std::vector<std::string>& labels = {});

}  // namespace rumtest

#endif
