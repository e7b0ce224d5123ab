#ifndef RUMTEST_IO_HPP
#define RUMTEST_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "rumtest/conetest.hpp"
#include "rumtest/counterfactual.hpp"
#include "rumtest/enumerate.hpp"
#include "rumtest/estimate.hpp"
#include "rumtest/geometry.hpp"

namespace rumtest::io {

inline constexpr int kSchemaVersion = 1;

/// Prices CSV: header `period,p1,...,pK`, one row per period.
BudgetSystem load_prices_csv(const std::string& path);
void write_prices_csv(const std::string& path, const BudgetSystem& b);

/// Patch table CSV: `budget,within_index,sign_vector,representative` with
/// the vectors joined by ';'.
void write_patches_csv(const std::string& path, const BudgetSystem& b,
                       const PatchTable& t);

/// Microdata CSV, either bundle form `period,q1,...,qK,w[,z]` (bundles are
/// rescaled onto their budget plane, then classified) or pre-classified
/// form `period,patch,w[,z]` with the stacked patch index. The period
/// column takes a budget label or a 1-based index.
Microdata load_microdata_csv(const std::string& path, const BudgetSystem& b,
                             const PatchTable& t, double tie_tol = 1e-8);
void write_microdata_csv(const std::string& path, const Microdata& data);

/// Compact choice-type matrix: header `I H`, then per-block counts on one
/// line, then one pick tuple per column.
void write_a_matrix(const std::string& path, const RationalMatrix& a);
RationalMatrix read_a_matrix(const std::string& path);

std::string test_report_json(const TestResult& r, const std::string& estimator,
                             bool include_boot_stats = false);
std::string bounds_report_json(const std::string& quantity, int target_budget,
                               const BoundResult& r);

}  // namespace rumtest::io

#endif
