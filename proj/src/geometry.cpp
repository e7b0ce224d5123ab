#include "rumtest/geometry.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "rumtest/errors.hpp"
#include "rumtest/lp.hpp"

namespace rumtest {

void BudgetSystem::validate() const {
  if (budgets.empty()) throw ValidationError("budget system is empty");
  for (std::size_t j = 0; j < budgets.size(); ++j) {
    const auto& p = budgets[j].price;
    if (p.size() != num_goods) {
      throw ValidationError("budget " + std::to_string(j) +
                            " has wrong number of goods");
    }
    for (int k = 0; k < p.size(); ++k) {
      if (!(p(k) > 0.0) || !std::isfinite(p(k))) {
        std::ostringstream os;
        os << "nonpositive or nonfinite price at budget " << j << ", good " << k
           << " (value " << p(k) << ")";
        throw ValidationError(os.str());
      }
    }
  }
}

BudgetSystem normalize_budgets(const Eigen::MatrixXd& raw_prices,
                               const Eigen::VectorXd& log_expenditures,
                               const std::vector<std::string>& labels) {
  if (raw_prices.rows() != log_expenditures.size()) {
    throw ValidationError("price rows and expenditure entries differ in count");
  }
  BudgetSystem b;
  b.num_goods = static_cast<int>(raw_prices.cols());
  for (int j = 0; j < raw_prices.rows(); ++j) {
    if (!std::isfinite(log_expenditures(j))) {
      throw ValidationError("nonfinite log expenditure for budget " +
                            std::to_string(j));
    }
    Budget budget;
    budget.label = (j < static_cast<int>(labels.size())) ? labels[j]
                                                         : std::to_string(j + 1);
    budget.price = raw_prices.row(j).transpose() / std::exp(log_expenditures(j));
    b.budgets.push_back(std::move(budget));
  }
  b.validate();
  return b;
}

BudgetSystem make_budget_system(const Eigen::MatrixXd& prices,
                                const std::vector<std::string>& labels) {
  return normalize_budgets(prices, Eigen::VectorXd::Zero(prices.rows()), labels);
}

int PatchTable::block_offset(int j) const {
  return std::accumulate(per_budget_counts.begin(), per_budget_counts.begin() + j, 0);
}

Eigen::MatrixXi PatchTable::sign_matrix() const {
  Eigen::MatrixXi x(total(), num_budgets());
  for (int i = 0; i < total(); ++i) x.row(i) = patches[i].sign.transpose();
  return x;
}

namespace {

// Feasibility + strictly interior representative for one sign candidate.
// Maximizes the margin m over {y >= 0, p_j'y = 1, s_k (p_k'y - 1) >= m}.
// When the candidate has no strict side conditions (single budget, or an
// intersection-only candidate) the margin is taken against the orthant
// instead, and any feasible point qualifies.
struct CandidateResult {
  bool nonempty = false;
  Eigen::VectorXd representative;
};

CandidateResult probe_candidate(const BudgetSystem& b, int j,
                                const Eigen::VectorXi& sign, double tol) {
  const int K = b.num_goods;
  const int J = b.count();
  std::vector<int> strict, equal;
  for (int k = 0; k < J; ++k) {
    if (k == j) continue;
    if (sign(k) == 0) {
      equal.push_back(k);
    } else {
      strict.push_back(k);
    }
  }

  CandidateResult out;
  if (!strict.empty()) {
    // Variables: y (K), m+ , m-, slack per strict row.
    const int n = K + 2 + static_cast<int>(strict.size());
    const int m_rows = 1 + static_cast<int>(equal.size()) + static_cast<int>(strict.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_rows, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_rows);
    int row = 0;
    A.block(row, 0, 1, K) = b.price(j).transpose();
    rhs(row++) = 1.0;
    for (int k : equal) {
      A.block(row, 0, 1, K) = b.price(k).transpose();
      rhs(row++) = 1.0;
    }
    for (std::size_t s = 0; s < strict.size(); ++s) {
      const int k = strict[s];
      const double sg = static_cast<double>(sign(k));
      A.block(row, 0, 1, K) = sg * b.price(k).transpose();
      A(row, K) = -1.0;      // m+
      A(row, K + 1) = 1.0;   // m-
      A(row, K + 2 + static_cast<int>(s)) = -1.0;  // slack
      rhs(row++) = sg;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(K) = -1.0;  // maximize m = m+ - m-
    c(K + 1) = 1.0;
    auto res = lp::solve(A, rhs, c);
    if (res.status != lp::Status::Optimal) return out;
    const double margin = res.x(K) - res.x(K + 1);
    if (margin <= tol) return out;
    out.nonempty = true;
    out.representative = res.x.head(K);
    return out;
  }

  // No strict rows: maximize the componentwise floor of y instead.
  // Variables: y (K), t, slack per good.
  const int n = 2 * K + 1;
  const int m_rows = 1 + static_cast<int>(equal.size()) + K;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_rows, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_rows);
  int row = 0;
  A.block(row, 0, 1, K) = b.price(j).transpose();
  rhs(row++) = 1.0;
  for (int k : equal) {
    A.block(row, 0, 1, K) = b.price(k).transpose();
    rhs(row++) = 1.0;
  }
  for (int k = 0; k < K; ++k) {
    A(row, k) = 1.0;
    A(row, K) = -1.0;          // t
    A(row, K + 1 + k) = -1.0;  // slack
    rhs(row++) = 0.0;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c(K) = -1.0;
  auto res = lp::solve(A, rhs, c);
  if (res.status != lp::Status::Optimal) return out;
  out.nonempty = true;
  out.representative = res.x.head(K);
  return out;
}

// Lexicographic odometer over candidate sign vectors for budget j,
// with -1 < 0 < +1 and the own-budget entry pinned to 0.
void for_each_candidate(int J, int j, bool drop_intersections,
                        const std::function<void(const Eigen::VectorXi&)>& fn) {
  std::vector<int> free_pos;
  for (int k = 0; k < J; ++k) {
    if (k != j) free_pos.push_back(k);
  }
  const std::vector<int> values =
      drop_intersections ? std::vector<int>{-1, 1} : std::vector<int>{-1, 0, 1};
  const int base = static_cast<int>(values.size());
  const int digits = static_cast<int>(free_pos.size());
  long total = 1;
  for (int d = 0; d < digits; ++d) total *= base;
  Eigen::VectorXi sign = Eigen::VectorXi::Zero(J);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int d = digits - 1; d >= 0; --d) {
      sign(free_pos[d]) = values[rem % base];
      rem /= base;
    }
    fn(sign);
  }
}

}  // namespace

PatchTable enumerate_patches(const BudgetSystem& b, bool drop_intersections,
                             double tol) {
  b.validate();
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  const int J = b.count();
  PatchTable table;
  table.drop_intersections = drop_intersections;
  table.tol = tol;
  table.per_budget_counts.assign(J, 0);
  for (int j = 0; j < J; ++j) {
    int within = 0;
    for_each_candidate(J, j, drop_intersections, [&](const Eigen::VectorXi& sign) {
      auto probe = probe_candidate(b, j, sign, tol);
      if (!probe.nonempty) return;
      Patch p;
      p.budget = j;
      p.sign = sign;
      p.representative = probe.representative;
      p.within_index = within++;
      table.patches.push_back(std::move(p));
    });
    table.per_budget_counts[j] = within;
    if (within == 0) {
      throw InternalError("budget " + std::to_string(j) + " produced no patches");
    }
  }
  return table;
}

int classify_bundle(const Eigen::VectorXd& y, int j, const BudgetSystem& b,
                    const PatchTable& t, double tie_tol) {
  if (j < 0 || j >= b.count()) throw ValidationError("budget index out of range");
  if (y.size() != b.num_goods) throw ValidationError("bundle has wrong dimension");
  const double own = b.price(j).dot(y) - 1.0;
  if (std::fabs(own) > tie_tol) {
    std::ostringstream os;
    os << "bundle is off budget " << j << " by " << own;
    throw DataError(os.str());
  }
  Eigen::VectorXi sign = Eigen::VectorXi::Zero(b.count());
  for (int k = 0; k < b.count(); ++k) {
    if (k == j) continue;
    const double v = b.price(k).dot(y) - 1.0;
    if (std::fabs(v) <= tie_tol) {
      sign(k) = t.drop_intersections ? -1 : 0;
    } else {
      sign(k) = v > 0.0 ? 1 : -1;
    }
  }
  const int off = t.block_offset(j);
  for (int i = 0; i < t.per_budget_counts[j]; ++i) {
    if (t.patches[off + i].sign == sign) return off + i;
  }
  std::ostringstream os;
  os << "no patch on budget " << j << " matches sign vector [";
  for (int k = 0; k < sign.size(); ++k) os << (k ? "," : "") << sign(k);
  os << "]";
  throw InternalError(os.str());
}

std::pair<double, double> patch_extrema(const BudgetSystem& b, const PatchTable& t,
                                        int patch, int good) {
  if (patch < 0 || patch >= t.total()) throw ValidationError("patch index out of range");
  if (good < 0 || good >= b.num_goods) throw ValidationError("good index out of range");
  const Patch& p = t.patches[patch];
  const int K = b.num_goods;
  const int J = b.count();
  std::vector<int> below, above, on;
  for (int k = 0; k < J; ++k) {
    if (k == p.budget) continue;
    if (p.sign(k) < 0) below.push_back(k);
    else if (p.sign(k) > 0) above.push_back(k);
    else on.push_back(k);
  }
  // Closure of the patch: weak versions of all side conditions.
  const int n_slack = static_cast<int>(below.size() + above.size());
  const int n = K + n_slack;
  const int m_rows = 1 + static_cast<int>(on.size()) + n_slack;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_rows, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_rows);
  int row = 0;
  A.block(row, 0, 1, K) = b.price(p.budget).transpose();
  rhs(row++) = 1.0;
  for (int k : on) {
    A.block(row, 0, 1, K) = b.price(k).transpose();
    rhs(row++) = 1.0;
  }
  int slack = K;
  for (int k : above) {
    A.block(row, 0, 1, K) = b.price(k).transpose();
    A(row, slack++) = -1.0;
    rhs(row++) = 1.0;
  }
  for (int k : below) {
    A.block(row, 0, 1, K) = b.price(k).transpose();
    A(row, slack++) = 1.0;
    rhs(row++) = 1.0;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c(good) = 1.0;
  auto lo = lp::solve(A, rhs, c);
  c(good) = -1.0;
  auto hi = lp::solve(A, rhs, c);
  if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal) {
    throw SolverError("patch_extrema: LP failed for patch " + std::to_string(patch));
  }
  return {lo.objective, -hi.objective};
}

bool budgets_intersect(const BudgetSystem& b, int j, int k, double tol) {
  Eigen::MatrixXd A(2, b.num_goods);
  A.row(0) = b.price(j).transpose();
  A.row(1) = b.price(k).transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(2);
  return lp::feasible(A, rhs, tol);
}

}  // namespace rumtest
