#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "rumtest/counterfactual.hpp"
#include "rumtest/errors.hpp"
#include "rumtest/geometry.hpp"
#include "rumtest/rng.hpp"
#include "rumtest/simulate.hpp"
#include "support/refs.hpp"

using namespace rumtest;

namespace {

// Oracle for the same bounds by vertex enumeration of
// {nu >= 0 : A_minus nu = pi_minus} with objective c'nu.
std::pair<double, double> vertex_bounds(const RationalMatrix& a,
                                        int target_budget,
                                        const Eigen::VectorXd& pi_minus,
                                        const Eigen::VectorXd& obj) {
  auto dense = a.dense();
  const int target_rows = a.per_block_counts[target_budget];
  int off = 0;
  for (int j = 0; j < target_budget; ++j) off += a.per_block_counts[j];
  Eigen::MatrixXd am(dense.rows() - target_rows, dense.cols());
  am.topRows(off) = dense.topRows(off);
  am.bottomRows(am.rows() - off) =
      dense.bottomRows(dense.rows() - off - target_rows);
  const double lo = testsupport::lp_vertex_oracle(am, pi_minus, obj);
  const double hi = -testsupport::lp_vertex_oracle(am, pi_minus, -obj);
  return {lo, hi};
}

Eigen::VectorXd column_objective(const RationalMatrix& a, int target_budget,
                                 const std::vector<double>& weight_by_pick) {
  Eigen::VectorXd c(a.cols());
  for (int h = 0; h < a.cols(); ++h) {
    c(h) = weight_by_pick[static_cast<std::size_t>(
        a.columns[h][target_budget])];
  }
  return c;
}

}  // namespace

TEST_CASE("crossing pair: observing one budget bounds the other") {
  auto cp = crossing_pair();
  // Budget 0 block (below other, above other) observed at (0.7, 0.3);
  // ask for the below-other patch probability on budget 1.
  Eigen::VectorXd pi_minus(2);
  pi_minus << 0.7, 0.3;
  auto r = bound_patch_prob(cp.types, 1, 0, pi_minus);
  CHECK(r.lower == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.upper == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(std::fabs(r.lower - 0.0) < 1e-9);
  CHECK(std::fabs(r.upper - 0.3) < 1e-9);
  // The complementary patch is pinned accordingly.
  auto r2 = bound_patch_prob(cp.types, 1, 1, pi_minus);
  CHECK(r2.lower == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(r2.upper == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a fully pinned system gives degenerate bounds") {
  auto cp = crossing_pair();
  // pi_minus = (1, 0) forces all mass on the single type picking below
  // on budget 0, which picks above on budget 1.
  Eigen::VectorXd pi_minus(2);
  pi_minus << 1.0, 0.0;
  auto r = bound_patch_prob(cp.types, 1, 0, pi_minus);
  CHECK(r.lower == doctest::Approx(0.0));
  CHECK(r.upper == doctest::Approx(0.0));
}

TEST_CASE("infeasible restrictions are rejected") {
  auto b = make_budget_system(testsupport::three_budget_prices());
  auto t = enumerate_patches(b);
  auto a = crawl_A(t, Axiom::Sarp);
  // Each observed budget puts all mass on its patch below the other
  // observed budget: a two-cycle no mixture over types can produce.
  Eigen::VectorXd bad(8);
  bad << 1, 0, 0, 0, 1, 0, 0, 0;
  CHECK_THROWS_AS(bound_patch_prob(a, 2, 0, bad), ValidationError);
}

TEST_CASE("patch probability bounds match vertex enumeration") {
  RngStream rng(71, {0});
  for (int inst = 0; inst < 12; ++inst) {
    const int J = 3;
    const int K = 2 + static_cast<int>(rng.below(2));
    Eigen::MatrixXd p(J, K);
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) p(j, k) = rng.uniform(0.6, 1.7);
    auto b = make_budget_system(p);
    auto t = enumerate_patches(b);
    auto a = crawl_A(t, Axiom::Sarp);
    if (a.cols() > 50) continue;
    // Draw pi_minus from a random mixture so it is always feasible.
    Eigen::VectorXd nu(a.cols());
    for (int h = 0; h < a.cols(); ++h) nu(h) = rng.uniform(0.0, 1.0);
    nu /= nu.sum();
    Eigen::VectorXd pi = a.dense() * nu;
    const int target = static_cast<int>(rng.below(J));
    const int tr = a.per_block_counts[target];
    int off = 0;
    for (int j = 0; j < target; ++j) off += a.per_block_counts[j];
    Eigen::VectorXd pi_minus(pi.size() - tr);
    pi_minus.head(off) = pi.head(off);
    pi_minus.tail(pi_minus.size() - off) = pi.tail(pi.size() - off - tr);
    for (int within = 0; within < tr; ++within) {
      auto r = bound_patch_prob(a, target, within, pi_minus);
      std::vector<double> w(static_cast<std::size_t>(tr), 0.0);
      w[static_cast<std::size_t>(within)] = 1.0;
      auto [lo, hi] =
          vertex_bounds(a, target, pi_minus, column_objective(a, target, w));
      CHECK(r.lower == doctest::Approx(lo).epsilon(1e-7));
      CHECK(r.upper == doctest::Approx(hi).epsilon(1e-7));
      // The generating mixture must fall inside.
      const double truth = pi(off + within);
      CHECK(r.lower <= truth + 1e-8);
      CHECK(r.upper >= truth - 1e-8);
    }
  }
}

TEST_CASE("expected demand bounds sandwich the generating mixture") {
  RngStream rng(71, {1});
  for (int inst = 0; inst < 8; ++inst) {
    Eigen::MatrixXd p(3, 2);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k) p(j, k) = rng.uniform(0.6, 1.7);
    auto b = make_budget_system(p);
    auto t = enumerate_patches(b);
    auto a = crawl_A(t, Axiom::Sarp);
    Eigen::VectorXd nu(a.cols());
    for (int h = 0; h < a.cols(); ++h) nu(h) = rng.uniform(0.0, 1.0);
    nu /= nu.sum();
    Eigen::VectorXd pi = a.dense() * nu;
    const int target = 2;
    const int good = static_cast<int>(rng.below(2));
    const int tr = a.per_block_counts[target];
    const int off = a.rows() - tr;
    Eigen::VectorXd pi_minus = pi.head(off);
    std::vector<std::pair<double, double>> extrema;
    for (int i = 0; i < tr; ++i) {
      extrema.push_back(patch_extrema(b, t, t.patch_index(target, i), good));
    }
    auto r = bound_expected_demand(a, target, pi_minus, extrema);
    CHECK(r.lower <= r.upper + 1e-12);
    // Demand averaged over any selection inside each patch must fit.
    double mid_lo = 0.0, mid_hi = 0.0;
    for (int i = 0; i < tr; ++i) {
      mid_lo += pi(off + i) * extrema[static_cast<std::size_t>(i)].first;
      mid_hi += pi(off + i) * extrema[static_cast<std::size_t>(i)].second;
    }
    CHECK(r.lower <= mid_lo + 1e-8);
    CHECK(r.upper >= mid_hi - 1e-8);
    // Oracle agreement for both ends.
    std::vector<double> wlo, whi;
    for (auto& e : extrema) {
      wlo.push_back(e.first);
      whi.push_back(e.second);
    }
    auto [lo, unused_hi] =
        vertex_bounds(a, target, pi_minus, column_objective(a, target, wlo));
    auto [unused_lo, hi] =
        vertex_bounds(a, target, pi_minus, column_objective(a, target, whi));
    CHECK(r.lower == doctest::Approx(lo).epsilon(1e-7));
    CHECK(r.upper == doctest::Approx(hi).epsilon(1e-7));
  }
}

TEST_CASE("bounds are invariant to duplicating columns") {
  auto cp = crossing_pair();
  RationalMatrix dup = cp.types;
  dup.columns.push_back(dup.columns.back());
  Eigen::VectorXd pi_minus(2);
  pi_minus << 0.7, 0.3;
  auto r1 = bound_patch_prob(cp.types, 1, 0, pi_minus);
  auto r2 = bound_patch_prob(dup, 1, 0, pi_minus);
  CHECK(r1.lower == doctest::Approx(r2.lower).epsilon(1e-9));
  CHECK(r1.upper == doctest::Approx(r2.upper).epsilon(1e-9));
}

TEST_CASE("distribution bounds are monotone with correct tails") {
  auto cp = crossing_pair();
  Eigen::VectorXd pi_minus(2);
  pi_minus << 0.6, 0.4;
  const int target = 1;
  const int good = 0;
  std::vector<std::pair<double, double>> extrema;
  for (int i = 0; i < 2; ++i) {
    extrema.push_back(patch_extrema(cp.budgets, cp.patches,
                                    cp.patches.patch_index(target, i), good));
  }
  double max_demand = 0.0;
  for (auto& e : extrema) max_demand = std::max(max_demand, e.second);
  BoundResult prev{0.0, 0.0};
  for (double z = -0.1; z <= max_demand + 0.2; z += 0.05) {
    auto r = bound_cdf(cp.types, target, pi_minus, extrema, z);
    CHECK(r.lower <= r.upper + 1e-12);
    CHECK(r.lower >= prev.lower - 1e-12);
    CHECK(r.upper >= prev.upper - 1e-12);
    prev = r;
  }
  auto below = bound_cdf(cp.types, target, pi_minus, extrema, -0.1);
  CHECK(below.lower == doctest::Approx(0.0));
  CHECK(below.upper == doctest::Approx(0.0));
  auto above = bound_cdf(cp.types, target, pi_minus, extrema, max_demand + 0.1);
  CHECK(above.lower == doctest::Approx(1.0));
  CHECK(above.upper == doctest::Approx(1.0));
}
