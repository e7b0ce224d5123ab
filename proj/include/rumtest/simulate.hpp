#ifndef RUMTEST_SIMULATE_HPP
#define RUMTEST_SIMULATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rumtest/enumerate.hpp"
#include "rumtest/estimate.hpp"

namespace rumtest {

/// Patch-level data from a mixture over choice types: per budget, each
/// observation samples a type h from nu and records h's pick there.
/// Implied probabilities are A nu. Per-budget streams derive from
/// (seed, budget), so generation order does not matter.
Microdata sample_mixture(const RationalMatrix& a, const PatchTable& t,
                         const Eigen::VectorXd& nu,
                         const std::vector<long>& n_per_budget,
                         std::uint64_t seed);

/// The canonical two-good, two-crossing-budget instance (prices (1,2) and
/// (2,1)): 4 patches, 3 choice types.
struct CrossingPair {
  BudgetSystem budgets;
  PatchTable patches;
  RationalMatrix types;
};
CrossingPair crossing_pair();

/// Mixture sample on the crossing pair with type weights (1/2, 1/2, 0) in
/// canonical column order: the implied probabilities sit exactly on the
/// cone boundary (the two mutually exclusive patches get mass summing to
/// one).
Microdata boundary_sample(const CrossingPair& cp, long n_per_budget,
                          std::uint64_t seed);

/// Cobb-Douglas consumers on normalized budgets. Each consumer draws a
/// latent uniform e that tilts the expenditure shares away from the base;
/// demand is share_k / price_k. In endogenous mode log expenditure w is
/// z + e (so w carries information about preferences); otherwise w is
/// z + an independent uniform. z is always an independent uniform.
struct CobbDouglasDGP {
  BudgetSystem budgets;
  Eigen::VectorXd base_share;  // positive, sums to 1
  double tilt = 0.0;           // share heterogeneity scale, keep < min share
  bool endogenous = false;
  long n_per_budget = 1000;
  std::uint64_t seed = 1;
};

struct BundleData {
  std::vector<std::vector<Eigen::VectorXd>> bundles;  // per budget
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> z;
};

BundleData cobb_douglas_population(const CobbDouglasDGP& dgp);

/// Resolve bundle-valued data to patch indices.
Microdata classify_bundles(const BundleData& data, const BudgetSystem& b,
                           const PatchTable& t, double tie_tol = 1e-8);

/// Share tilt used by the generator: base + (e - 1/2) * tilt * (e1 - base).
Eigen::VectorXd tilted_share(const Eigen::VectorXd& base, double tilt, double e);

}  // namespace rumtest

#endif
