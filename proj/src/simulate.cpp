#include "rumtest/simulate.hpp"

#include <cmath>

#include "rumtest/errors.hpp"
#include "rumtest/rng.hpp"

namespace rumtest {

Microdata sample_mixture(const RationalMatrix& a, const PatchTable& t,
                         const Eigen::VectorXd& nu,
                         const std::vector<long>& n_per_budget,
                         std::uint64_t seed) {
  if (nu.size() != a.cols()) throw ValidationError("nu length differs from H");
  if ((nu.array() < 0.0).any() || nu.sum() <= 0.0) {
    throw ValidationError("nu must be nonnegative with positive mass");
  }
  if (static_cast<int>(n_per_budget.size()) != t.num_budgets()) {
    throw ValidationError("one sample size per budget required");
  }
  std::vector<double> weights(nu.data(), nu.data() + nu.size());
  Microdata data;
  data.patch.resize(t.num_budgets());
  data.w.resize(t.num_budgets());
  data.z.resize(t.num_budgets());
  for (int j = 0; j < t.num_budgets(); ++j) {
    if (n_per_budget[j] < 1) throw ValidationError("empty budget sample");
    RngStream stream(seed, {0x6d697874ULL, static_cast<std::uint64_t>(j)});
    for (long n = 0; n < n_per_budget[j]; ++n) {
      const int h = static_cast<int>(stream.categorical(weights));
      data.patch[j].push_back(t.patch_index(j, a.columns[h][j]));
      data.w[j].push_back(0.0);
    }
  }
  return data;
}

CrossingPair crossing_pair() {
  Eigen::MatrixXd prices(2, 2);
  prices << 1.0, 2.0, 2.0, 1.0;
  CrossingPair cp;
  cp.budgets = make_budget_system(prices);
  cp.patches = enumerate_patches(cp.budgets);
  cp.types = crawl_A(cp.patches, Axiom::Sarp);
  return cp;
}

Microdata boundary_sample(const CrossingPair& cp, long n_per_budget,
                          std::uint64_t seed) {
  Eigen::VectorXd nu(cp.types.cols());
  if (nu.size() != 3) throw InternalError("unexpected type count");
  nu << 0.5, 0.5, 0.0;
  return sample_mixture(cp.types, cp.patches, nu,
                        std::vector<long>(2, n_per_budget), seed);
}

Eigen::VectorXd tilted_share(const Eigen::VectorXd& base, double tilt,
                             double e) {
  // Direction e1 - base has zero sum, so shares stay normalized.
  Eigen::VectorXd dir = -base;
  dir(0) += 1.0;
  Eigen::VectorXd s = base + (e - 0.5) * tilt * dir;
  return s.cwiseMax(1e-6);
}

BundleData cobb_douglas_population(const CobbDouglasDGP& dgp) {
  dgp.budgets.validate();
  if (dgp.base_share.size() != dgp.budgets.num_goods) {
    throw ValidationError("share vector length differs from good count");
  }
  if ((dgp.base_share.array() <= 0.0).any() ||
      std::fabs(dgp.base_share.sum() - 1.0) > 1e-9) {
    throw ValidationError("shares must be positive and sum to 1");
  }
  if (dgp.n_per_budget < 1) throw ValidationError("need at least one consumer");
  const int J = dgp.budgets.count();
  BundleData out;
  out.bundles.resize(J);
  out.w.resize(J);
  out.z.resize(J);
  for (int j = 0; j < J; ++j) {
    RngStream stream(dgp.seed, {0x636f6262ULL, static_cast<std::uint64_t>(j)});
    for (long n = 0; n < dgp.n_per_budget; ++n) {
      const double e = stream.uniform();
      const double z = stream.uniform();
      const double noise = stream.uniform();
      const double w = z + (dgp.endogenous ? e : noise);
      Eigen::VectorXd share = tilted_share(dgp.base_share, dgp.tilt, e);
      Eigen::VectorXd y(dgp.budgets.num_goods);
      const Eigen::VectorXd& p = dgp.budgets.price(j);
      for (int k = 0; k < y.size(); ++k) y(k) = share(k) / p(k);
      // Shares may have been floored; rescale onto the plane exactly.
      y /= p.dot(y);
      out.bundles[j].push_back(std::move(y));
      out.w[j].push_back(w);
      out.z[j].push_back(z);
    }
  }
  return out;
}

Microdata classify_bundles(const BundleData& data, const BudgetSystem& b,
                           const PatchTable& t, double tie_tol) {
  const int J = b.count();
  if (static_cast<int>(data.bundles.size()) != J) {
    throw ValidationError("bundle data has wrong budget count");
  }
  Microdata md;
  md.patch.resize(J);
  md.w = data.w;
  md.z = data.z;
  for (int j = 0; j < J; ++j) {
    for (const auto& y : data.bundles[j]) {
      md.patch[j].push_back(classify_bundle(y, j, b, t, tie_tol));
    }
  }
  return md;
}

}  // namespace rumtest
