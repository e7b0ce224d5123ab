#ifndef RUMTEST_ESTIMATE_HPP
#define RUMTEST_ESTIMATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rumtest/conetest.hpp"
#include "rumtest/geometry.hpp"

namespace rumtest {

/// Repeated cross-sections, one block per budget. Bundles have already
/// been resolved to stacked patch indices. z is empty when no instrument
/// was observed (then per-period z vectors are empty too).
struct Microdata {
  std::vector<std::vector<int>> patch;   // per period, stacked indices
  std::vector<std::vector<double>> w;    // log expenditure
  std::vector<std::vector<double>> z;    // instrument, optional

  int periods() const { return static_cast<int>(patch.size()); }
  long n(int j) const { return static_cast<long>(patch[j].size()); }
  bool has_instrument() const;
  void validate(const PatchTable& t) const;
};

struct SeriesSpec {
  int order = 3;                 // basis functions per regressor
  std::vector<double> target_w;  // evaluation point per period
  int first_stage_order = 3;     // instrument basis size (control function)
  double upsilon = 0.0;          // trimming width; 0 picks (L/N_j)^(1/3)
  int quad_nodes = 32;
  int variance_reps = 100;       // pairs bootstrap size for cf variance
  std::uint64_t seed = 1;
};

/// Raw per-budget frequencies. Block sums are exactly 1.
struct FreqResult {
  PiVector pi;
  std::vector<std::vector<long>> counts;  // per period, per within index
};
FreqResult freq_pi(const Microdata& data, const PatchTable& t);

/// Series regression of patch indicators on a power basis in standardized
/// log expenditure, evaluated at target_w and clamped to [0,1]. v_hat
/// holds one per-block covariance of sqrt(N_j)(pi_hat - pi).
struct SeriesResult {
  PiVector pi;
  std::vector<Eigen::MatrixXd> v_hat;
};
SeriesResult series_pi(const Microdata& data, const PatchTable& t,
                       const SeriesSpec& spec);

/// Two-step control-function estimator: first the conditional CDF of w
/// given z by series regression of 1{w_m <= w}, trimmed to [0,1]; then
/// patch indicators regressed on a tensor basis in (w, trimmed CDF), and
/// the fitted surface averaged over the control variable by quadrature.
/// v_hat comes from a pairs bootstrap of the whole two-step procedure.
SeriesResult cf_pi(const Microdata& data, const PatchTable& t,
                   const SeriesSpec& spec);

/// Smoothed effective sample size min_j N_j I_j / trace(v_hat[j]).
double effective_n(const std::vector<Eigen::MatrixXd>& v_hat,
                   const std::vector<long>& counts,
                   const std::vector<int>& block_sizes);

/// Trimming map: 0 below -upsilon, identity on [upsilon, 1-upsilon],
/// quadratic blends in between, 1 above 1+upsilon. Continuous.
double trim_to_unit(double eps, double upsilon);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights);

}  // namespace rumtest

#endif
