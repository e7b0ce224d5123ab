#ifndef RUMTEST_CONETEST_HPP
#define RUMTEST_CONETEST_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "rumtest/rng.hpp"

namespace rumtest {

/// Stacked patch-probability vector with per-budget block structure and
/// the sample sizes behind it.
struct PiVector {
  Eigen::VectorXd values;        // length I, entries in [0,1]
  std::vector<int> block_sizes;  // I_1..I_J
  std::vector<long> block_n;     // N_1..N_J

  int blocks() const { return static_cast<int>(block_sizes.size()); }
  int size() const { return static_cast<int>(values.size()); }
  int block_offset(int j) const;
  Eigen::VectorXd block(int j) const;
  long total_n() const;

  /// Entries in [0,1]; layout consistent; block sums near 1.
  void validate(double adding_up_tol = 1e-6) const;
};

PiVector make_pi(const Eigen::VectorXd& values,
                 const std::vector<int>& block_sizes,
                 const std::vector<long>& block_n);

/// Diagonal weighting matrix; empty diag means identity.
struct Weighting {
  Eigen::VectorXd diag;
  Eigen::VectorXd resolve(int size) const;
};

struct Projection {
  Eigen::VectorXd nu;   // one of the minimizers (not unique)
  Eigen::VectorXd eta;  // A nu, unique to tolerance
  double objective = 0.0;
  long iterations = 0;
  double kkt_violation = 0.0;
};

/// min (pihat - A nu)' Omega (pihat - A nu)  over  nu >= lower * 1.
/// Solved by the shift nu = mu + lower and nonnegative least squares on
/// the shifted target, with rows pre-scaled by sqrt(Omega).
Projection nnls_project(const Eigen::VectorXd& pihat, const Eigen::MatrixXd& A,
                        const Weighting& om, double lower);

/// N times the squared weighted distance from pihat to {A nu : nu >= 0}.
double jn_statistic(const PiVector& pihat, const Eigen::MatrixXd& A,
                    const Weighting& om);

/// Tightening rate sqrt(log(n)/n) for effective sample size n >= 2.
double default_tau(double n);

struct TestResult {
  double jn = 0.0;
  Eigen::VectorXd eta_hat;    // untightened projection of pihat
  Eigen::VectorXd eta_tight;  // tightened projection, recentering anchor
  double tau = 0.0;
  std::vector<double> boot_stats;  // R replication statistics
  double critical_value = 0.0;
  double p_value = 1.0;
  double alpha = 0.0;
  long solver_iterations = 0;
  double max_kkt = 0.0;
  int failed_reps = 0;

  bool reject() const { return jn > critical_value; }
};

/// Draws one bootstrap pi-hat for replication r from its own RNG stream.
using Resampler = std::function<Eigen::VectorXd(int r, RngStream&)>;

/// Tightened recentered bootstrap: project pihat with floor tau/H, then
/// for each replication draw pihat*, recenter to pihat* - pihat + the
/// tightened projection, re-solve the tightened program, and compare the
/// (1-alpha) quantile of the replication statistics against J_N.
/// Replication streams derive from (seed, r) only, so results do not
/// depend on the thread count.
TestResult bootstrap_test(const PiVector& pihat, const Eigen::MatrixXd& A,
                          const Weighting& om, double tau, int R, double alpha,
                          const Resampler& draw, std::uint64_t seed,
                          int threads = 1);

/// Per-budget multinomial resampling at pihat, block sizes N_j.
Resampler multinomial_resampler(const PiVector& pihat);

/// pihat + N_j^{-1/2} N(0, v_hat[j]) per block (for series estimators).
Resampler normal_resampler(const PiVector& pihat,
                           const std::vector<Eigen::MatrixXd>& v_hat);

/// Exact cone membership {pi = A nu, nu >= 0} by phase-1 LP.
bool cone_membership(const Eigen::VectorXd& pi, const Eigen::MatrixXd& A,
                     double tol = 1e-8);

}  // namespace rumtest

#endif
