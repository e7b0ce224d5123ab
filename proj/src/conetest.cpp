#include "rumtest/conetest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "rumtest/errors.hpp"
#include "rumtest/lp.hpp"
#include "rumtest/nnls.hpp"

namespace rumtest {

int PiVector::block_offset(int j) const {
  int off = 0;
  for (int k = 0; k < j; ++k) off += block_sizes[k];
  return off;
}

Eigen::VectorXd PiVector::block(int j) const {
  return values.segment(block_offset(j), block_sizes[j]);
}

long PiVector::total_n() const {
  long n = 0;
  for (long nj : block_n) n += nj;
  return n;
}

void PiVector::validate(double adding_up_tol) const {
  int total = 0;
  for (int s : block_sizes) {
    if (s < 1) throw ValidationError("empty probability block");
    total += s;
  }
  if (total != size()) throw ValidationError("block sizes do not add to length");
  if (block_n.size() != block_sizes.size()) {
    throw ValidationError("sample-size count differs from block count");
  }
  for (long nj : block_n) {
    if (nj < 1) throw ValidationError("budget with no observations");
  }
  for (int i = 0; i < size(); ++i) {
    if (!(values(i) >= 0.0 && values(i) <= 1.0)) {
      throw ValidationError("probability outside [0,1] at entry " +
                            std::to_string(i));
    }
  }
  for (int j = 0; j < blocks(); ++j) {
    const double s = block(j).sum();
    if (std::fabs(s - 1.0) > adding_up_tol) {
      throw ValidationError("block " + std::to_string(j) +
                            " sums to " + std::to_string(s));
    }
  }
}

PiVector make_pi(const Eigen::VectorXd& values,
                 const std::vector<int>& block_sizes,
                 const std::vector<long>& block_n) {
  PiVector pi;
  pi.values = values;
  pi.block_sizes = block_sizes;
  pi.block_n = block_n;
  pi.validate();
  return pi;
}

Eigen::VectorXd Weighting::resolve(int size) const {
  if (diag.size() == 0) return Eigen::VectorXd::Ones(size);
  if (diag.size() != size) throw ValidationError("weighting has wrong length");
  if ((diag.array() <= 0.0).any()) {
    throw ValidationError("weighting entries must be strictly positive");
  }
  return diag;
}

Projection nnls_project(const Eigen::VectorXd& pihat, const Eigen::MatrixXd& A,
                        const Weighting& om, double lower) {
  if (A.rows() != pihat.size()) throw ValidationError("pi and A disagree on I");
  if (lower < 0.0) throw ValidationError("lower bound must be nonnegative");
  const Eigen::VectorXd w = om.resolve(static_cast<int>(A.rows()));
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::MatrixXd As = sw.asDiagonal() * A;
  Eigen::VectorXd target = sw.asDiagonal() * pihat;
  if (lower > 0.0) target -= As.rowwise().sum() * lower;  // shift nu = mu + lower
  NnlsResult r = nnls(As, target);
  Projection p;
  p.nu = r.x.array() + lower;
  p.eta = A * p.nu;
  p.objective = r.objective;
  p.iterations = r.iterations;
  p.kkt_violation = r.kkt_violation;
  return p;
}

double jn_statistic(const PiVector& pihat, const Eigen::MatrixXd& A,
                    const Weighting& om) {
  pihat.validate(0.1);  // clamped series estimates need not add up exactly
  const double stat = static_cast<double>(pihat.total_n()) *
                      nnls_project(pihat.values, A, om, 0.0).objective;
  // Below this level the squared distance is solver noise; report zero.
  return stat < 1e-12 ? 0.0 : stat;
}

double default_tau(double n) {
  if (!(n >= 2.0)) throw ValidationError("effective sample size below 2");
  return std::sqrt(std::log(n) / n);
}

namespace {

// Objectives this small are solver noise (squared residuals near machine
// precision scaled by N); comparing them against each other manufactures
// spurious rejections at interior points. Snap them to zero.
constexpr double kStatFloor = 1e-12;

double snap(double stat) { return stat < kStatFloor ? 0.0 : stat; }

double upper_quantile(std::vector<double> v, double alpha) {
  std::sort(v.begin(), v.end());
  const int r = static_cast<int>(v.size());
  int k = static_cast<int>(std::ceil((1.0 - alpha) * r));
  if (k < 1) k = 1;
  if (k > r) k = r;
  return v[k - 1];
}

}  // namespace

TestResult bootstrap_test(const PiVector& pihat, const Eigen::MatrixXd& A,
                          const Weighting& om, double tau, int R, double alpha,
                          const Resampler& draw, std::uint64_t seed,
                          int threads) {
  pihat.validate(0.1);
  if (R < 1) throw ValidationError("need at least one bootstrap replication");
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw ValidationError("alpha must lie in (0, 1/2]");
  }
  if (tau < 0.0) throw ValidationError("tau must be nonnegative");
  const long N = pihat.total_n();
  const int H = static_cast<int>(A.cols());
  const double lower = tau / H;

  TestResult res;
  res.tau = tau;
  res.alpha = alpha;

  Projection plain = nnls_project(pihat.values, A, om, 0.0);
  res.jn = snap(N * plain.objective);
  res.eta_hat = plain.eta;
  res.solver_iterations = plain.iterations;
  res.max_kkt = plain.kkt_violation;

  Projection tight = nnls_project(pihat.values, A, om, lower);
  res.eta_tight = tight.eta;
  res.solver_iterations += tight.iterations;
  res.max_kkt = std::max(res.max_kkt, tight.kkt_violation);

  std::vector<double> stats(R, 0.0);
  std::vector<char> failed(R, 0);
  std::atomic<long> iters{0};
  std::vector<double> kkts(R, 0.0);
  auto run_range = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      RngStream stream(seed, {0x626f6f74ULL, static_cast<std::uint64_t>(r)});
      try {
        Eigen::VectorXd star = draw(r, stream);
        Eigen::VectorXd recentered = star - pihat.values + tight.eta;
        Projection p = nnls_project(recentered, A, om, lower);
        stats[r] = snap(N * p.objective);
        kkts[r] = p.kkt_violation;
        iters += p.iterations;
      } catch (const SolverError&) {
        failed[r] = 1;
      }
    }
  };
  if (threads <= 1) {
    run_range(0, R);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (R + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk, hi = std::min(R, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  int n_failed = 0;
  std::vector<double> kept;
  kept.reserve(R);
  for (int r = 0; r < R; ++r) {
    if (failed[r]) {
      ++n_failed;
    } else {
      kept.push_back(stats[r]);
      res.max_kkt = std::max(res.max_kkt, kkts[r]);
    }
  }
  res.failed_reps = n_failed;
  res.solver_iterations += iters.load();
  if (n_failed * 100 > R) {
    throw SolverError("more than 1% of bootstrap replications failed (" +
                      std::to_string(n_failed) + " of " + std::to_string(R) + ")");
  }
  res.boot_stats = kept;
  res.critical_value = upper_quantile(kept, alpha);
  int count_ge = 0;
  for (double s : kept) {
    if (s >= res.jn) ++count_ge;
  }
  res.p_value = (1.0 + count_ge) / (static_cast<double>(kept.size()) + 1.0);
  return res;
}

Resampler multinomial_resampler(const PiVector& pihat) {
  pihat.validate(0.1);
  return [pihat](int, RngStream& stream) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pihat.size());
    for (int j = 0; j < pihat.blocks(); ++j) {
      const int off = pihat.block_offset(j);
      const Eigen::VectorXd p = pihat.block(j);
      std::vector<double> weights(p.data(), p.data() + p.size());
      const long nj = pihat.block_n[j];
      for (long n = 0; n < nj; ++n) {
        out(off + static_cast<int>(stream.categorical(weights))) += 1.0;
      }
      out.segment(off, pihat.block_sizes[j]) /= static_cast<double>(nj);
    }
    return out;
  };
}

Resampler normal_resampler(const PiVector& pihat,
                           const std::vector<Eigen::MatrixXd>& v_hat) {
  pihat.validate(0.1);
  if (static_cast<int>(v_hat.size()) != pihat.blocks()) {
    throw ValidationError("one covariance block per budget required");
  }
  // Symmetric square roots up front; eigendecomposition tolerates the
  // semidefinite (and slightly indefinite, from rounding) plug-in blocks.
  std::vector<Eigen::MatrixXd> roots;
  for (int j = 0; j < pihat.blocks(); ++j) {
    if (v_hat[j].rows() != pihat.block_sizes[j] ||
        v_hat[j].cols() != pihat.block_sizes[j]) {
      throw ValidationError("covariance block " + std::to_string(j) +
                            " has wrong shape");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v_hat[j]);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    roots.push_back(es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                    es.eigenvectors().transpose());
  }
  return [pihat, roots](int, RngStream& stream) {
    Eigen::VectorXd out = pihat.values;
    for (int j = 0; j < pihat.blocks(); ++j) {
      const int sz = pihat.block_sizes[j];
      Eigen::VectorXd z(sz);
      for (int i = 0; i < sz; ++i) z(i) = stream.normal();
      out.segment(pihat.block_offset(j), sz) +=
          roots[j] * z / std::sqrt(static_cast<double>(pihat.block_n[j]));
    }
    return out;
  };
}

bool cone_membership(const Eigen::VectorXd& pi, const Eigen::MatrixXd& A,
                     double tol) {
  if (A.rows() != pi.size()) throw ValidationError("pi and A disagree on I");
  return lp::feasible(A, pi, tol);
}

}  // namespace rumtest
