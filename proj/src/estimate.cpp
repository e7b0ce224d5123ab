#include "rumtest/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rumtest/errors.hpp"

namespace rumtest {

bool Microdata::has_instrument() const {
  for (const auto& zj : z) {
    if (!zj.empty()) return true;
  }
  return false;
}

void Microdata::validate(const PatchTable& t) const {
  if (periods() != t.num_budgets()) {
    throw ValidationError("period count differs from budget count");
  }
  if (w.size() != patch.size() || z.size() != patch.size()) {
    throw ValidationError("ragged microdata arrays");
  }
  for (int j = 0; j < periods(); ++j) {
    if (patch[j].empty()) {
      throw ValidationError("period " + std::to_string(j) + " is empty");
    }
    if (w[j].size() != patch[j].size()) {
      throw ValidationError("w and patch counts differ in period " +
                            std::to_string(j));
    }
    if (!z[j].empty() && z[j].size() != patch[j].size()) {
      throw ValidationError("z and patch counts differ in period " +
                            std::to_string(j));
    }
    const int off = t.block_offset(j);
    for (int idx : patch[j]) {
      if (idx < off || idx >= off + t.per_budget_counts[j]) {
        throw ValidationError("patch index outside period " +
                              std::to_string(j) + "'s block");
      }
    }
  }
}

FreqResult freq_pi(const Microdata& data, const PatchTable& t) {
  data.validate(t);
  FreqResult out;
  out.pi.block_sizes = t.per_budget_counts;
  out.pi.values = Eigen::VectorXd::Zero(t.total());
  for (int j = 0; j < data.periods(); ++j) {
    const int off = t.block_offset(j);
    std::vector<long> counts(t.per_budget_counts[j], 0);
    for (int idx : data.patch[j]) ++counts[idx - off];
    const double nj = static_cast<double>(data.n(j));
    for (int i = 0; i < t.per_budget_counts[j]; ++i) {
      out.pi.values(off + i) = static_cast<double>(counts[i]) / nj;
    }
    out.counts.push_back(std::move(counts));
    out.pi.block_n.push_back(data.n(j));
  }
  return out;
}

double trim_to_unit(double eps, double upsilon) {
  if (eps < -upsilon) return 0.0;
  if (eps <= upsilon) return (eps + upsilon) * (eps + upsilon) / (4.0 * upsilon);
  if (eps <= 1.0 - upsilon) return eps;
  if (eps <= 1.0 + upsilon) {
    const double d = 1.0 + upsilon - eps;
    return 1.0 - d * d / (4.0 * upsilon);
  }
  return 1.0;
}

void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double wgt = 2.0 / ((1.0 - x * x) * pp * pp);
    nodes[i] = 0.5 * (1.0 - x);
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * wgt;
    weights[n - 1 - i] = 0.5 * wgt;
  }
}

namespace {

Eigen::MatrixXd geninv(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(lam.size());
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) inv(i) = 1.0 / lam(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::VectorXd power_basis(double u, int order) {
  Eigen::VectorXd q(order);
  double v = 1.0;
  for (int k = 0; k < order; ++k) {
    q(k) = v;
    v *= u;
  }
  return q;
}

// Affine map of the sample range onto [-1, 1] for conditioning.
struct Standardizer {
  double lo = 0.0, hi = 1.0;
  explicit Standardizer(const std::vector<double>& xs) {
    lo = *std::min_element(xs.begin(), xs.end());
    hi = *std::max_element(xs.begin(), xs.end());
  }
  double operator()(double x) const {
    if (hi <= lo) return 0.0;
    return 2.0 * (x - lo) / (hi - lo) - 1.0;
  }
};

void check_spec(const Microdata& data, const SeriesSpec& spec) {
  if (spec.order < 1) throw ValidationError("basis order must be at least 1");
  if (static_cast<int>(spec.target_w.size()) != data.periods()) {
    throw ValidationError("one target log expenditure per period required");
  }
}

// One period of the two-step estimator; shared with its pairs bootstrap.
Eigen::VectorXd cf_single(const std::vector<double>& w,
                          const std::vector<double>& z,
                          const std::vector<int>& within, int block_size,
                          const SeriesSpec& spec, double upsilon,
                          double target_w, const std::vector<double>& qnodes,
                          const std::vector<double>& qweights) {
  const long n = static_cast<long>(w.size());
  const int L = spec.first_stage_order;

  // First step: conditional CDF of w given z by series regression of the
  // indicators 1{w_m <= w}, evaluated at each observation. Sorting by w
  // turns the N^2 sum into prefix sums of the instrument basis.
  Standardizer std_z(z);
  Eigen::MatrixXd rmat(L, n);
  for (long m = 0; m < n; ++m) rmat.col(m) = power_basis(std_z(z[m]), L);
  Eigen::MatrixXd rinv = geninv(rmat * rmat.transpose() / n);
  std::vector<long> order_idx(n);
  std::iota(order_idx.begin(), order_idx.end(), 0);
  std::sort(order_idx.begin(), order_idx.end(),
            [&](long a, long b) { return w[a] < w[b]; });
  Eigen::VectorXd prefix = Eigen::VectorXd::Zero(L);
  std::vector<Eigen::VectorXd> cum(n);
  for (long s = 0; s < n;) {
    long e = s;
    while (e < n && w[order_idx[e]] == w[order_idx[s]]) {
      prefix += rmat.col(order_idx[e]);
      ++e;
    }
    for (long k = s; k < e; ++k) cum[order_idx[k]] = prefix;  // ties included
    s = e;
  }
  Eigen::VectorXd eps(n);
  for (long m = 0; m < n; ++m) {
    const double f = rmat.col(m).dot(rinv * cum[m]) / n;
    eps(m) = trim_to_unit(f, upsilon);
  }

  // Second step: tensor power basis in (standardized w, control variable).
  Standardizer std_w(w);
  const int M = spec.order * spec.order;
  auto tensor = [&](double u, double e) {
    Eigen::VectorXd qu = power_basis(u, spec.order);
    Eigen::VectorXd qe = power_basis(2.0 * e - 1.0, spec.order);
    Eigen::VectorXd s(M);
    for (int a = 0; a < spec.order; ++a) {
      for (int b = 0; b < spec.order; ++b) s(a * spec.order + b) = qu(a) * qe(b);
    }
    return s;
  };
  Eigen::MatrixXd smat(M, n);
  for (long m = 0; m < n; ++m) smat.col(m) = tensor(std_w(w[m]), eps(m));
  Eigen::MatrixXd sinv = geninv(smat * smat.transpose() / n);
  Eigen::MatrixXd dsum = Eigen::MatrixXd::Zero(M, block_size);
  for (long m = 0; m < n; ++m) dsum.col(within[m]) += smat.col(m);
  Eigen::MatrixXd alpha = sinv * dsum / n;  // M x I_j

  // Average the fitted surface over the control variable at target_w.
  Eigen::VectorXd d_vec = Eigen::VectorXd::Zero(M);
  for (std::size_t k = 0; k < qnodes.size(); ++k) {
    d_vec += qweights[k] * tensor(std_w(target_w), qnodes[k]);
  }
  Eigen::VectorXd pi = (alpha.transpose() * d_vec).cwiseMax(0.0).cwiseMin(1.0);
  return pi;
}

}  // namespace

SeriesResult series_pi(const Microdata& data, const PatchTable& t,
                       const SeriesSpec& spec) {
  data.validate(t);
  check_spec(data, spec);
  SeriesResult out;
  out.pi.block_sizes = t.per_budget_counts;
  out.pi.values = Eigen::VectorXd::Zero(t.total());
  for (int j = 0; j < data.periods(); ++j) {
    const long n = data.n(j);
    const int K = spec.order;
    if (K > n) {
      throw ValidationError("basis order exceeds sample size in period " +
                            std::to_string(j));
    }
    const int off = t.block_offset(j);
    const int ij = t.per_budget_counts[j];
    Standardizer std_w(data.w[j]);
    Eigen::MatrixXd qmat(K, n);
    for (long m = 0; m < n; ++m) {
      qmat.col(m) = power_basis(std_w(data.w[j][m]), K);
    }
    Eigen::MatrixXd qinv = geninv(qmat * qmat.transpose() / n);
    Eigen::MatrixXd dsum = Eigen::MatrixXd::Zero(K, ij);
    for (long m = 0; m < n; ++m) {
      dsum.col(data.patch[j][m] - off) += qmat.col(m);
    }
    Eigen::MatrixXd beta = qinv * dsum / n;  // K x I_j
    const Eigen::VectorXd qbar = power_basis(std_w(spec.target_w[j]), K);
    for (int i = 0; i < ij; ++i) {
      const double v = qbar.dot(beta.col(i));
      out.pi.values(off + i) = std::min(1.0, std::max(0.0, v));
    }
    // Plug-in covariance of sqrt(N_j)(pi_hat - pi): per-observation
    // multinomial covariance at the fitted probabilities, weighted by the
    // squared smoother value. Clamping and rescaling keep it PSD.
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(ij, ij);
    Eigen::VectorXd qinv_qbar = qinv * qbar;
    for (long m = 0; m < n; ++m) {
      const double ell = qinv_qbar.dot(qmat.col(m));
      Eigen::VectorXd p = (beta.transpose() * qmat.col(m))
                              .cwiseMax(0.0)
                              .cwiseMin(1.0);
      const double s = p.sum();
      if (s > 1.0) p /= s;
      v += ell * ell *
           (Eigen::MatrixXd(p.asDiagonal()) - p * p.transpose());
    }
    out.v_hat.push_back(v / n);
    out.pi.block_n.push_back(n);
  }
  return out;
}

SeriesResult cf_pi(const Microdata& data, const PatchTable& t,
                   const SeriesSpec& spec) {
  data.validate(t);
  check_spec(data, spec);
  if (!data.has_instrument()) {
    throw ValidationError("control-function estimator requires an instrument");
  }
  if (spec.first_stage_order < 1) {
    throw ValidationError("first-stage order must be at least 1");
  }
  std::vector<double> qnodes, qweights;
  gauss_legendre_01(spec.quad_nodes, qnodes, qweights);

  SeriesResult out;
  out.pi.block_sizes = t.per_budget_counts;
  out.pi.values = Eigen::VectorXd::Zero(t.total());
  for (int j = 0; j < data.periods(); ++j) {
    const long n = data.n(j);
    if (data.z[j].empty()) {
      throw ValidationError("period " + std::to_string(j) +
                            " has no instrument values");
    }
    if (spec.order * spec.order > n || spec.first_stage_order > n) {
      throw ValidationError("basis larger than sample in period " +
                            std::to_string(j));
    }
    const auto [wmin, wmax] =
        std::minmax_element(data.w[j].begin(), data.w[j].end());
    if (*wmin == *wmax) {
      throw ValidationError("degenerate first step: constant log expenditure "
                            "in period " + std::to_string(j));
    }
    const int off = t.block_offset(j);
    const int ij = t.per_budget_counts[j];
    const double upsilon =
        spec.upsilon > 0.0
            ? spec.upsilon
            : std::cbrt(static_cast<double>(spec.first_stage_order) / n);
    std::vector<int> within(n);
    for (long m = 0; m < n; ++m) within[m] = data.patch[j][m] - off;

    Eigen::VectorXd pi =
        cf_single(data.w[j], data.z[j], within, ij, spec, upsilon,
                  spec.target_w[j], qnodes, qweights);
    out.pi.values.segment(off, ij) = pi;
    out.pi.block_n.push_back(n);

    // Pairs bootstrap of the whole two-step procedure.
    const int B = spec.variance_reps;
    Eigen::MatrixXd draws(ij, B);
    int ok = 0;
    for (int b = 0; b < B; ++b) {
      RngStream stream(spec.seed,
                       {0x70616972ULL, static_cast<std::uint64_t>(j),
                        static_cast<std::uint64_t>(b)});
      std::vector<double> wb(n), zb(n);
      std::vector<int> ib(n);
      for (long m = 0; m < n; ++m) {
        const auto pick = static_cast<long>(stream.below(n));
        wb[m] = data.w[j][pick];
        zb[m] = data.z[j][pick];
        ib[m] = within[pick];
      }
      try {
        Eigen::VectorXd rep = cf_single(wb, zb, ib, ij, spec, upsilon,
                                        spec.target_w[j], qnodes, qweights);
        draws.col(ok++) = rep;
      } catch (const std::exception&) {
        // skip degenerate resamples
      }
    }
    if (ok < 2) throw SolverError("variance bootstrap collapsed");
    Eigen::MatrixXd used = draws.leftCols(ok);
    Eigen::VectorXd mean = used.rowwise().mean();
    Eigen::MatrixXd centered = used.colwise() - mean;
    out.v_hat.push_back(centered * centered.transpose() / (ok - 1) * n);
  }
  return out;
}

double effective_n(const std::vector<Eigen::MatrixXd>& v_hat,
                   const std::vector<long>& counts,
                   const std::vector<int>& block_sizes) {
  if (v_hat.size() != counts.size() || v_hat.size() != block_sizes.size()) {
    throw ValidationError("effective_n inputs disagree on block count");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < v_hat.size(); ++j) {
    const double tr = v_hat[j].trace();
    if (!(tr > 0.0)) throw ValidationError("nonpositive covariance trace");
    best = std::min(best, counts[j] * block_sizes[j] / tr);
  }
  return best;
}

}  // namespace rumtest
