#include "rumtest/hrep.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "rumtest/errors.hpp"
#include "rumtest/lp.hpp"
#include "rumtest/rng.hpp"

namespace rumtest {
namespace {

constexpr double kEps = 1e-9;

// Scale a row to small coprime integers when its entries are close to a
// common rational grid; otherwise to unit norm.
Eigen::VectorXd tidy_row(Eigen::VectorXd row) {
  const double scale = row.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return row;
  row /= scale;
  for (int mult = 1; mult <= 60; ++mult) {
    Eigen::VectorXd cand = row * mult;
    bool integral = true;
    for (int i = 0; i < cand.size(); ++i) {
      if (std::fabs(cand(i) - std::round(cand(i))) > 1e-6) {
        integral = false;
        break;
      }
    }
    if (!integral) continue;
    long g = 0;
    for (int i = 0; i < cand.size(); ++i) {
      g = std::gcd(g, static_cast<long>(std::llround(cand(i))));
    }
    if (g == 0) g = 1;
    for (int i = 0; i < cand.size(); ++i) {
      cand(i) = std::round(cand(i)) / static_cast<double>(g);
    }
    return cand;
  }
  return row / row.norm();
}

// Extreme rays of the pointed cone {u in R^r : G'u <= 0}, where the
// columns of G span R^r, by incremental double description. Adjacency of
// two rays uses the combinatorial test on active sets.
std::vector<Eigen::VectorXd> polar_rays(const Eigen::MatrixXd& G) {
  const int r = static_cast<int>(G.rows());
  const int H = static_cast<int>(G.cols());

  // Initial simplicial cone from r linearly independent constraints.
  std::vector<int> base;
  Eigen::MatrixXd M(r, r);
  for (int h = 0; h < H && static_cast<int>(base.size()) < r; ++h) {
    M.col(static_cast<int>(base.size())) = G.col(h);
    Eigen::MatrixXd sub = M.leftCols(static_cast<int>(base.size()) + 1);
    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(sub).rank() ==
        static_cast<int>(base.size()) + 1) {
      base.push_back(h);
    }
  }
  if (static_cast<int>(base.size()) != r) {
    throw InternalError("polar cone is not pointed");
  }
  Eigen::MatrixXd Binit(r, r);
  for (int i = 0; i < r; ++i) Binit.row(i) = G.col(base[i]).transpose();
  Eigen::MatrixXd rays0 = -Binit.inverse();
  std::vector<Eigen::VectorXd> rays;
  std::vector<char> processed(H, 0);
  for (int i = 0; i < r; ++i) {
    rays.push_back(rays0.col(i).normalized());
    processed[base[i]] = 1;
  }

  auto active_set = [&](const Eigen::VectorXd& ray) {
    std::vector<char> act(H, 0);
    for (int h = 0; h < H; ++h) {
      if (processed[h] && std::fabs(G.col(h).dot(ray)) <= kEps) act[h] = 1;
    }
    return act;
  };

  for (int h = 0; h < H; ++h) {
    if (processed[h]) continue;
    const Eigen::VectorXd g = G.col(h);
    std::vector<double> d(rays.size());
    std::vector<int> neg, pos, zero;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      d[k] = g.dot(rays[k]);
      if (d[k] < -kEps) neg.push_back(static_cast<int>(k));
      else if (d[k] > kEps) pos.push_back(static_cast<int>(k));
      else zero.push_back(static_cast<int>(k));
    }
    std::vector<Eigen::VectorXd> next;
    if (!pos.empty()) {
      std::vector<std::vector<char>> acts;
      for (const auto& ray : rays) acts.push_back(active_set(ray));
      for (int p : pos) {
        for (int n : neg) {
          // Adjacency: no third ray's active set contains the overlap.
          std::vector<char> common(H, 0);
          for (int c = 0; c < H; ++c) common[c] = acts[p][c] & acts[n][c];
          bool adjacent = true;
          for (std::size_t k = 0; k < rays.size() && adjacent; ++k) {
            if (static_cast<int>(k) == p || static_cast<int>(k) == n) continue;
            bool contains = true;
            for (int c = 0; c < H; ++c) {
              if (common[c] && !acts[k][c]) {
                contains = false;
                break;
              }
            }
            if (contains) adjacent = false;
          }
          if (adjacent) {
            next.push_back((d[p] * rays[n] - d[n] * rays[p]).normalized());
          }
        }
      }
    }
    if (!pos.empty()) {
      std::vector<Eigen::VectorXd> kept;
      for (int k : zero) kept.push_back(rays[k]);
      for (int k : neg) kept.push_back(rays[k]);
      kept.insert(kept.end(), next.begin(), next.end());
      rays = std::move(kept);
    }
    processed[h] = 1;
  }
  return rays;
}

}  // namespace

HRep h_representation(const Eigen::MatrixXd& A, int row_cap, int col_cap) {
  const int I = static_cast<int>(A.rows());
  const int H = static_cast<int>(A.cols());
  if (I > row_cap || H > col_cap) {
    throw ValidationError("instance exceeds the facet-enumeration caps");
  }
  if (H < 1) throw ValidationError("empty matrix");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  const int r = static_cast<int>(qr.rank());
  Eigen::MatrixXd Qfull =
      qr.householderQ() * Eigen::MatrixXd::Identity(I, I);
  Eigen::MatrixXd Q1 = Qfull.leftCols(r);
  Eigen::MatrixXd Q2 = Qfull.rightCols(I - r);

  // Reduced generators; normalized so the double description tolerances
  // act on comparable scales.
  Eigen::MatrixXd G = Q1.transpose() * A;
  for (int h = 0; h < H; ++h) {
    const double n = G.col(h).norm();
    if (n <= kEps) throw InternalError("zero column inside span basis");
    G.col(h) /= n;
  }

  std::vector<Eigen::VectorXd> rays = polar_rays(G);

  HRep out;
  out.rows.resize(static_cast<int>(rays.size()) + (I - r), I);
  int row = 0;
  for (const auto& u : rays) {
    out.rows.row(row++) = tidy_row(Q1 * u).transpose();
    out.is_equality.push_back(0);
  }
  for (int c = 0; c < I - r; ++c) {
    Eigen::VectorXd q = tidy_row(Q2.col(c));
    // Fixed sign for reproducibility.
    for (int i = 0; i < q.size(); ++i) {
      if (std::fabs(q(i)) > kEps) {
        if (q(i) < 0.0) q = -q;
        break;
      }
    }
    out.rows.row(row++) = q.transpose();
    out.is_equality.push_back(1);
  }
  return out;
}

TighteningReport verify_tightening(const Eigen::MatrixXd& A, const HRep& h,
                                   double tau, int samples, std::uint64_t seed,
                                   double band) {
  const int H = static_cast<int>(A.cols());
  const int m = static_cast<int>(h.rows.rows());
  TighteningReport rep;
  rep.phi = -h.rows * A * Eigen::VectorXd::Ones(H) / H;
  rep.phi_positive_on_inequalities = true;
  rep.phi_zero_on_equalities = true;
  for (int k = 0; k < m; ++k) {
    if (h.is_equality[k]) {
      if (std::fabs(rep.phi(k)) > 1e-12) rep.phi_zero_on_equalities = false;
    } else {
      if (!(rep.phi(k) > 1e-10)) rep.phi_positive_on_inequalities = false;
    }
  }

  const double floor = tau / H;
  const Eigen::VectorXd shift_rhs = A * Eigen::VectorXd::Ones(H) * floor;
  RngStream stream(seed, {0x74696768ULL});
  for (int s = 0; s < samples; ++s) {
    // Half the samples are members by construction (some coordinates held
    // exactly at the floor); the rest get perturbed off the cone.
    Eigen::VectorXd nu(H);
    for (int i = 0; i < H; ++i) {
      nu(i) = stream.uniform() < 0.4 ? floor : floor + stream.uniform();
    }
    Eigen::VectorXd t = A * nu;
    if (s % 2 == 1) {
      for (int i = 0; i < t.size(); ++i) {
        t(i) += 0.3 * (stream.uniform() - 0.5);
      }
    }
    // Half-space side.
    Eigen::VectorXd bt = h.rows * t;
    bool hs = true;
    bool near = false;
    for (int k = 0; k < m; ++k) {
      const double margin = bt(k) + tau * rep.phi(k);
      const double viol = h.is_equality[k] ? std::fabs(margin) : margin;
      if (std::fabs(viol) <= band) near = true;
      if (viol > 1e-10) hs = false;
    }
    if (near) {
      ++rep.skipped;
      continue;
    }
    // Generator side: mu >= 0 with A mu = t - floor * A 1.
    const bool member = lp::feasible(A, t - shift_rhs, 1e-8);
    ++rep.checked;
    if (member != hs) ++rep.disagreements;
  }
  return rep;
}

}  // namespace rumtest
