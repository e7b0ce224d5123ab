#ifndef RUMTEST_HREP_HPP
#define RUMTEST_HREP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace rumtest {

/// Half-space description of the cone spanned by the columns of A:
/// { t : rows_ineq * t <= 0, rows_eq * t = 0 }. Inequality rows are facet
/// normals found by the double description method on the polar cone,
/// computed inside span(A); equality rows span the orthocomplement of
/// span(A). Rows are scaled to small coprime integers when possible, else
/// to unit norm.
struct HRep {
  Eigen::MatrixXd rows;           // inequality rows first, equality rows last
  std::vector<char> is_equality;  // one flag per row
};

/// Facet enumeration; refuses beyond small-instance caps (the method is
/// exponential in general).
HRep h_representation(const Eigen::MatrixXd& A, int row_cap = 16,
                      int col_cap = 200);

/// Empirical check of the tightened-cone construction. phi is derived from
/// the average column of A; the tightened half-space system
/// {B t <= -tau phi} must coincide with {A nu : nu >= tau/H}. Sampled
/// points within `band` of a tightened facet are skipped as undecidable at
/// tolerance.
struct TighteningReport {
  Eigen::VectorXd phi;
  bool phi_positive_on_inequalities = false;
  bool phi_zero_on_equalities = false;
  int checked = 0;
  int skipped = 0;
  int disagreements = 0;

  bool ok() const {
    return phi_positive_on_inequalities && phi_zero_on_equalities &&
           disagreements == 0;
  }
};

TighteningReport verify_tightening(const Eigen::MatrixXd& A, const HRep& h,
                                   double tau, int samples, std::uint64_t seed,
                                   double band = 1e-7);

}  // namespace rumtest

#endif
