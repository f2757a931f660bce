#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <optional>

namespace p2pbandit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/**
 * A d×d symmetric positive-definite matrix that keeps a running
 * log-determinant and a lazily refreshed Cholesky factor.
 *
 * Additions are only ever PSD terms (rank-one observations or whole
 * buffer entries), so a matrix started from the identity keeps all its
 * eigenvalues ≥ 1. The factor is recomputed on the first read after a
 * change; an explicit inverse is never stored because buffer averaging
 * produces updates that are not rank one.
 */
class PsdAccumulator {
 public:
  /// Identity of dimension d.
  explicit PsdAccumulator(int d);

  /// Wraps an arbitrary PD matrix. Throws InputError if it is not square,
  /// not finite, or not positive definite.
  static PsdAccumulator from_matrix(const Mat& m);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const noexcept { return m_; }

  /// M ← M + c·x·xᵀ, with logdet advanced by ln(1 + c·‖x‖²_{M⁻¹}).
  void rank_one_update(const Vec& x, double c = 1.0);

  /// M ← M + p for a PSD p. The log-determinant is recomputed on next read.
  void add(const Mat& p);

  /// xᵀM⁻¹x via the factor.
  double weighted_norm_sq(const Vec& x) const;

  /// M⁻¹b via the factor.
  Vec solve(const Vec& b) const;

  double logdet() const;
  double trace_inverse() const;

 private:
  const Eigen::LLT<Mat>& factor() const;

  Mat m_;
  mutable std::optional<Eigen::LLT<Mat>> llt_;
  mutable double logdet_ = 0.0;
  mutable bool logdet_valid_ = true;
};

/// Elementwise (a + b) / 2.
PsdAccumulator convex_average(const PsdAccumulator& a, const PsdAccumulator& b);

/// log det of a dense PD matrix through a fresh factorization.
double logdet_of(const Mat& m);

}  // namespace p2pbandit
