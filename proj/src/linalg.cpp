#include "p2pbandit/linalg.hpp"

#include <cmath>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

PsdAccumulator::PsdAccumulator(int d) : m_(Mat::Identity(d, d)) {
  if (d < 1) throw InputError("PsdAccumulator: dimension must be >= 1");
}

PsdAccumulator PsdAccumulator::from_matrix(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw InputError("PsdAccumulator: matrix must be square");
  if (!m.allFinite()) throw InputError("PsdAccumulator: non-finite entries");
  PsdAccumulator out(static_cast<int>(m.rows()));
  out.m_ = m;
  out.logdet_valid_ = false;
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw InputError("PsdAccumulator: matrix is not positive definite");
  out.llt_.emplace(std::move(llt));
  return out;
}

const Eigen::LLT<Mat>& PsdAccumulator::factor() const {
  if (!llt_) {
    llt_.emplace(m_);
    if (llt_->info() != Eigen::Success) {
      llt_.reset();
      throw ProtocolError("PsdAccumulator: factorization failed on a matrix expected to be PD");
    }
  }
  return *llt_;
}

void PsdAccumulator::rank_one_update(const Vec& x, double c) {
  if (x.size() != m_.rows()) throw InputError("rank_one_update: dimension mismatch");
  if (!x.allFinite() || !std::isfinite(c)) throw InputError("rank_one_update: non-finite input");
  if (c < 0.0) throw InputError("rank_one_update: weight must be nonnegative");
  if (c == 0.0) return;
  if (logdet_valid_) logdet_ += std::log1p(c * weighted_norm_sq(x));
  m_.noalias() += c * x * x.transpose();
  llt_.reset();
}

void PsdAccumulator::add(const Mat& p) {
  if (p.rows() != m_.rows() || p.cols() != m_.cols()) throw InputError("PsdAccumulator::add: dimension mismatch");
  m_ += p;
  llt_.reset();
  logdet_valid_ = false;
}

double PsdAccumulator::weighted_norm_sq(const Vec& x) const {
  if (x.size() != m_.rows()) throw InputError("weighted_norm_sq: dimension mismatch");
  const Vec half = factor().matrixL().solve(x);
  return half.squaredNorm();
}

Vec PsdAccumulator::solve(const Vec& b) const {
  if (b.size() != m_.rows()) throw InputError("solve: dimension mismatch");
  return factor().solve(b);
}

double PsdAccumulator::logdet() const {
  if (!logdet_valid_) {
    const auto& l = factor();
    logdet_ = 2.0 * l.matrixLLT().diagonal().array().log().sum();
    logdet_valid_ = true;
  }
  return logdet_;
}

double PsdAccumulator::trace_inverse() const {
  const Mat inv = factor().solve(Mat::Identity(m_.rows(), m_.cols()));
  return inv.trace();
}

PsdAccumulator convex_average(const PsdAccumulator& a, const PsdAccumulator& b) {
  if (a.dim() != b.dim()) throw InputError("convex_average: dimension mismatch");
  Mat avg = 0.5 * (a.matrix() + b.matrix());
  return PsdAccumulator::from_matrix(avg);
}

double logdet_of(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw InputError("logdet_of: matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace p2pbandit
