// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "hmmseg/error.hpp"
#include "hmmseg/numeric.hpp"

namespace hmmseg {

enum class CovarianceMode { full, diagonal };

inline constexpr double kDefaultVarianceFloor = 1e-4;

constexpr std::string_view to_string(CovarianceMode mode) {
  return mode == CovarianceMode::full ? "full" : "diag";
}

inline CovarianceMode parse_covariance_mode(std::string_view text) {
  if (text == "full") return CovarianceMode::full;
  if (text == "diag" || text == "diagonal") return CovarianceMode::diagonal;
  throw Error(ErrorCode::invalid_argument, "unknown covariance mode '" + std::string(text) + "'");
}

/// Single multivariate normal with a cached Cholesky factor.
class GaussianModel {
 public:
  GaussianModel(Vector mean, Matrix covariance, CovarianceMode mode = CovarianceMode::full)
      : mean_(std::move(mean)), covariance_(std::move(covariance)), mode_(mode) {
    const auto dim = mean_.size();
    require(dim >= 1, ErrorCode::invalid_argument, "gaussian of dimension 0");
    require(covariance_.rows() == dim && covariance_.cols() == dim, ErrorCode::invalid_argument,
            "covariance shape does not match mean dimension");
    require(mean_.allFinite() && covariance_.allFinite(), ErrorCode::invalid_data,
            "gaussian parameters are not finite");
    if (mode_ == CovarianceMode::diagonal) {
      covariance_ = Matrix(covariance_.diagonal().asDiagonal());
      require((covariance_.diagonal().array() > 0.0).all(), ErrorCode::degenerate_statistics,
              "diagonal covariance is not positive");
      inv_std_ = covariance_.diagonal().cwiseSqrt().cwiseInverse();
      log_det_ = covariance_.diagonal().array().log().sum();
    } else {
      covariance_ = (0.5 * (covariance_ + covariance_.transpose())).eval();
      Eigen::LLT<Matrix> llt(covariance_);
      require(llt.info() == Eigen::Success, ErrorCode::degenerate_statistics,
              "covariance is not positive definite");
      chol_ = llt.matrixL();
      log_det_ = 2.0 * chol_.diagonal().array().log().sum();
    }
  }

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  CovarianceMode mode() const { return mode_; }
  double log_determinant() const { return log_det_; }

  /// Natural-log density of one feature vector.
  double log_density(const Eigen::Ref<const Vector>& x) const {
    require(x.size() == mean_.size(), ErrorCode::invalid_argument,
            "feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                std::to_string(mean_.size()));
    const Vector diff = x - mean_;
    return -0.5 * (dim() * kLog2Pi + log_det_ + mahalanobis_sq(diff));
  }

  /// Log densities for every row of `frames`.
  Vector log_density_rows(const FrameMatrix& frames) const {
    require(frames.cols() == mean_.size(), ErrorCode::invalid_argument,
            "feature dimension does not match model dimension");
    Matrix diff = (frames.rowwise() - mean_.transpose()).transpose();  // l x T
    if (mode_ == CovarianceMode::diagonal) {
      diff = inv_std_.asDiagonal() * diff;
    } else {
      chol_.triangularView<Eigen::Lower>().solveInPlace(diff);
    }
    const double constant = dim() * kLog2Pi + log_det_;
    return (-0.5 * (diff.colwise().squaredNorm().array() + constant)).matrix().transpose();
  }

 private:
  double mahalanobis_sq(const Vector& diff) const {
    if (mode_ == CovarianceMode::diagonal) return diff.cwiseProduct(inv_std_).squaredNorm();
    return chol_.triangularView<Eigen::Lower>().solve(diff).squaredNorm();
  }

  Vector mean_;
  Matrix covariance_;
  CovarianceMode mode_;
  Matrix chol_;
  Vector inv_std_;
  double log_det_ = 0.0;
};

/// Weighted sufficient statistics: total weight, weighted sum, weighted
/// outer-product sum. Merging is plain addition.
class GaussianAccumulator {
 public:
  explicit GaussianAccumulator(int dim)
      : sum_(Vector::Zero(dim)), sum_sq_(Matrix::Zero(dim, dim)) {}

  int dim() const { return static_cast<int>(sum_.size()); }
  double weight() const { return weight_; }

  void add(const Eigen::Ref<const Vector>& x, double w) {
    if (w == 0.0) return;
    weight_ += w;
    sum_.noalias() += w * x;
    sum_sq_.selfadjointView<Eigen::Lower>().rankUpdate(x, w);
  }

  void merge(const GaussianAccumulator& other) {
    require(other.dim() == dim(), ErrorCode::invalid_argument, "accumulator dimension mismatch");
    weight_ += other.weight_;
    sum_ += other.sum_;
    sum_sq_ += other.sum_sq_;
  }

  /// Closed-form maximum-likelihood fit. The covariance is centered on the
  /// updated mean, symmetrized, and `floor` is added to its diagonal.
  GaussianModel fit(CovarianceMode mode = CovarianceMode::full,
                    double floor = kDefaultVarianceFloor) const {
    require(weight_ > 0.0, ErrorCode::degenerate_statistics, "total weight is zero");
    require(floor >= 0.0, ErrorCode::invalid_argument, "variance floor must be nonnegative");
    Vector mean = sum_ / weight_;
    Matrix second = sum_sq_.selfadjointView<Eigen::Lower>();
    Matrix cov = second / weight_ - mean * mean.transpose();
    cov = (0.5 * (cov + cov.transpose())).eval();
    if (mode == CovarianceMode::diagonal) cov = Matrix(cov.diagonal().asDiagonal());
    // Round-off can leave tiny negative variances for zero-spread data.
    for (Eigen::Index d = 0; d < cov.rows(); ++d) cov(d, d) = std::max(cov(d, d), 0.0) + floor;
    return GaussianModel(std::move(mean), std::move(cov), mode);
  }

 private:
  double weight_ = 0.0;
  Vector sum_;
  Matrix sum_sq_;
};

inline GaussianModel fit_weighted(const FrameMatrix& samples, std::span<const double> weights,
                                  CovarianceMode mode = CovarianceMode::full,
                                  double floor = kDefaultVarianceFloor) {
  require(samples.rows() == static_cast<Eigen::Index>(weights.size()), ErrorCode::invalid_argument,
          "sample and weight counts differ");
  require(samples.rows() >= 1 && samples.cols() >= 1, ErrorCode::invalid_argument, "no samples");
  GaussianAccumulator acc(static_cast<int>(samples.cols()));
  for (Eigen::Index t = 0; t < samples.rows(); ++t) {
    const double w = weights[static_cast<std::size_t>(t)];
    require(w >= 0.0 && std::isfinite(w), ErrorCode::invalid_argument, "weights must be finite and nonnegative");
    acc.add(samples.row(t).transpose(), w);
  }
  return acc.fit(mode, floor);
}

/// Log observation scores, one row per frame and one column per state.
/// -inf marks an impossible state.
using ScoreMatrix = Matrix;

/// State priors p(s) (nonnegative, summing to one).
class PriorTable {
 public:
  PriorTable() = default;
  explicit PriorTable(std::vector<double> priors) : priors_(std::move(priors)) {
    require(!priors_.empty(), ErrorCode::invalid_argument, "empty prior table");
    double total = 0.0;
    for (double p : priors_) {
      require(p >= 0.0 && std::isfinite(p), ErrorCode::invalid_data, "prior must be finite and nonnegative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorCode::invalid_data, "priors do not sum to one");
  }

  int size() const { return static_cast<int>(priors_.size()); }
  double operator[](int s) const { return priors_[static_cast<std::size_t>(s)]; }
  const std::vector<double>& values() const { return priors_; }

 private:
  std::vector<double> priors_;
};

/// Per-frame class posteriors from an external classifier.
class PosteriorMatrix {
 public:
  explicit PosteriorMatrix(Matrix rows, double tolerance = 1e-6) : rows_(std::move(rows)) {
    require(rows_.rows() >= 1 && rows_.cols() >= 1, ErrorCode::invalid_data, "empty posterior matrix");
    for (Eigen::Index t = 0; t < rows_.rows(); ++t) {
      const auto row = rows_.row(t);
      require(row.allFinite() && (row.array() >= 0.0).all() && (row.array() <= 1.0).all(),
              ErrorCode::invalid_data, "posterior entries must lie in [0,1]");
      require(std::abs(row.sum() - 1.0) <= tolerance, ErrorCode::invalid_data,
              "posterior row " + std::to_string(t) + " does not sum to one");
    }
  }

  const Matrix& rows() const { return rows_; }

 private:
  Matrix rows_;
};

/// Bayes' rule with p(x_t) dropped: log p(s|x_t) - log p(s).
inline ScoreMatrix posterior_to_loglikelihood(const PosteriorMatrix& posteriors, const PriorTable& priors) {
  const Matrix& post = posteriors.rows();
  require(post.cols() == priors.size(), ErrorCode::invalid_argument,
          "posterior has " + std::to_string(post.cols()) + " states but prior table has " +
              std::to_string(priors.size()));
  ScoreMatrix out(post.rows(), post.cols());
  for (Eigen::Index s = 0; s < post.cols(); ++s) {
    const double prior = priors[static_cast<int>(s)];
    for (Eigen::Index t = 0; t < post.rows(); ++t) {
      const double p = post(t, s);
      if (prior == 0.0) {
        require(p == 0.0, ErrorCode::inconsistent_prior,
                "positive posterior on zero-prior state " + std::to_string(s));
        out(t, s) = kNegInf;
      } else {
        out(t, s) = safe_log(p) - std::log(prior);
      }
    }
  }
  return out;
}

/// Relative frame frequency of each state over all alignments. Each
/// alignment is a list of state ids in [0, num_states).
inline PriorTable estimate_priors(std::span<const std::vector<int>> alignments, int num_states) {
  require(num_states >= 1, ErrorCode::invalid_argument, "no states");
  std::vector<double> counts(static_cast<std::size_t>(num_states), 0.0);
  double total = 0.0;
  for (const auto& alignment : alignments) {
    for (int s : alignment) {
      require(s >= 0 && s < num_states, ErrorCode::invalid_argument, "state id out of range");
      counts[static_cast<std::size_t>(s)] += 1.0;
      total += 1.0;
    }
  }
  require(total >= 1.0, ErrorCode::invalid_argument, "no aligned frames");
  for (double& c : counts) c /= total;
  return PriorTable(std::move(counts));
}

/// log of the arithmetic mean of two probability-scale score matrices.
inline ScoreMatrix combine_scores(const ScoreMatrix& a, const ScoreMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::invalid_argument,
          "score matrices differ in shape");
  const double log_half = -std::numbers::ln2;
  ScoreMatrix out(a.rows(), a.cols());
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    for (Eigen::Index t = 0; t < a.rows(); ++t) {
      if (a(t, s) == b(t, s)) {
        out(t, s) = a(t, s);
        continue;
      }
      const double sum = log_add_exp(a(t, s), b(t, s));
      out(t, s) = sum == kNegInf ? kNegInf : sum + log_half;
    }
  }
  return out;
}

}  // namespace hmmseg
