#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "motkit/errors.hpp"

namespace motkit {

// ============================================================================
// Scaled unscented transform
// ============================================================================
//
// A Gaussian (mean, cov) in R^N is represented by 2N+1 deterministically
// chosen sigma points. Pushing the points through any function and re-fitting
// mean/covariance gives a derivative-free estimate of the transformed
// distribution that is exact for affine maps and third-order accurate for
// smooth nonlinear ones.

/// Spread tuning. alpha scales the sigma points about the mean; the scheme
/// here fixes the secondary parameters so that N + lambda = 3 alpha^2, i.e.
/// the point spread is sqrt(3) * alpha * (covariance column root) regardless
/// of dimension.
struct UTConfig {
  double alpha = 1.0;

  static constexpr double kMinAlpha = 1e-4;
  static constexpr double kMaxAlpha = 1.0;

  bool valid() const { return alpha >= kMinAlpha && alpha <= kMaxAlpha; }
};

/// Weights for a fixed dimension N and UTConfig.
///
/// * mean_weights   w^m, length 2N+1: w0 = lambda/(N+lambda), wi = 1/(2(N+lambda)).
/// * cov_weights    diagonal covariance weights: same as w^m except
///                  w0 += (3 - alpha^2)  (the usual 1 - alpha^2 + beta with
///                  beta = 2).
/// * cov_weight_matrix  the dense (2N+1)^2 form
///                  W = (I - [w^m ... w^m]) diag(cov_weights) (I - [w^m ... w^m])^T
///                  which folds mean-centering into the quadratic form, so
///                  cov = points * W * points^T directly.
///
/// w0^m is negative whenever 3 alpha^2 < N; that is by design and the
/// covariance reconstruction stays PSD for affine transforms regardless.
struct UTWeights {
  int n = 0;
  double lambda = 0.0;
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd cov_weights;
  Eigen::MatrixXd cov_weight_matrix;

  int num_points() const { return 2 * n + 1; }

  /// Scale applied to covariance-root columns: sqrt(N + lambda) = sqrt(3)*alpha.
  double scale() const { return std::sqrt(static_cast<double>(n) + lambda); }
};

/// 2N+1 sigma points stored column-wise; column 0 is the generating mean.
struct SigmaSet {
  Eigen::MatrixXd points;  // N x (2N+1)

  int dim() const { return static_cast<int>(points.rows()); }
  int count() const { return static_cast<int>(points.cols()); }
};

/// Mean/covariance pair produced by reconstruction.
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline UTWeights compute_weights(int n, const UTConfig& config) {
  if (n < 1) {
    throw DimensionMismatchError("sigma weights need dimension >= 1, got " +
                                 std::to_string(n));
  }
  if (!config.valid()) {
    throw ConfigError("alpha must lie in [1e-4, 1], got " +
                      std::to_string(config.alpha));
  }

  UTWeights w;
  w.n = n;
  w.lambda = 3.0 * config.alpha * config.alpha - static_cast<double>(n);

  const double denom = static_cast<double>(n) + w.lambda;  // = 3 alpha^2 > 0
  const int count = 2 * n + 1;
  w.mean_weights = Eigen::VectorXd::Constant(count, 1.0 / (2.0 * denom));
  w.mean_weights(0) = w.lambda / denom;
  w.cov_weights = w.mean_weights;
  w.cov_weights(0) += 3.0 - config.alpha * config.alpha;

  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(count, count) -
      w.mean_weights * Eigen::RowVectorXd::Ones(count);
  w.cov_weight_matrix =
      centering * w.cov_weights.asDiagonal() * centering.transpose();
  return w;
}

/// Lower-triangular S with S S^T ~= p via Cholesky. Requires symmetry within
/// 1e-9 * (1 + max |p_ij|). Semi-definite or slightly indefinite inputs get a
/// diagonal jitter retry: eps starts at 1e-12 and doubles, at most 10 retries,
/// after which NotPsdError is thrown. The exact zero matrix is its own factor
/// and is returned without engaging the jitter path.
inline Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols()) {
    throw DimensionMismatchError("matrix square root needs a square input");
  }
  if (p.size() == 0) return Eigen::MatrixXd(0, 0);

  const double magnitude = p.cwiseAbs().maxCoeff();
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + magnitude)) {
    throw NotPsdError("matrix is not symmetric");
  }
  if (magnitude == 0.0) return Eigen::MatrixXd::Zero(p.rows(), p.cols());

  Eigen::MatrixXd sym = 0.5 * (p + p.transpose());
  double eps = 1e-12;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    const Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
    sym.diagonal().array() += eps;
    eps *= 2.0;
  }
  throw NotPsdError("Cholesky failed after jitter retries");
}

/// Sigma points: column 0 = mean, columns 1..N = mean + scale * root column,
/// columns N+1..2N = mean - scale * root column, root from matrix_sqrt_psd.
inline SigmaSet compute_sigma_points(const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& cov,
                                     const UTWeights& weights) {
  const int n = weights.n;
  if (mean.size() != n || cov.rows() != n || cov.cols() != n) {
    throw DimensionMismatchError(
        "sigma point generation: mean/cov size does not match weights");
  }
  const Eigen::MatrixXd root = matrix_sqrt_psd(cov);
  const double scale = weights.scale();

  SigmaSet sigma;
  sigma.points.resize(n, 2 * n + 1);
  sigma.points.col(0) = mean;
  for (int i = 0; i < n; ++i) {
    sigma.points.col(1 + i) = mean + scale * root.col(i);
    sigma.points.col(1 + n + i) = mean - scale * root.col(i);
  }
  return sigma;
}

/// Weighted mean and covariance of a (possibly transformed) sigma set.
///
/// The covariance is evaluated in centered form,
///   C = (X - mean 1^T) diag(cov_weights) (X - mean 1^T)^T,
/// which is algebraically identical to X * cov_weight_matrix * X^T (the
/// centering factors of the dense W reproduce exactly this) but never forms
/// the large uncentered products, so it loses far less precision when the
/// mean dominates the spread. The result is symmetrized.
inline Moments reconstruct_statistics(const SigmaSet& sigma,
                                      const UTWeights& weights) {
  const int count = weights.num_points();
  if (sigma.count() != count) {
    throw DimensionMismatchError(
        "reconstruction: sigma point count does not match weights");
  }
  Moments out;
  out.mean = sigma.points * weights.mean_weights;
  const Eigen::MatrixXd centered = sigma.points.colwise() - out.mean;
  out.cov = centered * weights.cov_weights.asDiagonal() * centered.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

/// Weighted cross-covariance between two aligned point sets (same weights),
/// e.g. state sigma points vs. their measurement images. Centered form as in
/// reconstruct_statistics.
inline Eigen::MatrixXd weighted_cross_covariance(const Eigen::MatrixXd& a,
                                                 const Eigen::VectorXd& a_mean,
                                                 const Eigen::MatrixXd& b,
                                                 const Eigen::VectorXd& b_mean,
                                                 const UTWeights& weights) {
  const int count = weights.num_points();
  if (a.cols() != count || b.cols() != count) {
    throw DimensionMismatchError(
        "cross covariance: point count does not match weights");
  }
  const Eigen::MatrixXd ca = a.colwise() - a_mean;
  const Eigen::MatrixXd cb = b.colwise() - b_mean;
  return ca * weights.cov_weights.asDiagonal() * cb.transpose();
}

}  // namespace motkit
