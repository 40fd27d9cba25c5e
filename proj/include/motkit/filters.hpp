#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

#include "motkit/errors.hpp"
#include "motkit/ut.hpp"

namespace motkit {

// ============================================================================
// State-space types
// ============================================================================

/// Gaussian belief over the state vector.
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Additive process / measurement noise covariances (Q, R).
struct NoiseModel {
  Eigen::MatrixXd process_cov;
  Eigen::MatrixXd measurement_cov;
};

/// Transition f and measurement h as callables, with the linear forms F and H
/// carried alongside when they exist. The Kalman ops require the matrices and
/// throw MissingLinearFormError otherwise; the unscented ops only call f/h.
struct SystemModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
  std::optional<Eigen::MatrixXd> transition;   // F
  std::optional<Eigen::MatrixXd> measurement;  // H

  /// Wraps plain matrices as a fully linear model (f = F x, h = H x).
  static SystemModel linear(Eigen::MatrixXd F, Eigen::MatrixXd H) {
    SystemModel m;
    m.transition = std::move(F);
    m.measurement = std::move(H);
    m.f = [mat = *m.transition](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(mat * x);
    };
    m.h = [mat = *m.measurement](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(mat * x);
    };
    return m;
  }
};

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Throws SingularInnovationError when the (symmetric) innovation covariance
/// has eigenvalue condition estimate above 1e12, or is exactly singular.
inline void require_invertible_innovation(const Eigen::MatrixXd& s) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      symmetrized(s), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mags = solver.eigenvalues().cwiseAbs();
  const double lo = mags.minCoeff();
  const double hi = mags.maxCoeff();
  if (lo == 0.0 || hi > 1e12 * lo) {
    throw SingularInnovationError(
        "innovation covariance is singular or too ill-conditioned");
  }
}

// ============================================================================
// Linear Kalman filter
// ============================================================================

inline GaussianState kf_predict(const GaussianState& state,
                                const SystemModel& model,
                                const NoiseModel& noise) {
  if (!model.transition) {
    throw MissingLinearFormError("kf_predict needs the transition matrix");
  }
  const Eigen::MatrixXd& F = *model.transition;
  if (F.cols() != state.dim()) {
    throw DimensionMismatchError("kf_predict: state/transition size mismatch");
  }
  GaussianState out;
  out.mean = F * state.mean;
  out.cov = symmetrized(F * state.cov * F.transpose() + noise.process_cov);
  return out;
}

inline GaussianState kf_update(const GaussianState& state,
                               const SystemModel& model,
                               const NoiseModel& noise,
                               const Eigen::VectorXd& measurement) {
  if (!model.measurement) {
    throw MissingLinearFormError("kf_update needs the measurement matrix");
  }
  const Eigen::MatrixXd& H = *model.measurement;
  if (H.cols() != state.dim() || H.rows() != measurement.size()) {
    throw DimensionMismatchError("kf_update: measurement size mismatch");
  }
  const Eigen::MatrixXd s =
      symmetrized(H * state.cov * H.transpose() + noise.measurement_cov);
  require_invertible_innovation(s);
  // K = P H^T S^{-1}, via the SPD solve on the transposed system.
  const Eigen::MatrixXd gain =
      s.ldlt().solve(H * state.cov.transpose()).transpose();

  GaussianState out;
  out.mean = state.mean + gain * (measurement - H * state.mean);
  out.cov = symmetrized(state.cov - gain * s * gain.transpose());
  return out;
}

// ============================================================================
// Unscented Kalman filter
// ============================================================================

/// Measurement-side quantities of one unscented update, exposed separately so
/// callers can edit the gain before applying it (the tracker zeroes gain
/// blocks for occluded objects).
struct UkfInnovationTerms {
  Eigen::MatrixXd measurement_points;      // h images of the redrawn sigma set
  Eigen::VectorXd predicted_measurement;   // weighted mean of those images
  Eigen::MatrixXd innovation_cov;          // S = Y W Y^T + R
  Eigen::MatrixXd cross_cov;               // P_xy = X W Y^T
};

/// Time update: push sigma points of the prior through f, refit, add Q.
inline GaussianState ukf_predict(const GaussianState& state,
                                 const SystemModel& model,
                                 const NoiseModel& noise,
                                 const UTWeights& weights) {
  const SigmaSet sigma = compute_sigma_points(state.mean, state.cov, weights);
  SigmaSet propagated;
  propagated.points.resize(state.dim(), sigma.count());
  for (int i = 0; i < sigma.count(); ++i) {
    propagated.points.col(i) = model.f(sigma.points.col(i));
  }
  Moments m = reconstruct_statistics(propagated, weights);
  GaussianState out;
  out.mean = std::move(m.mean);
  out.cov = symmetrized(m.cov + noise.process_cov);
  return out;
}

/// Measurement-side statistics for a predicted belief. Sigma points are drawn
/// fresh from the predicted distribution (not reused from the time update) so
/// the process noise added after propagation is represented in the spread.
inline UkfInnovationTerms ukf_innovation(const GaussianState& predicted,
                                         const SystemModel& model,
                                         const NoiseModel& noise,
                                         const UTWeights& weights) {
  const SigmaSet sigma =
      compute_sigma_points(predicted.mean, predicted.cov, weights);
  const int mdim = static_cast<int>(model.h(predicted.mean).size());

  UkfInnovationTerms terms;
  terms.measurement_points.resize(mdim, sigma.count());
  for (int i = 0; i < sigma.count(); ++i) {
    terms.measurement_points.col(i) = model.h(sigma.points.col(i));
  }
  SigmaSet msig;
  msig.points = terms.measurement_points;
  Moments mm = reconstruct_statistics(msig, weights);
  terms.predicted_measurement = std::move(mm.mean);
  terms.innovation_cov = symmetrized(mm.cov + noise.measurement_cov);
  terms.cross_cov = weighted_cross_covariance(
      sigma.points, predicted.mean, terms.measurement_points,
      terms.predicted_measurement, weights);
  return terms;
}

/// Applies a (possibly caller-edited) gain to a predicted belief.
inline GaussianState apply_gain(const GaussianState& predicted,
                                const UkfInnovationTerms& terms,
                                const Eigen::MatrixXd& gain,
                                const Eigen::VectorXd& measurement) {
  GaussianState out;
  out.mean = predicted.mean +
             gain * (measurement - terms.predicted_measurement);
  out.cov = symmetrized(predicted.cov -
                        gain * terms.innovation_cov * gain.transpose());
  return out;
}

/// Measurement update from a predicted belief.
inline GaussianState ukf_update(const GaussianState& predicted,
                                const SystemModel& model,
                                const NoiseModel& noise,
                                const UTWeights& weights,
                                const Eigen::VectorXd& measurement) {
  const UkfInnovationTerms terms =
      ukf_innovation(predicted, model, noise, weights);
  if (terms.predicted_measurement.size() != measurement.size()) {
    throw DimensionMismatchError("ukf_update: measurement size mismatch");
  }
  require_invertible_innovation(terms.innovation_cov);
  const Eigen::MatrixXd gain =
      terms.innovation_cov.ldlt().solve(terms.cross_cov.transpose())
          .transpose();
  return apply_gain(predicted, terms, gain, measurement);
}

/// One full predict + update cycle.
inline GaussianState ukf_step(const GaussianState& state,
                              const SystemModel& model,
                              const NoiseModel& noise,
                              const UTWeights& weights,
                              const Eigen::VectorXd& measurement) {
  return ukf_update(ukf_predict(state, model, noise, weights), model, noise,
                    weights, measurement);
}

}  // namespace motkit
