#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fusion_track/geometry.hpp"
#include "fusion_track/motion.hpp"

// EKF predict/update plus the track-state initialization heuristics
// (centerline yaw prior, ego-speed factor k_v).

namespace ftrack {

struct FilterHealthError : std::runtime_error {
  FilterHealthError(const std::string& what, double eigenvalue)
      : std::runtime_error(what + " (eigenvalue " + std::to_string(eigenvalue) + ")"),
        offending_eigenvalue(eigenvalue) {}
  double offending_eigenvalue;
};

/// State estimate: mean plus covariance sized by the motion model.
struct Gaussian {
  KinematicState mean;
  Eigen::MatrixXd cov;
};

namespace detail {

constexpr double kPsdTolerance = 1e-9;

inline void symmetrize(Eigen::MatrixXd& p) {
  p = 0.5 * (p + p.transpose()).eval();
}

// Fast witness check: a negative diagonal entry bounds the smallest
// eigenvalue. Only on failure is the full (slower) eigensolve run so the
// error can name the eigenvalue.
inline void check_psd(const Eigen::MatrixXd& p, const char* where) {
  if (p.diagonal().minCoeff() >= -kPsdTolerance) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
  throw FilterHealthError(std::string(where) + ": covariance not PSD",
                          es.eigenvalues().minCoeff());
}

}  // namespace detail

/// Prediction step: mean through the motion model, covariance through
/// F P F^T + Q. Q is the process noise for exactly this step (the caller
/// scales it to dt). Symmetry is re-enforced.
inline Gaussian predict(const Gaussian& g, double dt, ModelKind model,
                        const Eigen::MatrixXd& q) {
  Gaussian out;
  out.mean = propagate(g.mean, dt, model);
  const Eigen::MatrixXd f = transition_jacobian(g.mean, dt, model);
  out.cov = f * g.cov * f.transpose() + q;
  detail::symmetrize(out.cov);
  detail::check_psd(out.cov, "predict");
  return out;
}

struct UpdateResult {
  Gaussian posterior;
  Eigen::VectorXd residual;   // pre-update innovation, yaw rows wrapped
  Eigen::MatrixXd innovation_cov;  // S = H P H^T + R
  bool accepted{true};        // false: S ill-conditioned, prior kept
};

/// Measurement update with a selector observation model. Yaw components of
/// the residual are wrapped before the gain is applied and the posterior
/// heading is re-wrapped. If S is ill-conditioned (cond > 1e12) the update
/// is rejected and the prior kept.
inline UpdateResult update(const Gaussian& g, const Eigen::VectorXd& z,
                           std::span<const Feature> features,
                           const Eigen::MatrixXd& r, ModelKind model) {
  const int m = static_cast<int>(features.size());
  if (z.size() != m || r.rows() != m || r.cols() != m)
    throw std::invalid_argument("update: measurement/feature/noise size mismatch");

  UpdateResult res;
  const Eigen::MatrixXd h = selector_matrix(features, model);
  res.residual = z - observe(g.mean, features);
  for (int i = 0; i < m; ++i)
    if (features[i] == Feature::kYaw) res.residual(i) = wrap_angle(res.residual(i));
  res.innovation_cov = h * g.cov * h.transpose() + r;
  detail::symmetrize(res.innovation_cov);

  if (m > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.innovation_cov);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12) {
      res.posterior = g;
      res.accepted = false;
      return res;
    }
  }

  const Eigen::MatrixXd k =
      res.innovation_cov.ldlt().solve(h * g.cov).transpose();  // P H^T S^-1
  Eigen::VectorXd mean = state_to_vector(g.mean, model) + k * res.residual;
  res.posterior.mean = vector_to_state(mean, model);
  res.posterior.mean.psi = wrap_angle(res.posterior.mean.psi);
  const int n = state_dim(model);
  res.posterior.cov = (Eigen::MatrixXd::Identity(n, n) - k * h) * g.cov;
  detail::symmetrize(res.posterior.cov);
  detail::check_psd(res.posterior.cov, "update");
  return res;
}

/// Per-state initial/process standard deviations (SI units, radians).
struct StateStd {
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double v{0.0};
  double psi_dot{0.0};
  double a{0.0};

  Eigen::MatrixXd covariance(ModelKind model, double scale = 1.0) const {
    const int n = state_dim(model);
    Eigen::VectorXd d(n);
    d(0) = x;
    d(1) = y;
    d(2) = psi;
    d(3) = v;
    d(4) = psi_dot;
    if (n > 5) d(5) = a;
    return Eigen::MatrixXd((scale * d.array().square()).matrix().asDiagonal());
  }
};

struct InitPolicy {
  double k_v{0.8};     // ego-speed factor for the initial speed guess
  StateStd init_std;   // initial state standard deviations
};

/// Initial track state from a global-frame detection. Yaw comes from the
/// detection only when the sensor measures it directly, otherwise from the
/// track centerline; speed falls back to k_v times the ego speed.
inline Gaussian init_track_state(const Vec2& position, std::optional<double> measured_yaw,
                                 std::optional<double> measured_speed,
                                 const EgoState& ego, const TrackMap& map,
                                 const InitPolicy& policy, ModelKind model) {
  Gaussian g;
  g.mean.x = position.x();
  g.mean.y = position.y();
  g.mean.psi = measured_yaw ? wrap_angle(*measured_yaw) : map.heading_at(position);
  g.mean.v = measured_speed ? *measured_speed : policy.k_v * ego.v;
  g.mean.psi_dot = 0.0;
  g.mean.a = 0.0;
  g.cov = policy.init_std.covariance(model);
  return g;
}

/// Centerline heading packaged as a yaw observation for sensors that do not
/// measure heading.
struct PseudoYaw {
  double psi;
  double std;
};

inline PseudoYaw pseudo_yaw_measurement(const Vec2& position, const TrackMap& map,
                                        double yaw_std) {
  return {map.heading_at(position), yaw_std};
}

}  // namespace ftrack
