#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fusion_track/angles.hpp"

// Kinematic point-mass models for the filter: CTRV (default) plus CV and
// CTRA baselines, with analytic transition Jacobians. State layout:
//   (x, y, psi, v, psi_dot[, a])   -- a only for CTRA.
// All three share the +y-forward heading convention:
//   x' = -v sin psi,  y' = +v cos psi.

namespace ftrack {

enum class ModelKind { kCtrv, kCv, kCtra };

inline int state_dim(ModelKind m) { return m == ModelKind::kCtra ? 6 : 5; }

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kCtrv: return "CTRV";
    case ModelKind::kCv: return "CV";
    case ModelKind::kCtra: return "CTRA";
  }
  return "?";
}

inline ModelKind model_from_string(const std::string& s) {
  if (s == "CTRV" || s == "ctrv") return ModelKind::kCtrv;
  if (s == "CV" || s == "cv") return ModelKind::kCv;
  if (s == "CTRA" || s == "ctra") return ModelKind::kCtra;
  throw std::invalid_argument("unknown motion model: " + s);
}

struct KinematicState {
  double x{0.0};        // m
  double y{0.0};        // m
  double psi{0.0};      // rad, [-pi, pi)
  double v{0.0};        // m/s
  double psi_dot{0.0};  // rad/s
  double a{0.0};        // m/s^2, CTRA only

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(psi) &&
           std::isfinite(v) && std::isfinite(psi_dot) && std::isfinite(a);
  }
};

inline Eigen::VectorXd state_to_vector(const KinematicState& s, ModelKind m) {
  Eigen::VectorXd v(state_dim(m));
  v(0) = s.x;
  v(1) = s.y;
  v(2) = s.psi;
  v(3) = s.v;
  v(4) = s.psi_dot;
  if (m == ModelKind::kCtra) v(5) = s.a;
  return v;
}

inline KinematicState vector_to_state(const Eigen::VectorXd& v, ModelKind m) {
  KinematicState s;
  s.x = v(0);
  s.y = v(1);
  s.psi = v(2);
  s.v = v(3);
  s.psi_dot = v(4);
  s.a = (m == ModelKind::kCtra) ? v(5) : 0.0;
  return s;
}

/// Single Euler step of the selected model. Position uses the pre-update
/// heading (and pre-update speed for CTRA); the heading is re-wrapped.
inline KinematicState propagate(const KinematicState& s, double dt, ModelKind model) {
  if (!s.finite() || !std::isfinite(dt))
    throw std::domain_error("propagate: non-finite state or dt");
  if (dt < 0.0) throw std::domain_error("propagate: negative dt");
  KinematicState out = s;
  out.x = s.x - s.v * dt * std::sin(s.psi);
  out.y = s.y + s.v * dt * std::cos(s.psi);
  switch (model) {
    case ModelKind::kCtrv:
      out.psi = wrap_angle(s.psi + dt * s.psi_dot);
      break;
    case ModelKind::kCv:
      out.psi = wrap_angle(s.psi);  // turn rate ignored
      break;
    case ModelKind::kCtra:
      out.psi = wrap_angle(s.psi + dt * s.psi_dot);
      out.v = s.v + dt * s.a;
      break;
  }
  return out;
}

/// Analytic Jacobian dF/dx of propagate at (s, dt).
inline Eigen::MatrixXd transition_jacobian(const KinematicState& s, double dt,
                                           ModelKind model) {
  if (!s.finite() || !std::isfinite(dt))
    throw std::domain_error("transition_jacobian: non-finite state or dt");
  if (dt < 0.0) throw std::domain_error("transition_jacobian: negative dt");
  const int n = state_dim(model);
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  const double sp = std::sin(s.psi);
  const double cp = std::cos(s.psi);
  f(0, 2) = -s.v * dt * cp;  // dx/dpsi
  f(0, 3) = -dt * sp;        // dx/dv
  f(1, 2) = -s.v * dt * sp;  // dy/dpsi
  f(1, 3) = dt * cp;         // dy/dv
  if (model != ModelKind::kCv) f(2, 4) = dt;  // dpsi/dpsi_dot
  if (model == ModelKind::kCtra) f(3, 5) = dt;  // dv/da
  return f;
}

// ---------------------------------------------------------------------------
// Observation model: each sensor measures an ordered subset of the state.

enum class Feature { kX, kY, kYaw, kV };

inline int feature_index(Feature f) {
  switch (f) {
    case Feature::kX: return 0;
    case Feature::kY: return 1;
    case Feature::kYaw: return 2;
    case Feature::kV: return 3;
  }
  return -1;
}

inline Feature feature_from_string(const std::string& s) {
  if (s == "x") return Feature::kX;
  if (s == "y") return Feature::kY;
  if (s == "yaw") return Feature::kYaw;
  if (s == "v") return Feature::kV;
  throw std::invalid_argument("unknown measurement feature: " + s);
}

inline std::string to_string(Feature f) {
  switch (f) {
    case Feature::kX: return "x";
    case Feature::kY: return "y";
    case Feature::kYaw: return "yaw";
    case Feature::kV: return "v";
  }
  return "?";
}

/// h(x): selects the named state components in order.
inline Eigen::VectorXd observe(const KinematicState& s, std::span<const Feature> features) {
  Eigen::VectorXd z(static_cast<int>(features.size()));
  for (int i = 0; i < static_cast<int>(features.size()); ++i) {
    switch (features[i]) {
      case Feature::kX: z(i) = s.x; break;
      case Feature::kY: z(i) = s.y; break;
      case Feature::kYaw: z(i) = s.psi; break;
      case Feature::kV: z(i) = s.v; break;
    }
  }
  return z;
}

/// H: the selector matrix corresponding to observe().
inline Eigen::MatrixXd selector_matrix(std::span<const Feature> features, ModelKind model) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<int>(features.size()),
                                            state_dim(model));
  for (int i = 0; i < static_cast<int>(features.size()); ++i)
    h(i, feature_index(features[i])) = 1.0;
  return h;
}

}  // namespace ftrack
