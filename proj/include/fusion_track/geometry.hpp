#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fusion_track/angles.hpp"

// Coordinate frames, track-map queries, ego smoothing and the out-of-track
// plausibility filter.
//
// Heading convention used throughout: psi is measured counterclockwise from
// the +y axis, so a body with heading psi moves along (-sin psi, +cos psi).

namespace ftrack {

using Vec2 = Eigen::Vector2d;

struct Pose2D {
  double x{0.0};
  double y{0.0};
  double psi{0.0};  // [-pi, pi)
};

/// Dynamic state of the ego vehicle as received from localization.
struct EgoState {
  double t{0.0};        // s
  double x{0.0};        // m
  double y{0.0};        // m
  double psi{0.0};      // rad, [-pi, pi)
  double v{0.0};        // m/s, >= 0
  double psi_dot{0.0};  // rad/s
};

struct MapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Aabb {
  double min_x{std::numeric_limits<double>::infinity()};
  double min_y{std::numeric_limits<double>::infinity()};
  double max_x{-std::numeric_limits<double>::infinity()};
  double max_y{-std::numeric_limits<double>::infinity()};

  void grow(const Vec2& p) {
    min_x = std::min(min_x, p.x());
    min_y = std::min(min_y, p.y());
    max_x = std::max(max_x, p.x());
    max_y = std::max(max_y, p.y());
  }
  bool contains(const Vec2& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
  }
  // Distance from p to the box (0 if inside).
  double distance(const Vec2& p) const {
    double dx = std::max({min_x - p.x(), 0.0, p.x() - max_x});
    double dy = std::max({min_y - p.y(), 0.0, p.y() - max_y});
    return std::hypot(dx, dy);
  }
};

// Even-odd ray cast. The polyline is closed (first vertex repeated at the
// end); the duplicate edge has zero length and contributes nothing.
inline bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      double x_cross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline double distance_to_polyline(const std::vector<Vec2>& poly, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[i + 1]));
  }
  return best;
}

inline std::size_t count_distinct(const std::vector<Vec2>& poly) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      if ((poly[i] - poly[j]).norm() < 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) ++n;
  }
  return n;
}

}  // namespace detail

/// Race-track map: closed inner/outer boundary polylines plus a centerline
/// with per-vertex headings. Immutable after construction; all queries are
/// const and safe to call concurrently.
class TrackMap {
 public:
  /// Builds a map from closed polylines. Centerline headings are computed
  /// from forward differences when not supplied. Throws MapError if any
  /// invariant fails (open polyline, too few vertices, centerline not
  /// strictly between the boundaries).
  TrackMap(std::vector<Vec2> inner, std::vector<Vec2> outer,
           std::vector<Vec2> center, std::vector<double> center_headings = {})
      : inner_(std::move(inner)), outer_(std::move(outer)), center_(std::move(center)),
        center_psi_(std::move(center_headings)) {
    validate_polyline(inner_, "inner");
    validate_polyline(outer_, "outer");
    validate_polyline(center_, "center");
    if (center_psi_.empty()) {
      center_psi_ = headings_from_differences(center_);
    } else if (center_psi_.size() != center_.size()) {
      throw MapError("centerline headings size mismatch");
    }
    for (double& h : center_psi_) {
      if (!std::isfinite(h)) throw MapError("non-finite centerline heading");
      h = wrap_angle(h);
    }
    for (const Vec2& v : inner_) inner_box_.grow(v);
    for (const Vec2& v : outer_) outer_box_.grow(v);
    for (const Vec2& v : center_) {
      if (!is_inside(v, 0.0, 0.0))
        throw MapError("centerline vertex outside the drivable annulus");
    }
  }

  const std::vector<Vec2>& inner_boundary() const { return inner_; }
  const std::vector<Vec2>& outer_boundary() const { return outer_; }
  const std::vector<Vec2>& centerline() const { return center_; }
  const std::vector<double>& centerline_headings() const { return center_psi_; }

  /// True iff p lies in the annulus between the boundaries, at least
  /// buffer_out inside the outer boundary and buffer_in outside the inner.
  bool is_inside(const Vec2& p, double buffer_out, double buffer_in) const {
    if (!outer_box_.contains(p)) return false;
    if (!detail::point_in_polygon(outer_, p)) return false;
    if (buffer_out > 0.0 && detail::distance_to_polyline(outer_, p) < buffer_out)
      return false;
    if (inner_box_.distance(p) <= buffer_in) {
      if (detail::point_in_polygon(inner_, p)) return false;
      if (buffer_in > 0.0 && detail::distance_to_polyline(inner_, p) < buffer_in)
        return false;
    }
    return true;
  }

  /// Heading of the centerline vertex nearest to p (Euclidean).
  /// Ties resolve to the lower vertex index.
  double heading_at(const Vec2& p) const {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < center_.size(); ++i) {
      double d2 = (center_[i] - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return center_psi_[best];
  }

 private:
  static void validate_polyline(const std::vector<Vec2>& poly, const std::string& name) {
    if (poly.size() < 5)  // >= 4 distinct vertices plus the closing duplicate
      throw MapError("polyline '" + name + "' has too few vertices");
    for (const Vec2& v : poly) {
      if (!v.allFinite()) throw MapError("polyline '" + name + "' has non-finite vertex");
    }
    if ((poly.front() - poly.back()).norm() > 1e-9)
      throw MapError("polyline '" + name + "' is not closed");
    if (detail::count_distinct(poly) < 4)
      throw MapError("polyline '" + name + "' has fewer than 4 distinct vertices");
  }

  // Heading of the segment leaving each vertex; the closing duplicate vertex
  // reuses the first heading.
  static std::vector<double> headings_from_differences(const std::vector<Vec2>& poly) {
    std::vector<double> psi(poly.size());
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      const Vec2 d = poly[i + 1] - poly[i];
      psi[i] = wrap_angle(std::atan2(-d.x(), d.y()));
    }
    psi.back() = psi.front();
    return psi;
  }

  std::vector<Vec2> inner_, outer_, center_;
  std::vector<double> center_psi_;
  detail::Aabb inner_box_, outer_box_;
};

/// Rotation matrix for the +y-forward heading convention (standard CCW).
inline Eigen::Matrix2d heading_rotation(double psi) {
  Eigen::Matrix2d r;
  r << std::cos(psi), -std::sin(psi), std::sin(psi), std::cos(psi);
  return r;
}

inline Vec2 local_to_global_point(const Vec2& p_local, const EgoState& ego) {
  return heading_rotation(ego.psi) * p_local + Vec2(ego.x, ego.y);
}

inline Vec2 global_to_local_point(const Vec2& p_global, const EgoState& ego) {
  return heading_rotation(-ego.psi) * (p_global - Vec2(ego.x, ego.y));
}

/// Rigid-body transform of a pose from the ego-local frame to the global
/// frame. Speed-like features are frame-independent and unaffected.
inline Pose2D local_to_global(const Pose2D& local, const EgoState& ego) {
  const Vec2 p = local_to_global_point(Vec2(local.x, local.y), ego);
  return {p.x(), p.y(), wrap_angle(local.psi + ego.psi)};
}

inline Pose2D global_to_local(const Pose2D& global, const EgoState& ego) {
  const Vec2 p = global_to_local_point(Vec2(global.x, global.y), ego);
  return {p.x(), p.y(), wrap_angle(global.psi - ego.psi)};
}

/// First-order exponential smoothing of the ego state, y = a*x + (1-a)*y_prev.
/// The heading is smoothed on the circle via its sin/cos pair. alpha must be
/// in (0, 1]; alpha = 1 disables the filter. Timestamp is taken from raw.
inline EgoState lowpass_ego(const EgoState& prev_filtered, const EgoState& raw,
                            double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("lowpass alpha must be in (0, 1]");
  EgoState out;
  out.t = raw.t;
  out.x = alpha * raw.x + (1.0 - alpha) * prev_filtered.x;
  out.y = alpha * raw.y + (1.0 - alpha) * prev_filtered.y;
  out.v = alpha * raw.v + (1.0 - alpha) * prev_filtered.v;
  out.psi_dot = alpha * raw.psi_dot + (1.0 - alpha) * prev_filtered.psi_dot;
  const double s = alpha * std::sin(raw.psi) + (1.0 - alpha) * std::sin(prev_filtered.psi);
  const double c = alpha * std::cos(raw.psi) + (1.0 - alpha) * std::cos(prev_filtered.psi);
  out.psi = (s == 0.0 && c == 0.0) ? prev_filtered.psi : wrap_angle(std::atan2(s, c));
  return out;
}

}  // namespace ftrack
