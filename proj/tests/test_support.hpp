#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fusion_track/geometry.hpp"

// Shared fixtures and independent oracles for the test suites. Everything in
// here is deliberately simple and kept apart from the library
// implementations it checks.

namespace ftest {

using ftrack::Vec2;

// Circular ring map: outer radius 50, inner radius 20, centerline radius 35,
// traversed counterclockwise.
inline ftrack::TrackMap make_ring_map(int n = 128) {
  std::vector<Vec2> inner, outer, center;
  std::vector<double> headings;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * ftrack::kPi * i / n;
    inner.emplace_back(20.0 * std::cos(a), 20.0 * std::sin(a));
    outer.emplace_back(50.0 * std::cos(a), 50.0 * std::sin(a));
    center.emplace_back(35.0 * std::cos(a), 35.0 * std::sin(a));
    // CCW tangent is (-sin a, cos a); with psi measured from +y that is
    // atan2(sin a, cos a) = a.
    headings.push_back(ftrack::wrap_angle(a));
  }
  inner.push_back(inner.front());
  outer.push_back(outer.front());
  center.push_back(center.front());
  headings.push_back(headings.front());
  return ftrack::TrackMap(inner, outer, center, headings);
}

// Oracle: distance from p to a polyline by dense sampling of its segments.
inline double sampled_boundary_distance(const std::vector<Vec2>& poly, const Vec2& p,
                                        int samples_per_segment = 400) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    for (int k = 0; k <= samples_per_segment; ++k) {
      const double t = static_cast<double>(k) / samples_per_segment;
      best = std::min(best, (p - (poly[i] + t * (poly[i + 1] - poly[i]))).norm());
    }
  }
  return best;
}

}  // namespace ftest
