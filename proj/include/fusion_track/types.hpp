#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fusion_track/geometry.hpp"

// Record types shared between the tracking pipeline, the simulator, the
// evaluation tooling and the log IO.

namespace ftrack {

/// One detected object. x/y are meters in the frame the containing list
/// declares (sensor-local on the wire, global after transformation).
struct Detection {
  double x{0.0};
  double y{0.0};
  std::optional<double> yaw;  // rad
  std::optional<double> v;    // m/s

  Vec2 position() const { return {x, y}; }
};

/// One sensor frame: the object list L_i with its detection timestamp T_i.
/// t_delivery is when the frame reached the tracker (t + perception delay).
struct DetectionFrame {
  std::string sensor_id;
  double t{0.0};           // sensor detection timestamp, s
  double t_delivery{0.0};  // receipt timestamp, s (== t when undelayed)
  std::int64_t seq{0};
  std::vector<Detection> objects;
};

struct TrackSnapshot {
  std::uint64_t uid{0};
  double x{0.0};
  double y{0.0};
  double yaw{0.0};
  double v{0.0};
  double yaw_rate{0.0};
  double a{0.0};
  std::vector<double> cov_diag;
};

/// Published output of one tracking cycle: confirmed tracks synchronized to
/// the cycle's ego timestamp.
struct TrackedObjectList {
  double t_out{0.0};
  std::vector<TrackSnapshot> tracks;
};

/// One measurement residual, decomposed in the track-heading frame
/// (lon = along the estimated heading, lat = across).
struct ResidualRecord {
  std::uint64_t uid{0};
  std::string sensor_id;
  double t{0.0};    // measurement timestamp
  double age{0.0};  // s since track creation
  std::optional<double> lon;
  std::optional<double> lat;
  std::optional<double> yaw;  // rad, wrapped
  std::optional<double> v;
};

struct TruthAgent {
  int id{0};
  double x{0.0};
  double y{0.0};
  double yaw{0.0};
  double v{0.0};
  double yaw_rate{0.0};
};

struct TruthFrame {
  double t{0.0};
  std::vector<TruthAgent> agents;
};

}  // namespace ftrack
