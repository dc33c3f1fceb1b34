#include "fusion_track/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace ftrack;

TEST(Angles, WrapRange) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), -kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), -kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-12);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> big(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(big(rng));
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
  }
}

TEST(Transform, IdentityRotation) {
  EgoState ego;
  ego.x = 10.0;
  ego.y = 20.0;
  ego.psi = 0.0;
  const Pose2D out = local_to_global({0.0, 0.0, 0.0}, ego);
  EXPECT_DOUBLE_EQ(out.x, 10.0);
  EXPECT_DOUBLE_EQ(out.y, 20.0);
  EXPECT_DOUBLE_EQ(out.psi, 0.0);
}

// A detection 5 m ahead along the ego's +y axis with the ego heading pi/2
// lands at (-5, 0): heading is measured from +y, so pi/2 points along -x.
TEST(Transform, QuarterTurnAhead) {
  EgoState ego;
  ego.psi = kPi / 2.0;
  const Pose2D out = local_to_global({0.0, 5.0, 0.0}, ego);
  EXPECT_NEAR(out.x, -5.0, 1e-12);
  EXPECT_NEAR(out.y, 0.0, 1e-12);
  EXPECT_NEAR(out.psi, kPi / 2.0, 1e-12);
  const Pose2D back = global_to_local(out, ego);
  EXPECT_NEAR(back.x, 0.0, 1e-12);
  EXPECT_NEAR(back.y, 5.0, 1e-12);
  EXPECT_NEAR(back.psi, 0.0, 1e-12);
}

TEST(Transform, RoundTripProperty) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> pos(-500.0, 500.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    Pose2D d{pos(rng), pos(rng), wrap_angle(ang(rng))};
    EgoState e;
    e.x = pos(rng);
    e.y = pos(rng);
    e.psi = wrap_angle(ang(rng));
    const Pose2D rt = global_to_local(local_to_global(d, e), e);
    EXPECT_NEAR(rt.x, d.x, 1e-9);
    EXPECT_NEAR(rt.y, d.y, 1e-9);
    EXPECT_NEAR(wrap_angle(rt.psi - d.psi), 0.0, 1e-12);
  }
}

TEST(Lowpass, AlphaOneIsIdentity) {
  EgoState prev;
  EgoState raw;
  raw.t = 1.0;
  raw.x = 3.0;
  raw.y = -2.0;
  raw.psi = 0.7;
  raw.v = 55.0;
  raw.psi_dot = 0.1;
  const EgoState out = lowpass_ego(prev, raw, 1.0);
  EXPECT_DOUBLE_EQ(out.x, raw.x);
  EXPECT_DOUBLE_EQ(out.y, raw.y);
  EXPECT_DOUBLE_EQ(out.psi, raw.psi);
  EXPECT_DOUBLE_EQ(out.v, raw.v);
  EXPECT_DOUBLE_EQ(out.psi_dot, raw.psi_dot);
  EXPECT_DOUBLE_EQ(out.t, raw.t);
}

TEST(Lowpass, ConvergesToConstantInput) {
  EgoState filt;
  EgoState raw;
  raw.x = 10.0;
  raw.y = 4.0;
  raw.psi = -1.2;
  raw.v = 30.0;
  for (int k = 0; k < 200; ++k) {
    raw.t = 0.01 * k;
    filt = lowpass_ego(filt, raw, 0.3);
  }
  EXPECT_NEAR(filt.x, raw.x, 1e-9);
  EXPECT_NEAR(filt.psi, raw.psi, 1e-9);
  EXPECT_NEAR(filt.v, raw.v, 1e-9);
}

// Heading alternating near +-pi must stay near the boundary, never average
// through zero. Oracle: circular mean of the sin/cos pair.
TEST(Lowpass, CircularSmoothingNearPi) {
  EgoState filt;
  filt.psi = kPi - 0.01;
  EgoState raw;
  for (int k = 0; k < 100; ++k) {
    raw.t = 0.01 * k;
    raw.psi = (k % 2 == 0) ? kPi - 0.01 : -(kPi - 0.01);
    filt = lowpass_ego(filt, raw, 0.5);
    EXPECT_GT(std::abs(filt.psi), kPi - 0.1) << "heading collapsed toward 0 at k=" << k;
  }
}

TEST(Lowpass, RejectsBadAlpha) {
  EgoState a, b;
  EXPECT_THROW(lowpass_ego(a, b, 0.0), std::invalid_argument);
  EXPECT_THROW(lowpass_ego(a, b, 1.5), std::invalid_argument);
}

TEST(Lowpass, HeadingStaysWrapped) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  EgoState filt;
  EgoState raw;
  for (int k = 0; k < 500; ++k) {
    raw.t = 0.01 * k;
    raw.psi = ang(rng);
    filt = lowpass_ego(filt, raw, 0.4);
    EXPECT_GE(filt.psi, -kPi);
    EXPECT_LT(filt.psi, kPi);
  }
}

class RingMapTest : public ::testing::Test {
 protected:
  ftrack::TrackMap map_ = ftest::make_ring_map();
};

TEST_F(RingMapTest, CenterlineVerticesInside) {
  for (const Vec2& c : map_.centerline())
    EXPECT_TRUE(map_.is_inside(c, 0.3, 0.3));
}

TEST_F(RingMapTest, FarOutsideIsOutside) {
  EXPECT_FALSE(map_.is_inside({60.0, 0.0}, 0.3, 0.3));
  EXPECT_FALSE(map_.is_inside({0.0, 0.0}, 0.3, 0.3));  // inside the inner hole
  EXPECT_FALSE(map_.is_inside({200.0, 200.0}, 0.0, 0.0));
}

// Point 0.1 m inside the outer boundary fails a 0.3 m outer buffer.
// The oracle computes the boundary distance by dense sampling.
TEST_F(RingMapTest, OuterBufferRejectsNearWall) {
  // Polygonal outer boundary: measure against the polyline, not the circle.
  const Vec2 on_edge = 0.5 * (map_.outer_boundary()[0] + map_.outer_boundary()[1]);
  const Vec2 p = on_edge.normalized() * (on_edge.norm() - 0.1);
  const double d = ftest::sampled_boundary_distance(map_.outer_boundary(), p);
  ASSERT_NEAR(d, 0.1, 5e-3);
  EXPECT_FALSE(map_.is_inside(p, 0.3, 0.3));
  EXPECT_TRUE(map_.is_inside(p, 0.05, 0.3));
}

TEST_F(RingMapTest, BufferMonotonicity) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> r(15.0, 55.0);
  std::uniform_real_distribution<double> a(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> buf(0.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double rad = r(rng), ang = a(rng);
    const Vec2 p(rad * std::cos(ang), rad * std::sin(ang));
    const double b_out = buf(rng), b_in = buf(rng);
    const bool inside = map_.is_inside(p, b_out, b_in);
    if (!inside) {
      EXPECT_FALSE(map_.is_inside(p, b_out + 0.5, b_in));
      EXPECT_FALSE(map_.is_inside(p, b_out, b_in + 0.5));
    }
  }
}

TEST_F(RingMapTest, HeadingAtVertexIsStored) {
  for (std::size_t i = 0; i < map_.centerline().size() - 1; i += 17) {
    EXPECT_DOUBLE_EQ(map_.heading_at(map_.centerline()[i]),
                     map_.centerline_headings()[i]);
  }
}

TEST(TrackMapHeading, TieBreakLowerIndex) {
  // Diamond centerline: the origin is exactly equidistant (in floating
  // point) to all four vertices, so the lowest index must win.
  std::vector<Vec2> outer{{-20, -20}, {20, -20}, {20, 20}, {-20, 20}, {-20, -20}};
  std::vector<Vec2> inner{{14, 14}, {16, 14}, {16, 16}, {14, 16}, {14, 14}};
  std::vector<Vec2> center{{10, 0}, {0, 10}, {-10, 0}, {0, -10}, {10, 0}};
  const ftrack::TrackMap map(inner, outer, center);
  EXPECT_DOUBLE_EQ(map.heading_at({0.0, 0.0}), map.centerline_headings()[0]);
}

// Oracle: plain linear scan over vertices.
TEST_F(RingMapTest, HeadingMatchesLinearScanOracle) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pos(-120.0, 120.0);
  const auto& cl = map_.centerline();
  for (int k = 0; k < 500; ++k) {
    const Vec2 p(pos(rng), pos(rng));
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cl.size(); ++i) {
      const double d = (cl[i] - p).norm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    EXPECT_DOUBLE_EQ(map_.heading_at(p), map_.centerline_headings()[best]);
  }
}

TEST(TrackMapValidation, RejectsDegenerateInput) {
  std::vector<Vec2> open{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  std::vector<Vec2> closed{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  EXPECT_THROW(ftrack::TrackMap(open, closed, closed), ftrack::MapError);
  std::vector<Vec2> tiny{{0, 0}, {1, 0}, {0, 0}};
  EXPECT_THROW(ftrack::TrackMap(tiny, closed, closed), ftrack::MapError);
  // centerline outside the annulus
  std::vector<Vec2> outer{{-10, -10}, {10, -10}, {10, 10}, {-10, 10}, {-10, -10}};
  std::vector<Vec2> inner{{-2, -2}, {2, -2}, {2, 2}, {-2, 2}, {-2, -2}};
  std::vector<Vec2> bad_center{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
  EXPECT_THROW(ftrack::TrackMap(inner, outer, bad_center), ftrack::MapError);
}
