#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "fusion_track/angles.hpp"
#include "fusion_track/types.hpp"

// Data association: same-frame overlap merging, the gated Hungarian
// assignment and the status-counter track lifecycle.

namespace ftrack {

// ---------------------------------------------------------------------------
// 2-d k-d tree for fixed-radius neighbor queries.

class KdTree2 {
 public:
  explicit KdTree2(const std::vector<Vec2>& points) : points_(points) {
    idx_.resize(points.size());
    std::iota(idx_.begin(), idx_.end(), 0);
    if (!idx_.empty()) build(0, static_cast<int>(idx_.size()), 0);
  }

  /// Indices of all points within radius r of q (inclusive), ascending.
  std::vector<int> query_radius(const Vec2& q, double r) const {
    std::vector<int> out;
    if (!idx_.empty()) search(0, static_cast<int>(idx_.size()), 0, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  // idx_[lo..hi) holds a subtree; the median element is the node.
  void build(int lo, int hi, int axis) {
    if (hi - lo <= 1) return;
    const int mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](int a, int b) {
                       return axis == 0 ? points_[a].x() < points_[b].x()
                                        : points_[a].y() < points_[b].y();
                     });
    build(lo, mid, 1 - axis);
    build(mid + 1, hi, 1 - axis);
  }

  void search(int lo, int hi, int axis, const Vec2& q, double r2,
              std::vector<int>& out) const {
    if (lo >= hi) return;
    const int mid = (lo + hi) / 2;
    const Vec2& p = points_[idx_[mid]];
    if ((p - q).squaredNorm() <= r2) out.push_back(idx_[mid]);
    const double delta = axis == 0 ? q.x() - p.x() : q.y() - p.y();
    const int near_lo = delta < 0.0 ? lo : mid + 1;
    const int near_hi = delta < 0.0 ? mid : hi;
    const int far_lo = delta < 0.0 ? mid + 1 : lo;
    const int far_hi = delta < 0.0 ? hi : mid;
    search(near_lo, near_hi, 1 - axis, q, r2, out);
    if (delta * delta <= r2) search(far_lo, far_hi, 1 - axis, q, r2, out);
  }

  const std::vector<Vec2>& points_;
  std::vector<int> idx_;
};

// ---------------------------------------------------------------------------
// Overlap merge: single-linkage clusters under distance <= d_mrg, each
// replaced by its feature-wise centroid (circular mean for yaw). Centroids of
// distinct clusters can land within d_mrg of each other, so the pass repeats
// until stable; this makes the operation idempotent.

namespace detail {

inline std::vector<Detection> merge_overlaps_once(const std::vector<Detection>& dets,
                                                  double d_mrg) {
  if (dets.size() <= 1) return dets;
  std::vector<Vec2> pts;
  pts.reserve(dets.size());
  for (const auto& d : dets) pts.push_back(d.position());
  const KdTree2 tree(pts);

  std::vector<int> cluster_of(dets.size(), -1);
  std::vector<std::vector<int>> clusters;
  for (std::size_t seed = 0; seed < dets.size(); ++seed) {
    if (cluster_of[seed] >= 0) continue;
    const int cid = static_cast<int>(clusters.size());
    clusters.emplace_back();
    std::vector<int> stack{static_cast<int>(seed)};
    cluster_of[seed] = cid;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      clusters[cid].push_back(i);
      for (int j : tree.query_radius(pts[i], d_mrg)) {
        if (cluster_of[j] < 0) {
          cluster_of[j] = cid;
          stack.push_back(j);
        }
      }
    }
  }

  std::vector<Detection> merged;
  merged.reserve(clusters.size());
  for (auto& members : clusters) {
    std::sort(members.begin(), members.end());  // cluster order key = min index
    if (members.size() == 1) {  // untouched detections pass through bit-exact
      merged.push_back(dets[members.front()]);
      continue;
    }
    Detection rep;
    double sx = 0.0, sy = 0.0, sv = 0.0;
    int nv = 0;
    std::vector<double> yaws;
    for (int i : members) {
      sx += dets[i].x;
      sy += dets[i].y;
      if (dets[i].yaw) yaws.push_back(*dets[i].yaw);
      if (dets[i].v) {
        sv += *dets[i].v;
        ++nv;
      }
    }
    rep.x = sx / static_cast<double>(members.size());
    rep.y = sy / static_cast<double>(members.size());
    if (!yaws.empty()) rep.yaw = circular_mean(yaws.begin(), yaws.end());
    if (nv > 0) rep.v = sv / nv;
    merged.push_back(rep);
  }
  // clusters were created in order of their smallest member index already
  return merged;
}

}  // namespace detail

inline std::vector<Detection> merge_overlaps(std::vector<Detection> dets, double d_mrg) {
  while (true) {
    std::vector<Detection> next = detail::merge_overlaps_once(dets, d_mrg);
    if (next.size() == dets.size()) return next;
    dets = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Assignment.

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
  double total_cost{0.0};
};

/// Pairwise 2-d Euclidean distances, entry (i, j) = |track_i - det_j|.
inline Eigen::MatrixXd cost_matrix(std::span<const Vec2> tracks,
                                   std::span<const Vec2> dets) {
  Eigen::MatrixXd c(tracks.size(), dets.size());
  for (int i = 0; i < static_cast<int>(tracks.size()); ++i)
    for (int j = 0; j < static_cast<int>(dets.size()); ++j)
      c(i, j) = (tracks[i] - dets[j]).norm();
  return c;
}

namespace detail {

// Jonker-Volgenant style shortest-augmenting-path solve of the square
// assignment problem. Returns the matched column per row and the optimal
// dual potentials (u, v) with u_i + v_j <= c_ij and equality on matched
// cells, which downstream code uses for the tie-break.
struct SquareSolve {
  std::vector<int> col_of_row;
  std::vector<double> u, v;
};

inline SquareSolve solve_square(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, n);      // p[j]: row matched to column j (1-based grid)
  std::vector<int> way(n + 1, 0);

  for (int i = 0; i < n; ++i) {
    p[n] = i;
    int j0 = n;  // virtual start column
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != n);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != n);
  }

  SquareSolve out;
  out.col_of_row.assign(n, -1);
  for (int j = 0; j < n; ++j)
    if (p[j] >= 0 && p[j] < n) out.col_of_row[p[j]] = j;
  out.u.assign(u.begin(), u.begin() + n);
  out.v.assign(v.begin(), v.begin() + n);
  return out;
}

// Kuhn augmenting path on an adjacency-list bipartite graph.
inline bool try_augment(int row, const std::vector<std::vector<int>>& adj,
                        std::vector<int>& match_col, std::vector<int>& match_row,
                        std::vector<char>& seen) {
  for (int j : adj[row]) {
    if (seen[j]) continue;
    seen[j] = true;
    if (match_col[j] < 0 ||
        try_augment(match_col[j], adj, match_col, match_row, seen)) {
      match_col[j] = row;
      match_row[row] = j;
      return true;
    }
  }
  return false;
}

// Among optimal matchings (= perfect matchings of the zero-reduced-cost
// equality graph, by complementary slackness), pick the lexicographically
// smallest pair set: rows in ascending order each take the smallest column
// that still leaves the remaining rows perfectly matchable. Starting from a
// known perfect matching, each candidate column is decided by a single
// re-augmentation attempt of the row it would displace.
inline std::vector<int> lex_smallest_perfect_matching(
    const std::vector<std::vector<int>>& adj, std::vector<int> match_row) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> match_col(n, -1);
  for (int i = 0; i < n; ++i) match_col[match_row[i]] = i;

  for (int i = 0; i < n; ++i) {
    for (int j : adj[i]) {  // adjacency lists are ascending by construction
      if (match_row[i] == j) break;  // current column is the smallest feasible
      const int displaced = match_col[j];
      if (displaced < i) continue;  // column frozen by an earlier row
      const int old = match_row[i];
      match_row[i] = j;
      match_col[j] = i;
      match_row[displaced] = -1;
      match_col[old] = -1;
      // Rows <= i are frozen: their columns may not be re-routed.
      std::vector<char> seen(n, false);
      for (int k = 0; k <= i; ++k) seen[match_row[k]] = true;
      if (try_augment(displaced, adj, match_col, match_row, seen)) break;
      match_row[i] = old;  // revert; try_augment mutates only on success
      match_col[old] = i;
      match_row[displaced] = j;
      match_col[j] = displaced;
    }
  }
  return match_row;
}

}  // namespace detail

/// Minimum-total-cost assignment on a rectangular cost matrix with a
/// distance gate. The matrix is padded square with a sentinel just above the
/// gate; pairs costing more than the gate are stripped into the unmatched
/// sets after the solve. Among cost-optimal solutions the lexicographically
/// smallest pair set is returned.
inline Assignment solve_assignment(const Eigen::MatrixXd& c, double gate) {
  Assignment out;
  const int n = static_cast<int>(c.rows());
  const int m = static_cast<int>(c.cols());
  if (n == 0 || m == 0) {
    for (int i = 0; i < n; ++i) out.unmatched_tracks.push_back(i);
    for (int j = 0; j < m; ++j) out.unmatched_detections.push_back(j);
    return out;
  }

  const int dim = std::max(n, m);
  const double sentinel = gate + std::max(1.0, std::abs(gate)) * 1e-6;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Constant(dim, dim, sentinel);
  padded.topLeftCorner(n, m) = c;

  const auto solve = detail::solve_square(padded);

  // Zero-reduced-cost equality graph; tolerance relative to the cost scale.
  const double scale = std::max(1.0, padded.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  std::vector<std::vector<int>> adj(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (padded(i, j) - solve.u[i] - solve.v[j] <= tol) adj[i].push_back(j);

  const std::vector<int> match =
      detail::lex_smallest_perfect_matching(adj, solve.col_of_row);

  std::vector<char> track_matched(n, false), det_matched(m, false);
  for (int i = 0; i < n; ++i) {
    const int j = match[i];
    if (j >= 0 && j < m && c(i, j) <= gate) {
      out.pairs.emplace_back(i, j);
      out.total_cost += c(i, j);
      track_matched[i] = true;
      det_matched[j] = true;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!track_matched[i]) out.unmatched_tracks.push_back(i);
  for (int j = 0; j < m; ++j)
    if (!det_matched[j]) out.unmatched_detections.push_back(j);
  return out;
}

// ---------------------------------------------------------------------------
// Status-counter lifecycle.

struct TrackStatus {
  int counter{0};
  int successful_matches{0};
  bool confirmed{false};
  double created_at{0.0};
};

enum class LifecycleAction { kKeep, kRemove };

/// Creation bookkeeping: the spawning detection counts as the first
/// successful match and seeds the counter with its sensor's weight.
inline TrackStatus init_track_status(int sensor_weight, int t_mtc, double created_at,
                                     int confirmation_matches = 2) {
  TrackStatus s;
  s.counter = std::min(sensor_weight, t_mtc);
  s.successful_matches = 1;
  s.confirmed = s.successful_matches >= confirmation_matches;
  s.created_at = created_at;
  return s;
}

/// Case 2 / case 3 of the match outcome: a match adds the sensor weight
/// (clamped at t_mtc), a miss decrements by one; zero means removal.
inline LifecycleAction apply_match_outcome(TrackStatus& s, bool matched,
                                           int sensor_weight, int t_mtc,
                                           int confirmation_matches = 2) {
  if (matched) {
    s.counter = std::min(s.counter + sensor_weight, t_mtc);
    s.successful_matches += 1;
    if (s.successful_matches >= confirmation_matches) s.confirmed = true;
    return LifecycleAction::kKeep;
  }
  s.counter -= 1;
  return s.counter <= 0 ? LifecycleAction::kRemove : LifecycleAction::kKeep;
}

}  // namespace ftrack
