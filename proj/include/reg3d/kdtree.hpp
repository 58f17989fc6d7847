#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "reg3d/geometry.hpp"

namespace reg3d {

/// Exact 3D kd-tree. Nearest-neighbor ties are broken by the lowest point
/// index so results are reproducible; no approximate search modes.
class KdTree3 {
 public:
  struct Hit {
    int index = -1;
    double distance = std::numeric_limits<double>::infinity();
  };

  KdTree3() = default;

  explicit KdTree3(std::span<const Vector3> points)
      : pts_(points.begin(), points.end()) {
    if (pts_.empty()) return;
    std::vector<int> order(pts_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    nodes_.reserve(pts_.size());
    root_ = build(order, 0, static_cast<int>(order.size()), 0);
  }

  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }

  Hit nearest(const Vector3& query) const {
    Hit best;
    double best_sq = std::numeric_limits<double>::infinity();
    search1(root_, query, best, best_sq);
    if (best.index >= 0) best.distance = std::sqrt(best_sq);
    return best;
  }

  /// k nearest hits in ascending (distance, index) order.
  std::vector<Hit> knn(const Vector3& query, int k) const {
    KnnAcc acc;
    acc.k = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), pts_.size());
    if (acc.k == 0) return {};
    searchK(root_, query, acc);
    std::vector<Hit> out(acc.entries.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = Hit{acc.entries[i].second, std::sqrt(acc.entries[i].first)};
    return out;
  }

  /// Indices of all points within `radius` (inclusive), ascending index.
  std::vector<int> radius_search(const Vector3& query, double radius) const {
    std::vector<int> out;
    if (root_ >= 0 && radius >= 0) searchR(root_, query, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Node {
    int point = -1;
    int left = -1;
    int right = -1;
    std::uint8_t axis = 0;
  };

  // (squared distance, index) pairs kept sorted ascending.
  struct KnnAcc {
    std::size_t k = 0;
    std::vector<std::pair<double, int>> entries;

    double worst() const {
      return entries.size() < k ? std::numeric_limits<double>::infinity()
                                : entries.back().first;
    }
    void offer(double d2, int idx) {
      std::pair<double, int> e{d2, idx};
      if (entries.size() == k) {
        if (!(e < entries.back())) return;
        entries.pop_back();
      }
      entries.insert(std::upper_bound(entries.begin(), entries.end(), e), e);
    }
  };

  int build(std::vector<int>& order, int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    const std::uint8_t axis = static_cast<std::uint8_t>(depth % 3);
    const int mid = lo + (hi - lo) / 2;
    std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                     [&](int a, int b) {
                       const double ca = pts_[a][axis], cb = pts_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{order[mid], -1, -1, axis});
    const int left = build(order, lo, mid, depth + 1);
    const int right = build(order, mid + 1, hi, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search1(int node, const Vector3& q, Hit& best, double& best_sq) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    const double d2 = (pts_[n.point] - q).squaredNorm();
    if (d2 < best_sq || (d2 == best_sq && n.point < best.index)) {
      best_sq = d2;
      best.index = n.point;
    }
    const double delta = q[n.axis] - pts_[n.point][n.axis];
    const int near = delta < 0 ? n.left : n.right;
    const int far = delta < 0 ? n.right : n.left;
    search1(near, q, best, best_sq);
    if (delta * delta <= best_sq) search1(far, q, best, best_sq);
  }

  void searchK(int node, const Vector3& q, KnnAcc& acc) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    acc.offer((pts_[n.point] - q).squaredNorm(), n.point);
    const double delta = q[n.axis] - pts_[n.point][n.axis];
    const int near = delta < 0 ? n.left : n.right;
    const int far = delta < 0 ? n.right : n.left;
    searchK(near, q, acc);
    if (delta * delta <= acc.worst()) searchK(far, q, acc);
  }

  void searchR(int node, const Vector3& q, double r2, std::vector<int>& out) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    if ((pts_[n.point] - q).squaredNorm() <= r2) out.push_back(n.point);
    const double delta = q[n.axis] - pts_[n.point][n.axis];
    const int near = delta < 0 ? n.left : n.right;
    const int far = delta < 0 ? n.right : n.left;
    searchR(near, q, r2, out);
    if (delta * delta <= r2) searchR(far, q, r2, out);
  }

  std::vector<Node> nodes_;
  std::vector<Vector3> pts_;
  int root_ = -1;
};

}  // namespace reg3d
