#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace uavmap::detail {

// Exact k-nearest-neighbor kd-tree over 3D points. Results are sorted by
// (distance, index) so ties resolve deterministically.
class SpatialKdTree {
 public:
  explicit SpatialKdTree(const std::vector<Eigen::Vector3d>& points) : points_(points) {
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!points.empty()) {
      root_ = build(0, static_cast<int>(points.size()));
    }
  }

  struct Neighbor {
    double dist2;
    int index;
  };

  std::vector<Neighbor> knn(const Eigen::Vector3d& q, int k, int exclude = -1) const {
    std::vector<Neighbor> heap;  // max-heap on (dist2, index)
    if (root_ >= 0 && k > 0) {
      search(root_, q, k, exclude, &heap);
    }
    std::sort(heap.begin(), heap.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
    });
    return heap;
  }

 private:
  struct Node {
    int dim = -1;           // -1: leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range in order_
  };

  static constexpr int kLeafSize = 8;

  int build(int begin, int end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    Eigen::Vector3d lo = points_[order_[begin]], hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int dim = 0;
    (hi - lo).maxCoeff(&dim);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       const double va = points_[a][dim], vb = points_[b][dim];
                       return va != vb ? va < vb : a < b;
                     });
    node.dim = dim;
    node.split = points_[order_[mid]][dim];
    nodes_.push_back(node);
    const int self = static_cast<int>(nodes_.size()) - 1;
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  void consider(int idx, const Eigen::Vector3d& q, int k, int exclude,
                std::vector<Neighbor>* heap) const {
    if (idx == exclude) {
      return;
    }
    const double d2 = (points_[idx] - q).squaredNorm();
    const auto worse = [](const Neighbor& a, const Neighbor& b) {
      return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
    };
    if (static_cast<int>(heap->size()) < k) {
      heap->push_back({d2, idx});
      std::push_heap(heap->begin(), heap->end(), worse);
    } else if (d2 < heap->front().dist2 ||
               (d2 == heap->front().dist2 && idx < heap->front().index)) {
      std::pop_heap(heap->begin(), heap->end(), worse);
      heap->back() = {d2, idx};
      std::push_heap(heap->begin(), heap->end(), worse);
    }
  }

  void search(int node_idx, const Eigen::Vector3d& q, int k, int exclude,
              std::vector<Neighbor>* heap) const {
    const Node& node = nodes_[node_idx];
    if (node.dim < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        consider(order_[i], q, k, exclude, heap);
      }
      return;
    }
    const double diff = q[node.dim] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, q, k, exclude, heap);
    if (static_cast<int>(heap->size()) < k || diff * diff <= heap->front().dist2) {
      search(far, q, k, exclude, heap);
    }
  }

  const std::vector<Eigen::Vector3d>& points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace uavmap::detail
