#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace uavmap::detail {

// Squared L2 distance accumulated in double; every matcher compares on this
// scale so kd-tree and brute-force results stay bit-identical.
inline double l2_sq(const float* a, const float* b, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

struct TwoNn {
  int best = -1;
  int second = -1;
  double d1 = std::numeric_limits<double>::infinity();  // squared
  double d2 = std::numeric_limits<double>::infinity();  // squared

  // Deterministic accumulation: smaller distance wins, ties to smaller index.
  void offer(double d, int idx) {
    if (d < d1 || (d == d1 && idx < best)) {
      d2 = d1;
      second = best;
      d1 = d;
      best = idx;
    } else if (d < d2 || (d == d2 && idx < second)) {
      d2 = d;
      second = idx;
    }
  }
};

// kd-tree over row-major float descriptors. search() runs best-bin-first
// bounded by `checks` leaf visits; checks <= 0 switches to an exact
// backtracking search that returns precisely the brute-force 2-NN.
class DescriptorKdTree {
 public:
  DescriptorKdTree(const float* data, int count, int dim)
      : data_(data), count_(count), dim_(dim) {
    order_.resize(count);
    std::iota(order_.begin(), order_.end(), 0);
    if (count > 0) {
      root_ = build(0, count);
    }
  }

  TwoNn search(const float* query, int checks) const {
    TwoNn result;
    if (root_ < 0) {
      return result;
    }
    if (checks <= 0) {
      std::vector<double> offsets(dim_, 0.0);
      search_exact(root_, query, 0.0, offsets, &result);
    } else {
      search_bbf(query, checks, &result);
    }
    return result;
  }

 private:
  struct Node {
    int dim = -1;  // -1: leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };

  static constexpr int kLeafSize = 8;

  const float* row(int idx) const { return data_ + static_cast<size_t>(idx) * dim_; }

  int build(int begin, int end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    // Split on the dimension of maximum spread.
    int dim = 0;
    double best_spread = -1.0;
    for (int d = 0; d < dim_; ++d) {
      float lo = row(order_[begin])[d], hi = lo;
      for (int i = begin + 1; i < end; ++i) {
        const float v = row(order_[i])[d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        dim = d;
      }
    }
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       const float va = row(a)[dim], vb = row(b)[dim];
                       return va != vb ? va < vb : a < b;
                     });
    node.dim = dim;
    node.split = row(order_[mid])[dim];
    nodes_.push_back(node);
    const int self = static_cast<int>(nodes_.size()) - 1;
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  void scan_leaf(const Node& node, const float* query, TwoNn* out) const {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      out->offer(l2_sq(query, row(idx), dim_), idx);
    }
  }

  // ANN-style exact search with per-dimension offset bookkeeping so the
  // region lower bounds are tight; expansion on <= keeps ties exact.
  void search_exact(int node_idx, const float* query, double bound,
                    std::vector<double>& offsets, TwoNn* out) const {
    const Node& node = nodes_[node_idx];
    if (node.dim < 0) {
      scan_leaf(node, query, out);
      return;
    }
    const double diff = static_cast<double>(query[node.dim]) - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search_exact(near, query, bound, offsets, out);
    const double old_off = offsets[node.dim];
    const double new_bound = bound - old_off * old_off + diff * diff;
    if (new_bound <= out->d2) {
      offsets[node.dim] = diff;
      search_exact(far, query, new_bound, offsets, out);
      offsets[node.dim] = old_off;
    }
  }

  void search_bbf(const float* query, int checks, TwoNn* out) const {
    using Entry = std::pair<double, int>;  // (bound, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, root_);
    int leaves = 0;
    while (!heap.empty() && leaves < checks) {
      auto [bound, idx] = heap.top();
      heap.pop();
      if (bound > out->d2) {
        continue;
      }
      // Descend to the nearest leaf, queueing far branches.
      while (nodes_[idx].dim >= 0) {
        const Node& node = nodes_[idx];
        const double diff = static_cast<double>(query[node.dim]) - node.split;
        const int near = diff < 0.0 ? node.left : node.right;
        const int far = diff < 0.0 ? node.right : node.left;
        heap.emplace(bound + diff * diff, far);
        idx = near;
      }
      scan_leaf(nodes_[idx], query, out);
      ++leaves;
    }
  }

  const float* data_;
  int count_;
  int dim_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace uavmap::detail
