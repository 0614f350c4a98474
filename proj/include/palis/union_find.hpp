#pragma once

#include <cstdint>
#include <vector>

#include "palis/geometry.hpp"

namespace palis {

/// Disjoint sets over provisional vertices; each set is placed at the
/// centroid of its members.
class VertexMergeSet {
 public:
  std::uint32_t add(Point p);
  std::uint32_t find(std::uint32_t v);
  void merge(std::uint32_t a, std::uint32_t b);

  std::size_t size() const { return points_.size(); }
  Point position(std::uint32_t v) const { return points_[v]; }

  /// Dense set labels in order of first appearance, and the centroid of
  /// each set.
  struct Resolved {
    std::vector<std::uint32_t> label;
    std::vector<Point> centroid;
  };
  Resolved resolve();

 private:
  std::vector<Point> points_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> rank_;
};

}  // namespace palis
