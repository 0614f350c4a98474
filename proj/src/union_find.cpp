#include "palis/union_find.hpp"

#include <limits>
#include <utility>

namespace palis {

std::uint32_t VertexMergeSet::add(Point p) {
  const auto id = static_cast<std::uint32_t>(points_.size());
  points_.push_back(p);
  parent_.push_back(id);
  rank_.push_back(0);
  return id;
}

std::uint32_t VertexMergeSet::find(std::uint32_t v) {
  std::uint32_t root = v;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[v] != root) v = std::exchange(parent_[v], root);
  return root;
}

void VertexMergeSet::merge(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
}

VertexMergeSet::Resolved VertexMergeSet::resolve() {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  Resolved out;
  out.label.assign(points_.size(), kUnset);
  std::vector<std::uint32_t> root_label(points_.size(), kUnset);
  std::vector<Point> sums;
  std::vector<double> counts;
  for (std::uint32_t v = 0; v < points_.size(); ++v) {
    const std::uint32_t r = find(v);
    if (root_label[r] == kUnset) {
      root_label[r] = static_cast<std::uint32_t>(sums.size());
      sums.push_back({});
      counts.push_back(0.0);
    }
    const std::uint32_t l = root_label[r];
    out.label[v] = l;
    sums[l] = sums[l] + points_[v];
    counts[l] += 1.0;
  }
  out.centroid.resize(sums.size());
  for (std::size_t l = 0; l < sums.size(); ++l) out.centroid[l] = (1.0 / counts[l]) * sums[l];
  return out;
}

}  // namespace palis
