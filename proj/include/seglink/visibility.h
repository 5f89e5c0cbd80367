#pragma once

#include "seglink/instance.h"

#include <utility>

namespace seglink {

/// Adjacency over the family's endpoints: an edge joins two endpoints
/// whenever the open segment between them misses every closed segment.
struct VisibilityGraph {
  std::vector<EndpointRecord> vertices;  // lexicographic endpoint order
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, sorted
};

/// True iff the open segment pq misses every closed segment of the family,
/// including the segments incident to p or q. Throws std::invalid_argument
/// when p == q.
bool points_see(const Point& p, const Point& q, const SegmentFamily& family);

/// True iff some endpoint of segment a sees some endpoint of segment b.
/// Throws std::out_of_range on a bad index and std::invalid_argument when
/// a == b.
bool segments_see(std::size_t a, std::size_t b, const SegmentFamily& family);

VisibilityGraph visibility_graph(const SegmentFamily& family);

}  // namespace seglink
