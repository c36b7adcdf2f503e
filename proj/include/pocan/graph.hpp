#pragma once

#include <cstdint>
#include <vector>

namespace pocan {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Strongly connected components in reverse topological order: every edge
/// leaving a component points into a component listed earlier.
struct SccDecomposition {
    std::vector<std::vector<std::uint32_t>> components;  // members sorted ascending
    std::vector<bool> is_bottom;
    std::vector<std::uint32_t> component_of;  // vertex -> component index
};

SccDecomposition scc_decompose(const Adjacency& adj);

/// Vertices reachable from any vertex in `sources` (sources included).
std::vector<bool> reachable_from(const Adjacency& adj, const std::vector<std::uint32_t>& sources);

/// Edge-reversed graph.
Adjacency transpose(const Adjacency& adj);

}  // namespace pocan
