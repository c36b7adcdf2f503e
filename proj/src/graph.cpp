#include "pocan/graph.hpp"

#include <algorithm>
#include <limits>

namespace pocan {

SccDecomposition scc_decompose(const Adjacency& adj) {
    const auto n = static_cast<std::uint32_t>(adj.size());
    constexpr auto unvisited = std::numeric_limits<std::uint32_t>::max();

    std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::uint32_t counter = 0;

    SccDecomposition out;
    out.component_of.assign(n, 0);

    // Iterative Tarjan; frame = (vertex, next edge position).
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < adj[v].size()) {
                auto w = adj[v][pos++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            auto done = v;
            frames.pop_back();
            if (!frames.empty()) {
                auto parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                std::vector<std::uint32_t> comp;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                    out.component_of[w] = static_cast<std::uint32_t>(out.components.size());
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                out.components.push_back(std::move(comp));
            }
        }
    }

    out.is_bottom.assign(out.components.size(), true);
    for (std::uint32_t v = 0; v < n; ++v) {
        for (auto w : adj[v]) {
            if (out.component_of[w] != out.component_of[v]) out.is_bottom[out.component_of[v]] = false;
        }
    }
    return out;
}

std::vector<bool> reachable_from(const Adjacency& adj, const std::vector<std::uint32_t>& sources) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<std::uint32_t> work;
    for (auto s : sources) {
        if (!seen[s]) {
            seen[s] = true;
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        auto v = work.back();
        work.pop_back();
        for (auto w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                work.push_back(w);
            }
        }
    }
    return seen;
}

Adjacency transpose(const Adjacency& adj) {
    Adjacency out(adj.size());
    for (std::uint32_t v = 0; v < adj.size(); ++v) {
        for (auto w : adj[v]) out[w].push_back(v);
    }
    return out;
}

}  // namespace pocan
