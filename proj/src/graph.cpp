#include "netdyn/graph.hpp"

#include "netdyn/error.hpp"
#include "netdyn/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace netdyn {

namespace {

// Below this many nodes the products run on the calling thread.
constexpr std::size_t kParallelChunk = 1 << 14;

void build_csr(std::size_t n, const std::vector<Edge>& sorted, bool by_src,
               std::vector<std::size_t>& offsets, std::vector<NodeId>& targets) {
    offsets.assign(n + 1, 0);
    for (const auto& e : sorted)
        ++offsets[(by_src ? e.src : e.dst) + 1];
    for (std::size_t i = 0; i < n; ++i)
        offsets[i + 1] += offsets[i];
    targets.resize(sorted.size());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : sorted) {
        if (by_src)
            targets[cursor[e.src]++] = e.dst;
        else
            targets[cursor[e.dst]++] = e.src;
    }
}

} // namespace

std::string_view to_string(DanglingPolicy policy) {
    return policy == DanglingPolicy::UniformTeleport ? "uniform-teleport" : "self-retain";
}

DanglingPolicy parse_dangling_policy(std::string_view name) {
    if (name == "uniform-teleport")
        return DanglingPolicy::UniformTeleport;
    if (name == "self-retain")
        return DanglingPolicy::SelfRetain;
    throw InvalidArgument("unknown dangling policy '" + std::string(name) + "'");
}

DirectedGraph DirectedGraph::from_edges(std::span<const Edge> edges, std::size_t node_count) {
    std::size_t n = node_count;
    std::vector<Edge> kept;
    kept.reserve(edges.size());
    for (const auto& e : edges) {
        n = std::max<std::size_t>(n, std::max(e.src, e.dst) + std::size_t{1});
        if (e.src != e.dst)
            kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    DirectedGraph g;
    // Sorted by (src, dst): out lists come out sorted, and a counting pass
    // over the same order leaves every in list sorted by src as well.
    build_csr(n, kept, true, g.out_offsets_, g.out_targets_);
    build_csr(n, kept, false, g.in_offsets_, g.in_sources_);
    return g;
}

bool DirectedGraph::has_edge(NodeId u, NodeId v) const noexcept {
    if (u >= node_count() || v >= node_count())
        return false;
    auto nb = out_neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> DirectedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u)
        for (NodeId v : out_neighbors(u))
            out.push_back({u, v});
    return out;
}

DirectedGraph DirectedGraph::transposed() const {
    DirectedGraph t;
    t.out_offsets_ = in_offsets_;
    t.out_targets_ = in_sources_;
    t.in_offsets_ = out_offsets_;
    t.in_sources_ = out_targets_;
    return t;
}

DirectedGraph build_graph(std::span<const Edge> edges, std::size_t node_count) {
    if (edges.empty() && node_count == 0)
        throw InvalidArgument("empty graph");
    return DirectedGraph::from_edges(edges, node_count);
}

void check_size(const DirectedGraph& g, std::span<const double> x, std::string_view what) {
    if (x.size() != g.node_count())
        throw InvalidArgument(std::string(what) + ": vector length " + std::to_string(x.size()) +
                              " does not match node count " + std::to_string(g.node_count()));
}

double l1_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x)
        s += std::abs(v);
    return s;
}

WeightVector adjacency_apply(const DirectedGraph& g, std::span<const double> x) {
    check_size(g, x, "adjacency_apply");
    WeightVector y(g.node_count(), 0.0);
    parallel_for(g.node_count(), kParallelChunk, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
            double s = 0.0;
            for (NodeId i : g.in_neighbors(static_cast<NodeId>(j)))
                s += x[i];
            y[j] = s;
        }
    });
    return y;
}

WeightVector transfer_apply(const DirectedGraph& g, std::span<const double> x, double delta,
                            DanglingPolicy policy) {
    check_size(g, x, "transfer_apply");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw InvalidArgument("transfer_apply: delta must lie in [0, 1]");
    const std::size_t n = g.node_count();

    // Serial, index-ordered sum so the teleported share is reproducible.
    double dangling_mass = 0.0;
    if (policy == DanglingPolicy::UniformTeleport)
        for (NodeId i = 0; i < n; ++i)
            if (g.out_degree(i) == 0)
                dangling_mass += x[i];
    const double teleport = dangling_mass / static_cast<double>(n);
    const double move = 1.0 - delta;

    WeightVector y(n, 0.0);
    parallel_for(n, kParallelChunk, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
            const auto jj = static_cast<NodeId>(j);
            double s = 0.0;
            for (NodeId i : g.in_neighbors(jj))
                s += x[i] / static_cast<double>(g.out_degree(i));
            if (policy == DanglingPolicy::UniformTeleport)
                s += teleport;
            else if (g.out_degree(jj) == 0)
                s += x[j];
            y[j] = delta * x[j] + move * s;
        }
    });
    return y;
}

WeightVector replication_apply(const DirectedGraph& g, std::span<const double> x, double delta,
                               double alpha) {
    check_size(g, x, "replication_apply");
    if (delta > 0.0 && alpha == 0.0)
        throw InvalidArgument("undefined self-replication: alpha = 0 with delta > 0");
    WeightVector y = adjacency_apply(g, x);
    if (delta != 0.0) {
        const double self = delta / alpha;
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] += self * x[i];
    }
    return y;
}

WeightVector indegree_vector(const DirectedGraph& g) {
    WeightVector s(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v)
        s[v] = static_cast<double>(g.in_degree(v));
    return s;
}

WeightVector outdegree_vector(const DirectedGraph& g) {
    WeightVector s(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v)
        s[v] = static_cast<double>(g.out_degree(v));
    return s;
}

} // namespace netdyn
