#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netdyn {

/// Dense node index in [0, node_count).
using NodeId = std::uint32_t;

/// Per-node real vector: process weights, probabilities, centrality scores.
using WeightVector = std::vector<double>;

struct Edge {
    NodeId src;
    NodeId dst;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/**
 * How the row-normalized transfer operator D^-1 A treats nodes without
 * out-edges. Both choices keep the operator row-stochastic.
 */
enum class DanglingPolicy {
    UniformTeleport, ///< the node's mass is spread evenly over all nodes
    SelfRetain,      ///< the node keeps its mass
};

std::string_view to_string(DanglingPolicy policy);
DanglingPolicy parse_dangling_policy(std::string_view name);

/**
 * Immutable unweighted directed graph without self-loops.
 *
 * Adjacency is stored twice in compressed sparse row form: out-neighbors
 * (rows of A) and in-neighbors (columns of A), each sorted by node id.
 * Every product in the library is a left product x * M, which reads the
 * in-neighbor lists, so results do not depend on the thread count.
 */
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Collapses duplicate edges and drops self-loops. The node count is
    /// max(node_count, largest endpoint + 1).
    static DirectedGraph from_edges(std::span<const Edge> edges, std::size_t node_count = 0);

    std::size_t node_count() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return out_targets_.size(); }

    std::span<const NodeId> out_neighbors(NodeId u) const noexcept {
        return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
    }
    std::span<const NodeId> in_neighbors(NodeId v) const noexcept {
        return {in_sources_.data() + in_offsets_[v], in_sources_.data() + in_offsets_[v + 1]};
    }

    std::size_t out_degree(NodeId u) const noexcept { return out_offsets_[u + 1] - out_offsets_[u]; }
    std::size_t in_degree(NodeId v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }

    bool has_edge(NodeId u, NodeId v) const noexcept;

    /// Global index in [0, edge_count) of u's out_slot-th out-edge.
    std::size_t edge_index(NodeId u, std::size_t out_slot) const noexcept { return out_offsets_[u] + out_slot; }

    /// All edges in (src, dst) order.
    std::vector<Edge> edges() const;

    /// Same node set with every edge reversed.
    DirectedGraph transposed() const;

private:
    std::vector<std::size_t> out_offsets_;
    std::vector<NodeId> out_targets_;
    std::vector<std::size_t> in_offsets_;
    std::vector<NodeId> in_sources_;
};

/// Builds a graph; throws InvalidArgument("empty graph") when there is nothing to build.
DirectedGraph build_graph(std::span<const Edge> edges, std::size_t node_count = 0);

/// y = x A, i.e. y[j] = sum over in-neighbors i of j of x[i].
WeightVector adjacency_apply(const DirectedGraph& g, std::span<const double> x);

/// y = x T with T = delta I + (1 - delta) D^-1 A; dangling rows follow `policy`.
WeightVector transfer_apply(const DirectedGraph& g, std::span<const double> x, double delta,
                            DanglingPolicy policy = DanglingPolicy::SelfRetain);

/// y = x R with R = (delta / alpha) I + A.
WeightVector replication_apply(const DirectedGraph& g, std::span<const double> x, double delta,
                               double alpha);

/// s = e A: the number of in-neighbors of each node.
WeightVector indegree_vector(const DirectedGraph& g);
WeightVector outdegree_vector(const DirectedGraph& g);

/// Throws InvalidArgument if x.size() != g.node_count().
void check_size(const DirectedGraph& g, std::span<const double> x, std::string_view what);

double l1_norm(std::span<const double> x);

} // namespace netdyn
