#pragma once

#include "netdyn/graph.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netdyn {

/**
 * Mapping between external node labels and dense NodeIds.
 *
 * In integer mode the label of node i is its decimal index and every
 * non-negative integer resolves to itself. In label mode ids are assigned in
 * order of first appearance.
 */
class NodeLabels {
public:
    static NodeLabels integers() { return NodeLabels(); }
    static NodeLabels from_labels(std::vector<std::string> labels);

    bool integer_mode() const noexcept { return integer_mode_; }

    std::string label(NodeId id) const;
    std::optional<NodeId> find(std::string_view label) const;

    /// Returns the id for `label`, assigning the next free id when unknown.
    /// In integer mode the label must be a non-negative integer.
    NodeId intern(std::string_view label);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    NodeLabels() = default;

    bool integer_mode_ = true;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> index_;
};

struct LoadedGraph {
    DirectedGraph graph;
    NodeLabels labels = NodeLabels::integers();
};

/// Parses a non-negative decimal integer that fits a NodeId.
std::optional<NodeId> parse_node_index(std::string_view token);

/**
 * Reads an edge list: one "src<TAB>dst" pair per line, '#' comments and blank
 * lines ignored. Lines without a tab are split on whitespace. If every token is
 * a non-negative integer the ids are used as-is, otherwise all tokens are
 * treated as labels.
 */
LoadedGraph read_edge_list(std::istream& in, const std::string& source = "<memory>");
LoadedGraph read_edge_list_file(const std::string& path);

/// Sidecar mapping file: "label<TAB>index" per node, in index order.
void write_label_mapping(std::ostream& out, const NodeLabels& labels);

void write_edge_list(std::ostream& out, const DirectedGraph& g);

/// Fixed 12-significant-digit rendering used for every numeric output.
std::string format_number(double value);

} // namespace netdyn
