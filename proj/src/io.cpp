#include "netdyn/io.hpp"

#include "netdyn/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace netdyn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    if (line.find('\t') != std::string_view::npos) {
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            out.push_back(trim(line.substr(start, tab - start)));
            if (tab == std::string_view::npos)
                break;
            start = tab + 1;
        }
        return out;
    }
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\r'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\r')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

NodeLabels NodeLabels::from_labels(std::vector<std::string> labels) {
    NodeLabels l;
    l.integer_mode_ = false;
    l.labels_ = std::move(labels);
    for (std::size_t i = 0; i < l.labels_.size(); ++i) {
        if (!l.index_.emplace(l.labels_[i], static_cast<NodeId>(i)).second)
            throw InvalidArgument("duplicate node label '" + l.labels_[i] + "'");
    }
    return l;
}

std::string NodeLabels::label(NodeId id) const {
    if (integer_mode_ || id >= labels_.size())
        return std::to_string(id);
    return labels_[id];
}

std::optional<NodeId> NodeLabels::find(std::string_view label) const {
    if (integer_mode_)
        return parse_node_index(label);
    auto it = index_.find(std::string(label));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

NodeId NodeLabels::intern(std::string_view label) {
    if (integer_mode_) {
        auto id = parse_node_index(label);
        if (!id)
            throw InvalidArgument("expected a non-negative integer node id, got '" + std::string(label) + "'");
        return *id;
    }
    auto [it, inserted] = index_.emplace(std::string(label), static_cast<NodeId>(labels_.size()));
    if (inserted)
        labels_.emplace_back(label);
    return it->second;
}

std::optional<NodeId> parse_node_index(std::string_view token) {
    if (token.empty())
        return std::nullopt;
    NodeId value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        return std::nullopt;
    return value;
}

LoadedGraph read_edge_list(std::istream& in, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> raw;
    std::string line;
    std::size_t lineno = 0;
    bool all_integers = true;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = trim(line);
        if (body.empty() || body.front() == '#')
            continue;
        auto fields = split_fields(body);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw InputFormatError(source, lineno, "expected 'src<TAB>dst'");
        all_integers = all_integers && parse_node_index(fields[0]) && parse_node_index(fields[1]);
        raw.emplace_back(fields[0], fields[1]);
    }
    if (in.bad())
        throw InputFormatError(source, 0, "read failure");
    if (raw.empty())
        throw InputFormatError(source, 0, "empty graph");

    LoadedGraph out;
    if (!all_integers)
        out.labels = NodeLabels::from_labels({});
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& [a, b] : raw) {
        const NodeId u = out.labels.intern(a);
        const NodeId v = out.labels.intern(b);
        edges.push_back({u, v});
    }
    out.graph = build_graph(edges, all_integers ? 0 : out.labels.size());
    return out;
}

LoadedGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputFormatError(path, 0, "cannot open file");
    return read_edge_list(in, path);
}

void write_label_mapping(std::ostream& out, const NodeLabels& labels) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << labels.labels()[i] << '\t' << i << '\n';
}

void write_edge_list(std::ostream& out, const DirectedGraph& g) {
    for (const auto& e : g.edges())
        out << e.src << '\t' << e.dst << '\n';
}

std::string format_number(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0.0)
        return "0"; // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

} // namespace netdyn
