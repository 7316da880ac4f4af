#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svaport/rtl.hpp"

namespace svaport::graph {

enum class EdgeKind { assign, register_ };

/// `reader` depends on `read`: `read` appears in the logic driving `reader`.
struct Edge {
    std::string reader;
    std::string read;
    EdgeKind kind = EdgeKind::assign;
};

enum class RelationKind { direct, indirect, unrelated };

std::string_view to_string(RelationKind k);
std::string_view to_string(EdgeKind k);

struct Relationship {
    RelationKind kind = RelationKind::unrelated;
    unsigned depth = 0;                     // 0 when unrelated
    std::vector<std::string> witness_path;  // reader ... source; empty when unrelated
};

/// Signal dependency graph over every non-constant net of a netlist.
/// Register edges cover the `next` expression and the reset net.
class DependencyGraph {
public:
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool contains(const std::string& n) const { return reads_.count(n) != 0; }

    /// Signals read by `n`'s driver, sorted.  Throws UnknownSignalError.
    const std::vector<std::string>& reads(const std::string& n) const;
    /// Signals whose drivers read `n`, sorted.  Throws UnknownSignalError.
    const std::vector<std::string>& readers(const std::string& n) const;
    std::optional<EdgeKind> edge_kind(const std::string& reader, const std::string& read) const;

private:
    friend DependencyGraph build_graph(const rtl::Netlist& netlist);

    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, std::vector<std::string>> reads_;
    std::map<std::string, std::vector<std::string>> readers_;
    std::map<std::pair<std::string, std::string>, EdgeKind> kinds_;
};

DependencyGraph build_graph(const rtl::Netlist& netlist);

/// Shortest dependency path from `reader` to `source` (length >= 1).  Ties
/// go to the lexicographically smallest path.
Relationship classify(const DependencyGraph& g, const std::string& reader, const std::string& source);

/// Transitive sources of `signal` with their BFS depth; `signal` itself is
/// never included.  `max_depth` of nullopt means unbounded.
std::map<std::string, unsigned> fanin(const DependencyGraph& g, const std::string& signal,
                                      std::optional<unsigned> max_depth = std::nullopt);

/// Transitive readers of `signal` with their BFS depth.
std::map<std::string, unsigned> fanout(const DependencyGraph& g, const std::string& signal,
                                       std::optional<unsigned> max_depth = std::nullopt);

/// Graphviz text; edges run reader -> read, register edges dashed.
std::string to_dot(const DependencyGraph& g, const std::string& name = "deps");

}  // namespace svaport::graph
