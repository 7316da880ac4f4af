#include "svaport/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "svaport/error.hpp"

namespace svaport::graph {

std::string_view to_string(RelationKind k) {
    switch (k) {
        case RelationKind::direct: return "direct";
        case RelationKind::indirect: return "indirect";
        case RelationKind::unrelated: return "unrelated";
    }
    return "?";
}

std::string_view to_string(EdgeKind k) { return k == EdgeKind::assign ? "assign" : "register"; }

const std::vector<std::string>& DependencyGraph::reads(const std::string& n) const {
    auto it = reads_.find(n);
    if (it == reads_.end()) throw UnknownSignalError(n);
    return it->second;
}

const std::vector<std::string>& DependencyGraph::readers(const std::string& n) const {
    auto it = readers_.find(n);
    if (it == readers_.end()) throw UnknownSignalError(n);
    return it->second;
}

std::optional<EdgeKind> DependencyGraph::edge_kind(const std::string& reader, const std::string& read) const {
    auto it = kinds_.find({reader, read});
    if (it == kinds_.end()) return std::nullopt;
    return it->second;
}

DependencyGraph build_graph(const rtl::Netlist& netlist) {
    DependencyGraph g;
    for (const auto& [name, net] : netlist.nets)
        if (net.kind != rtl::NetKind::constant) {
            g.nodes_.push_back(name);
            g.reads_[name];
            g.readers_[name];
        }

    auto add = [&](const std::string& reader, const std::set<std::string>& reads, EdgeKind kind) {
        for (const auto& r : reads) {
            if (!g.reads_.count(r)) continue;  // named constant
            if (!g.kinds_.emplace(std::pair{reader, r}, kind).second) continue;
            g.reads_[reader].push_back(r);
            g.readers_[r].push_back(reader);
        }
    };
    for (const auto& a : netlist.assigns) add(a.lhs, identifiers_of(*a.rhs), EdgeKind::assign);
    for (const auto& r : netlist.registers) {
        std::set<std::string> ids = identifiers_of(*r.next);
        if (r.reset) ids.insert(r.reset->net);
        add(r.target, ids, EdgeKind::register_);
    }

    for (auto& [_, v] : g.reads_) std::sort(v.begin(), v.end());
    for (auto& [_, v] : g.readers_) std::sort(v.begin(), v.end());
    for (const auto& [key, kind] : g.kinds_) g.edges_.push_back(Edge{key.first, key.second, kind});
    return g;
}

namespace {

using Adjacency = const std::vector<std::string>& (DependencyGraph::*)(const std::string&) const;

// BFS over sorted adjacency: the first discovery of a node lies on the
// lexicographically smallest shortest path.
std::map<std::string, std::pair<unsigned, std::string>> bfs(const DependencyGraph& g, const std::string& start,
                                                             Adjacency next, std::optional<unsigned> max_depth) {
    std::map<std::string, std::pair<unsigned, std::string>> seen;  // node -> (depth, parent)
    std::deque<std::string> queue;
    for (const auto& n : (g.*next)(start)) {
        if (seen.emplace(n, std::pair{1u, start}).second) queue.push_back(n);
    }
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        unsigned d = seen.at(cur).first;
        if (max_depth && d >= *max_depth) continue;
        for (const auto& n : (g.*next)(cur))
            if (seen.emplace(n, std::pair{d + 1, cur}).second) queue.push_back(n);
    }
    return seen;
}

}  // namespace

Relationship classify(const DependencyGraph& g, const std::string& reader, const std::string& source) {
    if (!g.contains(reader)) throw UnknownSignalError(reader);
    if (!g.contains(source)) throw UnknownSignalError(source);
    auto seen = bfs(g, reader, &DependencyGraph::reads, std::nullopt);
    auto it = seen.find(source);
    if (it == seen.end()) return {};
    Relationship r;
    r.depth = it->second.first;
    r.kind = r.depth == 1 ? RelationKind::direct : RelationKind::indirect;
    std::string cur = source;
    r.witness_path.push_back(cur);
    for (unsigned i = 0; i < r.depth; ++i) {
        cur = seen.at(cur).second;
        r.witness_path.push_back(cur);
    }
    std::reverse(r.witness_path.begin(), r.witness_path.end());
    return r;
}

std::map<std::string, unsigned> fanin(const DependencyGraph& g, const std::string& signal,
                                      std::optional<unsigned> max_depth) {
    if (!g.contains(signal)) throw UnknownSignalError(signal);
    std::map<std::string, unsigned> out;
    for (const auto& [n, dp] : bfs(g, signal, &DependencyGraph::reads, max_depth))
        if (n != signal) out[n] = dp.first;
    return out;
}

std::map<std::string, unsigned> fanout(const DependencyGraph& g, const std::string& signal,
                                       std::optional<unsigned> max_depth) {
    if (!g.contains(signal)) throw UnknownSignalError(signal);
    std::map<std::string, unsigned> out;
    for (const auto& [n, dp] : bfs(g, signal, &DependencyGraph::readers, max_depth))
        if (n != signal) out[n] = dp.first;
    return out;
}

std::string to_dot(const DependencyGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n";
    for (const auto& n : g.nodes()) os << "  \"" << n << "\";\n";
    for (const auto& e : g.edges()) {
        os << "  \"" << e.reader << "\" -> \"" << e.read << "\"";
        if (e.kind == EdgeKind::register_) os << " [style=dashed]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace svaport::graph
