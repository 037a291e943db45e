#pragma once

// Per-macro inheritance graphs.
//
// For a body m, an author v acquires an incoming edge (u, v) when v's first
// paper using m is co-authored with u, and u used m on some earlier paper.
// Papers whose authors all use m for the first time are contracted into one
// source node; edges leaving any of their authors start at that source node
// but remember the author (`src_author`). Because every edge points from an
// earlier first use to a later one, the result is acyclic.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "macroflow/corpus.hpp"

namespace macroflow {

enum class NodeKind { author, source };
enum class EdgeKind { internal, terminal };

using NodeId = std::size_t;
using EdgeId = std::size_t;

struct GraphNode {
  NodeKind kind = NodeKind::author;
  AuthorId author;                // author nodes only
  std::vector<AuthorId> members;  // source nodes only, in paper author order
  // Source nodes: the source paper. Author nodes: the author's first-use paper.
  std::string paper;
  Month date;
};

struct InheritanceEdge {
  NodeId src = 0;
  NodeId dst = 0;
  std::string paper;  // the learner's first-use paper
  Month date;
  AuthorId src_author;  // the teaching author, also when src is a source node
  EdgeKind kind = EdgeKind::terminal;
};

class InheritanceGraph {
 public:
  InheritanceGraph() = default;
  // Throws std::invalid_argument when an edge refers to a missing node.
  InheritanceGraph(MacroKey macro, std::vector<GraphNode> nodes, std::vector<InheritanceEdge> edges);

  const MacroKey& macro() const { return macro_; }
  std::span<const GraphNode> nodes() const { return nodes_; }
  std::span<const InheritanceEdge> edges() const { return edges_; }
  const GraphNode& node(NodeId id) const;
  const InheritanceEdge& edge(EdgeId id) const { return edges_.at(id); }
  bool contains(NodeId id) const { return id < nodes_.size(); }

  std::span<const EdgeId> out_edges(NodeId id) const { return out_.at(id); }
  std::span<const EdgeId> in_edges(NodeId id) const { return in_.at(id); }

  // Source nodes in creation (chronological) order.
  const std::vector<NodeId>& sources() const { return sources_; }
  std::size_t author_node_count() const { return nodes_.size() - sources_.size(); }
  // Author nodes plus every member of every source node.
  std::size_t author_count() const;

  std::optional<NodeId> find_author(const AuthorId& author) const;
  std::optional<NodeId> find_source(std::string_view paper) const;

 private:
  friend InheritanceGraph classify_edges(InheritanceGraph graph);

  MacroKey macro_;
  std::vector<GraphNode> nodes_;
  std::vector<InheritanceEdge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<NodeId> sources_;
};

// Throws LookupError when the body never occurs in the corpus.
InheritanceGraph build_inheritance_graph(const Corpus& corpus, const MacroKey& macro);
InheritanceGraph build_inheritance_graph(const Corpus& corpus, MacroIndex macro);

// Graphs for every listed body, in the given order, built on `jobs` threads.
std::vector<InheritanceGraph> build_all_graphs(const Corpus& corpus, std::span<const MacroIndex> macros,
                                               unsigned jobs = 1);

// Author nodes reachable from `start` by directed paths, excluding `start`,
// in increasing id order. Throws LookupError for an unknown node.
std::vector<NodeId> reachable_set(const InheritanceGraph& graph, NodeId start);

// The source node reaching the most author nodes; ties go to the earlier
// (date, paper id). Throws EmptyInputError when the graph has no sources.
NodeId find_seed(const InheritanceGraph& graph);

// An edge (u, v) is internal when v has an outgoing edge, terminal otherwise.
InheritanceGraph classify_edges(InheritanceGraph graph);

struct BfsTree {
  NodeId root = 0;
  std::vector<int> depth;                   // -1 when unreached
  std::vector<std::optional<EdgeId>> parent;  // edge into the node from the previous layer
  std::vector<NodeId> order;                // reached nodes in visiting order
  int max_depth = 0;
};

// Breadth-first layering from `root`. Each reached node's parent edge is the
// smallest (date, paper, src_author) edge among those from the previous layer.
BfsTree bfs_tree(const InheritanceGraph& graph, NodeId root);

// Structural checks: acyclicity, in-degree rules for author and source nodes,
// author partition, and consistent first-use papers. Returns one message per
// violation; empty when the graph is well formed.
std::vector<std::string> check_invariants(const InheritanceGraph& graph);

nlohmann::ordered_json graph_to_json(const InheritanceGraph& graph);
// Throws std::invalid_argument on schema violations.
InheritanceGraph graph_from_json(const nlohmann::json& doc);

const char* to_string(EdgeKind kind);
const char* to_string(NodeKind kind);

}  // namespace macroflow
