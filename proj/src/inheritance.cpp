#include "macroflow/inheritance.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "macroflow/error.hpp"
#include "macroflow/parallel.hpp"

namespace macroflow {

InheritanceGraph::InheritanceGraph(MacroKey macro, std::vector<GraphNode> nodes, std::vector<InheritanceEdge> edges)
    : macro_(std::move(macro)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const InheritanceEdge& edge = edges_[e];
    if (edge.src >= nodes_.size() || edge.dst >= nodes_.size())
      throw std::invalid_argument(fmt::format("edge {} refers to a missing node", e));
    out_[edge.src].push_back(e);
    in_[edge.dst].push_back(e);
  }
  for (NodeId n = 0; n < nodes_.size(); ++n)
    if (nodes_[n].kind == NodeKind::source) sources_.push_back(n);
}

const GraphNode& InheritanceGraph::node(NodeId id) const {
  if (id >= nodes_.size()) throw LookupError(fmt::format("unknown node {}", id));
  return nodes_[id];
}

std::size_t InheritanceGraph::author_count() const {
  std::size_t n = author_node_count();
  for (NodeId s : sources_) n += nodes_[s].members.size();
  return n;
}

std::optional<NodeId> InheritanceGraph::find_author(const AuthorId& author) const {
  for (NodeId n = 0; n < nodes_.size(); ++n)
    if (nodes_[n].kind == NodeKind::author && nodes_[n].author == author) return n;
  return std::nullopt;
}

std::optional<NodeId> InheritanceGraph::find_source(std::string_view paper) const {
  for (NodeId s : sources_)
    if (nodes_[s].paper == paper) return s;
  return std::nullopt;
}

InheritanceGraph build_inheritance_graph(const Corpus& corpus, const MacroKey& macro) {
  return build_inheritance_graph(corpus, corpus.macro_index(macro));
}

InheritanceGraph build_inheritance_graph(const Corpus& corpus, MacroIndex macro) {
  auto occurrences = corpus.occurrences(macro);
  if (occurrences.empty()) throw LookupError(fmt::format("macro {} is never used", macro));

  // The first paper on which each author used the body.
  std::unordered_map<AuthorIndex, PaperPos> first_use;
  for (const MacroOccurrence& occ : occurrences)
    for (AuthorIndex a : corpus.paper_authors(occ.paper)) first_use.try_emplace(a, occ.paper);

  std::vector<GraphNode> nodes;
  std::vector<InheritanceEdge> edges;
  std::unordered_map<AuthorIndex, NodeId> node_of;

  for (const MacroOccurrence& occ : occurrences) {
    const Paper& paper = corpus.paper(occ.paper);
    std::vector<AuthorIndex> learners, teachers;
    for (AuthorIndex a : corpus.paper_authors(occ.paper))
      (first_use.at(a) == occ.paper ? learners : teachers).push_back(a);
    if (learners.empty()) continue;

    if (teachers.empty()) {
      GraphNode source{NodeKind::source, {}, paper.authors, paper.id, paper.date};
      NodeId id = nodes.size();
      nodes.push_back(std::move(source));
      for (AuthorIndex a : learners) node_of.emplace(a, id);
      continue;
    }

    for (AuthorIndex v : learners) {
      NodeId dst = nodes.size();
      nodes.push_back({NodeKind::author, corpus.author(v), {}, paper.id, paper.date});
      node_of.emplace(v, dst);
      for (AuthorIndex u : teachers)
        edges.push_back({node_of.at(u), dst, paper.id, paper.date, corpus.author(u), EdgeKind::terminal});
    }
  }
  return classify_edges(InheritanceGraph(corpus.macro(macro), std::move(nodes), std::move(edges)));
}

std::vector<InheritanceGraph> build_all_graphs(const Corpus& corpus, std::span<const MacroIndex> macros,
                                               unsigned jobs) {
  std::vector<InheritanceGraph> graphs(macros.size());
  parallel_for(macros.size(), jobs, [&](std::size_t i) { graphs[i] = build_inheritance_graph(corpus, macros[i]); });
  return graphs;
}

std::vector<NodeId> reachable_set(const InheritanceGraph& graph, NodeId start) {
  if (!graph.contains(start)) throw LookupError(fmt::format("unknown node {}", start));
  std::vector<char> seen(graph.nodes().size(), 0);
  std::vector<NodeId> stack{start};
  seen[start] = 1;
  std::vector<NodeId> out;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (EdgeId e : graph.out_edges(n)) {
      NodeId next = graph.edge(e).dst;
      if (seen[next]) continue;
      seen[next] = 1;
      stack.push_back(next);
      if (graph.node(next).kind == NodeKind::author) out.push_back(next);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NodeId find_seed(const InheritanceGraph& graph) {
  if (graph.sources().empty()) throw EmptyInputError("inheritance graph has no source node");
  NodeId best = graph.sources().front();
  std::size_t best_reach = reachable_set(graph, best).size();
  for (NodeId s : graph.sources()) {
    std::size_t reach = reachable_set(graph, s).size();
    const GraphNode& a = graph.node(s);
    const GraphNode& b = graph.node(best);
    if (reach > best_reach || (reach == best_reach && std::tie(a.date, a.paper) < std::tie(b.date, b.paper))) {
      best = s;
      best_reach = reach;
    }
  }
  return best;
}

InheritanceGraph classify_edges(InheritanceGraph graph) {
  for (InheritanceEdge& edge : graph.edges_)
    edge.kind = graph.out_[edge.dst].empty() ? EdgeKind::terminal : EdgeKind::internal;
  return graph;
}

BfsTree bfs_tree(const InheritanceGraph& graph, NodeId root) {
  if (!graph.contains(root)) throw LookupError(fmt::format("unknown node {}", root));
  BfsTree tree;
  tree.root = root;
  tree.depth.assign(graph.nodes().size(), -1);
  tree.parent.assign(graph.nodes().size(), std::nullopt);
  tree.depth[root] = 0;
  tree.order.push_back(root);

  auto edge_order = [&](EdgeId a, EdgeId b) {
    const InheritanceEdge& x = graph.edge(a);
    const InheritanceEdge& y = graph.edge(b);
    return std::tie(x.date, x.paper, x.src_author, a) < std::tie(y.date, y.paper, y.src_author, b);
  };

  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    NodeId n = tree.order[head];
    for (EdgeId e : graph.out_edges(n)) {
      NodeId next = graph.edge(e).dst;
      if (tree.depth[next] == -1) {
        tree.depth[next] = tree.depth[n] + 1;
        tree.parent[next] = e;
        tree.max_depth = std::max(tree.max_depth, tree.depth[next]);
        tree.order.push_back(next);
      } else if (tree.depth[next] == tree.depth[n] + 1 && edge_order(e, *tree.parent[next])) {
        tree.parent[next] = e;
      }
    }
  }
  return tree;
}

std::vector<std::string> check_invariants(const InheritanceGraph& graph) {
  std::vector<std::string> problems;
  const auto nodes = graph.nodes();

  std::vector<std::size_t> indegree(nodes.size(), 0);
  for (const InheritanceEdge& e : graph.edges()) ++indegree[e.dst];
  std::vector<NodeId> ready;
  for (NodeId n = 0; n < nodes.size(); ++n)
    if (indegree[n] == 0) ready.push_back(n);
  std::size_t visited = 0;
  while (!ready.empty()) {
    NodeId n = ready.back();
    ready.pop_back();
    ++visited;
    for (EdgeId e : graph.out_edges(n))
      if (--indegree[graph.edge(e).dst] == 0) ready.push_back(graph.edge(e).dst);
  }
  if (visited != nodes.size()) problems.push_back("graph has a directed cycle");

  std::set<AuthorId> seen_authors;
  auto claim = [&](const AuthorId& a, NodeId n) {
    if (!seen_authors.insert(a).second)
      problems.push_back(fmt::format("author '{}' appears in more than one node (node {})", a.str(), n));
  };

  for (NodeId n = 0; n < nodes.size(); ++n) {
    const GraphNode& node = nodes[n];
    auto incoming = graph.in_edges(n);
    if (node.kind == NodeKind::source) {
      if (!incoming.empty()) problems.push_back(fmt::format("source node {} has incoming edges", n));
      if (node.members.empty()) problems.push_back(fmt::format("source node {} has no members", n));
      for (const AuthorId& a : node.members) claim(a, n);
      continue;
    }
    claim(node.author, n);
    if (incoming.empty()) {
      problems.push_back(fmt::format("author node {} ('{}') has no incoming edge", n, node.author.str()));
      continue;
    }
    for (EdgeId e : incoming) {
      const InheritanceEdge& edge = graph.edge(e);
      if (edge.paper != node.paper || edge.date != node.date)
        problems.push_back(fmt::format("edge {} into node {} is not dated at its first-use paper", e, n));
    }
  }

  for (EdgeId e = 0; e < graph.edges().size(); ++e) {
    const InheritanceEdge& edge = graph.edge(e);
    const GraphNode& src = nodes[edge.src];
    if (src.kind == NodeKind::source &&
        std::find(src.members.begin(), src.members.end(), edge.src_author) == src.members.end())
      problems.push_back(fmt::format("edge {} src_author is not a member of its source node", e));
    if (src.kind == NodeKind::author && src.author != edge.src_author)
      problems.push_back(fmt::format("edge {} src_author differs from its source author", e));
    if (src.date > edge.date) problems.push_back(fmt::format("edge {} goes backwards in time", e));
  }
  return problems;
}

const char* to_string(EdgeKind kind) { return kind == EdgeKind::internal ? "internal" : "terminal"; }
const char* to_string(NodeKind kind) { return kind == NodeKind::author ? "author" : "source"; }

nlohmann::ordered_json graph_to_json(const InheritanceGraph& graph) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["macro"] = graph.macro().body();
  ordered_json nodes = ordered_json::array();
  for (NodeId n = 0; n < graph.nodes().size(); ++n) {
    const GraphNode& node = graph.node(n);
    ordered_json j;
    j["id"] = n;
    j["kind"] = to_string(node.kind);
    if (node.kind == NodeKind::author) {
      j["author"] = node.author.str();
      j["paper"] = nullptr;
      j["members"] = nullptr;
    } else {
      j["author"] = nullptr;
      j["paper"] = node.paper;
      ordered_json members = ordered_json::array();
      for (const AuthorId& a : node.members) members.push_back(a.str());
      j["members"] = std::move(members);
    }
    j["date"] = node.date.str();
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const InheritanceEdge& e : graph.edges()) {
    ordered_json j;
    j["src"] = e.src;
    j["dst"] = e.dst;
    j["paper"] = e.paper;
    j["date"] = e.date.str();
    j["src_author"] = e.src_author.str();
    j["kind"] = to_string(e.kind);
    edges.push_back(std::move(j));
  }
  doc["edges"] = std::move(edges);
  return doc;
}

InheritanceGraph graph_from_json(const nlohmann::json& doc) {
  try {
    std::vector<GraphNode> nodes;
    std::map<std::size_t, std::size_t> position;
    for (const auto& j : doc.at("nodes")) {
      GraphNode node;
      std::string kind = j.at("kind").get<std::string>();
      if (kind == "author") {
        node.kind = NodeKind::author;
        node.author = AuthorId(j.at("author").get<std::string>());
      } else if (kind == "source") {
        node.kind = NodeKind::source;
        node.paper = j.at("paper").get<std::string>();
        for (const auto& m : j.at("members")) node.members.emplace_back(m.get<std::string>());
      } else {
        throw std::invalid_argument(fmt::format("unknown node kind '{}'", kind));
      }
      if (j.contains("date")) node.date = Month::parse(j.at("date").get<std::string>());
      std::size_t id = j.at("id").get<std::size_t>();
      if (!position.emplace(id, nodes.size()).second)
        throw std::invalid_argument(fmt::format("duplicate node id {}", id));
      nodes.push_back(std::move(node));
    }

    std::vector<InheritanceEdge> edges;
    for (const auto& j : doc.at("edges")) {
      InheritanceEdge e;
      e.src = position.at(j.at("src").get<std::size_t>());
      e.dst = position.at(j.at("dst").get<std::size_t>());
      e.paper = j.at("paper").get<std::string>();
      e.date = Month::parse(j.at("date").get<std::string>());
      e.src_author = AuthorId(j.at("src_author").get<std::string>());
      std::string kind = j.at("kind").get<std::string>();
      if (kind != "internal" && kind != "terminal")
        throw std::invalid_argument(fmt::format("unknown edge kind '{}'", kind));
      e.kind = kind == "internal" ? EdgeKind::internal : EdgeKind::terminal;
      edges.push_back(std::move(e));
    }

    // Author nodes recover their first-use paper from an incoming edge. Older
    // documents without node dates fall back to edge dates.
    for (const InheritanceEdge& e : edges) {
      GraphNode& dst = nodes[e.dst];
      if (dst.paper.empty()) {
        dst.paper = e.paper;
        dst.date = e.date;
      }
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const auto& j = doc.at("nodes").at(n);
      if (nodes[n].kind != NodeKind::source || j.contains("date")) continue;
      for (const InheritanceEdge& e : edges)
        if (e.src == n && (nodes[n].date == Month{} || e.date < nodes[n].date)) nodes[n].date = e.date;
    }
    return InheritanceGraph(MacroKey(doc.at("macro").get<std::string>()), std::move(nodes), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed graph document: {}", e.what()));
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(fmt::format("malformed graph document: {}", e.what()));
  }
}

}  // namespace macroflow
