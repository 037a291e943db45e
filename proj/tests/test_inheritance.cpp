#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "doctest.h"
#include "macroflow/error.hpp"
#include "macroflow/inheritance.hpp"
#include "test_util.hpp"

using namespace macroflow;
using macroflow::testing::make_paper;

namespace {

const std::string kBody = "\\hbox{$\\rm\\thinspace L_{\\odot}$}";

GraphNode source_node(const std::string& paper, const char* date, std::vector<std::string> members) {
  GraphNode n;
  n.kind = NodeKind::source;
  n.paper = paper;
  n.date = Month::parse(date);
  for (auto& m : members) n.members.emplace_back(m);
  return n;
}

GraphNode author_node(const std::string& author, const std::string& paper, const char* date) {
  GraphNode n;
  n.author = AuthorId(author);
  n.paper = paper;
  n.date = Month::parse(date);
  return n;
}

InheritanceEdge edge(NodeId src, NodeId dst, const std::string& paper, const char* date, const std::string& teacher) {
  return {src, dst, paper, Month::parse(date), AuthorId(teacher), EdgeKind::terminal};
}

// Random DAG over ids 0..n-1 with edges only from lower to higher ids; the
// first `sources` nodes are source nodes.
InheritanceGraph random_dag(Rng& rng, std::size_t n, std::size_t sources, double density) {
  std::vector<GraphNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    std::string name = "n" + std::to_string(i);
    if (i < sources)
      nodes.push_back(source_node("s" + std::to_string(i), "2000-01", {name}));
    else
      nodes.push_back(author_node(name, "q" + std::to_string(i), "2001-01"));
  }
  std::vector<InheritanceEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = std::max(i + 1, sources); j < n; ++j)
      if (rng.bernoulli(density)) edges.push_back(edge(i, j, "q" + std::to_string(j), "2001-01", "n" + std::to_string(i)));
  return InheritanceGraph(MacroKey("random"), std::move(nodes), std::move(edges));
}

}  // namespace

TEST_CASE("single source paper gives one source node and no edges") {
  Corpus c({make_paper("P1", "1994-05", {"a", "b"}, {{"m", kBody}})});
  InheritanceGraph g = build_inheritance_graph(c, MacroKey(kBody));
  REQUIRE(g.nodes().size() == 1);
  CHECK(g.node(0).kind == NodeKind::source);
  CHECK(g.node(0).members.size() == 2);
  CHECK(g.edges().empty());
  CHECK(check_invariants(g).empty());
}

TEST_CASE("edge from a source node keeps its teaching author") {
  Corpus c({make_paper("P1", "1994-05", {"a", "b"}, {{"m", kBody}}),
            make_paper("P2", "1995-01", {"b", "c"}, {{"m", kBody}})});
  InheritanceGraph g = build_inheritance_graph(c, MacroKey(kBody));
  REQUIRE(g.sources().size() == 1);
  REQUIRE(g.edges().size() == 1);
  const InheritanceEdge& e = g.edge(0);
  CHECK(e.src == g.sources()[0]);
  CHECK(g.node(e.dst).author == AuthorId("c"));
  CHECK(e.src_author == AuthorId("b"));
  CHECK(e.paper == "P2");
  CHECK(e.date == Month::parse("1995-01"));
  CHECK(e.kind == EdgeKind::terminal);
}

TEST_CASE("paper with no first-time user contributes nothing") {
  Corpus c({make_paper("P0", "1993-01", {"u"}, {{"m", kBody}}),
            make_paper("P0b", "1993-02", {"v"}, {{"m", kBody}}),
            make_paper("P1", "1994-01", {"u", "v"}, {{"m", kBody}})});
  InheritanceGraph g = build_inheritance_graph(c, MacroKey(kBody));
  CHECK(g.sources().size() == 2);
  CHECK(g.edges().empty());
  CHECK_FALSE(g.find_source("P1"));
}

TEST_CASE("several teachers on one paper each get an edge") {
  Corpus c({make_paper("P1", "1994-01", {"u"}, {{"m", kBody}}),
            make_paper("P2", "1994-02", {"v"}, {{"m", kBody}}),
            make_paper("P3", "1994-03", {"u", "v", "z"}, {{"m", kBody}})});
  InheritanceGraph g = build_inheritance_graph(c, MacroKey(kBody));
  REQUIRE(g.edges().size() == 2);
  NodeId z = *g.find_author(AuthorId("z"));
  CHECK(g.in_edges(z).size() == 2);
  std::set<std::string> teachers;
  for (const auto& e : g.edges()) teachers.insert(e.src_author.str());
  CHECK(teachers == std::set<std::string>{"u", "v"});
}

TEST_CASE("same-month first uses are ordered by paper id") {
  Corpus c({make_paper("B", "1994-01", {"a", "b"}, {{"m", kBody}}),
            make_paper("A", "1994-01", {"a"}, {{"m", kBody}})});
  InheritanceGraph g = build_inheritance_graph(c, MacroKey(kBody));
  // A sorts first, so a's first use is A (a source) and b learns from a on B.
  REQUIRE(g.sources().size() == 1);
  CHECK(g.node(g.sources()[0]).paper == "A");
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edge(0).paper == "B");
}

TEST_CASE("unknown macro") {
  Corpus c({make_paper("P1", "1994-05", {"a"}, {{"m", kBody}})});
  CHECK_THROWS_AS(build_inheritance_graph(c, MacroKey("missing")), LookupError);
}

TEST_CASE("reachable sets") {
  // source -> c -> d
  std::vector<GraphNode> nodes{source_node("P1", "1994-01", {"a"}), author_node("c", "P2", "1995-01"),
                               author_node("d", "P3", "1996-01"), source_node("P4", "1994-02", {"x"})};
  std::vector<InheritanceEdge> edges{edge(0, 1, "P2", "1995-01", "a"), edge(1, 2, "P3", "1996-01", "c")};
  InheritanceGraph g(MacroKey("m"), nodes, edges);
  CHECK(reachable_set(g, 0) == std::vector<NodeId>{1, 2});
  CHECK(reachable_set(g, 1) == std::vector<NodeId>{2});
  CHECK(reachable_set(g, 3).empty());
  CHECK_THROWS_AS(reachable_set(g, 17), LookupError);
}

TEST_CASE("reachable_set matches a transitive-closure oracle on random DAGs") {
  Rng rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = 1 + rng.index(12);
    std::size_t sources = 1 + rng.index(std::min<std::size_t>(n, 3));
    InheritanceGraph g = random_dag(rng, n, sources, 0.1 + 0.5 * rng.uniform());
    // Floyd-Warshall style closure over an adjacency matrix.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& e : g.edges()) reach[e.src][e.dst] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (NodeId s = 0; s < n; ++s) {
      std::vector<NodeId> expected;
      for (NodeId t = 0; t < n; ++t)
        if (t != s && reach[s][t] && g.node(t).kind == NodeKind::author) expected.push_back(t);
      REQUIRE(reachable_set(g, s) == expected);
    }
  }
}

TEST_CASE("find_seed") {
  SUBCASE("largest reachable set wins, even when later") {
    std::vector<GraphNode> nodes{source_node("P1", "1994-01", {"a"}), source_node("P2", "1995-01", {"b"}),
                                 author_node("c", "P3", "1996-01"), author_node("d", "P4", "1996-02"),
                                 author_node("e", "P5", "1996-03")};
    std::vector<InheritanceEdge> edges{edge(1, 2, "P3", "1996-01", "b"), edge(2, 3, "P4", "1996-02", "c"),
                                       edge(0, 4, "P5", "1996-03", "a")};
    InheritanceGraph g(MacroKey("m"), nodes, edges);
    CHECK(find_seed(g) == 1);
  }
  SUBCASE("single source") {
    InheritanceGraph g(MacroKey("m"), {source_node("P1", "1994-01", {"a"})}, {});
    CHECK(find_seed(g) == 0);
  }
  SUBCASE("ties go to the earlier date") {
    InheritanceGraph g(MacroKey("m"),
                       {source_node("P9", "1995-01", {"a"}), source_node("P1", "1994-05", {"b"})}, {});
    CHECK(find_seed(g) == 1);
  }
  SUBCASE("ties in the same month go to the smaller paper id") {
    InheritanceGraph g(MacroKey("m"),
                       {source_node("P9", "1995-01", {"a"}), source_node("P1", "1995-01", {"b"})}, {});
    CHECK(find_seed(g) == 1);
  }
  SUBCASE("no sources") {
    InheritanceGraph g(MacroKey("m"), {author_node("a", "P1", "1994-01")}, {});
    CHECK_THROWS_AS(find_seed(g), EmptyInputError);
  }
}

TEST_CASE("classify_edges") {
  SUBCASE("chain") {
    std::vector<GraphNode> nodes{source_node("P1", "1994-01", {"a"}), author_node("c", "P2", "1995-01"),
                                 author_node("d", "P3", "1996-01")};
    InheritanceGraph g = classify_edges(InheritanceGraph(
        MacroKey("m"), nodes, {edge(0, 1, "P2", "1995-01", "a"), edge(1, 2, "P3", "1996-01", "c")}));
    CHECK(g.edge(0).kind == EdgeKind::internal);
    CHECK(g.edge(1).kind == EdgeKind::terminal);
  }
  SUBCASE("star") {
    std::vector<GraphNode> nodes{source_node("P1", "1994-01", {"a"}), author_node("b", "P2", "1995-01"),
                                 author_node("c", "P2", "1995-01"), author_node("d", "P2", "1995-01")};
    InheritanceGraph g = classify_edges(InheritanceGraph(
        MacroKey("m"), nodes,
        {edge(0, 1, "P2", "1995-01", "a"), edge(0, 2, "P2", "1995-01", "a"), edge(0, 3, "P2", "1995-01", "a")}));
    for (const auto& e : g.edges()) CHECK(e.kind == EdgeKind::terminal);
  }
  SUBCASE("no edges") {
    InheritanceGraph g = classify_edges(InheritanceGraph(MacroKey("m"), {source_node("P1", "1994-01", {"a"})}, {}));
    CHECK(g.edges().empty());
  }
}

TEST_CASE("bfs_tree") {
  SUBCASE("chain of length 3") {
    std::vector<GraphNode> nodes{source_node("P1", "1994-01", {"a"}), author_node("b", "P2", "1995-01"),
                                 author_node("c", "P3", "1996-01"), author_node("d", "P4", "1997-01")};
    InheritanceGraph g(MacroKey("m"), nodes,
                       {edge(0, 1, "P2", "1995-01", "a"), edge(1, 2, "P3", "1996-01", "b"),
                        edge(2, 3, "P4", "1997-01", "c")});
    BfsTree t = bfs_tree(g, 0);
    CHECK(t.depth == std::vector<int>{0, 1, 2, 3});
    CHECK(t.max_depth == 3);
    CHECK_FALSE(t.parent[0]);
  }
  SUBCASE("diamond picks the smallest teacher edge") {
    // root -> {y, x} -> c, all of c's incoming edges on the same paper.
    std::vector<GraphNode> nodes{source_node("P1", "1994-01", {"r"}), author_node("y", "P2", "1995-01"),
                                 author_node("x", "P2", "1995-01"), author_node("c", "P3", "1996-01")};
    InheritanceGraph g(MacroKey("m"), nodes,
                       {edge(0, 1, "P2", "1995-01", "r"), edge(0, 2, "P2", "1995-01", "r"),
                        edge(1, 3, "P3", "1996-01", "y"), edge(2, 3, "P3", "1996-01", "x")});
    BfsTree t = bfs_tree(g, 0);
    CHECK(t.depth[3] == 2);
    REQUIRE(t.parent[3]);
    CHECK(g.edge(*t.parent[3]).src_author == AuthorId("x"));
  }
  SUBCASE("unknown root") {
    InheritanceGraph g(MacroKey("m"), {source_node("P1", "1994-01", {"a"})}, {});
    CHECK_THROWS_AS(bfs_tree(g, 4), LookupError);
  }
}

TEST_CASE("bfs depths equal shortest-path distances on random DAGs") {
  Rng rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = 1 + rng.index(12);
    InheritanceGraph g = random_dag(rng, n, 1 + rng.index(std::min<std::size_t>(n, 3)), 0.35);
    const int inf = 1 << 20;
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i) dist[i][i] = 0;
    for (const auto& e : g.edges()) dist[e.src][e.dst] = 1;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
    for (NodeId root = 0; root < n; ++root) {
      BfsTree t = bfs_tree(g, root);
      for (NodeId v = 0; v < n; ++v) {
        REQUIRE(t.depth[v] == (dist[root][v] >= inf ? -1 : dist[root][v]));
        if (t.depth[v] > 0) {
          REQUIRE(t.parent[v]);
          const auto& pe = g.edge(*t.parent[v]);
          CHECK(pe.dst == v);
          CHECK(t.depth[pe.src] == t.depth[v] - 1);
          // No other edge from the previous layer sorts before the parent edge.
          for (EdgeId e : g.in_edges(v))
            if (t.depth[g.edge(e).src] == t.depth[v] - 1)
              CHECK_FALSE(std::tie(g.edge(e).date, g.edge(e).paper, g.edge(e).src_author, e) <
                          std::tie(pe.date, pe.paper, pe.src_author, *t.parent[v]));
        }
      }
    }
  }
}

TEST_CASE("built graphs satisfy the structural invariants") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Corpus c = macroflow::testing::random_corpus(seed, 80, 14, 6);
    for (MacroIndex m = 0; m < c.macros().size(); ++m) {
      InheritanceGraph g = build_inheritance_graph(c, m);
      auto problems = check_invariants(g);
      INFO(fmt::format("seed {} macro {}: {}", seed, m, problems.empty() ? "" : problems.front()));
      CHECK(problems.empty());
      // Every user of the body appears exactly once.
      CHECK(g.author_count() == c.distinct_users(m));
      for (const auto& e : g.edges()) {
        bool has_out = !g.out_edges(e.dst).empty();
        CHECK((e.kind == EdgeKind::internal) == has_out);
      }
    }
  }
}

TEST_CASE("check_invariants reports violations") {
  std::vector<GraphNode> nodes{author_node("a", "P1", "1994-01"), author_node("b", "P2", "1995-01")};
  InheritanceGraph cyclic(MacroKey("m"), nodes,
                          {edge(0, 1, "P2", "1995-01", "a"), edge(1, 0, "P1", "1994-01", "b")});
  auto problems = check_invariants(cyclic);
  CHECK(std::any_of(problems.begin(), problems.end(), [](const auto& p) { return p.find("cycle") != std::string::npos; }));

  InheritanceGraph orphan(MacroKey("m"), {author_node("a", "P1", "1994-01")}, {});
  CHECK_FALSE(check_invariants(orphan).empty());

  InheritanceGraph dup(MacroKey("m"), {source_node("P1", "1994-01", {"a"}), source_node("P2", "1994-02", {"a"})}, {});
  CHECK_FALSE(check_invariants(dup).empty());
}

TEST_CASE("graph JSON round trip") {
  Corpus c = macroflow::testing::random_corpus(11, 80, 10, 4);
  for (MacroIndex m = 0; m < c.macros().size(); ++m) {
    InheritanceGraph g = build_inheritance_graph(c, m);
    auto doc = graph_to_json(g);
    CHECK(doc.at("nodes").size() == g.nodes().size());
    InheritanceGraph back = graph_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(graph_to_json(back).dump() == doc.dump());
    CHECK(find_seed(back) == find_seed(g));
    for (NodeId n = 0; n < g.nodes().size(); ++n) {
      CHECK(back.node(n).date == g.node(n).date);
      CHECK(back.node(n).paper == g.node(n).paper);
    }
  }
  CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"macro":"x","nodes":[{"id":0,"kind":"blob"}],"edges":[]})")),
                  std::invalid_argument);
}

TEST_CASE("build_all_graphs is independent of the job count") {
  Corpus c = macroflow::testing::random_corpus(13, 120, 16, 8);
  std::vector<MacroIndex> all(c.macros().size());
  for (MacroIndex m = 0; m < all.size(); ++m) all[m] = m;
  auto serial = build_all_graphs(c, all, 1);
  auto threaded = build_all_graphs(c, all, 4);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(graph_to_json(serial[i]).dump() == graph_to_json(threaded[i]).dump());
}
