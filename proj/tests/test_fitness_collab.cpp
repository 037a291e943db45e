#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "macroflow/error.hpp"
#include "macroflow/fitness_collab.hpp"
#include "test_util.hpp"

using namespace macroflow;
using macroflow::testing::make_paper;
using macroflow::testing::random_corpus;

namespace {

const std::string body = "\\mathcal{O}\\left(n \\log n\\right)";

std::vector<InheritanceGraph> all_graphs(const Corpus& corpus) {
  std::vector<MacroIndex> idx(corpus.macros().size());
  for (MacroIndex m = 0; m < idx.size(); ++m) idx[m] = m;
  return build_all_graphs(corpus, idx);
}

CollabPair make_pair(const std::string& u, const std::string& v, const char* month, EdgeClass cls,
                     std::size_t future) {
  CollabPair p;
  p.u = AuthorId(u);
  p.v = AuthorId(v);
  p.month = Month::parse(month);
  p.edge_class = cls;
  p.future_joint_papers = future;
  return p;
}

}  // namespace

TEST_CASE("three-paper chain: transmitting pair is internal, last pair terminal") {
  Corpus c({make_paper("p1", "2000-01", {"A"}, {{"m", body}}),
            make_paper("p2", "2000-02", {"A", "B"}, {{"m", body}}),
            make_paper("p3", "2000-03", {"B", "C"}, {{"m", body}}),
            make_paper("p4", "2000-04", {"D"})});
  auto graphs = all_graphs(c);
  auto pairs = enumerate_first_collaborations(c, graphs);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].u == AuthorId("a"));
  CHECK(pairs[0].v == AuthorId("b"));
  CHECK(pairs[0].paper == "p2");
  CHECK(pairs[0].edge_class == EdgeClass::internal);
  CHECK(pairs[1].paper == "p3");
  CHECK(pairs[1].edge_class == EdgeClass::terminal);
}

TEST_CASE("future joint papers count papers strictly after the first") {
  Corpus c({make_paper("a", "1998-03", {"U", "V"}), make_paper("b", "1998-05", {"U", "V", "W"}),
            make_paper("c", "1999-01", {"V", "U"}), make_paper("d", "2001-07", {"U", "V"})});
  auto pairs = enumerate_first_collaborations(c, {});
  auto it = std::find_if(pairs.begin(), pairs.end(), [](const CollabPair& p) { return p.u == AuthorId("u") && p.v == AuthorId("v"); });
  REQUIRE(it != pairs.end());
  CHECK(it->paper == "a");
  CHECK(it->month == Month::parse("1998-03"));
  CHECK(it->future_joint_papers == 3);
  CHECK(it->edge_class == EdgeClass::non_edge);
  CHECK(pairs.size() == 3);  // u-v, u-w, v-w
}

TEST_CASE("edge from an earlier paper does not label a later first collaboration") {
  // B learns from A on p2; A and C first meet on p3 where nothing is transmitted.
  Corpus c({make_paper("p1", "2000-01", {"A"}, {{"m", body}}),
            make_paper("p2", "2000-02", {"A", "B"}, {{"m", body}}),
            make_paper("p3", "2000-03", {"A", "C"})});
  auto graphs = all_graphs(c);
  auto pairs = enumerate_first_collaborations(c, graphs);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].edge_class == EdgeClass::terminal);
  CHECK(pairs[1].edge_class == EdgeClass::non_edge);
}

TEST_CASE("internal dominates terminal across macros") {
  const std::string other = "\\operatorname{argmax}_{x \\in X}";
  Corpus c({make_paper("p1", "2000-01", {"A"}, {{"m", body}, {"n", other}}),
            make_paper("p2", "2000-02", {"A", "B"}, {{"m", body}, {"n", other}}),
            make_paper("p3", "2000-03", {"B", "C"}, {{"m", body}})});
  auto graphs = all_graphs(c);
  auto pairs = enumerate_first_collaborations(c, graphs);
  CHECK(pairs[0].edge_class == EdgeClass::internal);
}

TEST_CASE("enumeration matches a brute-force pair scan") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Corpus c = random_corpus(seed, 80, 10, 4);
    auto graphs = all_graphs(c);
    auto pairs = enumerate_first_collaborations(c, graphs);

    std::map<std::pair<AuthorId, AuthorId>, std::vector<PaperPos>> joint;
    for (PaperPos p = 0; p < c.size(); ++p)
      for (const AuthorId& a : c.paper(p).authors)
        for (const AuthorId& b : c.paper(p).authors)
          if (a < b) joint[{a, b}].push_back(p);
    REQUIRE(pairs.size() == joint.size());
    for (const CollabPair& p : pairs) {
      const auto& list = joint.at({p.u, p.v});
      CHECK(p.first_joint == list.front());
      CHECK(p.future_joint_papers == list.size() - 1);
      EdgeClass expect = EdgeClass::non_edge;
      for (const auto& g : graphs)
        for (const auto& e : g.edges()) {
          const AuthorId& learner = g.node(e.dst).author;
          bool same = (e.src_author == p.u && learner == p.v) || (e.src_author == p.v && learner == p.u);
          if (!same || e.paper != p.paper) continue;
          if (e.kind == EdgeKind::internal)
            expect = EdgeClass::internal;
          else if (expect == EdgeClass::non_edge)
            expect = EdgeClass::terminal;
        }
      CHECK(p.edge_class == expect);
    }
    for (std::size_t i = 1; i < pairs.size(); ++i)
      CHECK(std::tie(pairs[i - 1].first_joint, pairs[i - 1].u, pairs[i - 1].v) <
            std::tie(pairs[i].first_joint, pairs[i].u, pairs[i].v));
  }
}

TEST_CASE("singleton month: treatment 3 vs control 1 wins") {
  std::vector<CollabPair> pairs{make_pair("a", "b", "2004-05", EdgeClass::internal, 3),
                                make_pair("c", "d", "2004-05", EdgeClass::non_edge, 1)};
  auto r = match_and_compare(pairs, Setting::internal_vs_nonedge, 1);
  CHECK(r.matched == 1);
  CHECK(r.win_percentage == 100.0);
  REQUIRE(r.bins.size() == 1);
  CHECK(r.bins[0].bin_start_year == 2004);
  CHECK(r.bins[0].wins == 1);
}

TEST_CASE("equal futures count as half a win") {
  std::vector<CollabPair> pairs{make_pair("a", "b", "2005-05", EdgeClass::terminal, 2),
                                make_pair("c", "d", "2005-05", EdgeClass::non_edge, 2)};
  auto r = match_and_compare(pairs, Setting::terminal_vs_nonedge, 9);
  CHECK(r.win_percentage == 50.0);
  CHECK(r.bins[0].ties == 1);
  CHECK(r.bins[0].bin_start_year == 2004);
  auto any = arbitrary_vs_edge(pairs, 9);
  CHECK(any.win_percentage == 50.0);
}

TEST_CASE("controls sharing an author are never used") {
  std::vector<CollabPair> pairs{make_pair("a", "b", "2004-05", EdgeClass::internal, 3),
                                make_pair("a", "c", "2004-05", EdgeClass::non_edge, 1),
                                make_pair("b", "d", "2004-05", EdgeClass::non_edge, 1)};
  CHECK_THROWS_AS(match_and_compare(pairs, Setting::internal_vs_nonedge, 1), EmptyInputError);
  pairs.push_back(make_pair("e", "f", "2004-05", EdgeClass::non_edge, 7));
  auto r = match_and_compare(pairs, Setting::internal_vs_nonedge, 1);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].second == 3);
  CHECK(r.win_percentage == 0.0);
}

TEST_CASE("no matchable month is an error naming the months") {
  std::vector<CollabPair> pairs{make_pair("a", "b", "2004-05", EdgeClass::internal, 3),
                                make_pair("c", "d", "2004-06", EdgeClass::non_edge, 1)};
  try {
    match_and_compare(pairs, Setting::internal_vs_nonedge, 1);
    FAIL("expected an error");
  } catch (const EmptyInputError& e) {
    CHECK(std::string(e.what()).find("2004-05") != std::string::npos);
  }
}

namespace {

std::vector<CollabPair> random_pairs(std::uint64_t seed, std::size_t n, double internal_boost) {
  Rng rng(seed);
  std::vector<CollabPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rng.uniform();
    EdgeClass cls = r < 0.3 ? EdgeClass::internal : r < 0.5 ? EdgeClass::terminal : EdgeClass::non_edge;
    const double lambda = 1.5 + (cls == EdgeClass::internal ? internal_boost : 0.0);
    const int month = rng.between(0, 47);
    out.push_back(make_pair(fmt::format("x{}", i), fmt::format("y{}", i),
                            Month::from_index(Month{2000, 1}.index() + month).str().c_str(), cls,
                            static_cast<std::size_t>(rng.poisson(lambda))));
  }
  return out;
}

}  // namespace

TEST_CASE("permutation null lands at 50 percent") {
  auto pairs = random_pairs(11, 16000, 2.0);
  auto shuffled = permute_edge_classes(pairs, 5);
  auto r = match_and_compare(shuffled, Setting::internal_vs_nonedge, 3);
  CHECK(r.matched >= 2000);
  CHECK(r.win_percentage == doctest::Approx(50.0).epsilon(0.06));
  auto biased = match_and_compare(pairs, Setting::internal_vs_nonedge, 3);
  CHECK(biased.win_percentage > 55.0);
}

TEST_CASE("permutation keeps each month's class multiset") {
  auto pairs = random_pairs(4, 500, 0.0);
  auto shuffled = permute_edge_classes(pairs, 8);
  std::map<int, std::multiset<int>> before, after;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    before[pairs[i].month.index()].insert(static_cast<int>(pairs[i].edge_class));
    after[shuffled[i].month.index()].insert(static_cast<int>(shuffled[i].edge_class));
    CHECK(pairs[i].future_joint_papers == shuffled[i].future_joint_papers);
  }
  CHECK(before == after);
}

TEST_CASE("matches stay within a month, use disjoint authors, and respect categories") {
  auto pairs = random_pairs(21, 3000, 1.0);
  // Reuse authors across pairs so the disjointness rule has work to do.
  Rng rng(2);
  for (auto& p : pairs) {
    p.u = AuthorId(fmt::format("a{:03d}", rng.index(40)));
    do p.v = AuthorId(fmt::format("a{:03d}", rng.index(40)));
    while (p.v == p.u);
    if (p.v < p.u) std::swap(p.u, p.v);
  }
  for (Setting s : {Setting::internal_vs_nonedge, Setting::internal_vs_terminal, Setting::terminal_vs_nonedge,
                    Setting::edge_vs_nonedge}) {
    auto r = match_and_compare(pairs, s, 17);
    std::set<std::size_t> used;
    std::size_t total = 0;
    for (auto [t, c] : r.matches) {
      CHECK(pairs[t].month == pairs[c].month);
      std::set<AuthorId> four{pairs[t].u, pairs[t].v, pairs[c].u, pairs[c].v};
      CHECK(four.size() == 4);
      CHECK(used.insert(t).second);
      CHECK(used.insert(c).second);
      CHECK(pairs[c].edge_class != pairs[t].edge_class);
    }
    for (const auto& b : r.bins) {
      CHECK(b.wins + b.losses + b.ties == b.n_pairs);
      CHECK(b.win_percentage >= 0.0);
      CHECK(b.win_percentage <= 100.0);
      CHECK(b.bin_start_year % 2 == 0);
      total += b.n_pairs;
    }
    CHECK(total == r.matched);
    CHECK(r.matches.size() == r.matched);

    auto again = match_and_compare(pairs, s, 17);
    CHECK(again.matches == r.matches);
    CHECK(again.win_percentage == r.win_percentage);
  }
}
