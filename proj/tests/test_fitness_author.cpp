#include <doctest.h>

#include <cmath>
#include <map>

#include "macroflow/error.hpp"
#include "macroflow/fitness_author.hpp"
#include "test_util.hpp"

using namespace macroflow;
using macroflow::testing::make_paper;
using macroflow::testing::random_corpus;

namespace {

const std::string body = "\\mathbb{E}\\left[#1\\right]_{\\text{x}}";

Corpus named_uses(const std::vector<std::string>& names) {
  std::vector<Paper> papers;
  for (std::size_t i = 0; i < names.size(); ++i)
    papers.push_back(make_paper(fmt::format("p{}", i), fmt::format("2001-{:02d}", i + 1).c_str(), {"A"},
                                {{names[i], body}}));
  return Corpus(std::move(papers));
}

std::vector<bool> changes(const std::vector<NameChangeEvent>& events) {
  std::vector<bool> out;
  for (const auto& e : events) out.push_back(e.changed);
  return out;
}

}  // namespace

TEST_CASE("name change events") {
  {
    Corpus c = named_uses({"n1", "n1", "n1"});
    auto ev = name_change_events(c, AuthorId("A"), MacroKey(body));
    CHECK(changes(ev) == std::vector<bool>{false, false});
    CHECK(ev[0].x == 2);
    CHECK(ev[1].x == 3);
  }
  {
    Corpus c = named_uses({"n1", "n2", "n1"});
    CHECK(changes(name_change_events(c, AuthorId("A"), MacroKey(body))) == std::vector<bool>{true, true});
  }
  {
    Corpus c = named_uses({"n1"});
    CHECK(name_change_events(c, AuthorId("A"), MacroKey(body)).empty());
  }
}

TEST_CASE("curve extremes: constant names give 0, alternating names give 1") {
  std::vector<std::string> same(12, "n"), alt;
  for (int i = 0; i < 12; ++i) alt.push_back(i % 2 ? "a" : "b");
  auto flat = name_change_curve(named_uses(same), 5, MacroSet::all, LifeStage::full);
  auto flip = name_change_curve(named_uses(alt), 5, MacroSet::all, LifeStage::full);
  CHECK(flat.authors == 1);
  REQUIRE(flat.points.size() == 39);
  CHECK(flat.points.front().x == 2);
  CHECK(flat.points.back().x == 40);
  for (std::size_t i = 0; i < flat.points.size(); ++i) {
    const std::size_t x = flat.points[i].x;
    if (x <= 12) {
      CHECK(*flat.points[i].f == 0.0);
      CHECK(*flip.points[i].f == 1.0);
    } else {
      CHECK_FALSE(flat.points[i].f.has_value());
    }
  }
}

TEST_CASE("curve needs authors above theta") {
  CHECK_THROWS_AS(name_change_curve(named_uses({"a", "b"}), 2, MacroSet::all, LifeStage::full), EmptyInputError);
  CHECK_NOTHROW(name_change_curve(named_uses({"a", "b", "c"}), 2, MacroSet::all, LifeStage::full));
}

TEST_CASE("early life keeps the first 40 papers only") {
  std::vector<Paper> papers;
  for (int i = 0; i < 50; ++i) {
    std::vector<macroflow::testing::Use> uses;
    if (i >= 35) uses.push_back({i % 2 ? "a" : "b", body});
    papers.push_back(make_paper(fmt::format("p{:02d}", i), Month::from_index(24000 + i).str().c_str(), {"A"}, uses));
  }
  Corpus c(std::move(papers));
  auto full = name_change_curve(c, 10, MacroSet::all, LifeStage::full);
  auto early = name_change_curve(c, 10, MacroSet::all, LifeStage::early);
  std::size_t full_events = 0, early_events = 0;
  for (const auto& p : full.points) full_events += p.events;
  for (const auto& p : early.points) early_events += p.events;
  CHECK(full_events == 14);  // uses on papers 35..49
  CHECK(early_events == 4);  // events on papers 36..39
}

TEST_CASE("curve equals a pooled recount and nests across macro sets") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Corpus c = random_corpus(seed, 250, 10, 6);
    for (LifeStage life : {LifeStage::full, LifeStage::early}) {
      auto curve = name_change_curve(c, 15, MacroSet::all, life, 3);
      std::map<std::size_t, std::pair<std::size_t, std::size_t>> recount;
      for (AuthorIndex a = 0; a < c.authors().size(); ++a) {
        if (c.papers_of(a).size() <= 15) continue;
        auto mine = c.papers_of(a);
        for (MacroIndex m = 0; m < c.macros().size(); ++m)
          for (const auto& e : name_change_events(c, a, m)) {
            if (e.x > 40) continue;
            auto rank = std::find(mine.begin(), mine.end(), e.paper) - mine.begin();
            if (life == LifeStage::early && rank >= 40) continue;
            ++recount[e.x].first;
            if (e.changed) ++recount[e.x].second;
          }
      }
      for (const auto& p : curve.points) {
        CHECK(p.events == recount[p.x].first);
        CHECK(p.changes == recount[p.x].second);
        if (p.f) {
          CHECK(*p.f >= 0.0);
          CHECK(*p.f <= 1.0);
        }
      }
      auto wide = name_change_curve(c, 15, MacroSet::wide_spread, life);
      auto narrow = name_change_curve(c, 15, MacroSet::narrow_spread, life);
      for (std::size_t i = 0; i < curve.points.size(); ++i)
        CHECK(wide.points[i].events + narrow.points[i].events <= curve.points[i].events);
    }
  }
}

TEST_CASE("macro set membership uses unfiltered distinct users") {
  std::vector<Paper> papers;
  for (int i = 0; i < 251; ++i) {
    std::vector<macroflow::testing::Use> uses{{"w", "\\widebody{x}_{spread across many}"}};
    if (i < 20) uses.push_back({"n", "\\narrowbody{x}_{spread across some}"});
    if (i < 19) uses.push_back({"t", "\\tinybody{x}_{spread across few ones}"});
    papers.push_back(make_paper(fmt::format("p{:03d}", i), "2000-01", {fmt::format("a{}", i)}, uses));
  }
  Corpus c(std::move(papers));
  auto idx = [&](const char* b) { return c.macro_index(MacroKey(b)); };
  MacroIndex w = idx("\\widebody{x}_{spread across many}");
  MacroIndex n = idx("\\narrowbody{x}_{spread across some}");
  MacroIndex t = idx("\\tinybody{x}_{spread across few ones}");
  CHECK(in_macro_set(c, w, MacroSet::wide_spread));
  CHECK_FALSE(in_macro_set(c, w, MacroSet::narrow_spread));
  CHECK(in_macro_set(c, n, MacroSet::narrow_spread));
  CHECK_FALSE(in_macro_set(c, t, MacroSet::narrow_spread));
  CHECK(in_macro_set(c, t, MacroSet::all));
}

TEST_CASE("nearest-rank thresholds") {
  std::vector<std::size_t> once, tenfold;
  for (std::size_t v = 1; v <= 10; ++v) {
    once.push_back(v);
    for (int k = 0; k < 10; ++k) tenfold.push_back(v);
  }
  auto a = percentile_thresholds(once, 0);
  CHECK(a.p20 == 2);
  CHECK(a.p80 == 8);
  auto b = percentile_thresholds(tenfold, 0);
  CHECK(b.p20 == 2);
  CHECK(b.p80 == 8);
  CHECK(b.eligible == 100);
  auto c = percentile_thresholds(once, 6);  // {6..10}: ranks 1 and 4
  CHECK(c.p20 == 6);
  CHECK(c.p80 == 9);
  CHECK_THROWS_AS(percentile_thresholds(once, 7), EmptyInputError);
}

TEST_CASE("thresholds match a sort-and-index oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(rng.between(5, 60)));
    for (auto& v : counts) v = static_cast<std::size_t>(rng.between(1, 40));
    auto t = percentile_thresholds(counts, 0);
    std::sort(counts.begin(), counts.end());
    const std::size_t n = counts.size();
    std::size_t r20 = (20 * n + 99) / 100, r80 = (80 * n + 99) / 100;
    CHECK(t.p20 == counts[r20 - 1]);
    CHECK(t.p80 == counts[r80 - 1]);
  }
}

namespace {

// 10 authors with 2 papers, 40 with 5 and 10 with 10; the prolific ones
// write their first two papers with one-paper helpers.
Corpus separable_corpus() {
  std::vector<Paper> papers;
  int serial = 0;
  auto add = [&](std::vector<std::string> authors, std::vector<macroflow::testing::Use> uses = {}) {
    papers.push_back(make_paper(fmt::format("q{:05d}", serial), Month::from_index(24000 + serial % 200).str().c_str(),
                                std::move(authors), std::move(uses)));
    ++serial;
  };
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k < 2; ++k) add({fmt::format("low{}", i)});
  for (int i = 0; i < 40; ++i)
    for (int k = 0; k < 5; ++k) add({fmt::format("mid{}", i)});
  for (int i = 0; i < 10; ++i) {
    add({fmt::format("high{}", i), fmt::format("helper{}a", i)});
    add({fmt::format("high{}", i), fmt::format("helper{}b", i)});
    for (int k = 0; k < 8; ++k) add({fmt::format("high{}", i)});
  }
  return Corpus(std::move(papers));
}

}  // namespace

TEST_CASE("fitness classes and a separating feature") {
  Corpus c = separable_corpus();
  auto task = build_fitness_classes(c, 2);
  CHECK(task.thresholds.p20 == 5);
  CHECK(task.thresholds.p80 == 5);
  CHECK(task.thresholds.eligible == 60);
  CHECK(task.low.size() == 10);
  CHECK(task.high.size() == 10);
  auto r = predict_author_fitness(c, 2, AuthorFeature::coauthor_count, 7);
  CHECK(r.accuracy == 1.0);
  CHECK(r.n_low == 10);
  CHECK(r.n_high == 10);
  // No macro use anywhere: the rate is NaN for everyone and gets imputed.
  CHECK(std::isnan(author_feature(c, task.low[0], 2, AuthorFeature::name_change_rate)));
  auto flat = predict_author_fitness(c, 2, AuthorFeature::name_change_rate, 7);
  CHECK(flat.accuracy == 0.5);
  CHECK_THROWS_AS(build_fitness_classes(c, 3), EmptyInputError);  // low authors have 2 papers
}

TEST_CASE("author features on a hand-built history") {
  const std::string other = "\\operatorname{sgn}\\left(#1\\right)";
  Corpus c({make_paper("p1", "2000-01", {"A", "B"}, {{"u", body}}),
            make_paper("p2", "2000-02", {"A", "C"}, {{"v", body}, {"w", other}}),
            make_paper("p3", "2000-03", {"A"}, {{"v", body}, {"w", other}}),
            make_paper("p4", "2000-04", {"A", "D"}, {{"x", body}})});
  AuthorIndex a = c.author_index(AuthorId("A"));
  CHECK(author_feature(c, a, 3, AuthorFeature::coauthor_count) == 2.0);
  CHECK(author_feature(c, a, 3, AuthorFeature::total_macro_uses) == 5.0);
  CHECK(author_feature(c, a, 3, AuthorFeature::distinct_bodies) == 2.0);
  CHECK(author_feature(c, a, 3, AuthorFeature::name_change_rate) == doctest::Approx(1.0 / 3.0));
  CHECK(author_feature(c, a, 4, AuthorFeature::name_change_rate) == doctest::Approx(2.0 / 4.0));
  CHECK(author_feature(c, a, 4, AuthorFeature::coauthor_count) == 3.0);
}

TEST_CASE("prefix discipline: features need only the first theta papers") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Corpus c = random_corpus(seed, 300, 12, 6);
    for (std::size_t theta : {5u, 20u}) {
      for (AuthorIndex a = 0; a < c.authors().size(); ++a) {
        auto mine = c.papers_of(a);
        if (mine.size() < theta) continue;
        Corpus cut = c.prefix(mine[theta - 1] + 1);
        AuthorIndex b = cut.author_index(c.author(a));
        for (AuthorFeature f : {AuthorFeature::name_change_rate, AuthorFeature::coauthor_count,
                                AuthorFeature::total_macro_uses, AuthorFeature::distinct_bodies}) {
          double full = author_feature(c, a, theta, f);
          double part = author_feature(cut, b, theta, f);
          if (std::isnan(full))
            CHECK(std::isnan(part));
          else
            CHECK(full == part);
        }
      }
    }
  }
}

TEST_CASE("names round trip") {
  for (AuthorFeature f : {AuthorFeature::name_change_rate, AuthorFeature::coauthor_count,
                          AuthorFeature::total_macro_uses, AuthorFeature::distinct_bodies})
    CHECK(parse_author_feature(to_string(f)) == f);
  for (MacroSet s : {MacroSet::all, MacroSet::wide_spread, MacroSet::narrow_spread})
    CHECK(parse_macro_set(to_string(s)) == s);
  CHECK_THROWS_AS(parse_macro_set("huge"), std::invalid_argument);
}
