#include "macroflow/fitness_author.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "macroflow/error.hpp"
#include "macroflow/parallel.hpp"
#include "macroflow/stats.hpp"

namespace macroflow {

namespace {

// Name under which `paper` uses the body; the paper must use it.
const std::string& name_at(const Corpus& corpus, MacroIndex macro, PaperPos paper) {
  auto occ = corpus.occurrences(macro);
  auto it = std::lower_bound(occ.begin(), occ.end(), paper,
                             [](const MacroOccurrence& o, PaperPos p) { return o.paper < p; });
  return it->name;
}

std::size_t paper_rank(const Corpus& corpus, AuthorIndex author, PaperPos paper) {
  auto mine = corpus.papers_of(author);
  return static_cast<std::size_t>(std::lower_bound(mine.begin(), mine.end(), paper) - mine.begin());
}

std::span<const PaperPos> first_papers(const Corpus& corpus, AuthorIndex author, std::size_t theta) {
  auto mine = corpus.papers_of(author);
  return mine.first(std::min(theta, mine.size()));
}

}  // namespace

bool in_macro_set(const Corpus& corpus, MacroIndex macro, MacroSet set) {
  const std::size_t users = corpus.distinct_users(macro);
  switch (set) {
    case MacroSet::all: return true;
    case MacroSet::wide_spread: return users >= wide_spread_min_users;
    case MacroSet::narrow_spread: return users >= narrow_spread_min_users && users <= narrow_spread_max_users;
  }
  return false;
}

const char* to_string(MacroSet set) {
  switch (set) {
    case MacroSet::all: return "all";
    case MacroSet::wide_spread: return "wide";
    case MacroSet::narrow_spread: return "narrow";
  }
  return "?";
}

const char* to_string(LifeStage life) { return life == LifeStage::full ? "full" : "early"; }

MacroSet parse_macro_set(std::string_view text) {
  for (MacroSet s : {MacroSet::all, MacroSet::wide_spread, MacroSet::narrow_spread})
    if (text == to_string(s)) return s;
  throw std::invalid_argument(fmt::format("unknown macro set '{}'", text));
}

std::vector<NameChangeEvent> name_change_events(const Corpus& corpus, AuthorIndex author, MacroIndex macro) {
  auto mine = corpus.papers_of(author);
  std::vector<NameChangeEvent> out;
  const std::string* previous = nullptr;
  std::size_t x = 0;
  for (const MacroOccurrence& o : corpus.occurrences(macro)) {
    if (!std::binary_search(mine.begin(), mine.end(), o.paper)) continue;
    ++x;
    if (previous) out.push_back({x, o.name != *previous, o.paper});
    previous = &o.name;
  }
  return out;
}

std::vector<NameChangeEvent> name_change_events(const Corpus& corpus, const AuthorId& author, const MacroKey& macro) {
  return name_change_events(corpus, corpus.author_index(author), corpus.macro_index(macro));
}

NameChangeCurve name_change_curve(const Corpus& corpus, std::size_t theta, MacroSet set, LifeStage life,
                                  unsigned jobs) {
  NameChangeCurve curve;
  curve.theta = theta;
  curve.macro_set = set;
  curve.life = life;

  std::vector<char> member(corpus.authors().size(), 0);
  for (AuthorIndex a = 0; a < member.size(); ++a)
    if (corpus.papers_of(a).size() > theta) {
      member[a] = 1;
      ++curve.authors;
    }
  if (curve.authors == 0) throw EmptyInputError(fmt::format("no author has more than {} papers", theta));

  const std::size_t n_macros = corpus.macros().size();
  // Per macro: events and changes at x = 0..max_curve_x.
  std::vector<std::vector<std::size_t>> events(n_macros), changes(n_macros);
  parallel_for(n_macros, jobs, [&](std::size_t mi) {
    const auto m = static_cast<MacroIndex>(mi);
    if (!in_macro_set(corpus, m, set)) return;
    auto& ev = events[mi];
    auto& ch = changes[mi];
    ev.assign(max_curve_x + 1, 0);
    ch.assign(max_curve_x + 1, 0);
    std::unordered_map<AuthorIndex, std::pair<std::size_t, const std::string*>> last;
    for (const MacroOccurrence& o : corpus.occurrences(m)) {
      for (AuthorIndex a : corpus.paper_authors(o.paper)) {
        if (!member[a]) continue;
        auto& [uses, name] = last[a];
        ++uses;
        const bool changed = name && *name != o.name;
        const bool had_previous = name != nullptr;
        name = &o.name;
        if (!had_previous || uses > max_curve_x) continue;
        if (life == LifeStage::early && paper_rank(corpus, a, o.paper) >= early_life_papers) continue;
        ++ev[uses];
        if (changed) ++ch[uses];
      }
    }
  });

  for (std::size_t x = 2; x <= max_curve_x; ++x) {
    CurvePoint p;
    p.x = x;
    for (std::size_t m = 0; m < n_macros; ++m) {
      if (events[m].empty()) continue;
      p.events += events[m][x];
      p.changes += changes[m][x];
    }
    if (p.events) p.f = static_cast<double>(p.changes) / static_cast<double>(p.events);
    curve.points.push_back(p);
  }
  return curve;
}

Thresholds percentile_thresholds(std::vector<std::size_t> paper_counts, std::size_t theta) {
  std::erase_if(paper_counts, [theta](std::size_t c) { return c < theta; });
  if (paper_counts.size() < min_threshold_authors)
    throw EmptyInputError(fmt::format("{} authors with at least {} papers; need {}", paper_counts.size(), theta,
                                      min_threshold_authors));
  Thresholds t;
  t.eligible = paper_counts.size();
  t.p20 = nearest_rank(paper_counts, 20.0);
  t.p80 = nearest_rank(std::move(paper_counts), 80.0);
  return t;
}

Thresholds percentile_thresholds(const Corpus& corpus, std::size_t theta) {
  std::vector<std::size_t> counts;
  counts.reserve(corpus.authors().size());
  for (AuthorIndex a = 0; a < corpus.authors().size(); ++a) counts.push_back(corpus.papers_of(a).size());
  return percentile_thresholds(std::move(counts), theta);
}

const char* to_string(AuthorFeature feature) {
  switch (feature) {
    case AuthorFeature::name_change_rate: return "name-change-rate";
    case AuthorFeature::coauthor_count: return "coauthor-count";
    case AuthorFeature::total_macro_uses: return "total-macro-uses";
    case AuthorFeature::distinct_bodies: return "distinct-bodies";
  }
  return "?";
}

AuthorFeature parse_author_feature(std::string_view text) {
  for (AuthorFeature f : {AuthorFeature::name_change_rate, AuthorFeature::coauthor_count,
                          AuthorFeature::total_macro_uses, AuthorFeature::distinct_bodies})
    if (text == to_string(f)) return f;
  throw std::invalid_argument(fmt::format("unknown author feature '{}'", text));
}

double author_feature(const Corpus& corpus, AuthorIndex author, std::size_t theta, AuthorFeature feature) {
  auto papers = first_papers(corpus, author, theta);
  switch (feature) {
    case AuthorFeature::name_change_rate: {
      std::unordered_map<MacroIndex, const std::string*> last;
      std::size_t events = 0, changed = 0;
      for (PaperPos p : papers)
        for (MacroIndex m : corpus.paper_macros(p)) {
          const std::string& name = name_at(corpus, m, p);
          auto [it, first] = last.emplace(m, &name);
          if (first) continue;
          ++events;
          if (*it->second != name) ++changed;
          it->second = &name;
        }
      if (events == 0) return std::numeric_limits<double>::quiet_NaN();
      return static_cast<double>(changed) / static_cast<double>(events);
    }
    case AuthorFeature::coauthor_count: {
      std::set<AuthorIndex> seen;
      for (PaperPos p : papers)
        for (AuthorIndex a : corpus.paper_authors(p))
          if (a != author) seen.insert(a);
      return static_cast<double>(seen.size());
    }
    case AuthorFeature::total_macro_uses: {
      std::size_t uses = 0;
      for (PaperPos p : papers) uses += corpus.paper_macros(p).size();
      return static_cast<double>(uses);
    }
    case AuthorFeature::distinct_bodies: {
      std::set<MacroIndex> seen;
      for (PaperPos p : papers)
        for (MacroIndex m : corpus.paper_macros(p)) seen.insert(m);
      return static_cast<double>(seen.size());
    }
  }
  return 0.0;
}

FitnessClassTask build_fitness_classes(const Corpus& corpus, std::size_t theta) {
  FitnessClassTask task;
  task.theta = theta;
  task.thresholds = percentile_thresholds(corpus, theta);
  for (AuthorIndex a = 0; a < corpus.authors().size(); ++a) {
    const std::size_t n = corpus.papers_of(a).size();
    if (n < theta) continue;
    if (n < task.thresholds.p20)
      task.low.push_back(a);
    else if (n > task.thresholds.p80)
      task.high.push_back(a);
  }
  if (task.low.size() < min_class_authors || task.high.size() < min_class_authors)
    throw EmptyInputError(fmt::format("theta {}: {} low and {} high authors; need {} in each class", theta,
                                      task.low.size(), task.high.size(), min_class_authors));
  return task;
}

AuthorPrediction predict_author_fitness(const Corpus& corpus, const FitnessClassTask& task, AuthorFeature feature,
                                        std::uint64_t seed, const LogisticOptions& options) {
  FeatureMatrix rows;
  std::vector<int> labels;
  for (AuthorIndex a : task.low) {
    rows.push_back({author_feature(corpus, a, task.theta, feature)});
    labels.push_back(0);
  }
  for (AuthorIndex a : task.high) {
    rows.push_back({author_feature(corpus, a, task.theta, feature)});
    labels.push_back(1);
  }
  Evaluation e = train_and_evaluate(rows, labels, seed, options);
  return {e.accuracy, task.low.size(), task.high.size()};
}

AuthorPrediction predict_author_fitness(const Corpus& corpus, std::size_t theta, AuthorFeature feature,
                                        std::uint64_t seed, const LogisticOptions& options) {
  return predict_author_fitness(corpus, build_fitness_classes(corpus, theta), feature, seed, options);
}

}  // namespace macroflow
