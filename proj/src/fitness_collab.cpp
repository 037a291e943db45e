#include "macroflow/fitness_collab.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "macroflow/error.hpp"
#include "macroflow/random.hpp"

namespace macroflow {

namespace {

std::uint64_t pair_key(AuthorIndex a, AuthorIndex b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

struct JointKey {
  PaperPos paper;
  std::uint64_t pair;
  bool operator==(const JointKey&) const = default;
};

struct JointKeyHash {
  std::size_t operator()(const JointKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.pair * 0x9E3779B97F4A7C15ULL ^ k.paper);
  }
};

bool in_category(EdgeClass c, Setting s, bool treatment) {
  switch (s) {
    case Setting::internal_vs_nonedge:
      return treatment ? c == EdgeClass::internal : c == EdgeClass::non_edge;
    case Setting::internal_vs_terminal:
      return treatment ? c == EdgeClass::internal : c == EdgeClass::terminal;
    case Setting::terminal_vs_nonedge:
      return treatment ? c == EdgeClass::terminal : c == EdgeClass::non_edge;
    case Setting::edge_vs_nonedge:
      return treatment ? c != EdgeClass::non_edge : c == EdgeClass::non_edge;
  }
  return false;
}

bool share_author(const CollabPair& a, const CollabPair& b) {
  return a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
}

double percentage(std::size_t wins, std::size_t ties, std::size_t n) {
  return n ? 100.0 * (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) / static_cast<double>(n) : 0.0;
}

}  // namespace

const char* to_string(Setting setting) {
  switch (setting) {
    case Setting::internal_vs_nonedge: return "internal-vs-nonedge";
    case Setting::internal_vs_terminal: return "internal-vs-terminal";
    case Setting::terminal_vs_nonedge: return "terminal-vs-nonedge";
    case Setting::edge_vs_nonedge: return "edge-vs-nonedge";
  }
  return "?";
}

const char* to_string(EdgeClass edge_class) {
  switch (edge_class) {
    case EdgeClass::internal: return "internal";
    case EdgeClass::terminal: return "terminal";
    case EdgeClass::non_edge: return "non-edge";
  }
  return "?";
}

std::vector<CollabPair> enumerate_first_collaborations(const Corpus& corpus,
                                                       std::span<const InheritanceGraph> graphs) {
  std::unordered_map<JointKey, EdgeClass, JointKeyHash> edge_at;
  for (const InheritanceGraph& g : graphs) {
    for (const InheritanceEdge& e : g.edges()) {
      JointKey key{corpus.position_of(e.paper),
                   pair_key(corpus.author_index(e.src_author), corpus.author_index(g.node(e.dst).author))};
      EdgeClass cls = e.kind == EdgeKind::internal ? EdgeClass::internal : EdgeClass::terminal;
      auto [it, fresh] = edge_at.emplace(key, cls);
      if (!fresh && cls == EdgeClass::internal) it->second = cls;
    }
  }

  std::vector<CollabPair> pairs;
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (PaperPos pos = 0; pos < corpus.size(); ++pos) {
    auto authors = corpus.paper_authors(pos);
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < authors.size(); ++i) {
      for (std::size_t j = i + 1; j < authors.size(); ++j) {
        std::uint64_t key = pair_key(authors[i], authors[j]);
        auto [it, inserted] = index.emplace(key, pairs.size());
        if (!inserted) {
          ++pairs[it->second].future_joint_papers;
          continue;
        }
        CollabPair p;
        AuthorIndex lo = std::min(authors[i], authors[j]);
        AuthorIndex hi = std::max(authors[i], authors[j]);
        p.u = corpus.author(lo);
        p.v = corpus.author(hi);
        p.first_joint = pos;
        p.paper = corpus.paper(pos).id;
        p.month = corpus.paper(pos).date;
        if (auto e = edge_at.find({pos, key}); e != edge_at.end()) p.edge_class = e->second;
        fresh.push_back(pairs.size());
        pairs.push_back(std::move(p));
      }
    }
    // Keep (paper, u, v) order within the paper.
    std::sort(pairs.end() - static_cast<std::ptrdiff_t>(fresh.size()), pairs.end(),
              [](const CollabPair& a, const CollabPair& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (std::size_t k = pairs.size() - fresh.size(); k < pairs.size(); ++k)
      index[pair_key(corpus.author_index(pairs[k].u), corpus.author_index(pairs[k].v))] = k;
  }
  return pairs;
}

MatchedComparison match_and_compare(std::span<const CollabPair> pairs, Setting setting, std::uint64_t seed) {
  std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> months;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& slot = months[pairs[i].month.index()];
    if (in_category(pairs[i].edge_class, setting, true))
      slot.first.push_back(i);
    else if (in_category(pairs[i].edge_class, setting, false))
      slot.second.push_back(i);
  }

  Rng rng(seed);
  MatchedComparison out;
  out.setting = setting;
  std::map<int, BinResult> bins;
  std::vector<std::string> unmatched_months;

  for (auto& [month, groups] : months) {
    auto& [treatments, controls] = groups;
    if (treatments.empty()) continue;
    std::size_t matched_here = 0;
    std::vector<std::size_t> candidates;
    for (std::size_t t : treatments) {
      candidates.clear();
      for (std::size_t k = 0; k < controls.size(); ++k)
        if (!share_author(pairs[t], pairs[controls[k]])) candidates.push_back(k);
      if (candidates.empty()) {
        ++out.dropped_treatments;
        continue;
      }
      std::size_t pick = candidates[rng.index(candidates.size())];
      std::size_t c = controls[pick];
      controls.erase(controls.begin() + static_cast<std::ptrdiff_t>(pick));
      out.matches.emplace_back(t, c);

      const int year = Month::from_index(month).year;
      BinResult& bin = bins[year - year % 2];
      bin.bin_start_year = year - year % 2;
      ++bin.n_pairs;
      const auto ft = pairs[t].future_joint_papers;
      const auto fc = pairs[c].future_joint_papers;
      if (ft > fc)
        ++bin.wins;
      else if (ft < fc)
        ++bin.losses;
      else
        ++bin.ties;
      ++matched_here;
    }
    if (matched_here == 0) unmatched_months.push_back(Month::from_index(month).str());
  }

  std::size_t wins = 0, ties = 0;
  for (auto& [year, bin] : bins) {
    bin.win_percentage = percentage(bin.wins, bin.ties, bin.n_pairs);
    out.matched += bin.n_pairs;
    wins += bin.wins;
    ties += bin.ties;
    out.bins.push_back(bin);
  }
  if (out.matched == 0) {
    std::string listed;
    for (const auto& m : unmatched_months) listed += (listed.empty() ? "" : ",") + m;
    throw EmptyInputError(fmt::format("{}: no matchable months{}", to_string(setting),
                                      listed.empty() ? std::string(" (no treatment pairs)") : " (" + listed + ")"));
  }
  out.win_percentage = percentage(wins, ties, out.matched);
  return out;
}

MatchedComparison arbitrary_vs_edge(std::span<const CollabPair> pairs, std::uint64_t seed) {
  return match_and_compare(pairs, Setting::edge_vs_nonedge, seed);
}

std::vector<CollabPair> permute_edge_classes(std::vector<CollabPair> pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::map<int, std::vector<std::size_t>> months;
  for (std::size_t i = 0; i < pairs.size(); ++i) months[pairs[i].month.index()].push_back(i);
  for (auto& [month, idx] : months) {
    std::vector<EdgeClass> classes;
    for (std::size_t i : idx) classes.push_back(pairs[i].edge_class);
    rng.shuffle(classes);
    for (std::size_t k = 0; k < idx.size(); ++k) pairs[idx[k]].edge_class = classes[k];
  }
  return pairs;
}

}  // namespace macroflow
