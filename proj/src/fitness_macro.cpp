#include "macroflow/fitness_macro.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "macroflow/error.hpp"
#include "macroflow/macro_extract.hpp"
#include "macroflow/parallel.hpp"
#include "macroflow/stats.hpp"

namespace macroflow {

const std::array<std::string_view, macro_feature_count> macro_feature_names{
    "papers_to_half_k", "papers_to_k",        "months_to_half_k",  "months_to_k",
    "mean_adopter_experience", "local_clustering_mean", "global_clustering", "body_length",
    "dollar_count",     "non_alnum_count",    "max_brace_depth"};

std::size_t sigma_from_fitness(std::vector<std::size_t> fitness, std::size_t k) {
  std::erase_if(fitness, [k](std::size_t f) { return f < k; });
  if (fitness.empty()) throw EmptyInputError(fmt::format("no macro reaches {} adopters", k));
  return lower_median(std::move(fitness));
}

SigmaRow sigma(const Corpus& corpus, std::span<const MacroIndex> macros, std::size_t k) {
  std::vector<std::size_t> fitness;
  for (MacroIndex m : macros) fitness.push_back(corpus.distinct_users(m));
  SigmaRow row;
  row.k = k;
  row.sigma = sigma_from_fitness(fitness, k);
  row.instances = static_cast<std::size_t>(std::count_if(fitness.begin(), fitness.end(), [k](std::size_t f) { return f >= k; }));
  return row;
}

BodyFeatures body_features(std::string_view body) {
  const std::string text = normalize_body(body);
  BodyFeatures out;
  std::size_t depth = 0;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c & 0xC0) == 0x80) continue;  // UTF-8 continuation byte
    ++out.length;
    if (c == '$') ++out.dollar_count;
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) ++out.non_alnum_count;
    if (escaped) {
      escaped = false;
      continue;
    }
    if (c == '\\') {
      escaped = true;
    } else if (c == '{') {
      out.max_brace_depth = std::max(out.max_brace_depth, ++depth);
    } else if (c == '}' && depth > 0) {
      --depth;
    }
  }
  return out;
}

Clustering clustering(std::size_t nodes, std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::set<std::size_t>> adj(nodes);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    adj.at(a).insert(b);
    adj.at(b).insert(a);
  }
  Clustering out;
  if (nodes == 0) return out;
  double local_sum = 0.0, closed = 0.0, triples = 0.0;
  for (std::size_t v = 0; v < nodes; ++v) {
    const double d = static_cast<double>(adj[v].size());
    if (adj[v].size() < 2) continue;
    std::size_t links = 0;
    for (auto i = adj[v].begin(); i != adj[v].end(); ++i)
      for (auto j = std::next(i); j != adj[v].end(); ++j)
        if (adj[*i].contains(*j)) ++links;
    const double pairs = d * (d - 1) / 2;
    local_sum += static_cast<double>(links) / pairs;
    closed += static_cast<double>(links);  // each triangle counted once per corner
    triples += pairs;
  }
  out.local_mean = local_sum / static_cast<double>(nodes);
  out.global = triples > 0 ? closed / triples : 0.0;
  return out;
}

std::array<double, macro_feature_count> MacroFeatureVector::values() const {
  return {papers_to_half_k, papers_to_k,       months_to_half_k, months_to_k,     mean_adopter_experience,
          local_clustering_mean, global_clustering, body_length,  dollar_count,   non_alnum_count,
          max_brace_depth};
}

MacroFeatureVector extract_features(const Corpus& corpus, MacroIndex macro, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  const std::size_t half = (k + 1) / 2;
  auto occ = corpus.occurrences(macro);

  std::vector<AuthorIndex> adopters;
  std::vector<PaperPos> adopted_at;
  std::unordered_set<AuthorIndex> seen;
  std::size_t papers = 0, papers_half = 0;
  PaperPos half_paper = 0, cutoff = 0;
  for (const MacroOccurrence& o : occ) {
    ++papers;
    for (AuthorIndex a : corpus.paper_authors(o.paper)) {
      if (!seen.insert(a).second || adopters.size() == k) continue;
      adopters.push_back(a);
      adopted_at.push_back(o.paper);
    }
    if (papers_half == 0 && adopters.size() >= half) {
      papers_half = papers;
      half_paper = o.paper;
    }
    if (adopters.size() == k) {
      cutoff = o.paper;
      break;
    }
  }
  if (adopters.size() < k)
    throw EmptyInputError(fmt::format("macro reaches {} adopters, fewer than k = {}", seen.size(), k));

  MacroFeatureVector f;
  f.cutoff = cutoff;
  const Month start = corpus.paper(occ.front().paper).date;
  f.papers_to_half_k = static_cast<double>(papers_half);
  f.papers_to_k = static_cast<double>(papers);
  f.months_to_half_k = months_between(start, corpus.paper(half_paper).date);
  f.months_to_k = months_between(start, corpus.paper(cutoff).date);

  double experience = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    experience += static_cast<double>(global_experience(corpus, adopters[i], adopted_at[i]));
  f.mean_adopter_experience = experience / static_cast<double>(k);

  std::unordered_map<AuthorIndex, std::size_t> slot;
  for (std::size_t i = 0; i < k; ++i) slot.emplace(adopters[i], i);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < k; ++i)
    for (PaperPos p : corpus.papers_of(adopters[i])) {
      if (p > cutoff) break;
      for (AuthorIndex other : corpus.paper_authors(p))
        if (auto it = slot.find(other); it != slot.end() && it->second > i) edges.emplace_back(i, it->second);
    }
  Clustering cc = clustering(k, edges);
  f.local_clustering_mean = cc.local_mean;
  f.global_clustering = cc.global;

  BodyFeatures b = body_features(corpus.macro(macro).body());
  f.body_length = static_cast<double>(b.length);
  f.dollar_count = static_cast<double>(b.dollar_count);
  f.non_alnum_count = static_cast<double>(b.non_alnum_count);
  f.max_brace_depth = static_cast<double>(b.max_brace_depth);
  return f;
}

const char* to_string(FeatureSubset subset) {
  switch (subset) {
    case FeatureSubset::all: return "all";
    case FeatureSubset::speed: return "speed";
    case FeatureSubset::non_speed: return "non-speed";
    case FeatureSubset::body: return "body";
    case FeatureSubset::structural: return "structural";
  }
  return "?";
}

FeatureSubset parse_feature_subset(std::string_view text) {
  for (FeatureSubset s : {FeatureSubset::all, FeatureSubset::speed, FeatureSubset::non_speed, FeatureSubset::body,
                          FeatureSubset::structural})
    if (text == to_string(s)) return s;
  throw std::invalid_argument(fmt::format("unknown feature subset '{}'", text));
}

std::vector<std::size_t> subset_columns(FeatureSubset subset) {
  switch (subset) {
    case FeatureSubset::all: return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    case FeatureSubset::speed: return {0, 1, 2, 3};
    case FeatureSubset::non_speed: return {4, 5, 6, 7, 8, 9, 10};
    case FeatureSubset::body: return {7, 8, 9, 10};
    case FeatureSubset::structural: return {5, 6};
  }
  return {};
}

MacroTask build_macro_task(const Corpus& corpus, std::span<const MacroIndex> macros, std::size_t k, unsigned jobs) {
  MacroTask task;
  task.k = k;
  SigmaRow row = sigma(corpus, macros, k);
  task.sigma = row.sigma;
  for (MacroIndex m : macros)
    if (corpus.distinct_users(m) >= k) task.macros.push_back(m);
  task.features.resize(task.macros.size());
  parallel_for(task.macros.size(), jobs,
               [&](std::size_t i) { task.features[i] = extract_features(corpus, task.macros[i], k); });
  for (MacroIndex m : task.macros) task.labels.push_back(corpus.distinct_users(m) >= task.sigma ? 1 : 0);
  return task;
}

MacroPrediction train_predict(const MacroTask& task, FeatureSubset subset, std::uint64_t seed,
                              const LogisticOptions& options) {
  if (task.features.size() < min_macro_instances)
    throw EmptyInputError(fmt::format("k = {}: {} instances; need {}", task.k, task.features.size(),
                                      min_macro_instances));
  const auto cols = subset_columns(subset);
  FeatureMatrix rows;
  rows.reserve(task.features.size());
  for (const auto& f : task.features) {
    auto all = f.values();
    std::vector<double> row;
    for (std::size_t c : cols) row.push_back(all[c]);
    rows.push_back(std::move(row));
  }
  Evaluation e = train_and_evaluate(rows, task.labels, seed, options);
  return {e.accuracy, task.features.size()};
}

}  // namespace macroflow
