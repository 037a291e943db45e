#include "macroflow/graph_stats.hpp"

#include <algorithm>
#include <map>

#include "macroflow/error.hpp"
#include "macroflow/stats.hpp"

namespace macroflow {

CdfSeries cdf(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("cdf of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  CdfSeries out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.values.push_back(sorted[i]);
    out.fractions.push_back(static_cast<double>(i + 1) / n);
  }
  out.fractions.back() = 1.0;
  return out;
}

double largest_reachable_fraction(const InheritanceGraph& graph) {
  std::size_t authors = graph.author_count();
  if (authors == 0) throw EmptyInputError("inheritance graph has no authors");
  std::size_t reached = reachable_set(graph, find_seed(graph)).size();
  return static_cast<double>(reached) / static_cast<double>(authors);
}

namespace {

struct GroupAccumulator {
  std::size_t trees = 0;
  std::vector<double> month_sum;
  std::vector<std::size_t> month_count;
  std::vector<std::vector<double>> widths;  // per depth, one entry per tree
};

std::vector<DepthProfile> profile(std::span<const InheritanceGraph> graphs, bool months, bool widths,
                                  WidthStatistic statistic) {
  std::map<int, GroupAccumulator> groups;
  for (const InheritanceGraph& g : graphs) {
    if (g.sources().empty()) continue;
    NodeId seed = find_seed(g);
    BfsTree tree = bfs_tree(g, seed);
    GroupAccumulator& acc = groups[tree.max_depth];
    const std::size_t levels = static_cast<std::size_t>(tree.max_depth) + 1;
    ++acc.trees;
    acc.month_sum.resize(levels, 0.0);
    acc.month_count.resize(levels, 0);
    acc.widths.resize(levels);
    std::vector<double> width(levels, 0.0);
    const Month root_date = g.node(seed).date;
    for (NodeId n : tree.order) {
      auto d = static_cast<std::size_t>(tree.depth[n]);
      acc.month_sum[d] += months_between(root_date, g.node(n).date);
      ++acc.month_count[d];
      width[d] += 1.0;
    }
    for (std::size_t d = 0; d < levels; ++d) acc.widths[d].push_back(width[d]);
  }

  std::vector<DepthProfile> out;
  for (auto& [group, acc] : groups) {
    DepthProfile p;
    p.group = group;
    p.trees = acc.trees;
    for (std::size_t d = 0; d < acc.month_sum.size(); ++d) {
      if (months) p.mean_months.push_back(acc.month_sum[d] / static_cast<double>(acc.month_count[d]));
      if (widths)
        p.width.push_back(statistic == WidthStatistic::median ? median(acc.widths[d]) : mean(acc.widths[d]));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<DepthProfile> depth_time_profile(std::span<const InheritanceGraph> graphs) {
  return profile(graphs, true, false, WidthStatistic::median);
}

std::vector<DepthProfile> width_profile(std::span<const InheritanceGraph> graphs, WidthStatistic statistic) {
  return profile(graphs, false, true, statistic);
}

std::vector<DepthProfile> depth_profile(std::span<const InheritanceGraph> graphs, WidthStatistic statistic) {
  return profile(graphs, true, true, statistic);
}

std::vector<double> experience_differences(std::span<const InheritanceGraph> graphs, const Corpus& corpus) {
  std::vector<double> out;
  for (const InheritanceGraph& g : graphs) {
    for (const InheritanceEdge& e : g.edges()) {
      PaperPos at = corpus.position_of(e.paper);
      auto teacher = global_experience(corpus, corpus.author_index(e.src_author), at);
      auto learner = global_experience(corpus, corpus.author_index(g.node(e.dst).author), at);
      out.push_back(static_cast<double>(teacher) - static_cast<double>(learner));
    }
  }
  return out;
}

CdfSeries edge_experience_differences(std::span<const InheritanceGraph> graphs, const Corpus& corpus) {
  std::vector<double> diffs = experience_differences(graphs, corpus);
  return cdf(diffs);
}

}  // namespace macroflow
