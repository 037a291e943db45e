#pragma once

#include <span>
#include <vector>

#include "macroflow/corpus.hpp"
#include "macroflow/inheritance.hpp"

namespace macroflow {

// Empirical CDF with ties stacked: one step per distinct value.
struct CdfSeries {
  std::vector<double> values;     // distinct, increasing
  std::vector<double> fractions;  // fraction of the sample <= values[i]
};

// Throws EmptyInputError on an empty sample.
CdfSeries cdf(std::span<const double> values);

// Authors reached from the seed over all authors in the graph, where the
// members of every source node count individually.
double largest_reachable_fraction(const InheritanceGraph& graph);

enum class WidthStatistic { median, mean };

// Trees from each graph's seed, grouped by their maximum BFS depth. Index i
// of the per-depth vectors is depth i.
struct DepthProfile {
  int group = 0;
  std::size_t trees = 0;
  std::vector<double> mean_months;  // mean months from the seed paper to the node's first use
  std::vector<double> width;        // statistic over trees of the node count at the depth
};

std::vector<DepthProfile> depth_time_profile(std::span<const InheritanceGraph> graphs);
std::vector<DepthProfile> width_profile(std::span<const InheritanceGraph> graphs,
                                        WidthStatistic statistic = WidthStatistic::median);
// Both of the above in one pass.
std::vector<DepthProfile> depth_profile(std::span<const InheritanceGraph> graphs,
                                        WidthStatistic statistic = WidthStatistic::median);

// Global experience of the teaching author minus that of the learner, both at
// the learner's first-use paper, for every edge.
std::vector<double> experience_differences(std::span<const InheritanceGraph> graphs, const Corpus& corpus);
CdfSeries edge_experience_differences(std::span<const InheritanceGraph> graphs, const Corpus& corpus);

}  // namespace macroflow
