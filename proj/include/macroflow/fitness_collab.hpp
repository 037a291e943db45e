#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "macroflow/corpus.hpp"
#include "macroflow/inheritance.hpp"

namespace macroflow {

// Strongest inheritance relation between two co-authors at their first joint
// paper, over all macros.
enum class EdgeClass { internal, terminal, non_edge };

struct CollabPair {
  AuthorId u;  // u < v
  AuthorId v;
  PaperPos first_joint = 0;
  std::string paper;
  Month month;
  EdgeClass edge_class = EdgeClass::non_edge;
  std::size_t future_joint_papers = 0;  // joint papers after first_joint
};

// One pair per co-authoring couple, ordered by (first joint paper, u, v). An
// edge counts for the pair only when it is dated at their first joint paper,
// in either direction.
std::vector<CollabPair> enumerate_first_collaborations(const Corpus& corpus,
                                                       std::span<const InheritanceGraph> graphs);

enum class Setting { internal_vs_nonedge, internal_vs_terminal, terminal_vs_nonedge, edge_vs_nonedge };

const char* to_string(Setting setting);
const char* to_string(EdgeClass edge_class);

struct BinResult {
  int bin_start_year = 0;  // two-year bins starting on even years
  std::size_t n_pairs = 0;
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
  double win_percentage = 0.0;  // ties count as half a win
};

struct MatchedComparison {
  Setting setting = Setting::internal_vs_nonedge;
  std::vector<BinResult> bins;
  std::size_t matched = 0;
  std::size_t dropped_treatments = 0;  // no disjoint control left in the month
  double win_percentage = 0.0;         // over all bins
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (treatment, control) indices into the input
};

// Within each month, each treatment pair (first category of the setting) is
// matched with a control pair (second category) drawn uniformly without
// replacement among those sharing no author with it. Throws EmptyInputError
// when no month yields a match.
MatchedComparison match_and_compare(std::span<const CollabPair> pairs, Setting setting, std::uint64_t seed);

// Any edge versus no edge.
MatchedComparison arbitrary_vs_edge(std::span<const CollabPair> pairs, std::uint64_t seed);

// Permutes edge classes among the pairs of each month: the null model in
// which edge class carries no information about longevity.
std::vector<CollabPair> permute_edge_classes(std::vector<CollabPair> pairs, std::uint64_t seed);

}  // namespace macroflow
