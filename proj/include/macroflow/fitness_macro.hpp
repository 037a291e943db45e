#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "macroflow/corpus.hpp"
#include "macroflow/logistic.hpp"

namespace macroflow {

// Lower median of the fitness values that are at least k. Throws
// EmptyInputError when none qualifies.
std::size_t sigma_from_fitness(std::vector<std::size_t> fitness, std::size_t k);

struct SigmaRow {
  std::size_t k = 0;
  std::size_t sigma = 0;
  std::size_t instances = 0;  // bodies with fitness >= k
};

// Fitness of a body is its number of distinct users.
SigmaRow sigma(const Corpus& corpus, std::span<const MacroIndex> macros, std::size_t k);

struct BodyFeatures {
  std::size_t length = 0;           // code points
  std::size_t dollar_count = 0;
  std::size_t non_alnum_count = 0;  // code points other than ASCII letters and digits
  std::size_t max_brace_depth = 0;  // unescaped braces
};

// Counts on the normalized body.
BodyFeatures body_features(std::string_view body);

struct Clustering {
  double local_mean = 0.0;  // nodes of degree < 2 contribute 0
  double global = 0.0;      // 3 * triangles / connected triples, 0 without triples
};

Clustering clustering(std::size_t nodes, std::span<const std::pair<std::size_t, std::size_t>> edges);

inline constexpr std::size_t macro_feature_count = 11;
extern const std::array<std::string_view, macro_feature_count> macro_feature_names;

struct MacroFeatureVector {
  double papers_to_half_k = 0;
  double papers_to_k = 0;
  double months_to_half_k = 0;
  double months_to_k = 0;
  double mean_adopter_experience = 0;
  double local_clustering_mean = 0;
  double global_clustering = 0;
  double body_length = 0;
  double dollar_count = 0;
  double non_alnum_count = 0;
  double max_brace_depth = 0;
  PaperPos cutoff = 0;  // paper of the k-th adopter

  std::array<double, macro_feature_count> values() const;
};

// Adopters are ordered by first-use paper, then by author order on it. All
// features come from papers up to the one holding the k-th adopter. Throws
// EmptyInputError when the body never reaches k adopters.
MacroFeatureVector extract_features(const Corpus& corpus, MacroIndex macro, std::size_t k);

enum class FeatureSubset { all, speed, non_speed, body, structural };

const char* to_string(FeatureSubset subset);
FeatureSubset parse_feature_subset(std::string_view text);  // throws std::invalid_argument
std::vector<std::size_t> subset_columns(FeatureSubset subset);

struct MacroTask {
  std::size_t k = 0;
  std::size_t sigma = 0;
  std::vector<MacroIndex> macros;
  std::vector<MacroFeatureVector> features;
  std::vector<int> labels;  // fitness >= sigma
};

MacroTask build_macro_task(const Corpus& corpus, std::span<const MacroIndex> macros, std::size_t k,
                           unsigned jobs = 1);

inline constexpr std::size_t min_macro_instances = 50;

struct MacroPrediction {
  double accuracy = 0.0;
  std::size_t n_instances = 0;
};

// Throws EmptyInputError with fewer than 50 instances or a single-class split.
MacroPrediction train_predict(const MacroTask& task, FeatureSubset subset, std::uint64_t seed,
                              const LogisticOptions& options = {});

}  // namespace macroflow
