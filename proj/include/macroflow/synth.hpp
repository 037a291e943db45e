#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "macroflow/corpus.hpp"
#include "macroflow/inheritance.hpp"

namespace macroflow {

struct SynthConfig {
  std::size_t n_authors = 1500;
  std::size_t n_papers = 2000;
  Month start{1991, 1};
  int months_span = 240;
  int team_min = 1;
  int team_max = 5;
  double team_shape = 0.5;           // P(size) ~ exp(-shape * (size - team_min))
  double activity_exponent = 2.5;    // discrete power law of author activity weights
  int career_months = 48;            // half-width of an author's active window at weight 1
  double repeat_collaborator = 0.4;  // chance a co-author is drawn from the lead's past co-authors
  double invention_rate = 0.15;      // new macro per paper
  double transmission_probability = 1.0;  // p_t: each carrier stamps the paper with this chance
  double independent_invention_rate = 0.0;  // epsilon: chance a paper uses an uncarried macro
  double name_change_rate = 0.2;     // baseline chance the writer renames a macro on a paper
  double name_change_decay = 1.0;    // per prior paper of the writer
  std::uint64_t seed = 1;
};

// Planted effect sizes, all in [0, 1] except the follow-up means.
struct FitnessEffects {
  double collab_base = 0.5;   // mean follow-up papers of every co-authoring pair
  double collab_boost = 0.0;  // extra mean for pairs whose first joint paper is an internal transmission
  double loyalty = 0.0;       // prolific authors rename less: r = base * (1 + e * (1 - 2q))
  double macro_appeal = 0.0;  // low-tier macros transmit with p_t * (1 - 0.8 e); style follows tier
};

struct Transmission {
  std::size_t macro = 0;
  AuthorId teacher;
  AuthorId learner;
  std::string paper;
  std::string teacher_origin;  // paper of the teacher's first use
  bool teacher_from_source = false;  // that paper was an invention or independent use
};

struct PlantedMacro {
  std::string body;
  std::string inventing_paper;
  std::vector<std::string> independent_papers;
  bool high_tier = true;
  double appeal = 1.0;
};

struct PlantedAuthor {
  AuthorId id;
  double weight = 1.0;
  double quantile = 0.0;  // rank of the weight in [0, 1]
  double name_change_rate = 0.0;
};

struct PlantedPair {
  AuthorId u;  // u < v
  AuthorId v;
  std::string first_paper;
  bool internal = false;
  std::size_t follow_ups = 0;
};

struct GroundTruth {
  std::vector<PlantedMacro> macros;
  std::vector<Transmission> transmissions;
  std::vector<PlantedAuthor> authors;
  std::vector<PlantedPair> pairs;  // filled by plant_fitness_bias
  FitnessEffects effects;
};

struct SynthResult {
  Corpus corpus;
  GroundTruth truth;
};

// Throws std::invalid_argument for infeasible sizes or probabilities outside [0, 1].
void validate(const SynthConfig& config);

SynthResult generate(const SynthConfig& config);
SynthResult plant_fitness_bias(const SynthConfig& config, const FitnessEffects& effects);

nlohmann::ordered_json truth_to_json(const GroundTruth& truth, const SynthConfig& config);
nlohmann::ordered_json config_to_json(const SynthConfig& config);

struct MismatchReport {
  std::size_t expected = 0;  // planted transmissions
  std::size_t found = 0;     // reconstructed edges
  std::size_t missing = 0;   // planted but not reconstructed
  std::size_t extra = 0;     // reconstructed but not planted
  std::size_t total() const { return missing + extra; }
};

// Compares (origin, learner, paper, teacher) multisets. The origin is
// "source:<paper>" when the teacher sits in a source supernode and
// "author:<id>" otherwise.
MismatchReport edge_mismatches(const InheritanceGraph& graph, const GroundTruth& truth);
MismatchReport edge_mismatches(std::span<const InheritanceGraph> graphs, const GroundTruth& truth);

}  // namespace macroflow
